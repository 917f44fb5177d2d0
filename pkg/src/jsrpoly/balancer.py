"""Balancing of multiple candidate roots.

The key quantities are the depth-k projections q_ij: the polytope grown from
root i alone, projected onto the adjoint leading eigenvector of candidate j.
A balancing vector alpha is k-admissible when alpha_i q_ij < alpha_j for all
i != j; it exists iff every cycle of the q table has product < 1, and it is
found by the log-domain LP

    max y_0   s.t.   y_i - y_j <= -y_0 - log q_ij   (q_ij > 0)

whose solution, when the margin y_0 is positive, gives alpha_i = e^{y_i}.
Pairs with q_ij = 0 impose no constraint; if that leaves the constraint
digraph acyclic the LP is unbounded and the admissible vector is built
directly from maximal path products (the constructive half of the cycle
criterion).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import lp
from .candidates import CandidateSet

PATH_INFLATION = 1e-6


@dataclass
class ProjectionTable:
    k: int
    q: np.ndarray  # r x r, diagonal unused (zero)

    @property
    def r(self) -> int:
        return self.q.shape[0]


@dataclass
class BalancingVector:
    alpha: np.ndarray  # positive, max-normalized to 1
    margin: float  # LP margin y_0 (inf when there are no constraints)
    k_used: int
    snapped: bool = False


def projection_depth_k(
    cands: CandidateSet, k: int, delta_int: float = lp.DEFAULT_INTERIOR_MARGIN
) -> ProjectionTable:
    """q_ij = max |<v_j*, z>| over the depth-k polytope grown from root i."""
    adjoints = _adjoint_stack(cands)
    r = cands.r
    q = np.zeros((r, r))
    for i in range(r):
        pts = _grown_points(cands, [("root", i)], k, delta_int)
        proj = np.abs(adjoints @ pts)  # r x n
        best = proj.max(axis=1)
        for j in range(r):
            if j != i:
                q[i, j] = best[j]
    return ProjectionTable(k=k, q=q)


def q_of_point(
    cands: CandidateSet,
    j: int,
    x: np.ndarray,
    k: int,
    delta_int: float = lp.DEFAULT_INTERIOR_MARGIN,
) -> float:
    """max |<v_j*, P x>| over products P of length <= k (absorbed branches pruned).

    ``j`` indexes the candidate list (0-based).  Pruning is sound because the
    functional's maximum over the symmetrized hull is attained at stored
    vertices.
    """
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        return 0.0
    vstar = cands.eigen[j].adjoint_vector
    if vstar is None:
        raise ValueError("candidate has no adjoint vector (non-simple leading eigenvalue)")
    pts = _grown_points(cands, [("point", x)], k, delta_int)
    return float(np.max(np.abs(vstar @ pts)))


def _adjoint_stack(cands: CandidateSet) -> np.ndarray:
    rows = []
    for ed in cands.eigen:
        if ed.adjoint_vector is None:
            raise ValueError(
                "balancing requires simple unique leading eigenvalues for all candidates"
            )
        rows.append(ed.adjoint_vector)
    return np.vstack(rows)


def _grown_points(cands, sources, k, delta_int) -> np.ndarray:
    from .polytope import grow_tree

    seeds = []
    for kind, payload in sources:
        if kind == "root":
            for l, v in enumerate(cands.roots[payload]):
                seeds.append((v, ("root", payload, l)))
        else:
            seeds.append((payload, ("extra", 0)))
    growth = grow_tree(cands.normalized, seeds, k_max=k, delta_int=delta_int)
    return growth.tree.points()


def cycle_condition(table: ProjectionTable) -> bool:
    """True iff every nontrivial cycle of the q table has product < 1.

    Exhaustive over simple cycles for r <= 8; maximum cycle mean of log q
    (Karp) for larger tables.
    """
    q = table.q
    r = table.r
    if r <= 1:
        return True
    if r <= 8:
        for size in range(2, r + 1):
            for nodes in itertools.combinations(range(r), size):
                first, rest = nodes[0], nodes[1:]
                for perm in itertools.permutations(rest):
                    cyc = (first, *perm)
                    prod = 1.0
                    for s in range(size):
                        prod *= q[cyc[s], cyc[(s + 1) % size]]
                    if prod >= 1.0:
                        return False
        return True
    return _max_cycle_mean_log(q) < 0.0


def _max_cycle_mean_log(q: np.ndarray) -> float:
    """Karp's maximum cycle mean on edge weights log q_ij (q > 0 edges)."""
    r = q.shape[0]
    neg = -math.inf
    w = np.full((r, r), neg)
    for i in range(r):
        for j in range(r):
            if i != j and q[i, j] > 0:
                w[i, j] = math.log(q[i, j])
    d = np.full((r + 1, r), neg)
    d[0, :] = 0.0
    for k in range(1, r + 1):
        for j in range(r):
            best = neg
            for i in range(r):
                if d[k - 1, i] > neg and w[i, j] > neg:
                    best = max(best, d[k - 1, i] + w[i, j])
            d[k, j] = best
    out = neg
    for v in range(r):
        if d[r, v] <= neg:
            continue
        worst = math.inf
        for k in range(r):
            if d[k, v] <= neg:
                continue
            worst = min(worst, (d[r, v] - d[k, v]) / (r - k))
        out = max(out, worst)
    return out if out > neg else -math.inf


def solve_balancing(
    table: ProjectionTable,
    snap: bool = True,
    snap_tol: float = 0.08,
    snap_max_den: int = 16,
) -> BalancingVector | None:
    """Admissible balancing vector from the log-domain LP, or None.

    None means the optimal margin y_0 is nonpositive: no k-admissible vector
    exists at this depth and the caller must deepen k or change candidates.
    Positive alphas are max-normalized; optional snapping moves each entry to
    a nearby low-denominator rational when the snapped vector still satisfies
    strict admissibility (re-checked against the original table).
    """
    r = table.r
    if r <= 1:
        return BalancingVector(np.ones(max(r, 1)), math.inf, table.k)
    pairs = [(i, j) for i in range(r) for j in range(r) if i != j and table.q[i, j] > 0]
    if not pairs:
        return BalancingVector(np.ones(r), math.inf, table.k)

    objective = np.zeros(r + 1)
    objective[0] = 1.0
    constraints = []
    for i, j in pairs:
        coeffs = np.zeros(r + 1)
        coeffs[0] = 1.0
        coeffs[1 + i] = 1.0
        coeffs[1 + j] = -1.0
        constraints.append((coeffs, lp.LEQ, -math.log(table.q[i, j])))
    sol = lp.solve(lp.LpProblem(objective, constraints))

    if sol.status == "Optimal":
        margin = sol.objective_value
        if margin <= 0.0:
            return None
        y = sol.values[1:]
        alpha = np.exp(y - np.max(y))
    elif sol.status == "Unbounded":
        alpha = _path_construction(table.q)
        alpha = alpha / np.max(alpha)
        margin = _margin(alpha, table.q, pairs)
        if margin <= 0.0:
            return None
    else:  # pragma: no cover - the balancing LP is always feasible
        raise lp.LpSolverError("balancing LP reported infeasible")

    vec = BalancingVector(alpha, float(margin), table.k)
    if snap:
        snapped = _snap_alpha(alpha, snap_tol, snap_max_den)
        if snapped is not None and _admissible(snapped, table.q):
            vec = BalancingVector(
                snapped, float(_margin(snapped, table.q, pairs)), table.k, snapped=True
            )
    return vec


def _margin(alpha, q, pairs) -> float:
    return min(math.log(alpha[j] / (alpha[i] * q[i, j])) for i, j in pairs)


def _admissible(alpha, q) -> bool:
    r = q.shape[0]
    return all(
        alpha[i] * q[i, j] < alpha[j]
        for i in range(r)
        for j in range(r)
        if i != j and q[i, j] > 0
    )


def _path_construction(q: np.ndarray) -> np.ndarray:
    """Lemma-style construction when the LP is unbounded (acyclic constraint graph).

    alpha_j = max(1, max over simple paths ending at j of the inflated-q
    product); inflation turns the <= bounds into strict inequalities.
    """
    r = q.shape[0]
    qi = q * (1.0 + PATH_INFLATION)
    best = np.ones(r)

    def dfs(node, product, visited):
        for nxt in range(r):
            if nxt in visited or qi[node, nxt] <= 0:
                continue
            p = product * qi[node, nxt]
            if p > best[nxt]:
                best[nxt] = p
            dfs(nxt, p, visited | {nxt})

    for start in range(r):
        dfs(start, 1.0, {start})
    return best


def _snap_alpha(alpha: np.ndarray, tol: float, max_den: int) -> np.ndarray | None:
    """Smallest-denominator rationals within tol/den relative, else None.

    The window shrinks with the denominator so only genuinely simple
    fractions (1/2, 1/4, 1, ...) are snapped; a far-away 4/11 never wins.
    """
    out = []
    for a in alpha:
        hit = None
        for den in range(1, max_den + 1):
            f = Fraction(float(a)).limit_denominator(den)
            if f > 0 and abs(float(f) - a) <= (tol / den) * max(a, float(f)):
                hit = float(f)
                break
        if hit is None:
            return None
        out.append(hit)
    snapped = np.array(out)
    return snapped / np.max(snapped)
