"""Iterative construction of the invariant polytope from balanced roots.

The tree grows level by level: every alive vertex v of the previous level is
multiplied by every generator (generator-major order, vertices by insertion
id) and the image is tested against the *current, growing* vertex set.  An
image is absorbed when it is a clear interior point (gauge <= 1 - delta_int)
or when it duplicates an existing vertex up to sign; otherwise it becomes a
new vertex.  The sign convention is immaterial because the polytope is the
symmetrized hull absco(V).

Duplicate detection is two-tier.  Exact coincidences (re-entries of the
orbit, fixed points of generators, collisions between product paths) agree
to a few ulps and are matched with a ~3-eps relative tolerance against every
stored vertex.  The eigenvector-cycle closure, the one *legitimately*
inexact duplicate (each root's orbit returns to +-v^(1) only up to the
eigensolver residual), is matched with a loose 1e-9 tolerance against the
level-0 seed points only.  Keeping the general tier at ulp level matters:
non-terminating runs produce genuinely new vertices that approach a limit
geometrically, and a loose general tolerance would fake convergence.

Termination with an empty level certifies invariance: A_i P subset P for all
generators, so the candidate products are spectrum maximizing and the joint
spectral radius equals the normalization rho_c.  The certificate's residual
is re-derived after the run by one independent membership sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lp
from .candidates import CandidateSet

DUP_TOL = 3 * np.finfo(float).eps  # exact-coincidence tier, relative
ANCHOR_TOL = 1e-9  # orbit-closure tier, against level-0 seeds only
TERMINATED = "terminated"
MAX_ITERATIONS = "max_iterations"


@dataclass
class Vertex:
    point: np.ndarray
    level: int
    parent: int | None
    letter: int | None  # 1-based generator index; point = A_letter @ parent
    origin: tuple  # ("root", cand_index, orbit_pos) | ("extra", i) | ("child",)


@dataclass
class VertexTree:
    vertices: list = field(default_factory=list)
    alive: list = field(default_factory=list)
    level: int = 0

    def points(self) -> np.ndarray:
        """Vertex points as columns (d x n)."""
        return np.column_stack([v.point for v in self.vertices])

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass
class GrowthResult:
    tree: VertexTree
    status: str
    iterations: int
    log: list  # per-iteration dicts: k, new, total, max_t


def _near(pts: np.ndarray, x: np.ndarray, tol_abs: float) -> bool:
    """Is x within tol_abs (max-norm) of +-(some column of pts)?"""
    if pts.size == 0:
        return False
    d_minus = np.max(np.abs(pts - x[:, None]), axis=0)
    d_plus = np.max(np.abs(pts + x[:, None]), axis=0)
    return bool(min(d_minus.min(), d_plus.min()) <= tol_abs)


def grow_tree(
    mats,
    seeds,
    k_max: int,
    delta_int: float = lp.DEFAULT_INTERIOR_MARGIN,
    dup_tol: float = DUP_TOL,
    anchor_tol: float = ANCHOR_TOL,
    parallel: bool = False,
    on_iteration=None,
) -> GrowthResult:
    """Run the vertex-growing loop from ``seeds`` [(point, origin), ...].

    Sequential mode tests each image against the growing vertex set; parallel
    mode tests a whole level against the frozen previous set and then runs a
    second intra-batch absorption pass (may keep a superset of vertices).
    """
    mats = getattr(mats, "mats", mats)
    tree = VertexTree()
    for point, origin in seeds:
        tree.vertices.append(Vertex(np.asarray(point, dtype=float), 0, None, None, origin))
    tree.alive = list(range(len(tree.vertices)))
    anchors = tree.points()
    status = MAX_ITERATIONS
    iterations = 0
    log = []

    def absorbed_as_duplicate(pts, x):
        scale = max(1.0, float(np.max(np.abs(x))))
        if _near(pts, x, dup_tol * scale):
            return True
        return _near(anchors, x, anchor_tol * scale)

    for k in range(1, k_max + 1):
        expand = _expand_batch if parallel else _expand_sequential
        new_ids = expand(tree, mats, k, delta_int, absorbed_as_duplicate, log)
        tree.alive = new_ids
        tree.level = k
        iterations = k
        if on_iteration is not None:
            on_iteration(log[-1])
        if not new_ids:
            status = TERMINATED
            break
    return GrowthResult(tree, status, iterations, log)


def _expand_sequential(tree, mats, k, delta_int, is_duplicate, log):
    new_ids = []
    max_t = 0.0
    pts = tree.points()
    for gi, a in enumerate(mats, start=1):
        for vid in tree.alive:
            x = a @ tree.vertices[vid].point
            if is_duplicate(pts, x):
                max_t = max(max_t, 1.0)
                continue
            t, interior = lp.absco_membership(pts, x, delta_int=delta_int)
            max_t = max(max_t, t) if np.isfinite(t) else max_t
            if interior:
                continue
            tree.vertices.append(Vertex(x, k, vid, gi, ("child",)))
            new_ids.append(len(tree.vertices) - 1)
            pts = np.column_stack([pts, x])
    log.append({"k": k, "new": len(new_ids), "total": len(tree.vertices), "max_t": max_t})
    return new_ids


def _expand_batch(tree, mats, k, delta_int, is_duplicate, log):
    """Test the whole level against the frozen snapshot, then absorb intra-batch."""
    snapshot = tree.points()
    survivors = []
    max_t = 0.0
    for gi, a in enumerate(mats, start=1):
        for vid in tree.alive:
            x = a @ tree.vertices[vid].point
            if is_duplicate(snapshot, x):
                max_t = max(max_t, 1.0)
                continue
            t, interior = lp.absco_membership(snapshot, x, delta_int=delta_int)
            max_t = max(max_t, t) if np.isfinite(t) else max_t
            if not interior:
                survivors.append((x, vid, gi))
    new_ids = []
    pts = snapshot
    for x, vid, gi in survivors:
        if is_duplicate(pts, x):
            continue
        _t, interior = lp.absco_membership(pts, x, delta_int=delta_int)
        if interior:
            continue
        tree.vertices.append(Vertex(x, k, vid, gi, ("child",)))
        new_ids.append(len(tree.vertices) - 1)
        pts = np.column_stack([pts, x])
    log.append({"k": k, "new": len(new_ids), "total": len(tree.vertices), "max_t": max_t})
    return new_ids


@dataclass
class JsrCertificate:
    status: str  # terminated | max_iterations
    jsr: float  # = rho_c, certified only when status == terminated
    smp_words: list
    alpha: object  # balancer.BalancingVector
    vertices: list  # stored representatives; the polytope is absco(+-vertices)
    iterations: int
    max_invariance_residual: float
    extra_vertices: list
    tree: VertexTree = field(repr=False, default=None)
    log: list = field(repr=False, default_factory=list)

    @property
    def vertex_count(self) -> int:
        """Stored representatives (the paper's 'n' in 'n x 2 vertices')."""
        return len(self.vertices)

    @property
    def vertex_count_signed(self) -> int:
        return 2 * len(self.vertices)


def run(
    cands: CandidateSet,
    alpha: BalancingVector,
    extras=(),
    k_max: int = 50,
    delta_int: float = lp.DEFAULT_INTERIOR_MARGIN,
    parallel: bool = False,
    on_iteration=None,
) -> JsrCertificate:
    """Algorithm: V_0 = {alpha_j H_j} + extras, grow until an empty level.

    On termination the certified jsr is rho_c and the candidate words are
    spectrum maximizing; the invariance residual is recomputed post hoc with
    fresh membership solves over the final vertex set.
    """
    seeds = []
    for i, root in enumerate(cands.roots):
        for l, v in enumerate(root):
            seeds.append((alpha.alpha[i] * v, ("root", i, l)))
    extras = [np.asarray(x, dtype=float) for x in extras]
    for i, x in enumerate(extras):
        seeds.append((x, ("extra", i)))

    growth = grow_tree(
        cands.normalized,
        seeds,
        k_max=k_max,
        delta_int=delta_int,
        parallel=parallel,
        on_iteration=on_iteration,
    )
    residual = invariance_residual(cands.normalized, growth.tree.points(), delta_int)
    return JsrCertificate(
        status=growth.status,
        jsr=cands.rho_c,
        smp_words=list(cands.words),
        alpha=alpha,
        vertices=[v.point for v in growth.tree.vertices],
        iterations=growth.iterations,
        max_invariance_residual=residual,
        extra_vertices=extras,
        tree=growth.tree,
        log=growth.log,
    )


def invariance_residual(mats, points: np.ndarray, delta_int: float = lp.DEFAULT_INTERIOR_MARGIN) -> float:
    """max over (vertex, generator) of (gauge(A_i v) - 1)+, by fresh LP solves."""
    mats = getattr(mats, "mats", mats)
    worst = 0.0
    n = points.shape[1]
    for a in mats:
        images = a @ points
        for j in range(n):
            t, _ = lp.absco_membership(points, images[:, j], delta_int=delta_int)
            if not np.isfinite(t):
                return float("inf")
            worst = max(worst, t - 1.0)
    return max(worst, 0.0)


def flatness_report(tree: VertexTree, eps: float) -> list:
    """Axes onto which the polytope projects shorter than eps.

    Q_i = max |<e_i, v>| over all stored vertices; returns [(axis, Q_i)] for
    the flagged axes, 1-based axis indices.
    """
    pts = tree.points()
    q = np.max(np.abs(pts), axis=1)
    return [(i + 1, float(q[i])) for i in range(len(q)) if q[i] < eps]


def propose_extras(
    cands: CandidateSet,
    flagged_axes,
    eps: float,
    k: int,
    delta_int: float = lp.DEFAULT_INTERIOR_MARGIN,
) -> list:
    """Extra initial vertices eps * e_i / max_j q_j^(k)(e_i) for flagged axes.

    The scaling guarantees max_j q_j^(k)(x_i) = eps, so the convergence
    criterion q_j(x_i) < 1 holds whenever eps < 1; a warning is emitted
    otherwise.
    """
    import warnings

    from .balancer import q_of_point

    d = cands.normalized.dim
    out = []
    for axis in flagged_axes:
        e = np.zeros(d)
        e[axis - 1] = 1.0
        qs = [q_of_point(cands, j, e, k, delta_int=delta_int) for j in range(cands.r)]
        top = max(qs)
        if top == 0.0:
            raise ValueError(f"axis {axis}: all projections vanish, cannot scale an extra vertex")
        if eps >= 1.0:
            warnings.warn(f"extra vertex on axis {axis} violates q_j(x) < 1")
        out.append((eps / top) * e)
    return out
