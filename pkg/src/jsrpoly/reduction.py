"""Common invariant subspaces and block reductions.

A reducible family is handled by transforming to block (lower-)triangular
form in a basis [canonical complement | subspace basis]; the JSR of the
family is then the maximum of the block JSRs.  The subspace basis is kept in
orbit-generation order (not orthonormalized) so that restricted blocks come
out in the same basis a human derivation would use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import MatrixFamily, operator_norm, spectral_radius

TOL_INV = 1e-9


class NotInvariantError(ValueError):
    pass


@dataclass
class InvariantSubspace:
    basis: list  # spanning vectors, generation order
    residual: float  # max_i max_b dist(A_i b, span(basis))

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass
class BlockSplit:
    s: np.ndarray  # change of basis, blocks in column order
    blocks: list  # list of MatrixFamily, one per diagonal block in S order
    sizes: list


def _dist_to_span(qmat: np.ndarray, x: np.ndarray) -> float:
    """Distance from x to the column span of the orthonormal qmat."""
    if qmat.size == 0:
        return float(np.linalg.norm(x))
    return float(np.linalg.norm(x - qmat @ (qmat.T @ x)))


def orbit_span(
    family: MatrixFamily, seeds, max_len: int = 50, rank_tol: float = 1e-8
) -> InvariantSubspace:
    """Close the seeds under all generators until the rank stabilizes.

    BFS over (queue order, generator order); a candidate joins the basis when
    its distance to the current span exceeds rank_tol relative to its norm.
    """
    basis: list = []
    qcols: list = []

    def admit(x) -> bool:
        x = np.asarray(x, dtype=float)
        nrm = np.linalg.norm(x)
        if nrm == 0.0:
            return False
        qmat = np.column_stack(qcols) if qcols else np.zeros((x.size, 0))
        resid = x - qmat @ (qmat.T @ x) if qcols else x.copy()
        if np.linalg.norm(resid) <= rank_tol * nrm:
            return False
        basis.append(x)
        qcols.append(resid / np.linalg.norm(resid))
        return True

    queue = []
    for s in seeds:
        if admit(s):
            queue.append(len(basis) - 1)
    depth = 0
    while queue and len(basis) < family.dim and depth < max_len:
        next_queue = []
        for idx in queue:
            for a in family.mats:
                if admit(a @ basis[idx]):
                    next_queue.append(len(basis) - 1)
        queue = next_queue
        depth += 1

    qmat = np.column_stack(qcols)
    residual = 0.0
    for a in family.mats:
        for b in basis:
            residual = max(residual, _dist_to_span(qmat, a @ b))
    return InvariantSubspace(basis=basis, residual=residual)


def subspace_from_basis(family: MatrixFamily, basis) -> InvariantSubspace:
    """Wrap an explicitly known basis, computing its invariance residual."""
    basis = [np.asarray(b, dtype=float) for b in basis]
    qmat, _ = np.linalg.qr(np.column_stack(basis))
    residual = 0.0
    for a in family.mats:
        for b in basis:
            residual = max(residual, _dist_to_span(qmat, a @ b))
    return InvariantSubspace(basis=basis, residual=residual)


def block_triangularize(
    family: MatrixFamily, subspaces, tol_inv: float = TOL_INV
) -> BlockSplit:
    """Similarity transform to block triangular (or diagonal) form.

    ``subspaces`` is one InvariantSubspace or a list whose dimensions sum to
    at most d.  The basis is [canonical complement | W_1 | W_2 | ...] with the
    complement chosen greedily by canonical index; with a full direct sum the
    complement is empty and the result is block diagonal.  Off-diagonal
    blocks above the diagonal must vanish within tol_inv (NotInvariantError
    otherwise); coupling blocks below are discarded.
    """
    if isinstance(subspaces, InvariantSubspace):
        subspaces = [subspaces]
    d = family.dim
    for w in subspaces:
        if not 0 < w.dim <= d:
            raise ValueError("subspace dimension out of range")
        if w.residual > tol_inv:
            raise NotInvariantError(f"subspace residual {w.residual:.3e} exceeds {tol_inv}")
    wcols = [np.column_stack([np.asarray(b, float) for b in w.basis]) for w in subspaces]
    total = sum(w.dim for w in subspaces)
    if total > d:
        raise ValueError("subspace dimensions exceed the ambient dimension")

    comp = _canonical_complement(np.hstack(wcols), d - total)
    cols = ([np.eye(d)[:, comp]] if comp else []) + wcols
    s = np.hstack(cols)
    if np.linalg.matrix_rank(s) < d:
        raise NotInvariantError("change-of-basis matrix is singular")

    sizes = ([d - total] if comp else []) + [w.dim for w in subspaces]
    fams = [[] for _ in sizes]
    offsets = np.cumsum([0] + sizes)
    scale = max(operator_norm(a, "linf") for a in family.mats)
    for a in family.mats:
        t = np.linalg.solve(s, a @ s)
        for bi in range(len(sizes)):
            for bj in range(bi + 1, len(sizes)):
                blk = t[offsets[bi]:offsets[bi + 1], offsets[bj]:offsets[bj + 1]]
                worst = float(np.max(np.abs(blk)))
                if worst > tol_inv * max(1.0, scale):
                    raise NotInvariantError(
                        f"upper block ({bi},{bj}) is nonzero ({worst:.3e}); "
                        "subspace is not invariant"
                    )
        for bi in range(len(sizes)):
            fams[bi].append(t[offsets[bi]:offsets[bi + 1], offsets[bi]:offsets[bi + 1]].copy())
    return BlockSplit(
        s=s,
        blocks=[MatrixFamily(tuple(mats)) for mats in fams],
        sizes=sizes,
    )


def _canonical_complement(wcols: np.ndarray, need: int) -> list:
    """Greedy canonical indices keeping [e_J | W] full rank."""
    d = wcols.shape[0]
    qmat, _ = np.linalg.qr(wcols)
    chosen: list = []
    cols = list(qmat.T)
    for k in range(d):
        if len(chosen) == need:
            break
        e = np.zeros(d)
        e[k] = 1.0
        resid = e.copy()
        for qc in cols:
            resid -= (qc @ resid) * qc
        if np.linalg.norm(resid) > 1e-8:
            chosen.append(k)
            cols.append(resid / np.linalg.norm(resid))
    if len(chosen) < need:
        raise NotInvariantError("could not complete a canonical complement")
    return chosen


def jsr_from_blocks(block_jsrs) -> float:
    """JSR of a block-triangular family = max of the block JSRs."""
    vals = list(block_jsrs)
    if not vals:
        raise ValueError("no blocks")
    return float(max(vals))


def irreducibility_check(
    family: MatrixFamily, trials: int = 5, seed: int = 0, tol_inv: float = TOL_INV
) -> bool:
    """Probabilistic: orbit closures of random seeds and of generator
    eigenvectors must fill the space, for the family and its adjoint.

    Returns False as soon as some certified orbit (residual <= tol_inv)
    stabilizes below full dimension; True is "no reduction found".
    """
    rng = np.random.default_rng(seed)
    d = family.dim
    for fam in (family, family.adjoint()):
        seeds = [rng.standard_normal(d) for _ in range(trials)]
        for a in fam.mats:
            vals, vecs = np.linalg.eig(a)
            for idx in range(len(vals)):
                if abs(vals[idx].imag) <= 1e-9 * max(1.0, abs(vals[idx])):
                    seeds.append(vecs[:, idx].real)
        for s in seeds:
            if np.linalg.norm(s) == 0:
                continue
            span = orbit_span(fam, [s])
            if span.dim < d and span.residual <= tol_inv:
                return False
    return True


def norm_extremality_check(family: MatrixFamily, norm: str = "l1") -> bool:
    """max_i ||A_i|| <= 1 (+1e-12): the unit ball of the norm is invariant.

    When true and some generator has spectral radius 1, the JSR is certified
    to be 1 without running the polytope algorithm.  For families of
    symmetric matrices the l2 path reduces to comparing spectral radii.
    """
    return max(operator_norm(a, norm) for a in family.mats) <= 1.0 + 1e-12


def symmetric_family_jsr(family: MatrixFamily, tol: float = 1e-12) -> float | None:
    """JSR = max spectral radius for symmetric families (else None)."""
    for a in family.mats:
        if np.max(np.abs(a - a.T)) > tol * max(1.0, np.max(np.abs(a))):
            return None
    return max(spectral_radius(a) for a in family.mats)
