"""Candidate spectrum-maximizing products and family normalization.

The search sweeps all simple necklace representatives up to a length bound,
scores each word w by [rho(P_w)]^(1/|w|), and keeps everything tied with the
maximum (within tau_cand, or the wider opt-in tau_near for near-maximal
candidates).  The family is then normalized by rho_c so every candidate
product has spectral radius one, and each candidate gets its root: the orbit
of the leading eigenvector under the word's prefixes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import words as W
from .linalg import (
    ComplexLeadingError,
    LeadingEigenData,
    MatrixFamily,
    leading_eigen,
    linf_normalize,
    operator_norm,
    spectral_radius,
)


@dataclass
class CandidateSet:
    family: MatrixFamily
    words: list  # cyclic normal forms, shortest first then lexicographic
    values: list  # [rho(P_i)]^(1/n_i) per candidate, on the original family
    rho_c: float
    normalized: MatrixFamily
    eigen: list  # LeadingEigenData of the normalized products
    roots: list  # roots[i] = [v^(1), ..., v^(n_i)]

    @property
    def r(self) -> int:
        return len(self.words)

    def word_label(self, w) -> str:
        parts = []
        for letter in w:
            name = self.family.label(letter)
            if parts and parts[-1][0] == name:
                parts[-1] = (name, parts[-1][1] + 1)
            else:
                parts.append((name, 1))
        return " ".join(n if c == 1 else f"{n}^{c}" for n, c in parts)


@dataclass
class JsrBounds:
    lower: float
    upper: float
    lower_witness: tuple


def search_candidates(
    family: MatrixFamily,
    n_bar: int = 8,
    tau_cand: float = 1e-10,
    tau_near: float | None = None,
    eigen_tol: float = 1e-9,
    check_irreducibility: bool = True,
    seed: int = 0,
) -> CandidateSet:
    """All simple necklaces within tau of the best [rho]^(1/n), with roots.

    Simplicity is a property of the *product*, not just the word: with
    duplicated generators a simple word can still evaluate to a power of a
    shorter candidate's matrix, so ties are deduplicated by the power
    identity P_w = P_u^(|w|/|u|).  Candidates whose leading eigenvector is
    collinear with an earlier one are dropped with a warning (their roots
    coincide, which makes balancing degenerate).  Candidates with complex
    leading eigenvalues are rejected with a warning; rejecting all of them
    is an error.
    """
    if n_bar < 1:
        raise ValueError("n_bar >= 1 required")
    if check_irreducibility:
        from .reduction import irreducibility_check

        if not irreducibility_check(family, seed=seed):
            warnings.warn(
                "family looks reducible (common invariant subspace found); "
                "the JSR should be assembled from diagonal blocks instead"
            )

    scored = []
    for w in W.enumerate_necklaces(family.m, n_bar):
        val = spectral_radius(W.evaluate(w, family)) ** (1.0 / len(w))
        scored.append((w, val))
    best = max(v for _, v in scored)
    tau = max(tau_cand, tau_near or 0.0)
    tied = sorted(
        [(w, v) for w, v in scored if v >= best * (1.0 - tau)],
        key=lambda wv: (len(wv[0]), wv[0]),
    )

    kept: list = []  # (word, value, product matrix), shortest first
    for w, v in tied:
        mat = W.evaluate(w, family)
        scale = max(1.0, float(np.max(np.abs(mat))))
        power_dup = False
        for u, _uv, umat in kept:
            if len(w) % len(u) == 0:
                upow = np.linalg.matrix_power(umat, len(w) // len(u))
                if np.max(np.abs(upow - mat)) <= 1e-12 * scale:
                    power_dup = True
                    break
        if not power_dup:
            kept.append((w, v, mat))

    rho_c = kept[0][1] if kept else best
    normalized = family.scaled(1.0 / rho_c)

    cand_words, cand_vals, eigen, roots = [], [], [], []
    for w, v, _mat in kept:
        prod = W.evaluate(w, normalized)
        try:
            ed = leading_eigen(prod, tol=eigen_tol)
        except ComplexLeadingError as e:
            warnings.warn(f"candidate {w} rejected: {e}")
            continue
        if any(_collinear(ed.vector, prev.vector) for prev in eigen):
            warnings.warn(
                f"candidate {w} rejected: leading eigenvector coincides with an "
                "earlier candidate's root"
            )
            continue
        cand_words.append(w)
        cand_vals.append(v)
        eigen.append(ed)
        roots.append(_root_orbit(w, normalized, ed.vector))
    if not cand_words:
        raise ComplexLeadingError("every tied candidate has a complex leading eigenvalue")

    return CandidateSet(
        family=family,
        words=cand_words,
        values=cand_vals,
        rho_c=rho_c,
        normalized=normalized,
        eigen=eigen,
        roots=roots,
    )


def _collinear(v1: np.ndarray, v2: np.ndarray, tol: float = 1e-10) -> bool:
    return abs(float(v1 @ v2)) >= (1.0 - tol) * np.linalg.norm(v1) * np.linalg.norm(v2)


def _root_orbit(word, normalized: MatrixFamily, v1: np.ndarray) -> list:
    """H = (v^(1), ..., v^(n)): v^(j+1) = A_{d_j} v^(j), d_1 the rightmost letter."""
    orbit = [np.asarray(v1, dtype=float)]
    n = len(word)
    for j in range(1, n):
        letter = word[n - j]
        orbit.append(normalized.mats[letter - 1] @ orbit[-1])
    return orbit


def bracket(family: MatrixFamily, k: int, ell: int) -> JsrBounds:
    """Two-sided bounds: spectral radii of short products vs product norms.

    lower = max over simple necklaces of length <= k of [rho]^(1/n);
    upper = min over lengths l' <= ell of max of ||product||_2^(1/l').
    """
    if k < 1 or ell < 1:
        raise ValueError("k, ell >= 1 required")
    lower, witness = -np.inf, None
    for w in W.enumerate_necklaces(family.m, k):
        val = spectral_radius(W.evaluate(w, family)) ** (1.0 / len(w))
        if val > lower:
            lower, witness = val, w
    upper = np.inf
    for length in range(1, ell + 1):
        worst = _max_norm_of_products(family, length)
        upper = min(upper, worst ** (1.0 / length))
    if lower > upper + 1e-12 * max(1.0, upper):
        raise AssertionError(f"bracket inverted: {lower} > {upper}")
    return JsrBounds(float(lower), float(upper), witness)


def _max_norm_of_products(family: MatrixFamily, length: int) -> float:
    worst = 0.0
    stack = [(np.eye(family.dim), 0)]
    while stack:
        mat, depth = stack.pop()
        if depth == length:
            worst = max(worst, operator_norm(mat, "l2"))
            continue
        for a in family.mats:
            stack.append((mat @ a, depth + 1))
    return worst
