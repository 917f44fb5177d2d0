"""Dense real linear-algebra primitives for the polytope machinery.

Spectral radii, leading (and adjoint leading) eigenvectors, operator norms
and singular-value diagnostics.  Everything runs in double precision with
explicit tolerances; exact rational entries, when a family carries them,
are provenance metadata verified at load time.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

DEFAULT_EIGEN_TOL = 1e-9

RationalMatrix = list  # list[list[Fraction]]


class EigenConvergenceError(RuntimeError):
    """Eigen-solver failed; carries a hash of the offending matrix."""

    def __init__(self, matrix: np.ndarray, detail: str = ""):
        self.matrix_hash = matrix_hash(matrix)
        super().__init__(f"eigen solver failed on matrix {self.matrix_hash}: {detail}")


class ComplexLeadingError(ValueError):
    """The dominant eigenvalue has a nonreal part beyond tolerance.

    Families whose candidate products have complex leading eigenvalues are
    outside the supported scope.
    """


class DegeneratePairingError(ValueError):
    """Adjoint pairing (v*, v) vanished although the eigenvalue looked simple."""


def matrix_hash(a: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(a, dtype=np.float64).tobytes()).hexdigest()[:16]


@dataclass(frozen=True)
class MatrixFamily:
    """An ordered family of m real d x d matrices.

    ``exact`` optionally carries the entries as Fractions (one rational
    matrix per member); floats must then round-trip from the rationals.
    """

    mats: tuple
    exact: tuple | None = None
    labels: tuple | None = None

    def __post_init__(self):
        mats = tuple(np.asarray(a, dtype=float) for a in self.mats)
        object.__setattr__(self, "mats", mats)
        if not mats:
            raise ValueError("empty family")
        d = mats[0].shape[0]
        for a in mats:
            if a.shape != (d, d):
                raise ValueError(f"family matrices must all be {d}x{d}, got {a.shape}")
            if not np.all(np.isfinite(a)):
                raise ValueError("non-finite entry in family")
        if self.exact is not None:
            if len(self.exact) != len(mats):
                raise ValueError("exact entry count mismatch")
            for a, rat in zip(mats, self.exact):
                check_exact_roundtrip(a, rat)

    @property
    def dim(self) -> int:
        return self.mats[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.mats)

    def scaled(self, factor: float) -> "MatrixFamily":
        """Family with every member multiplied by ``factor`` (exactness dropped)."""
        return MatrixFamily(tuple(a * factor for a in self.mats), labels=self.labels)

    def adjoint(self) -> "MatrixFamily":
        ex = None
        if self.exact is not None:
            ex = tuple([list(col) for col in zip(*rat)] for rat in self.exact)
        return MatrixFamily(tuple(a.T.copy() for a in self.mats), exact=ex, labels=self.labels)

    def label(self, i: int) -> str:
        """1-based generator label."""
        if self.labels is not None:
            return self.labels[i - 1]
        return f"A{i}"


def check_exact_roundtrip(a: np.ndarray, rat: RationalMatrix, ulps: int = 1) -> None:
    """Every float entry must equal its rational rounded to double (within ulps)."""
    for i, row in enumerate(rat):
        for j, x in enumerate(row):
            f = float(Fraction(x))
            got = a[i, j]
            if got == f:
                continue
            gap = abs(got - f)
            if gap > ulps * np.spacing(max(abs(f), abs(got))):
                raise ValueError(
                    f"float entry ({i},{j})={got!r} does not round-trip rational {x} ({f!r})"
                )


def exact_to_float(rat: RationalMatrix) -> np.ndarray:
    return np.array([[float(Fraction(x)) for x in row] for row in rat], dtype=float)


@dataclass
class LeadingEigenData:
    """Leading eigenvalue/eigenvector of a single matrix.

    ``adjoint_vector`` is the leading eigenvector of the transpose,
    normalized so that (v*, v) = 1; it is only defined for a simple,
    unique-modulus leading eigenvalue.
    """

    value: float
    vector: np.ndarray
    adjoint_vector: np.ndarray | None
    simple: bool
    unique_modulus: bool
    tol: float = field(default=DEFAULT_EIGEN_TOL, repr=False)


def _eig(a: np.ndarray):
    try:
        return np.linalg.eig(a)
    except np.linalg.LinAlgError as e:  # pragma: no cover - LAPACK failures are rare
        raise EigenConvergenceError(a, str(e)) from e


def spectral_radius(a: np.ndarray) -> float:
    """max |eigenvalue|; >= 10 significant digits for moderate dimensions."""
    a = np.asarray(a, dtype=float)
    if a.size == 1:
        return float(abs(a.ravel()[0]))
    vals = _eig(a)[0]
    return float(np.max(np.abs(vals)))


def linf_normalize(v: np.ndarray) -> np.ndarray:
    """Scale so the first largest-modulus component is +1."""
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0:
        raise ValueError("zero vector")
    return v / v[k]


def leading_eigen(a: np.ndarray, tol: float = DEFAULT_EIGEN_TOL) -> LeadingEigenData:
    """Leading eigen data of ``a``.

    Raises ComplexLeadingError when the dominant eigenvalue is not real
    within tol (unsupported scope), and DegeneratePairingError when the
    adjoint pairing degenerates despite simplicity flags.  Non-simple or
    non-unique-modulus cases are reported through the flags rather than
    silently resolved; callers decide.
    """
    a = np.asarray(a, dtype=float)
    vals, vecs = _eig(a)
    rho = float(np.max(np.abs(vals)))
    if rho == 0.0:
        # nilpotent: leading eigenvalue 0, any kernel vector will do
        vec = vecs[:, int(np.argmin(np.abs(vals)))].real
        return LeadingEigenData(0.0, linf_normalize(vec), None, False, True, tol)

    gap = tol * rho
    dominant = [i for i in range(len(vals)) if abs(abs(vals[i]) - rho) <= gap]
    real_dominant = [i for i in dominant if abs(vals[i].imag) <= gap]
    if not real_dominant:
        raise ComplexLeadingError(
            f"dominant eigenvalue {vals[dominant[0]]:.6g} is not real within tol"
        )
    # prefer the positive real one when +rho and -rho are tied
    lead = max(real_dominant, key=lambda i: vals[i].real)
    lam = float(vals[lead].real)

    simple = True
    unique_modulus = True
    for i in dominant:
        if i == lead:
            continue
        if abs(vals[i] - vals[lead]) <= gap:
            simple = False
        else:
            unique_modulus = False

    v = vecs[:, lead].real
    if np.linalg.norm(vecs[:, lead].imag) > tol * np.linalg.norm(vecs[:, lead]):
        raise ComplexLeadingError("leading eigenvector has a nonreal part beyond tol")
    v = linf_normalize(v)

    resid = np.linalg.norm(a @ v - lam * v)
    if resid > max(tol, 100 * np.finfo(float).eps) * np.linalg.norm(a, 2):
        raise EigenConvergenceError(a, f"leading residual {resid:.3e}")

    adj = None
    if simple and unique_modulus:
        avals, avecs = _eig(a.T)
        j = int(np.argmin(np.abs(avals - lam)))
        w = avecs[:, j].real
        pairing = float(w @ v)
        if abs(pairing) <= tol * np.linalg.norm(w) * np.linalg.norm(v):
            raise DegeneratePairingError(
                "adjoint pairing (v*, v) ~ 0 contradicts the simplicity flags"
            )
        adj = w / pairing
    return LeadingEigenData(lam, v, adj, simple, unique_modulus, tol)


def singular_value_range(vectors) -> tuple[float, float]:
    """(sigma_max, sigma_min) of the matrix whose columns are ``vectors``."""
    cols = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    svals = np.linalg.svd(cols, compute_uv=False)
    return float(svals[0]), float(svals[-1])


def operator_norm(a: np.ndarray, kind: str = "l2") -> float:
    a = np.asarray(a, dtype=float)
    if kind == "l1":
        return float(np.max(np.sum(np.abs(a), axis=0)))
    if kind == "linf":
        return float(np.max(np.sum(np.abs(a), axis=1)))
    if kind == "l2":
        return float(np.linalg.norm(a, 2))
    raise ValueError(f"unknown norm {kind!r}")
