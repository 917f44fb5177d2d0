"""Exact joint spectral radius of matrix families via balanced invariant polytopes."""

from .linalg import MatrixFamily, leading_eigen, spectral_radius
from .candidates import CandidateSet, bracket, search_candidates
from .balancer import BalancingVector, cycle_condition, projection_depth_k, solve_balancing
from .polytope import JsrCertificate, run

__all__ = [
    "MatrixFamily",
    "spectral_radius",
    "leading_eigen",
    "CandidateSet",
    "search_candidates",
    "bracket",
    "BalancingVector",
    "projection_depth_k",
    "cycle_condition",
    "solve_balancing",
    "JsrCertificate",
    "run",
]

__version__ = "0.1.0"
