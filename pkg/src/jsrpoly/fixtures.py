"""Built-in matrix families used across tests, docs and the CLI examples."""

from __future__ import annotations

from fractions import Fraction
from importlib import resources

import numpy as np

from .formats import read_rat_blocks
from .linalg import MatrixFamily, exact_to_float


def data_path(name: str):
    return resources.files("jsrpoly.data").joinpath(name)


def example_pair() -> MatrixFamily:
    """The 2x2 pair with two length-1 s.m.p.: contractions toward the axes.

    A1 fixes (1,0) and contracts along (1,4); A2 fixes (0,1) and contracts
    along (1,-2).  The invariant polytope is the rhombus absco{v1, 3 v2}.
    """
    F = Fraction
    a1 = [[F(1), F(-1, 8)], [F(0), F(1, 2)]]
    a2 = [[F(1, 2), F(0)], [F(1), F(1)]]
    return MatrixFamily(
        (exact_to_float(a1), exact_to_float(a2)),
        exact=(a1, a2),
        labels=("A1", "A2"),
    )


def eightpoint_pair() -> MatrixFamily:
    """Transition pair of the eight-point interpolatory subdivision scheme."""
    blocks = read_rat_blocks(data_path("eightpoint.rat"))
    return MatrixFamily(
        tuple(exact_to_float(b) for b in blocks),
        exact=tuple(blocks),
        labels=("A1", "A2"),
    )


def diagonal_pair(d1=(1.0, 2.0), d2=(3.0, 4.0)) -> MatrixFamily:
    """A reducible toy family (every coordinate axis is invariant)."""
    return MatrixFamily((np.diag(d1), np.diag(d2)))
