"""Minimal exact (Fraction) matrix arithmetic for load-time fixture checks.

Float linear algebra carries the computation; these helpers only certify
that shipped rational data satisfies its defining identities exactly.
"""

from __future__ import annotations

from fractions import Fraction


def matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def matvec(a, v):
    return [sum(row[j] * v[j] for j in range(len(v))) for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def identity(n):
    one, zero = Fraction(1), Fraction(0)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def solve(a, b):
    """X with a X = b, by exact Gauss-Jordan; raises on singular a."""
    n, m = len(a), len(b[0])
    aug = [[a[i][j] for j in range(n)] + [b[i][j] for j in range(m)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix in exact solve")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def rank(rows):
    m = [list(r) for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    rk = 0
    for col in range(n_cols):
        piv = next((r for r in range(rk, n_rows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        pv = m[rk][col]
        m[rk] = [x / pv for x in m[rk]]
        for r in range(n_rows):
            if r != rk and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rk])]
        rk += 1
    return rk
