"""Product words over the alphabet {1..m}.

A word (w_1, ..., w_n) denotes the matrix product A_{w_1} A_{w_2} ... A_{w_n};
the rightmost letter acts first on vectors.  A word is *simple* when it is not
a power of a shorter word; cyclic rotations of a word share spectral radius,
so enumeration yields one representative (the lexicographically least
rotation) per cyclic class.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

Word = tuple  # tuple[int, ...], letters in 1..m


def evaluate(word: Iterable[int], mats) -> np.ndarray:
    """Product A_{w_1} ... A_{w_n} (rightmost letter applied first to vectors)."""
    mats = getattr(mats, "mats", mats)
    w = tuple(word)
    if not w:
        raise ValueError("empty word")
    out = np.array(mats[w[0] - 1], dtype=float, copy=True)
    for letter in w[1:]:
        out = out @ mats[letter - 1]
    return out


def minimal_period(word: Word) -> int:
    w = tuple(word)
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w == w[:p] * (n // p):
            return p
    return n  # unreachable


def is_simple(word: Word) -> bool:
    """True iff the word is not b^k for any shorter b and k >= 2."""
    return minimal_period(word) == len(tuple(word))


def cyclic_normal_form(word: Word) -> Word:
    """Lexicographically least rotation; equal iff words are cyclic permutations."""
    w = tuple(word)
    return min(w[i:] + w[:i] for i in range(len(w)))


def rotations(word: Word) -> Iterator[Word]:
    w = tuple(word)
    for i in range(len(w)):
        yield w[i:] + w[:i]


def enumerate_necklaces(m: int, n_max: int) -> Iterator[Word]:
    """One representative per cyclic class of simple words, lengths 1..n_max.

    FKM-style successor recursion generating pre-necklaces; keeping only the
    aperiodic outputs (t == n when the recursion bottoms out) gives exactly
    the simple necklace representatives, already in cyclic normal form.
    """
    if m < 1 or n_max < 1:
        raise ValueError("need m >= 1 and n_max >= 1")
    for n in range(1, n_max + 1):
        a = [0] * (n + 1)

        def gen(t: int, p: int) -> Iterator[Word]:
            if t > n:
                if p == n:  # aperiodic only: simple words
                    yield tuple(a[1 : n + 1])
            else:
                a[t] = a[t - p]
                yield from gen(t + 1, p)
                for j in range(a[t - p] + 1, m):
                    a[t] = j
                    yield from gen(t + 1, t)

        for w in gen(1, 1):
            yield tuple(x + 1 for x in w)
