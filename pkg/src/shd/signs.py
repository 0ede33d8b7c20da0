"""Permutation combinatorics and the Koszul sign engine.

Every sign convention in this package funnels through this module.  The
conventions are:

* A permutation ``p`` on ``{1..n}`` is stored as the tuple of its 1-based
  images.  Acting on a word ``w`` produces the word ``w'`` with
  ``w'[i] = w[p(i)]`` (see :func:`act`).
* ``compose(p, q)`` acts as "first ``q``, then ``p``":
  ``act(compose(p, q), w) == act(p, act(q, w))``.
* ``koszul_sign(p, degrees)`` is the sign picked up when homogeneous
  symbols of the given degrees are rearranged from ``x_1 ... x_n`` into
  ``x_{p(1)} ... x_{p(n)}``: one factor ``(-1)**(d_a*d_b)`` for every pair
  of symbols whose relative order flips.  With all degrees odd this is the
  ordinary signature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``{1..n}`` given by its tuple of 1-based images."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.images}")

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        """Image of the 1-based point ``i``."""
        return self.images[i - 1]

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(1, n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, im in enumerate(self.images, start=1):
            inv[im - 1] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(im == i for i, im in enumerate(self.images, start=1))


def act(p: Permutation, word: Sequence) -> tuple:
    """Rearrange ``word`` so that slot ``i`` receives ``word[p(i)]``."""
    if len(word) != p.size:
        raise ValueError(f"word length {len(word)} != permutation size {p.size}")
    return tuple(word[im - 1] for im in p.images)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """The permutation acting as "first ``q``, then ``p``"."""
    if p.size != q.size:
        raise ValueError("size mismatch")
    return Permutation(tuple(q(p(i)) for i in range(1, p.size + 1)))


def sgn(p: Permutation) -> int:
    """Parity of ``p``: +1 for even, -1 for odd."""
    seen = [False] * p.size
    sign = 1
    for i in range(p.size):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = p.images[j] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def koszul_sign(p: Permutation, degrees: Sequence[int]) -> int:
    """Koszul sign of rearranging symbols of the given ``degrees`` by ``p``.

    ``degrees[i-1]`` is the degree sitting in source slot ``i``; the
    rearranged word carries ``degrees[p(i)-1]`` in slot ``i``.
    """
    if len(degrees) != p.size:
        raise ValueError(f"degree vector length {len(degrees)} != {p.size}")
    exponent = 0
    images = p.images
    for a, b in itertools.combinations(range(p.size), 2):
        if images[a] > images[b]:
            exponent += degrees[images[a] - 1] * degrees[images[b] - 1]
    return -1 if exponent % 2 else 1


def unshuffles(a: int, b: int) -> list[Permutation]:
    """All ``(a, b)``-unshuffles of ``{1..a+b}``.

    These are the permutations increasing on slots ``1..a`` and on slots
    ``a+1..a+b``.  Enumeration is lexicographic on the first block, so the
    identity comes first and the output order is reproducible.
    """
    if a < 0 or b < 0:
        raise ValueError("block sizes must be nonnegative")
    n = a + b
    out = []
    universe = range(1, n + 1)
    for first in itertools.combinations(universe, a):
        rest = tuple(i for i in universe if i not in first)
        out.append(Permutation(first + rest))
    return out


def sorting_permutation(keys: Sequence) -> Permutation:
    """The permutation ``p`` with ``act(p, keys)`` sorted (stably)."""
    order = sorted(range(len(keys)), key=lambda i: (keys[i], i))
    return Permutation(tuple(i + 1 for i in order))


def all_permutations(n: int) -> Iterable[Permutation]:
    for images in itertools.permutations(range(1, n + 1)):
        yield Permutation(images)
