"""Exact-rational graded linear algebra.

Finite-dimensional Z-graded vector spaces over Q with a labeled basis,
sparse graded vectors, and homogeneous multilinear maps given by their
values on basis tuples.  Degrees are cohomological throughout (a
differential has degree +1) and the desuspension ``shift(-1)`` lowers
every basis degree by one.

Sign conventions:

* ``compose_at(f, l, g)`` evaluates as
  ``f(v_1, ..., v_{l-1}, g(v_l, ...), ...)`` with the Koszul sign
  ``(-1)**(deg(g) * (|v_1| + ... + |v_{l-1}|))`` from carrying ``g`` past
  the bypassed arguments.
* ``map_sigma_act(p, f)`` is ``(p . f)(v_1, ..., v_n) =
  koszul_sign(p, degrees) * f(v_{p(1)}, ..., v_{p(n)})``.
* ``suspend_map`` realizes ``f' = (down) f (up)^(tensor n)``; the entry at
  a basis tuple picks up ``(-1)**(sum_i (n-i) * |v_i|)`` with degrees
  taken in the desuspended space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .signs import Permutation, act, koszul_sign

Scalar = Fraction


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) or isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


@dataclass(frozen=True)
class GradedVectorSpace:
    """Finite graded space with a labeled basis: tuples ``(label, degree)``."""

    basis: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        labels = [label for label, _ in self.basis]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate basis labels")

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[str, int]]) -> "GradedVectorSpace":
        return GradedVectorSpace(tuple((str(l), int(d)) for l, d in pairs))

    @cached_property
    def degrees(self) -> dict[str, int]:
        return dict(self.basis)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def degree(self, label: str) -> int:
        try:
            return self.degrees[label]
        except KeyError:
            raise KeyError(f"unknown basis label {label!r}") from None

    def shift(self, by: int = -1) -> "GradedVectorSpace":
        """Same labels with every degree shifted by ``by`` (``-1`` = desuspension)."""
        return GradedVectorSpace(tuple((l, d + by) for l, d in self.basis))

    def zero(self) -> "GradedVector":
        return GradedVector(self, {})

    def vector(self, coeffs: Mapping[str, object]) -> "GradedVector":
        return GradedVector(self, {l: _as_fraction(c) for l, c in coeffs.items()})

    def basis_vector(self, label: str) -> "GradedVector":
        self.degree(label)
        return GradedVector(self, {label: Fraction(1)})

    def tuple_degree(self, labels: Sequence[str]) -> int:
        return sum(self.degree(l) for l in labels)


class GradedVector:
    """Sparse vector: map basis label -> nonzero rational coefficient."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: GradedVectorSpace, coeffs: Mapping[str, Fraction]):
        clean = {}
        for label, c in coeffs.items():
            space.degree(label)
            c = _as_fraction(c)
            if c != 0:
                clean[label] = c
        self.space = space
        self.coeffs = clean

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int | None:
        """Degree of a homogeneous vector, ``None`` for zero."""
        degs = {self.space.degree(l) for l in self.coeffs}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"vector is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def coefficient(self, label: str) -> Fraction:
        return self.coeffs.get(label, Fraction(0))

    def items(self):
        return self.coeffs.items()

    def __add__(self, other: "GradedVector") -> "GradedVector":
        if other.space != self.space:
            raise ValueError("space mismatch")
        out = dict(self.coeffs)
        for l, c in other.coeffs.items():
            out[l] = out.get(l, Fraction(0)) + c
        return GradedVector(self.space, out)

    def __sub__(self, other: "GradedVector") -> "GradedVector":
        return self + (-other)

    def __neg__(self) -> "GradedVector":
        return self.scale(-1)

    def scale(self, c) -> "GradedVector":
        c = _as_fraction(c)
        return GradedVector(self.space, {l: c * v for l, v in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedVector)
            and self.space == other.space
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.space, frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = [f"{c}*{l}" for l, c in sorted(self.coeffs.items())]
        return " + ".join(parts)

    def relabel_into(self, space: GradedVectorSpace) -> "GradedVector":
        """The same formal combination read in another space with equal labels."""
        return GradedVector(space, dict(self.coeffs))


class MultilinearMap:
    """Homogeneous multilinear map ``V^(x n) -> V`` as a sparse basis table.

    ``entries`` maps an n-tuple of basis labels to the image vector; absent
    tuples map to zero.  Arity 0 is allowed (the map "is" an element of the
    space).  The constructor enforces homogeneity: every output term has
    degree ``sum(input degrees) + degree``.
    """

    __slots__ = ("space", "arity", "degree", "entries")

    def __init__(
        self,
        space: GradedVectorSpace,
        arity: int,
        degree: int,
        entries: Mapping[tuple[str, ...], GradedVector | Mapping[str, object]],
    ):
        if arity < 0:
            raise ValueError("arity must be >= 0")
        self.space = space
        self.arity = int(arity)
        self.degree = int(degree)
        table: dict[tuple[str, ...], GradedVector] = {}
        for inputs, value in entries.items():
            inputs = tuple(inputs)
            if len(inputs) != arity:
                raise ValueError(f"entry {inputs} has wrong arity (expected {arity})")
            vec = value if isinstance(value, GradedVector) else space.vector(value)
            if vec.space != space:
                raise ValueError("entry value lives in a different space")
            if vec.is_zero():
                continue
            want = space.tuple_degree(inputs) + self.degree
            for label in vec.coeffs:
                if space.degree(label) != want:
                    raise ValueError(
                        f"inhomogeneous entry {inputs} -> {label}: "
                        f"got degree {space.degree(label)}, expected {want}"
                    )
            table[inputs] = vec
        self.entries = table

    @staticmethod
    def zero(space: GradedVectorSpace, arity: int, degree: int) -> "MultilinearMap":
        return MultilinearMap(space, arity, degree, {})

    @staticmethod
    def identity(space: GradedVectorSpace) -> "MultilinearMap":
        return MultilinearMap(
            space, 1, 0, {(l,): space.basis_vector(l) for l in space.labels}
        )

    @staticmethod
    def constant(vector: GradedVector) -> "MultilinearMap":
        """Arity-0 map representing a homogeneous element of the space."""
        deg = vector.degree()
        if deg is None:
            raise ValueError("constant map needs a nonzero homogeneous vector")
        return MultilinearMap(vector.space, 0, deg, {(): vector})

    def is_zero(self) -> bool:
        return not self.entries

    def entry(self, inputs: Sequence[str]) -> GradedVector:
        return self.entries.get(tuple(inputs), self.space.zero())

    def apply(self, args: Sequence[GradedVector]) -> GradedVector:
        """Multilinear extension of the basis table."""
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        for a in args:
            if a.space != self.space:
                raise ValueError("argument in wrong space")
        out = self.space.zero()
        supports = [list(a.coeffs.items()) for a in args]

        def rec(i: int, labels: tuple[str, ...], coeff: Fraction):
            nonlocal out
            if coeff == 0:
                return
            if i == len(supports):
                val = self.entries.get(labels)
                if val is not None:
                    out = out + val.scale(coeff)
                return
            for label, c in supports[i]:
                rec(i + 1, labels + (label,), coeff * c)

        rec(0, (), Fraction(1))
        return out

    # -- algebra of maps ------------------------------------------------

    def _check_compatible(self, other: "MultilinearMap") -> None:
        if self.space != other.space or self.arity != other.arity:
            raise ValueError("map shape mismatch")
        if self.entries and other.entries and self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "MultilinearMap") -> "MultilinearMap":
        self._check_compatible(other)
        table: dict[tuple[str, ...], GradedVector] = dict(self.entries)
        for k, v in other.entries.items():
            table[k] = table[k] + v if k in table else v
        degree = self.degree if self.entries or not other.entries else other.degree
        return MultilinearMap(self.space, self.arity, degree, table)

    def __sub__(self, other: "MultilinearMap") -> "MultilinearMap":
        return self + other.scale(-1)

    def __neg__(self) -> "MultilinearMap":
        return self.scale(-1)

    def scale(self, c) -> "MultilinearMap":
        c = _as_fraction(c)
        if c == 0:
            return MultilinearMap.zero(self.space, self.arity, self.degree)
        return MultilinearMap(
            self.space,
            self.arity,
            self.degree,
            {k: v.scale(c) for k, v in self.entries.items()},
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultilinearMap):
            return NotImplemented
        if self.space != other.space or self.arity != other.arity:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.entries == other.entries

    def __hash__(self):
        return hash(
            (self.space, self.arity, frozenset((k, v) for k, v in self.entries.items()))
        )

    def __repr__(self) -> str:
        if self.is_zero():
            return f"MultilinearMap(0; arity={self.arity})"
        lines = [f"{k} -> {v}" for k, v in sorted(self.entries.items())]
        return f"MultilinearMap(arity={self.arity}, degree={self.degree}: " + "; ".join(lines) + ")"

    def first_nonzero(self) -> tuple[tuple[str, ...], GradedVector] | None:
        """Lexicographically first nonzero entry, for deterministic reports."""
        if self.is_zero():
            return None
        k = min(self.entries)
        return k, self.entries[k]


def apply(f: MultilinearMap, args: Sequence[GradedVector]) -> GradedVector:
    return f.apply(args)


def compose_at(f: MultilinearMap, slot: int, g: MultilinearMap) -> MultilinearMap:
    """Partial composition ``f o_slot g`` with Koszul signs.

    The result has arity ``f.arity + g.arity - 1`` and degree
    ``f.degree + g.degree``.
    """
    if f.space != g.space:
        raise ValueError("space mismatch")
    if not 1 <= slot <= f.arity:
        raise ValueError(f"slot {slot} out of range 1..{f.arity}")
    space = f.space
    arity = f.arity + g.arity - 1
    degree = f.degree + g.degree
    table: dict[tuple[str, ...], GradedVector] = {}
    for fin, fout in f.entries.items():
        prefix = fin[: slot - 1]
        suffix = fin[slot:]
        hook = fin[slot - 1]
        sign = -1 if (g.degree * space.tuple_degree(prefix)) % 2 else 1
        for gin, gout in g.entries.items():
            c = gout.coefficient(hook)
            if c == 0:
                continue
            key = prefix + gin + suffix
            add = fout.scale(sign * c)
            table[key] = table[key] + add if key in table else add
    return MultilinearMap(space, arity, degree, table)


def map_sigma_act(p: Permutation, f: MultilinearMap) -> MultilinearMap:
    """Symmetric-group action ``(p . f)(v) = koszul(p) * f(v_{p(1)}, ...)``."""
    if p.size != f.arity:
        raise ValueError("arity mismatch")
    pinv = p.inverse()
    space = f.space
    table: dict[tuple[str, ...], GradedVector] = {}
    for fin, fout in f.entries.items():
        key = act(pinv, fin)
        degs = [space.degree(l) for l in key]
        sign = koszul_sign(p, degs)
        add = fout.scale(sign)
        table[key] = table[key] + add if key in table else add
    return MultilinearMap(space, f.arity, f.degree, table)


def _check_shift_pair(source: GradedVectorSpace, target: GradedVectorSpace, by: int) -> None:
    if target != source.shift(by):
        raise ValueError("spaces are not a suspension pair (labels or degrees differ)")


def suspend_map(f: MultilinearMap, target: GradedVectorSpace | None = None) -> MultilinearMap:
    """Transport ``f`` on ``A`` to ``f'`` on the desuspension ``V = shift(A, -1)``.

    ``deg f' = deg f + arity - 1``; the entry at a tuple of labels equals
    the entry of ``f`` times ``(-1)**(sum_i (n-i) * deg_V(v_i))``.
    """
    source = f.space
    V = source.shift(-1) if target is None else target
    _check_shift_pair(source, V, -1)
    n = f.arity
    table: dict[tuple[str, ...], GradedVector] = {}
    for fin, fout in f.entries.items():
        exponent = sum((n - i) * V.degree(l) for i, l in enumerate(fin, start=1))
        sign = -1 if exponent % 2 else 1
        table[fin] = fout.relabel_into(V).scale(sign)
    return MultilinearMap(V, n, f.degree + n - 1, table)


def desuspend_map(f: MultilinearMap, target: GradedVectorSpace | None = None) -> MultilinearMap:
    """Inverse of :func:`suspend_map` (same diagonal signs)."""
    V = f.space
    A = V.shift(1) if target is None else target
    _check_shift_pair(A, V, -1)
    n = f.arity
    table: dict[tuple[str, ...], GradedVector] = {}
    for fin, fout in f.entries.items():
        exponent = sum((n - i) * V.degree(l) for i, l in enumerate(fin, start=1))
        sign = -1 if exponent % 2 else 1
        table[fin] = fout.relabel_into(A).scale(sign)
    return MultilinearMap(A, n, f.degree - n + 1, table)


@dataclass(frozen=True)
class SymmetryViolation:
    """Adjacent-transposition witness: swapping ``slot, slot+1`` at ``inputs`` fails."""

    slot: int
    inputs: tuple[str, ...]


def symmetry_defect(f: MultilinearMap, mode: str) -> SymmetryViolation | None:
    """First basis tuple violating graded (anti)symmetry, or ``None``.

    ``mode='symmetric'`` demands ``tau . f == f`` for adjacent transpositions
    ``tau`` (with the Koszul sign built into the action); ``'antisymmetric'``
    demands ``tau . f == -f``.
    """
    if mode not in ("symmetric", "antisymmetric"):
        raise ValueError("mode must be 'symmetric' or 'antisymmetric'")
    if f.arity < 2:
        return None
    want = 1 if mode == "symmetric" else -1
    for slot in range(1, f.arity):
        images = list(range(1, f.arity + 1))
        images[slot - 1], images[slot] = images[slot], images[slot - 1]
        tau = Permutation(tuple(images))
        diff = map_sigma_act(tau, f) - f.scale(want)
        witness = diff.first_nonzero()
        if witness is not None:
            return SymmetryViolation(slot, witness[0])
    return None


def symmetrize(f: MultilinearMap) -> MultilinearMap:
    """Sum of ``p . f`` over the full symmetric group (graded symmetrization)."""
    from .signs import all_permutations

    out = MultilinearMap.zero(f.space, f.arity, f.degree)
    for p in all_permutations(f.arity):
        out = out + map_sigma_act(p, f)
    return out
