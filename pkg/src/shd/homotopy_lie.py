"""L-infinity structures in the suspended, graded-symmetric convention.

Structure maps ``l_n: V^(x n) -> V`` are graded symmetric of degree +1 and
satisfy the higher Jacobi relations

    sum_{j=1..n} sum_{sigma in Sh(j, n-j)}
        koszul(sigma) * l_{n-j+1}(l_j(v_{sigma(1)}..v_{sigma(j)}), rest) = 0.

The unshuffle sign is exactly the Koszul sign of the rearrangement; no
extra signature factor appears in this convention (signatures belong to
the unsuspended, skew-symmetric presentation, reachable through
``suspend_lie_family``).

Symmetric maps are stored with full tables over all orderings and the
symmetry invariant is enforced at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graded import (
    GradedVector,
    GradedVectorSpace,
    MultilinearMap,
    compose_at,
    map_sigma_act,
    symmetry_defect,
)
from .homotopy_assoc import StructureError, _check_family
from .signs import Permutation, sgn, unshuffles


def _check_symmetric(maps: dict[int, MultilinearMap], kind: str) -> None:
    for n, f in maps.items():
        bad = symmetry_defect(f, "symmetric")
        if bad is not None:
            raise StructureError(
                f"{kind}_{n} is not graded symmetric (slots {bad.slot},{bad.slot + 1} "
                f"at {bad.inputs})"
            )


@dataclass
class LInfinityStructure:
    """Family ``{l_n}`` of graded-symmetric degree-1 maps on ``V``."""

    space: GradedVectorSpace
    maps: dict[int, MultilinearMap]
    truncation: int = 4

    def __post_init__(self) -> None:
        self.maps = {n: f for n, f in self.maps.items() if not f.is_zero()}
        _check_family(self.space, self.maps, 1, "l")
        _check_symmetric(self.maps, "l")

    def l(self, n: int) -> MultilinearMap:
        return self.maps.get(n, MultilinearMap.zero(self.space, n, 1))

    def defect(self, n: int) -> MultilinearMap:
        return linfty_defect(self, n)

    def verify(self, up_to: int | None = None) -> list[int]:
        N = self.truncation if up_to is None else up_to
        return [n for n in range(1, N + 1) if not self.defect(n).is_zero()]


@dataclass
class SHDerivationL:
    """Degree-``k`` family of graded-symmetric maps ``{theta_q}``."""

    degree: int
    maps: dict[int, MultilinearMap]
    space: GradedVectorSpace = field(default=None)  # type: ignore[assignment]
    truncation: int = 4

    def __post_init__(self) -> None:
        self.maps = {n: f for n, f in self.maps.items() if not f.is_zero()}
        if self.space is None:
            if not self.maps:
                raise ValueError("empty derivation needs an explicit space")
            self.space = next(iter(self.maps.values())).space
        _check_family(self.space, self.maps, self.degree, "theta")
        _check_symmetric(self.maps, "theta")

    def theta(self, q: int) -> MultilinearMap:
        return self.maps.get(q, MultilinearMap.zero(self.space, q, self.degree))


def linfty_defect(L: LInfinityStructure, n: int) -> MultilinearMap:
    """Higher-Jacobi defect at arity ``n`` as one degree-2 map."""
    if n < 1:
        raise ValueError("arity must be >= 1")
    out = MultilinearMap.zero(L.space, n, 2)
    for j in range(1, n + 1):
        outer, inner = L.l(n - j + 1), L.l(j)
        if outer.is_zero() or inner.is_zero():
            continue
        core = compose_at(outer, 1, inner)
        for sigma in unshuffles(j, n - j):
            out = out + map_sigma_act(sigma, core)
    return out


def sh_defect(L: LInfinityStructure, T: SHDerivationL, n: int) -> MultilinearMap:
    """Mixed theta/l defect at arity ``n``, homogeneous of degree ``k + 1``."""
    if n < 1:
        raise ValueError("arity must be >= 1")
    if T.space != L.space:
        raise ValueError("derivation lives on a different space")
    k = T.degree
    sign = -1 if k % 2 else 1
    out = MultilinearMap.zero(L.space, n, k + 1)
    for j in range(1, n + 1):
        core = MultilinearMap.zero(L.space, n, k + 1)
        th_out, l_in = T.theta(n - j + 1), L.l(j)
        if not (th_out.is_zero() or l_in.is_zero()):
            core = core + compose_at(th_out, 1, l_in)
        l_out, th_in = L.l(n - j + 1), T.theta(j)
        if not (l_out.is_zero() or th_in.is_zero()):
            core = core - compose_at(l_out, 1, th_in).scale(sign)
        if core.is_zero():
            continue
        for sigma in unshuffles(j, n - j):
            out = out + map_sigma_act(sigma, core)
    return out


def verify_derivation(L: LInfinityStructure, T: SHDerivationL, up_to: int | None = None) -> list[int]:
    N = L.truncation if up_to is None else up_to
    return [q for q in range(1, N + 1) if not sh_defect(L, T, q).is_zero()]


def tautological_derivation(L: LInfinityStructure) -> SHDerivationL:
    """``theta_q := l_q`` with ``k = 1``."""
    return SHDerivationL(1, dict(L.maps), space=L.space, truncation=L.truncation)


def inner_derivation(L: LInfinityStructure, a: GradedVector) -> SHDerivationL:
    """``theta_n := l_{n+1}(a, -, ..., -)`` for closed homogeneous ``a``."""
    if a.space != L.space:
        raise ValueError("element lives in a different space")
    k = a.degree()
    if k is None:
        return SHDerivationL(1, {}, space=L.space, truncation=L.truncation)
    closed = L.l(1).apply([a])
    if not closed.is_zero():
        raise StructureError(f"l_1(a) != 0 (got {closed}); a is not closed")
    const = MultilinearMap.constant(a)
    maps: dict[int, MultilinearMap] = {}
    for n in range(1, L.truncation + 1):
        l_next = L.l(n + 1)
        if l_next.is_zero():
            continue
        maps[n] = compose_at(l_next, 1, const)
    return SHDerivationL(k + 1, maps, space=L.space, truncation=L.truncation)


def from_dgla(
    bracket: MultilinearMap,
    differential: MultilinearMap | None = None,
    truncation: int = 4,
) -> LInfinityStructure:
    """Suspend a dg Lie algebra ``(A, [.,.], d)`` to a symmetric structure on ``V``.

    The input bracket is graded antisymmetric of degree 0 and satisfies the
    graded Jacobi identity; failures of antisymmetry, Jacobi, ``d^2 = 0`` or
    the Leibniz rule are reported separately.  The suspended bracket is
    graded symmetric on ``V``.
    """
    from .graded import suspend_map

    A = bracket.space
    if bracket.arity != 2 or (not bracket.is_zero() and bracket.degree != 0):
        raise StructureError("bracket must be an arity-2 degree-0 map")
    d = differential if differential is not None else MultilinearMap.zero(A, 1, 1)
    if d.arity != 1 or (not d.is_zero() and d.degree != 1):
        raise StructureError("differential must be an arity-1 degree-1 map")
    if d.space != A:
        raise StructureError("bracket and differential live on different spaces")
    problems = []
    if symmetry_defect(bracket, "antisymmetric") is not None:
        problems.append("bracket is not graded antisymmetric")
    swap = Permutation((2, 1, 3))
    adj = compose_at(bracket, 2, bracket)
    jacobi = adj - compose_at(bracket, 1, bracket) - map_sigma_act(swap, adj)
    if not jacobi.is_zero():
        problems.append("bracket fails the graded Jacobi identity")
    if not compose_at(d, 1, d).is_zero():
        problems.append("differential does not square to zero")
    leibniz = compose_at(d, 1, bracket) - compose_at(bracket, 1, d) - compose_at(bracket, 2, d)
    if not leibniz.is_zero():
        problems.append("differential fails the Leibniz rule")
    if problems:
        raise StructureError("; ".join(problems))
    maps: dict[int, MultilinearMap] = {}
    d_v = suspend_map(d)
    if not d_v.is_zero():
        maps[1] = d_v
    l2 = suspend_map(bracket)
    if not l2.is_zero():
        maps[2] = l2
    return LInfinityStructure(A.shift(-1), maps, truncation=truncation)


# -- bridge to the unsuspended skew-symmetric presentation -------------------

# Sign of the arity-n rescaling applied before suspension.  The orientation
# (global sign of the whole family) is pinned down by compatibility with the
# suspension of dg Lie algebras: l_2 suspends with a plus sign.


def _bridge_sign(n: int) -> int:
    return -1 if (1 + n * (n - 1) // 2) % 2 else 1


def suspend_lie_family(
    d: MultilinearMap, maps: dict[int, MultilinearMap], truncation: int = 4
) -> LInfinityStructure:
    """Skew family ``(d, {l_n: deg 2-n})`` to the symmetric degree-1 family."""
    from .graded import suspend_map

    out: dict[int, MultilinearMap] = {}
    if not d.is_zero():
        out[1] = suspend_map(d)
    for n, f in maps.items():
        if f.is_zero():
            continue
        if f.degree != 2 - n:
            raise ValueError(f"unsuspended l_{n} must have degree {2 - n}")
        out[n] = suspend_map(f).scale(_bridge_sign(n))
    return LInfinityStructure(d.space.shift(-1), out, truncation=truncation)


def unsuspended_linfty_defect(
    d: MultilinearMap, maps: dict[int, MultilinearMap], n: int
) -> MultilinearMap:
    """Defect of the classical skew-symmetric relation at arity ``n``."""
    space = d.space

    def l(i: int) -> MultilinearMap:
        return maps.get(i, MultilinearMap.zero(space, i, 2 - i))

    sign_n = -1 if n % 2 else 1
    lhs = compose_at(d, 1, l(n))
    for m in range(1, n + 1):
        lhs = lhs - compose_at(l(n), m, d).scale(sign_n)
    rhs = MultilinearMap.zero(space, n, 3 - n)
    for i in range(2, n):
        j = n + 1 - i
        if j < 2:
            continue
        core = compose_at(l(i), 1, l(j))
        if core.is_zero():
            continue
        base = -1 if (j * (i - 1)) % 2 else 1
        for sigma in unshuffles(j, i - 1):
            rhs = rhs + map_sigma_act(sigma, core).scale(base * sgn(sigma))
    return lhs - rhs


def unsuspended_lie_sh_defect(
    d: MultilinearMap,
    maps: dict[int, MultilinearMap],
    thetas: dict[int, MultilinearMap],
    k: int,
    n: int,
) -> MultilinearMap:
    """Defect of the classical skew derivation relation at arity ``n``."""
    space = d.space

    def l(i: int) -> MultilinearMap:
        return maps.get(i, MultilinearMap.zero(space, i, 2 - i))

    def th(i: int) -> MultilinearMap:
        return thetas.get(i, MultilinearMap.zero(space, i, k - i + 1))

    sign_n = -1 if (k - n + 1) % 2 else 1
    lhs = compose_at(d, 1, th(n))
    for m in range(1, n + 1):
        lhs = lhs - compose_at(th(n), m, d).scale(sign_n)
    rhs = MultilinearMap.zero(space, n, k + 3 - n)
    for i in range(1, n + 1):
        j = n + 1 - i
        core = MultilinearMap.zero(space, n, k + 3 - n)
        if j >= 2:
            core = core + compose_at(th(i), 1, l(j))
        if i >= 2:
            c2 = -1 if ((k + 1) * i) % 2 else 1
            core = core + compose_at(l(i), 1, th(j)).scale(c2)
        if core.is_zero():
            continue
        base = -1 if (k + j * (i - 1)) % 2 else 1
        for sigma in unshuffles(j, i - 1):
            rhs = rhs - map_sigma_act(sigma, core).scale(base * sgn(sigma))
    return lhs - rhs
