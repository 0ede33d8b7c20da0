"""A-infinity structures in the suspended convention and their derivations.

Everything here lives on the desuspension ``V``: the structure maps
``m_n: V^(x n) -> V`` all have degree +1 and the defining relations read

    sum_{r+s=n+1} sum_{l=1..r}  m_r o_l m_s  =  0,

where ``o_l`` is the Koszul-signed partial composition of :mod:`shd.graded`.
A strong homotopy derivation of degree ``k`` is a family ``theta_q`` of
degree-``k`` maps with defect

    sum_{r+s=q+1} sum_{l=1..r} [ theta_r o_l m_s - (-1)^k m_r o_l theta_s ].

Defects are returned as maps, never booleans, so failures can be inspected
entry by entry.

The classical (unsuspended) presentation, where the structure maps have
degree ``2-n`` and the differential is separate data, is reachable through
``suspend_family`` / ``unsuspended_*_defect``; the two presentations are
defect-free simultaneously.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graded import (
    GradedVector,
    GradedVectorSpace,
    MultilinearMap,
    compose_at,
    suspend_map,
)


class StructureError(ValueError):
    """Input tables violate a structure precondition (not a schema problem)."""


def _check_family(space: GradedVectorSpace, maps: dict[int, MultilinearMap], degree: int, kind: str):
    for n, f in maps.items():
        if n < 1:
            raise ValueError(f"{kind} family indexed by arities >= 1, got {n}")
        if f.space != space:
            raise ValueError(f"{kind}_{n} lives on the wrong space")
        if f.arity != n:
            raise ValueError(f"{kind}_{n} has arity {f.arity}")
        if not f.is_zero() and f.degree != degree:
            raise ValueError(f"{kind}_{n} must have degree {degree}, has {f.degree}")


@dataclass
class AInfinityStructure:
    """Family ``{m_n}`` of degree-1 maps on ``V``, truncated at ``truncation``."""

    space: GradedVectorSpace
    maps: dict[int, MultilinearMap]
    truncation: int = 4

    def __post_init__(self) -> None:
        self.maps = {n: f for n, f in self.maps.items() if not f.is_zero()}
        _check_family(self.space, self.maps, 1, "m")

    def m(self, n: int) -> MultilinearMap:
        return self.maps.get(n, MultilinearMap.zero(self.space, n, 1))

    def defect(self, n: int) -> MultilinearMap:
        return ainfty_defect(self, n)

    def verify(self, up_to: int | None = None) -> list[int]:
        """Arities ``<= up_to`` with a nonzero relation defect."""
        N = self.truncation if up_to is None else up_to
        return [n for n in range(1, N + 1) if not self.defect(n).is_zero()]


@dataclass
class SHDerivationA:
    """Degree-``k`` family ``{theta_q}`` attached to an A-infinity structure."""

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

    def theta(self, q: int) -> MultilinearMap:
        return self.maps.get(q, MultilinearMap.zero(self.space, q, self.degree))


def ainfty_defect(M: AInfinityStructure, n: int) -> MultilinearMap:
    """LHS of the arity-``n`` structure relation as one degree-2 map."""
    if n < 1:
        raise ValueError("arity must be >= 1")
    out = MultilinearMap.zero(M.space, n, 2)
    for s in range(1, n + 1):
        r = n + 1 - s
        m_r, m_s = M.m(r), M.m(s)
        if m_r.is_zero() or m_s.is_zero():
            continue
        for l in range(1, r + 1):
            out = out + compose_at(m_r, l, m_s)
    return out


def sh_defect(M: AInfinityStructure, T: SHDerivationA, q: int) -> MultilinearMap:
    """Derivation defect at arity ``q``: homogeneous of degree ``k + 1``."""
    if q < 1:
        raise ValueError("arity must be >= 1")
    if T.space != M.space:
        raise ValueError("derivation lives on a different space")
    k = T.degree
    sign = -1 if k % 2 else 1
    out = MultilinearMap.zero(M.space, q, k + 1)
    for s in range(1, q + 1):
        r = q + 1 - s
        th_r, m_s = T.theta(r), M.m(s)
        if not (th_r.is_zero() or m_s.is_zero()):
            for l in range(1, r + 1):
                out = out + compose_at(th_r, l, m_s)
        m_r, th_s = M.m(r), T.theta(s)
        if not (m_r.is_zero() or th_s.is_zero()):
            for l in range(1, r + 1):
                out = out - compose_at(m_r, l, th_s).scale(sign)
    return out


def verify_derivation(M: AInfinityStructure, T: SHDerivationA, up_to: int | None = None) -> list[int]:
    N = M.truncation if up_to is None else up_to
    return [q for q in range(1, N + 1) if not sh_defect(M, T, q).is_zero()]


def tautological_derivation(M: AInfinityStructure) -> SHDerivationA:
    """The degree-1 derivation ``theta_q := m_q`` carried by every structure."""
    return SHDerivationA(1, dict(M.maps), space=M.space, truncation=M.truncation)


def inner_derivation(M: AInfinityStructure, a: GradedVector) -> SHDerivationA:
    """Insertion derivation of a closed homogeneous element ``a``.

    ``theta_n(v_1..v_n) = sum_p (-1)**(|a| * (|v_1|+..+|v_p|))
    m_{n+1}(v_1, .., v_p, a, v_{p+1}, .., v_n)``; the result has degree
    ``|a| + 1``.  Rejects ``a`` with ``m_1(a) != 0``.
    """
    if a.space != M.space:
        raise ValueError("element lives in a different space")
    k = a.degree()
    if k is None:
        return SHDerivationA(1, {}, space=M.space, truncation=M.truncation)
    closed = M.m(1).apply([a])
    if not closed.is_zero():
        raise StructureError(f"m_1(a) != 0 (got {closed}); a is not closed")
    const = MultilinearMap.constant(a)
    maps: dict[int, MultilinearMap] = {}
    for n in range(1, M.truncation + 1):
        m_next = M.m(n + 1)
        if m_next.is_zero():
            continue
        theta_n = MultilinearMap.zero(M.space, n, k + 1)
        for p in range(0, n + 1):
            theta_n = theta_n + compose_at(m_next, p + 1, const)
        maps[n] = theta_n
    return SHDerivationA(k + 1, maps, space=M.space, truncation=M.truncation)


def from_dga(
    product: MultilinearMap,
    differential: MultilinearMap | None = None,
    truncation: int = 4,
) -> AInfinityStructure:
    """Suspend a dg associative algebra ``(A, mult, d)`` to a structure on ``V``.

    Rejects inputs failing associativity, ``d^2 = 0`` or the Leibniz rule,
    each reported separately.
    """
    A = product.space
    if product.arity != 2 or (not product.is_zero() and product.degree != 0):
        raise StructureError("product must be an arity-2 degree-0 map")
    d = differential if differential is not None else MultilinearMap.zero(A, 1, 1)
    if d.arity != 1 or (not d.is_zero() and d.degree != 1):
        raise StructureError("differential must be an arity-1 degree-1 map")
    if d.space != A:
        raise StructureError("product and differential live on different spaces")
    problems = []
    if not (compose_at(product, 1, product) - compose_at(product, 2, product)).is_zero():
        problems.append("product is not associative")
    if not compose_at(d, 1, d).is_zero():
        problems.append("differential does not square to zero")
    leibniz = compose_at(d, 1, product) - compose_at(product, 1, d) - compose_at(product, 2, d)
    if not leibniz.is_zero():
        problems.append("differential fails the Leibniz rule")
    if problems:
        raise StructureError("; ".join(problems))
    maps: dict[int, MultilinearMap] = {}
    d_v = suspend_map(d)
    if not d_v.is_zero():
        maps[1] = d_v
    m2 = suspend_map(product)
    if not m2.is_zero():
        maps[2] = m2
    return AInfinityStructure(A.shift(-1), maps, truncation=truncation)


def strict_derivation_defect(
    M: AInfinityStructure, theta1: MultilinearMap, k: int
) -> tuple[MultilinearMap, MultilinearMap]:
    """Defects of a strict degree-``k`` derivation candidate ``theta1``.

    Returns ``(d-commutation, Leibniz)``:
    ``m_1 o theta - (-1)^k theta o m_1`` and
    ``theta o_1 m_2 - (-1)^k (m_2 o_1 theta + m_2 o_2 theta)``.
    Requires the structure to be strict (``m_n = 0`` for ``n >= 3``).
    """
    if any(n >= 3 for n in M.maps):
        raise StructureError("structure is not strict (has m_n with n >= 3)")
    if theta1.arity != 1:
        raise ValueError("theta must have arity 1")
    sign = -1 if k % 2 else 1
    m1, m2 = M.m(1), M.m(2)
    d_comm = compose_at(m1, 1, theta1) - compose_at(theta1, 1, m1).scale(sign)
    leibniz = compose_at(theta1, 1, m2) - (
        compose_at(m2, 1, theta1) + compose_at(m2, 2, theta1)
    ).scale(sign)
    return d_comm, leibniz


# -- bridge to the unsuspended presentation ----------------------------------


def suspend_family(
    d: MultilinearMap, maps: dict[int, MultilinearMap], truncation: int = 4
) -> AInfinityStructure:
    """Unsuspended family ``(d, {m_n: deg 2-n, n>=2})`` to the degree-1 family."""
    out: dict[int, MultilinearMap] = {}
    if not d.is_zero():
        out[1] = suspend_map(d)
    for n, f in maps.items():
        if f.is_zero():
            continue
        if f.degree != 2 - n:
            raise ValueError(f"unsuspended m_{n} must have degree {2 - n}")
        out[n] = suspend_map(f)
    return AInfinityStructure(d.space.shift(-1), out, truncation=truncation)


def suspend_derivation_family(
    maps: dict[int, MultilinearMap], k: int, space: GradedVectorSpace, truncation: int = 4
) -> SHDerivationA:
    """Unsuspended family ``{theta_n: deg k-n+1}`` to the degree-``k`` family."""
    out = {n: suspend_map(f) for n, f in maps.items() if not f.is_zero()}
    return SHDerivationA(k, out, space=space.shift(-1), truncation=truncation)


def unsuspended_ainfty_defect(
    d: MultilinearMap, maps: dict[int, MultilinearMap], n: int
) -> MultilinearMap:
    """Classical relation defect: ``d o m_n -(-1)^n sum m_n o d  -  RHS``."""
    space = d.space

    def m(i: int) -> MultilinearMap:
        return maps.get(i, MultilinearMap.zero(space, i, 2 - i))

    sign_n = -1 if n % 2 else 1
    lhs = compose_at(d, 1, m(n))
    for l in range(1, n + 1):
        lhs = lhs - compose_at(m(n), l, d).scale(sign_n)
    rhs = MultilinearMap.zero(space, n, 3 - n)
    for i in range(2, n):
        j = n + 1 - i
        if j < 2:
            continue
        for l in range(1, i + 1):
            c = -1 if (i + (l + 1) * (j + 1)) % 2 else 1
            rhs = rhs + compose_at(m(i), l, m(j)).scale(c)
    return lhs - rhs


def unsuspended_sh_defect(
    d: MultilinearMap,
    maps: dict[int, MultilinearMap],
    thetas: dict[int, MultilinearMap],
    k: int,
    n: int,
) -> MultilinearMap:
    """Classical derivation-relation defect for degree data ``2-i`` / ``k-i+1``."""
    space = d.space

    def m(i: int) -> MultilinearMap:
        return maps.get(i, MultilinearMap.zero(space, i, 2 - i))

    def th(i: int) -> MultilinearMap:
        return thetas.get(i, MultilinearMap.zero(space, i, k - i + 1))

    sign_n = -1 if (k - n + 1) % 2 else 1
    lhs = compose_at(d, 1, th(n))
    for l in range(1, n + 1):
        lhs = lhs - compose_at(th(n), l, d).scale(sign_n)
    rhs = MultilinearMap.zero(space, n, k + 3 - n)
    for i in range(1, n + 1):
        j = n + 1 - i
        for l in range(1, i + 1):
            c = -1 if (k + 1 + i + (l + 1) * (j + 1)) % 2 else 1
            if j >= 2:
                rhs = rhs + compose_at(th(i), l, m(j)).scale(c)
            if i >= 2:
                c2 = c * (-1 if ((k + 1) * i) % 2 else 1)
                rhs = rhs + compose_at(m(i), l, th(j)).scale(c2)
    return lhs - rhs
