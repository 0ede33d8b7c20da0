"""Tensor and symmetric coalgebras, coderivation lifts, and symmetrization.

Words over a graded space ``V``:

* tensor words are plain tuples of basis labels (the empty word is allowed
  only in unital mode);
* symmetric words are kept in a canonical order, sorted by
  ``(degree, label)``, with the Koszul sign of the sorting permutation; a
  word repeating an odd-degree label is zero.

A coderivation is stored through its corestriction projections
``f_n : V^(x n) -> V`` (all of one degree ``k``) plus, in unital tensor
mode, an arity-0 projection which is just an element of ``V``.  Word
actions are computed on demand:

    F(v_1 x ... x v_n) = sum over consecutive blocks replaced by f_j,
                         with sign (-1)**(k * degree of the prefix),

and on the symmetric side the blocks are chosen by unshuffles with Koszul
signs.  Brackets of coderivations are returned as coderivations via their
projections; the frozen global constant relating ``[m, theta]`` to the
derivation defect families is ``bracket_defect_sign(k) = (-1)**(k+1)``:

    projections of [m, theta] at arity q  ==  (-1)**(k+1) * sh_defect(q).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian

from .graded import GradedVector, GradedVectorSpace, MultilinearMap, map_sigma_act
from .homotopy_assoc import AInfinityStructure, SHDerivationA, StructureError
from .homotopy_lie import LInfinityStructure, SHDerivationL
from .signs import all_permutations, koszul_sign, sorting_permutation, unshuffles, act

Word = tuple[str, ...]
WordCombination = dict[Word, Fraction]


def bracket_defect_sign(k: int) -> int:
    """Frozen calibration constant: ``[m, theta]_q = sign * sh_defect(q)``."""
    return -1 if (k + 1) % 2 else 1


def _add_term(out: WordCombination, word: Word, coeff: Fraction) -> None:
    c = out.get(word, Fraction(0)) + coeff
    if c:
        out[word] = c
    elif word in out:
        del out[word]


def sym_canonical(space: GradedVectorSpace, word: Word) -> tuple[Word | None, int]:
    """Canonical symmetric word and normalization sign; ``(None, 0)`` if zero."""
    keys = [(space.degree(l), l) for l in word]
    p = sorting_permutation(keys)
    sorted_word = act(p, word)
    for a, b in zip(sorted_word, sorted_word[1:]):
        if a == b and space.degree(a) % 2:
            return None, 0
    degs = [space.degree(l) for l in word]
    return sorted_word, koszul_sign(p, degs)


@dataclass
class Coderivation:
    """Coderivation of ``T^c(V)``, ``T^c_u(V)`` or ``S^c(V)`` by projections."""

    space: GradedVectorSpace
    degree: int
    flavor: str  # 'tensor' | 'symmetric'
    projections: dict[int, MultilinearMap]
    theta0: GradedVector | None = None

    def __post_init__(self) -> None:
        if self.flavor not in ("tensor", "symmetric"):
            raise ValueError("flavor must be 'tensor' or 'symmetric'")
        self.projections = {n: f for n, f in self.projections.items() if not f.is_zero()}
        for n, f in self.projections.items():
            if n < 1 or f.arity != n:
                raise ValueError(f"projection at key {n} has arity {f.arity}")
            if f.space != self.space:
                raise ValueError("projection lives on a different space")
            if f.degree != self.degree:
                raise ValueError(
                    f"projection of arity {n} has degree {f.degree}, expected {self.degree}"
                )
        if self.flavor == "symmetric":
            if self.theta0 is not None:
                raise ValueError("arity-0 projections are only supported in tensor mode")
            from .graded import symmetry_defect

            for n, f in self.projections.items():
                if symmetry_defect(f, "symmetric") is not None:
                    raise StructureError(f"projection of arity {n} is not graded symmetric")
        if self.theta0 is not None:
            if self.theta0.is_zero():
                self.theta0 = None
            elif self.theta0.degree() != self.degree:
                raise ValueError("arity-0 projection must have the coderivation degree")

    def projection(self, n: int) -> MultilinearMap:
        return self.projections.get(n, MultilinearMap.zero(self.space, n, self.degree))

    def is_unital(self) -> bool:
        return self.theta0 is not None

    def max_arity(self) -> int:
        return max(self.projections, default=0)


def apply_tensor(F: Coderivation, word: Word) -> WordCombination:
    """Action on a tensor word (empty word allowed iff ``F`` is unital)."""
    if F.flavor != "tensor":
        raise ValueError("coderivation is not of tensor flavor")
    space = F.space
    n = len(word)
    degs = [space.degree(l) for l in word]
    out: WordCombination = {}
    for j, f_j in F.projections.items():
        if j > n:
            continue
        for i in range(0, n - j + 1):
            sign = -1 if (F.degree * sum(degs[:i])) % 2 else 1
            val = f_j.entry(word[i : i + j])
            for label, c in val.items():
                _add_term(out, word[:i] + (label,) + word[i + j :], sign * c)
    if F.theta0 is not None:
        for i in range(0, n + 1):
            sign = -1 if (F.degree * sum(degs[:i])) % 2 else 1
            for label, c in F.theta0.items():
                _add_term(out, word[:i] + (label,) + word[i:], sign * c)
    return out


def apply_sym(F: Coderivation, word: Word) -> WordCombination:
    """Action on a symmetric word; the output is in canonical form."""
    if F.flavor != "symmetric":
        raise ValueError("coderivation is not of symmetric flavor")
    space = F.space
    canon, csign = sym_canonical(space, word)
    if canon is None:
        return {}
    word = canon
    n = len(word)
    degs = [space.degree(l) for l in word]
    out: WordCombination = {}
    for j, f_j in F.projections.items():
        if j > n:
            continue
        for sigma in unshuffles(j, n - j):
            rearranged = act(sigma, word)
            sign = csign * koszul_sign(sigma, degs)
            val = f_j.entry(rearranged[:j])
            for label, c in val.items():
                tail, tsign = sym_canonical(space, (label,) + rearranged[j:])
                if tail is None:
                    continue
                _add_term(out, tail, sign * tsign * c)
    return out


def apply_word(F: Coderivation, word: Word) -> WordCombination:
    return apply_tensor(F, word) if F.flavor == "tensor" else apply_sym(F, word)


def apply_combination(F: Coderivation, combo: WordCombination) -> WordCombination:
    out: WordCombination = {}
    for word, c in combo.items():
        for w2, c2 in apply_word(F, word).items():
            _add_term(out, w2, c * c2)
    return out


def _project_length1(space: GradedVectorSpace, combo: WordCombination) -> GradedVector:
    coeffs = {w[0]: c for w, c in combo.items() if len(w) == 1}
    return GradedVector(space, coeffs)


def bracket(F: Coderivation, G: Coderivation, up_to: int | None = None) -> Coderivation:
    """Graded commutator ``[F, G] = F G - (-1)**(|F||G|) G F`` by projections.

    Projections are produced for arities up to ``up_to`` (default: enough to
    see everything the stored projections of ``F`` and ``G`` can reach).
    """
    if F.flavor != G.flavor or F.space != G.space:
        raise ValueError("coderivations live on different coalgebras")
    space = F.space
    if up_to is None:
        up_to = max(F.max_arity(), G.max_arity())
    sign = -1 if (F.degree * G.degree) % 2 else 1
    degree = F.degree + G.degree
    unital = F.is_unital() or G.is_unital()

    def commutator(combo_word: Word) -> GradedVector:
        fg = apply_combination(F, apply_word(G, combo_word))
        gf = apply_combination(G, apply_word(F, combo_word))
        total = dict(fg)
        for w, c in gf.items():
            _add_term(total, w, -sign * c)
        return _project_length1(space, total)

    projections: dict[int, MultilinearMap] = {}
    for n in range(1, up_to + 1):
        table = {}
        if F.flavor == "tensor":
            for inputs in cartesian(space.labels, repeat=n):
                value = commutator(inputs)
                if not value.is_zero():
                    table[inputs] = value
        else:
            cache: dict[Word, GradedVector] = {}
            for inputs in cartesian(space.labels, repeat=n):
                canon, csign = sym_canonical(space, inputs)
                if canon is None:
                    continue
                if canon not in cache:
                    cache[canon] = commutator(canon)
                value = cache[canon].scale(csign)
                if not value.is_zero():
                    table[inputs] = value
        projections[n] = MultilinearMap(space, n, degree, table)
    theta0 = None
    if unital:
        theta0 = _project_length1(space, commutator(()))
        if theta0.is_zero():
            theta0 = None
    return Coderivation(space, degree, F.flavor, projections, theta0=theta0)


# -- codifferentials and derivation lifts ------------------------------------


def codifferential_from_ainfty(M: AInfinityStructure) -> Coderivation:
    return Coderivation(M.space, 1, "tensor", dict(M.maps))


def codifferential_from_linfty(L: LInfinityStructure) -> Coderivation:
    return Coderivation(L.space, 1, "symmetric", dict(L.maps))


def coderivation_from_derivation(T: SHDerivationA | SHDerivationL) -> Coderivation:
    flavor = "symmetric" if isinstance(T, SHDerivationL) else "tensor"
    return Coderivation(T.space, T.degree, flavor, dict(T.maps))


def reservoir_derivation(M: AInfinityStructure, xi: Coderivation, up_to: int | None = None) -> SHDerivationA:
    """The derivation ``[m, xi]`` attached to an arbitrary coderivation ``xi``."""
    if xi.flavor != "tensor" or xi.space != M.space:
        raise ValueError("xi must be a tensor coderivation on the structure space")
    N = M.truncation if up_to is None else up_to
    b = bracket(codifferential_from_ainfty(M), xi, up_to=N)
    return SHDerivationA(xi.degree + 1, b.projections, space=M.space, truncation=N)


def reservoir_derivation_lie(L: LInfinityStructure, xi: Coderivation, up_to: int | None = None) -> SHDerivationL:
    if xi.flavor != "symmetric" or xi.space != L.space:
        raise ValueError("xi must be a symmetric coderivation on the structure space")
    N = L.truncation if up_to is None else up_to
    b = bracket(codifferential_from_linfty(L), xi, up_to=N)
    return SHDerivationL(xi.degree + 1, b.projections, space=L.space, truncation=N)


def inner_via_counital(M: AInfinityStructure, a: GradedVector, up_to: int | None = None) -> SHDerivationA:
    """Inner derivation through the unital tensor coalgebra.

    Lifts ``a`` to the coderivation with only an arity-0 projection and
    brackets it with the structure codifferential; rejects ``a`` whenever
    the arity-0 projection ``m_1(a)`` of the bracket is nonzero.
    """
    if a.space != M.space:
        raise ValueError("element lives in a different space")
    N = M.truncation if up_to is None else up_to
    k = a.degree()
    if k is None:
        return SHDerivationA(1, {}, space=M.space, truncation=N)
    theta = Coderivation(M.space, k, "tensor", {}, theta0=a)
    b = bracket(codifferential_from_ainfty(M), theta, up_to=N)
    if b.theta0 is not None:
        raise StructureError(f"m_1(a) != 0 (got {b.theta0}); a is not closed")
    return SHDerivationA(k + 1, b.projections, space=M.space, truncation=N)


# -- coproducts (used by the coalgebra-law checks) ---------------------------


def deconcatenation(word: Word) -> list[tuple[Word, Word, int]]:
    """Reduced coproduct of a tensor word: splits with trivial signs."""
    return [(word[:i], word[i:], 1) for i in range(1, len(word))]


def sym_coproduct(space: GradedVectorSpace, word: Word) -> list[tuple[Word, Word, int]]:
    """Reduced coproduct of a canonical symmetric word, with Koszul signs."""
    degs = [space.degree(l) for l in word]
    out = []
    n = len(word)
    for j in range(1, n):
        for sigma in unshuffles(j, n - j):
            rearranged = act(sigma, word)
            sign = koszul_sign(sigma, degs)
            out.append((rearranged[:j], rearranged[j:], sign))
    return out


# -- symmetrization ----------------------------------------------------------


def chi(space: GradedVectorSpace, word: Word) -> WordCombination:
    """Coalgebra embedding of a symmetric word into the tensor coalgebra."""
    canon, csign = sym_canonical(space, word)
    if canon is None:
        return {}
    degs = [space.degree(l) for l in canon]
    out: WordCombination = {}
    for sigma in all_permutations(len(canon)):
        _add_term(out, act(sigma, canon), csign * koszul_sign(sigma, degs))
    return out


def symmetrize_map(f: MultilinearMap) -> MultilinearMap:
    """``f o chi`` restricted to words of length ``arity(f)``."""
    out = MultilinearMap.zero(f.space, f.arity, f.degree)
    for sigma in all_permutations(f.arity):
        out = out + map_sigma_act(sigma, f)
    return out


def symmetrize_structure(M: AInfinityStructure) -> LInfinityStructure:
    """The symmetrized structure ``l_n := m_n o chi``."""
    maps = {n: symmetrize_map(f) for n, f in M.maps.items()}
    return LInfinityStructure(
        M.space, {n: f for n, f in maps.items() if not f.is_zero()}, truncation=M.truncation
    )


def symmetrize_derivation(M: AInfinityStructure, T: SHDerivationA) -> SHDerivationL:
    """The symmetrized derivation ``theta'_q := theta_q o chi`` (same degree)."""
    if T.space != M.space:
        raise ValueError("derivation lives on a different space")
    maps = {q: symmetrize_map(f) for q, f in T.maps.items()}
    return SHDerivationL(
        T.degree,
        {q: f for q, f in maps.items() if not f.is_zero()},
        space=M.space,
        truncation=T.truncation,
    )
