"""Free symmetric operad on decorated trees, with exact Koszul signs.

Basis elements are canonical planar rooted trees: vertices carry named
generators, leaves carry a bijective labeling by ``1..n``.  The symmetric
group acts by relabeling leaves; how a relabeled tree is normalized back
into the basis depends on the generator's representation type:

* ``regular``  - the planar order of children is meaningful and two
  different orders are genuinely different basis elements;
* ``sign``     - children are sorted by minimal leaf label, picking up the
  signature of the sorting permutation times the Koszul sign of permuting
  the subtrees' total degrees;
* ``trivial``  - like ``sign`` but without the signature factor.

Degrees live on the vertices.  The bookkeeping convention is that a tree
stands for the tensor of its vertex generators in depth-first planar
order; grafting ``t2`` onto leaf ``l`` of ``t1`` therefore costs
``(-1)**(deg(t2) * d)`` where ``d`` is the total degree of the ``t1``
vertices visited after leaf ``l``.  All other signs are consequences.

The module also carries the minimal-resolution differentials of the
associative and Lie presets, their degree-``k`` derivation extensions, the
``d^2 = 0`` scan, and evaluation into spaces of multilinear maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Union

from .graded import GradedVectorSpace, MultilinearMap, compose_at, map_sigma_act
from .signs import Permutation, koszul_sign, sgn, unshuffles

REPS = ("regular", "sign", "trivial")


@dataclass(frozen=True)
class Generator:
    """Named operad generator: arity, (cohomological) degree, Sigma-action type."""

    name: str
    arity: int
    degree: int
    rep: str = "regular"

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise ValueError("arity must be >= 0")
        if self.rep not in REPS:
            raise ValueError(f"rep must be one of {REPS}")


Child = Union["Tree", int]


@dataclass(frozen=True)
class Tree:
    """Planar decorated tree; ``int`` children are leaves with that label."""

    gen: Generator
    children: tuple[Child, ...]

    def __post_init__(self) -> None:
        if len(self.children) != self.gen.arity:
            raise ValueError(
                f"{self.gen.name} has arity {self.gen.arity}, got {len(self.children)} children"
            )


def tree_leaves(t: Child) -> list[int]:
    """Leaf labels in planar (depth-first) order."""
    if isinstance(t, int):
        return [t]
    out: list[int] = []

    def walk(node: Tree) -> None:
        for c in node.children:
            if isinstance(c, int):
                out.append(c)
            else:
                walk(c)

    walk(t)
    return out


def tree_arity(t: Child) -> int:
    return len(tree_leaves(t))


def tree_degree(t: Child) -> int:
    if isinstance(t, int):
        return 0
    return t.gen.degree + sum(tree_degree(c) for c in t.children)


def tree_weight(t: Child) -> int:
    """Number of vertices."""
    if isinstance(t, int):
        return 0
    return 1 + sum(tree_weight(c) for c in t.children)


def _min_leaf(t: Child) -> int:
    if isinstance(t, int):
        return t
    return min(_min_leaf(c) for c in t.children)


def canonicalize(t: Child) -> tuple[Child, int]:
    """Canonical representative and normalization sign."""
    if isinstance(t, int):
        return t, 1
    sign = 1
    kids = []
    for c in t.children:
        c2, s = canonicalize(c)
        sign *= s
        kids.append(c2)
    if t.gen.rep != "regular" and len(kids) > 1:
        keys = [_min_leaf(c) for c in kids]
        order = sorted(range(len(kids)), key=keys.__getitem__)
        if order != list(range(len(kids))):
            perm = Permutation(tuple(i + 1 for i in order))
            degs = [tree_degree(c) for c in kids]
            sign *= koszul_sign(perm, degs)
            if t.gen.rep == "sign":
                sign *= sgn(perm)
            kids = [kids[i] for i in order]
    return Tree(t.gen, tuple(kids)), sign


def _tree_sort_key(t: Child):
    if isinstance(t, int):
        return (1, t)
    return (0, t.gen.name, t.gen.arity, tuple(_tree_sort_key(c) for c in t.children))


class FreeOperadElement:
    """Exact-rational combination of canonical trees of one arity and degree.

    The operadic unit is the bare leaf: an arity-1 term that is the int
    ``1`` rather than a :class:`Tree`.
    """

    __slots__ = ("arity", "terms", "_degree")

    def __init__(self, arity: int, terms: Mapping[Child, Fraction] | None = None):
        self.arity = int(arity)
        clean: dict[Tree, Fraction] = {}
        degree: int | None = None
        if terms:
            for tree, c in terms.items():
                c = Fraction(c)
                if c == 0:
                    continue
                if sorted(tree_leaves(tree)) != list(range(1, self.arity + 1)):
                    raise ValueError("tree leaves must be labeled 1..arity")
                d = tree_degree(tree)
                if degree is None:
                    degree = d
                elif degree != d:
                    raise ValueError(f"inhomogeneous element: degrees {degree} and {d}")
                clean[tree] = clean.get(tree, Fraction(0)) + c
            clean = {t: c for t, c in clean.items() if c != 0}
        self.terms = clean
        self._degree = degree if clean else None

    @staticmethod
    def zero(arity: int) -> "FreeOperadElement":
        return FreeOperadElement(arity, {})

    def degree(self) -> int | None:
        return self._degree

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FreeOperadElement") -> "FreeOperadElement":
        if other.arity != self.arity:
            raise ValueError("arity mismatch")
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, Fraction(0)) + c
        return FreeOperadElement(self.arity, out)

    def __sub__(self, other: "FreeOperadElement") -> "FreeOperadElement":
        return self + other.scale(-1)

    def __neg__(self) -> "FreeOperadElement":
        return self.scale(-1)

    def scale(self, c) -> "FreeOperadElement":
        c = Fraction(c)
        return FreeOperadElement(self.arity, {t: c * v for t, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeOperadElement)
            and self.arity == other.arity
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.arity, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"FreeOperadElement({self.arity}, {len(self.terms)} trees)"

    def sorted_terms(self) -> list[tuple[Tree, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: _tree_sort_key(item[0]))


def corolla(gen: Generator) -> FreeOperadElement:
    tree = Tree(gen, tuple(range(1, gen.arity + 1)))
    return FreeOperadElement(gen.arity, {tree: Fraction(1)})


def unit_element() -> FreeOperadElement:
    """The operadic unit: the bare leaf."""
    return FreeOperadElement(1, {1: Fraction(1)})


def _relabel(t: Child, mapping: Callable[[int], int]) -> Child:
    if isinstance(t, int):
        return mapping(t)
    return Tree(t.gen, tuple(_relabel(c, mapping) for c in t.children))


def _degree_after_leaf(t: Tree, leaf: int) -> int:
    """Total degree of vertices visited strictly after ``leaf`` in planar DFS."""
    order: list[tuple[str, int]] = []

    def flatten(node: Child) -> None:
        if isinstance(node, int):
            order.append(("leaf", node))
            return
        order.append(("vertex", node.gen.degree))
        for c in node.children:
            flatten(c)

    flatten(t)
    seen = False
    acc = 0
    for kind, payload in order:
        if seen and kind == "vertex":
            acc += payload
        if kind == "leaf" and payload == leaf:
            seen = True
    return acc


def _graft(t1: Child, leaf: int, t2: Child) -> Child:
    """Replace ``leaf`` of ``t1`` by ``t2``, shifting labels order-preservingly."""
    a2 = tree_arity(t2)
    shifted = _relabel(t2, lambda j: j + leaf - 1)

    def walk(node: Child) -> Child:
        if isinstance(node, int):
            if node == leaf:
                return shifted
            return node + a2 - 1 if node > leaf else node
        return Tree(node.gen, tuple(walk(c) for c in node.children))

    return walk(t1)


def tree_compose(
    e1: FreeOperadElement, slot: int, e2: FreeOperadElement
) -> FreeOperadElement:
    """Operadic partial composition, bilinear over the canonical tree bases."""
    if not 1 <= slot <= e1.arity:
        raise ValueError(f"slot {slot} out of range 1..{e1.arity}")
    out: dict[Tree, Fraction] = {}
    for t1, c1 in e1.terms.items():
        after = _degree_after_leaf(t1, slot)
        for t2, c2 in e2.terms.items():
            sign = -1 if (tree_degree(t2) * after) % 2 else 1
            grafted = _graft(t1, slot, t2)
            canon, s = canonicalize(grafted)
            coeff = c1 * c2 * sign * s
            out[canon] = out.get(canon, Fraction(0)) + coeff
    return FreeOperadElement(e1.arity + e2.arity - 1, out)


def sigma_act(p: Permutation, e: FreeOperadElement) -> FreeOperadElement:
    """Relabel leaves through ``p`` (leaf ``j`` becomes leaf ``p(j)``)."""
    if p.size != e.arity:
        raise ValueError("arity mismatch")
    out: dict[Tree, Fraction] = {}
    for t, c in e.terms.items():
        relabeled = _relabel(t, lambda j: p(j))
        canon, s = canonicalize(relabeled)
        out[canon] = out.get(canon, Fraction(0)) + c * s
    return FreeOperadElement(e.arity, out)


# -- operadic derivations -----------------------------------------------------


def _standardize(t: Tree) -> Tree:
    """Relabel leaves by their ranks (monotone, hence sign-free and canonical)."""
    leaves = sorted(tree_leaves(t))
    rank = {label: i + 1 for i, label in enumerate(leaves)}
    out = _relabel(t, lambda j: rank[j])
    assert isinstance(out, Tree)
    return out


def _block_permutation(t: Tree) -> Permutation:
    """Permutation sending the standard block layout of ``t`` to its labels.

    Composing the standardized children of ``t`` into the root corolla lays
    the leaves out in blocks, child by child, each block carrying the
    child's labels in increasing order; this permutation relabels that
    layout back to the actual labels of ``t``.
    """
    images: list[int] = []
    for child in t.children:
        images.extend(sorted(tree_leaves(child)))
    return Permutation(tuple(images))


def extend_derivation(
    rule: Mapping[str, FreeOperadElement], degree: int, e: FreeOperadElement
) -> FreeOperadElement:
    """Leibniz extension of a generator rule to a degree-``degree`` derivation.

    Signs follow the depth-first tensor convention: replacing the vertex
    ``v`` costs ``(-1)**(degree * d)`` where ``d`` is the total degree of
    the generators preceding ``v`` in planar order.
    """
    out = FreeOperadElement.zero(e.arity)
    for tree, coeff in e.terms.items():
        if isinstance(tree, int):
            continue  # the unit is killed by every operadic derivation
        out = out + _derive_tree(tree, rule, degree).scale(coeff)
    return out


def _rule_value(rule: Mapping[str, FreeOperadElement], gen: Generator) -> FreeOperadElement:
    try:
        value = rule[gen.name]
    except KeyError:
        raise KeyError(f"derivation rule missing generator {gen.name!r}") from None
    if value.arity != gen.arity:
        raise ValueError(f"rule for {gen.name!r} has arity {value.arity} != {gen.arity}")
    return value


def _derive_tree(
    tree: Tree, rule: Mapping[str, FreeOperadElement], degree: int
) -> FreeOperadElement:
    gen = tree.gen
    built = corolla(gen)
    derived = _rule_value(rule, gen)
    built_degree = gen.degree
    for i in range(gen.arity, 0, -1):
        child = tree.children[i - 1]
        if isinstance(child, int):
            continue
        std = _standardize(child)
        child_elem = FreeOperadElement(tree_arity(std), {std: Fraction(1)})
        child_derived = _derive_tree(std, rule, degree)
        leibniz = -1 if (degree * built_degree) % 2 else 1
        derived = tree_compose(derived, i, child_elem) + tree_compose(
            built, i, child_derived
        ).scale(leibniz)
        built = tree_compose(built, i, child_elem)
        built_degree += tree_degree(std)
    rho = _block_permutation(tree)
    rebuilt = sigma_act(rho, built)
    if set(rebuilt.terms) != {tree}:
        raise AssertionError("tree decomposition failed to reproduce the tree")
    c = rebuilt.terms[tree]
    return sigma_act(rho, derived).scale(Fraction(1) / c)


def evaluate(
    e: FreeOperadElement,
    assign: Mapping[str, MultilinearMap],
    space: GradedVectorSpace,
    zero_degree: int | None = None,
) -> MultilinearMap:
    """Operad morphism into multilinear maps determined by ``assign``.

    Every generator occurring in ``e`` must be assigned a map of matching
    arity and degree; sign-representation generators additionally require
    graded skew maps (``p . f = sgn(p) f``) for the morphism to be defined.
    """
    if e.is_zero():
        if zero_degree is None:
            raise ValueError("evaluating the zero element needs an explicit degree")
        return MultilinearMap.zero(space, e.arity, zero_degree)
    out = MultilinearMap.zero(space, e.arity, e.degree())
    for tree, coeff in e.terms.items():
        if isinstance(tree, int):
            out = out + MultilinearMap.identity(space).scale(coeff)
            continue
        out = out + _evaluate_tree(tree, assign, space).scale(coeff)
    return out


def _assigned(assign: Mapping[str, MultilinearMap], gen: Generator, space) -> MultilinearMap:
    try:
        f = assign[gen.name]
    except KeyError:
        raise KeyError(f"assignment missing generator {gen.name!r}") from None
    if f.arity != gen.arity:
        raise ValueError(f"assignment for {gen.name!r} has arity {f.arity} != {gen.arity}")
    if not f.is_zero() and f.degree != gen.degree:
        raise ValueError(
            f"assignment for {gen.name!r} has degree {f.degree} != {gen.degree}"
        )
    if f.space != space:
        raise ValueError(f"assignment for {gen.name!r} lives on the wrong space")
    if gen.rep != "regular" and gen.arity >= 2:
        want = -1 if gen.rep == "sign" else 1
        for slot in range(1, gen.arity):
            images = list(range(1, gen.arity + 1))
            images[slot - 1], images[slot] = images[slot], images[slot - 1]
            if map_sigma_act(Permutation(tuple(images)), f) != f.scale(want):
                raise ValueError(
                    f"assignment for {gen.name!r} does not respect its {gen.rep} action"
                )
    return f


def _evaluate_tree(
    tree: Tree, assign: Mapping[str, MultilinearMap], space: GradedVectorSpace
) -> MultilinearMap:
    gen = tree.gen
    built = corolla(gen)
    value = _assigned(assign, gen, space)
    for i in range(gen.arity, 0, -1):
        child = tree.children[i - 1]
        if isinstance(child, int):
            continue
        std = _standardize(child)
        child_elem = FreeOperadElement(tree_arity(std), {std: Fraction(1)})
        built = tree_compose(built, i, child_elem)
        value = compose_at(value, i, _evaluate_tree(std, assign, space))
    rho = _block_permutation(tree)
    rebuilt = sigma_act(rho, built)
    if set(rebuilt.terms) != {tree}:
        raise AssertionError("tree decomposition failed to reproduce the tree")
    c = rebuilt.terms[tree]
    return map_sigma_act(rho, value).scale(Fraction(1) / c)


# -- presets: minimal resolutions of the associative and Lie operads ---------


@dataclass(frozen=True)
class Preset:
    name: str
    rep: str

    def x(self, n: int) -> Generator:
        if n < 2:
            raise ValueError("structure generators start at arity 2")
        return Generator(f"x{n}", n, 2 - n, self.rep)

    def xbar(self, n: int, k: int) -> Generator:
        if n < 2:
            raise ValueError("derivation generators start at arity 2")
        return Generator(f"xb{n}", n, (2 - n) + (k - 1), self.rep)

    def phi(self, k: int) -> Generator:
        return Generator("phi", 1, k)


PRESETS = {"ass": Preset("ass", "regular"), "lie": Preset("lie", "sign")}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r} (expected 'ass' or 'lie')") from None


def structure_differential(
    preset: Preset, n: int, flip_term: tuple[int, int, int] | None = None
) -> FreeOperadElement:
    """The differential of the arity-``n`` structure generator.

    ``flip_term=(i, j, t)`` negates the sign of a single summand: for the
    associative preset ``t`` is the composition slot, for the Lie preset the
    1-based index of the unshuffle.  Used by mutation self-tests.
    """
    out = FreeOperadElement.zero(n)
    for i in range(2, n):
        j = n + 1 - i
        if j < 2:
            continue
        if preset.rep == "regular":
            for l in range(1, i + 1):
                exponent = i + (l + 1) * (j + 1)
                if flip_term == (i, j, l):
                    exponent += 1
                coeff = -1 if exponent % 2 else 1
                out = out + tree_compose(
                    corolla(preset.x(i)), l, corolla(preset.x(j))
                ).scale(coeff)
        else:
            base = -1 if (j * (i - 1)) % 2 else 1
            core = tree_compose(corolla(preset.x(i)), 1, corolla(preset.x(j)))
            for t, sigma in enumerate(unshuffles(j, i - 1), start=1):
                coeff = base * sgn(sigma)
                if flip_term == (i, j, t):
                    coeff = -coeff
                out = out + sigma_act(sigma, core).scale(coeff)
    return out


def derivation_generator_differential(
    preset: Preset, n: int, k: int, flip_term: tuple[int, int, int] | None = None
) -> FreeOperadElement:
    """Differential of the arity-``n`` derivation generator at derivation degree ``k``.

    Built from its definition: the two insertion terms of the arity-1
    generator plus ``-(-1)**k`` times the image of the structure
    differential under the degree-``k-1`` derivation sending ``x`` to the
    barred generator.
    """
    phi = corolla(preset.phi(k))
    xn = corolla(preset.x(n))
    out = tree_compose(phi, 1, xn)
    mid_sign = -1 if (n * k) % 2 else 1
    for l in range(1, n + 1):
        out = out - tree_compose(xn, l, phi).scale(mid_sign)
    dx = structure_differential(preset, n, flip_term=flip_term)
    if not dx.is_zero():
        rule = {
            f"x{i}": corolla(preset.xbar(i, k)) for i in range(2, n)
        }
        s_dx = extend_derivation(rule, k - 1, dx)
        out = out - s_dx.scale(-1 if k % 2 else 1)
    return out


def generator_differential(
    preset_name: str, generator: str, k: int, flip_term: tuple[int, int, int] | None = None
) -> FreeOperadElement:
    """Differential of a named generator: ``phi``, ``x<n>`` or ``xb<n>``."""
    preset = get_preset(preset_name)
    if generator == "phi":
        return FreeOperadElement.zero(1)
    if generator.startswith("xb"):
        return derivation_generator_differential(preset, int(generator[2:]), k, flip_term)
    if generator.startswith("x"):
        return structure_differential(preset, int(generator[1:]), flip_term)
    raise ValueError(f"unknown generator {generator!r}")


def full_rule(preset: Preset, k: int, max_arity: int, flip_term=None) -> dict[str, FreeOperadElement]:
    """The differential as a generator rule covering arities up to ``max_arity``."""
    rule: dict[str, FreeOperadElement] = {"phi": FreeOperadElement.zero(1)}
    for n in range(2, max_arity + 1):
        rule[f"x{n}"] = structure_differential(preset, n, flip_term=flip_term)
        rule[f"xb{n}"] = derivation_generator_differential(preset, n, k, flip_term=flip_term)
    return rule


@dataclass
class GeneratorCheck:
    generator: str
    ok: bool
    residue: FreeOperadElement


@dataclass
class DSquaredReport:
    preset: str
    k: int
    max_arity: int
    checks: list[GeneratorCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def check_d_squared(
    preset_name: str, k: int, max_arity: int, flip_term: tuple[int, int, int] | None = None
) -> DSquaredReport:
    """Verify ``d(d(g)) = 0`` for every generator of arity up to ``max_arity``."""
    if max_arity < 2:
        raise ValueError("max_arity must be >= 2")
    preset = get_preset(preset_name)
    rule = full_rule(preset, k, max_arity, flip_term=flip_term)
    checks = []
    for name in ["phi"] + [f"x{n}" for n in range(2, max_arity + 1)] + [
        f"xb{n}" for n in range(2, max_arity + 1)
    ]:
        image = rule[name]
        residue = extend_derivation(rule, 1, image)
        checks.append(GeneratorCheck(name, residue.is_zero(), residue))
    return DSquaredReport(preset_name, k, max_arity, checks)


# -- rendering ----------------------------------------------------------------


def _generator_latex(name: str) -> str:
    if name == "phi":
        return r"\phi"
    if name.startswith("xb"):
        return r"\bar{x}^{%s}" % name[2:]
    if name.startswith("x"):
        return r"x^{%s}" % name[1:]
    return name


def _is_identity_planar(t: Tree) -> bool:
    leaves = tree_leaves(t)
    return leaves == list(range(1, len(leaves) + 1))


def _render_composition(t: Tree) -> str:
    head = _generator_latex(t.gen.name)
    pieces = []
    for i in range(t.gen.arity, 0, -1):
        child = t.children[i - 1]
        if isinstance(child, int):
            continue
        std = _standardize(child)
        sub = _render_composition(std)
        if tree_weight(std) > 1:
            sub = "(" + sub + ")"
        pieces.append(r"\circ_{%d}%s" % (i, sub))
    return head + "".join(pieces)


def _render_labeled(t: Child) -> str:
    if isinstance(t, int):
        return str(t)
    args = ",".join(_render_labeled(c) for c in t.children)
    return f"{_generator_latex(t.gen.name)}({args})"


def tree_to_latex(t: Child) -> str:
    if isinstance(t, int):
        return r"\mathsf{1}"
    if _is_identity_planar(t):
        return _render_composition(t)
    return _render_labeled(t)


def to_latex(e: FreeOperadElement) -> str:
    """Deterministic rendering: identity-labeled trees as circ-compositions,
    anything else in functional notation with explicit leaf labels."""
    if e.is_zero():
        return "0"
    parts = []
    for tree, coeff in e.sorted_terms():
        body = tree_to_latex(tree)
        if coeff == 1:
            term = body
        elif coeff == -1:
            term = "-" + body
        else:
            term = f"{coeff} {body}"
        parts.append(term)
    text = parts[0]
    for term in parts[1:]:
        if term.startswith("-"):
            text += " - " + term[1:]
        else:
            text += " + " + term
    return text
