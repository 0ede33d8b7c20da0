"""Free operad: tree calculus, resolution differentials, d^2, evaluation."""

import random
from fractions import Fraction

import pytest

from shd.fixtures import random_map
from shd.graded import GradedVectorSpace, MultilinearMap, compose_at, map_sigma_act
from shd.operad import (
    FreeOperadElement,
    Generator,
    Tree,
    canonicalize,
    check_d_squared,
    corolla,
    derivation_generator_differential,
    evaluate,
    extend_derivation,
    generator_differential,
    get_preset,
    sigma_act,
    structure_differential,
    to_latex,
    tree_compose,
    tree_degree,
    tree_leaves,
    tree_weight,
)
from shd.signs import Permutation, all_permutations, sgn


def sign_of(e: int) -> int:
    return -1 if e % 2 else 1


def elem(tree: Tree) -> FreeOperadElement:
    canon, s = canonicalize(tree)
    return FreeOperadElement(tree_arity_of(canon), {canon: Fraction(s)})


def tree_arity_of(t) -> int:
    return len(tree_leaves(t))


ASS = get_preset("ass")
LIE = get_preset("lie")


class TestTreeBasics:
    def test_corolla_unit_compose(self):
        from shd.operad import unit_element

        e = corolla(ASS.x(2))
        assert tree_compose(e, 1, unit_element()) == e
        assert tree_compose(e, 2, unit_element()) == e
        assert tree_compose(unit_element(), 1, e) == e

    def test_left_comb(self):
        x2 = corolla(ASS.x(2))
        combed = tree_compose(x2, 1, x2)
        assert len(combed.terms) == 1
        tree = next(iter(combed.terms))
        assert tree_leaves(tree) == [1, 2, 3]
        assert tree.children[1] == 3  # leaf 3 stays on the root

    def test_canonicalization_idempotent(self):
        x2, x3 = LIE.x(2), LIE.x(3)
        t = Tree(x2, (Tree(x3, (5, 2, 4)), Tree(x2, (3, 1))))
        canon, s = canonicalize(t)
        canon2, s2 = canonicalize(canon)
        assert canon2 == canon and s2 == 1

    def test_sign_rep_child_swap(self):
        # swapping even-degree children of a sign-rep vertex is a
        # transposition worth -1
        nu = LIE.x(2)
        inner = Tree(nu, (2, 3))
        swapped = Tree(nu, (inner, 1))
        canon, s = canonicalize(swapped)
        assert canon == Tree(nu, (1, inner))
        assert s == -1

    def test_koszul_child_swap(self):
        # odd-degree subtrees at a trivial-rep vertex swap with a Koszul minus
        g_odd = Generator("g", 1, 1, "trivial")
        root = Generator("r", 2, 0, "trivial")
        t = Tree(root, (Tree(g_odd, (2,)), Tree(g_odd, (1,))))
        canon, s = canonicalize(t)
        assert canon == Tree(root, (Tree(g_odd, (1,)), Tree(g_odd, (2,))))
        assert s == -1
        # at a sign-rep vertex the signature cancels the Koszul sign
        root_sgn = Generator("r2", 2, 0, "sign")
        t2 = Tree(root_sgn, (Tree(g_odd, (2,)), Tree(g_odd, (1,))))
        _, s2 = canonicalize(t2)
        assert s2 == 1

    def test_regular_children_not_sorted(self):
        x2 = ASS.x(2)
        inner = Tree(x2, (2, 3))
        t = Tree(x2, (inner, 1))
        canon, s = canonicalize(t)
        assert canon == t and s == 1


class TestSigmaAct:
    def test_identity(self):
        e = structure_differential(ASS, 3)
        assert sigma_act(Permutation.identity(3), e) == e

    def test_transposition_on_sign_corolla(self):
        nu = corolla(LIE.x(2))
        assert sigma_act(Permutation((2, 1)), nu) == nu.scale(-1)

    def test_transposition_on_regular_corolla(self):
        x2 = corolla(ASS.x(2))
        acted = sigma_act(Permutation((2, 1)), x2)
        assert acted != x2 and acted != x2.scale(-1)
        tree = next(iter(acted.terms))
        assert tree.children == (2, 1)

    def test_group_action_law(self):
        from shd.signs import compose

        e = structure_differential(LIE, 4)
        perms = list(all_permutations(4))
        rng = random.Random(3)
        for _ in range(8):
            p, q = rng.choice(perms), rng.choice(perms)
            assert sigma_act(compose(q, p), e) == sigma_act(p, sigma_act(q, e))


class TestComposeAxioms:
    def test_sequential_associativity(self):
        a = structure_differential(ASS, 3)  # arity 3, two-vertex trees
        b = corolla(ASS.x(2))
        c = corolla(ASS.x(3))
        # slot 2 of b lands inside b's block after composing at slot 2
        left = tree_compose(tree_compose(a, 2, b), 3, c)
        right = tree_compose(a, 2, tree_compose(b, 2, c))
        assert left == right

    def test_parallel_associativity(self):
        a = corolla(ASS.x(3))
        b = corolla(Generator("p", 2, 1))
        c = corolla(Generator("q", 2, 1))
        left = tree_compose(tree_compose(a, 3, b), 1, c)
        right = tree_compose(tree_compose(a, 1, c), 3 + 1, b).scale(
            sign_of(1 * 1)
        )
        assert left == right

    def test_parallel_associativity_lie(self):
        a = corolla(LIE.x(3))
        b = corolla(LIE.xbar(2, 2))  # degree 1: odd
        c = corolla(LIE.xbar(2, 2))
        left = tree_compose(tree_compose(a, 3, b), 1, c)
        right = tree_compose(tree_compose(a, 1, c), 4, b).scale(sign_of(1))
        assert left == right

    def test_equivariance_of_composition_via_evaluation(self):
        # the symbolic Sigma-action commutes with composition exactly the way
        # the endomorphism-operad action does
        space = GradedVectorSpace.from_pairs([("a", 0), ("b", 1)])
        rng = random.Random(19)
        f = random_map(space, 2, 0, rng)
        g = random_map(space, 2, -1, rng)
        assign = {"x2": f, "g": g}
        a = corolla(ASS.x(2))
        b = corolla(Generator("g", 2, -1))
        for slot in (1, 2):
            comp = tree_compose(a, slot, b)
            for p in all_permutations(3):
                lhs = evaluate(sigma_act(p, comp), assign, space)
                rhs = map_sigma_act(p, compose_at(f, slot, g))
                assert lhs == rhs, (slot, p.images)


class TestStructureDifferential:
    def test_ass_x2_vanishes(self):
        assert structure_differential(ASS, 2).is_zero()

    def test_ass_x3_frozen(self):
        # x^2 o_1 x^2 - x^2 o_2 x^2
        d = structure_differential(ASS, 3)
        x2 = ASS.x(2)
        t_left = Tree(x2, (Tree(x2, (1, 2)), 3))
        t_right = Tree(x2, (1, Tree(x2, (2, 3))))
        assert d.terms == {t_left: Fraction(1), t_right: Fraction(-1)}

    def test_lie_x3_frozen(self):
        # three unshuffle terms with signs +1, -1, -1 in canonical form
        d = structure_differential(LIE, 3)
        nu = LIE.x(2)
        t1 = Tree(nu, (Tree(nu, (1, 2)), 3))
        t2 = Tree(nu, (Tree(nu, (1, 3)), 2))
        t3 = Tree(nu, (1, Tree(nu, (2, 3))))
        assert d.terms == {t1: Fraction(1), t2: Fraction(-1), t3: Fraction(-1)}

    def test_ass_x4_term_count_and_signs(self):
        # (i,j) in {(2,3),(3,2)}: 2 + 3 = 5 summands, exponents i+(l+1)(j+1)
        d = structure_differential(ASS, 4)
        assert sum(abs(c) for c in d.terms.values()) == 5
        x2, x3 = ASS.x(2), ASS.x(3)
        t = Tree(x2, (Tree(x3, (1, 2, 3)), 4))  # x2 o_1 x3: i=2, j=3, l=1
        assert d.terms[t] == Fraction(sign_of(2 + 2 * 4))

    def test_weight_raised_by_one(self):
        for preset in (ASS, LIE):
            for n in (3, 4, 5):
                d = structure_differential(preset, n)
                assert {tree_weight(t) for t in d.terms} == {2}

    def test_degree_raised_by_one(self):
        for preset in (ASS, LIE):
            for n in (3, 4):
                d = structure_differential(preset, n)
                assert d.degree() == (2 - n) + 1


class TestDerivationDifferential:
    def test_ass_xbar2_k0_frozen(self):
        d = generator_differential("ass", "xb2", 0)
        phi, x2 = ASS.phi(0), ASS.x(2)
        expected = {
            Tree(phi, (Tree(x2, (1, 2)),)): Fraction(1),
            Tree(x2, (Tree(phi, (1,)), 2)): Fraction(-1),
            Tree(x2, (1, Tree(phi, (2,)))): Fraction(-1),
        }
        assert d.terms == expected

    def test_phi_differential_zero(self):
        assert generator_differential("ass", "phi", 1).is_zero()
        assert generator_differential("lie", "phi", -1).is_zero()

    @pytest.mark.parametrize("k", [-1, 0, 1, 2])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_ass_explicit_formula(self, k, n):
        # the assembled differential equals the fully expanded printed sum
        d = derivation_generator_differential(ASS, n, k)
        phi = corolla(ASS.phi(k))
        xn = corolla(ASS.x(n))
        expected = tree_compose(phi, 1, xn)
        for l in range(1, n + 1):
            expected = expected - tree_compose(xn, l, phi).scale(sign_of(n * k))
        for i in range(2, n):
            j = n + 1 - i
            if j < 2:
                continue
            for l in range(1, i + 1):
                c = sign_of(k + i + (l + 1) * (j + 1))
                barred_first = tree_compose(corolla(ASS.xbar(i, k)), l, corolla(ASS.x(j)))
                barred_second = tree_compose(corolla(ASS.x(i)), l, corolla(ASS.xbar(j, k)))
                expected = expected - (
                    barred_first + barred_second.scale(sign_of((k + 1) * i))
                ).scale(c)
        assert d == expected

    @pytest.mark.parametrize("k", [-1, 0, 1, 2])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_lie_explicit_formula(self, k, n):
        d = derivation_generator_differential(LIE, n, k)
        phi = corolla(LIE.phi(k))
        xn = corolla(LIE.x(n))
        expected = tree_compose(phi, 1, xn)
        for l in range(1, n + 1):
            expected = expected - tree_compose(xn, l, phi).scale(sign_of(n * k))
        from shd.signs import unshuffles

        for i in range(2, n):
            j = n + 1 - i
            if j < 2:
                continue
            c = sign_of(k + j * (i - 1))
            core = tree_compose(corolla(LIE.xbar(i, k)), 1, corolla(LIE.x(j))) + tree_compose(
                corolla(LIE.x(i)), 1, corolla(LIE.xbar(j, k))
            ).scale(sign_of((k + 1) * i))
            for sigma in unshuffles(j, i - 1):
                expected = expected - sigma_act(sigma, core).scale(c * sgn(sigma))
        assert d == expected

    def test_degree(self):
        for preset_name in ("ass", "lie"):
            for k in (-1, 0, 1, 2):
                for n in (2, 3):
                    d = generator_differential(preset_name, f"xb{n}", k)
                    assert d.degree() == (2 - n) + (k - 1) + 1

    def test_weight_at_most_two(self):
        for preset_name in ("ass", "lie"):
            d = generator_differential(preset_name, "xb4", 1)
            assert {tree_weight(t) for t in d.terms} <= {1, 2}


class TestExtendDerivation:
    def test_zero_rule(self):
        e = structure_differential(ASS, 4)
        rule = {f"x{i}": FreeOperadElement.zero(i) for i in (2, 3, 4)}
        assert extend_derivation(rule, 1, e).is_zero()

    def test_single_corolla(self):
        x3 = corolla(ASS.x(3))
        rule = {"x3": structure_differential(ASS, 3)}
        assert extend_derivation(rule, 1, x3) == structure_differential(ASS, 3)

    def test_two_vertex_leibniz(self):
        g1 = Generator("g1", 2, 1)
        g2 = Generator("g2", 2, 2)
        r1 = corolla(Generator("h1", 2, 2))
        r2 = corolla(Generator("h2", 2, 3))
        rule = {"g1": r1, "g2": r2}
        for deg in (0, 1, 2):
            e = tree_compose(corolla(g1), 1, corolla(g2))
            derived = extend_derivation(rule, deg, e)
            expected = tree_compose(r1, 1, corolla(g2)) + tree_compose(
                corolla(g1), 1, r2
            ).scale(sign_of(deg * g1.degree))
            assert derived == expected, deg

    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    @pytest.mark.parametrize("degrees", [(0, 0, 0), (1, 0, 1), (2, 1, 1), (1, 1, 1)])
    def test_pictured_three_vertex_coefficients(self, k, degrees):
        # s((x1 o_1 x2) o_4 x3) = barred-x1 term
        #   + (-1)^{(k-1)|x1|} barred-x2 term
        #   + (-1)^{(k-1)(|x1|+|x2|)} barred-x3 term
        d1, d2, d3 = degrees
        x1 = Generator("x1", 2, d1)
        x2 = Generator("x2", 3, d2)
        x3 = Generator("x3", 2, d3)
        bars = {
            name: Generator("b" + name, gen.arity, gen.degree + k - 1)
            for name, gen in (("x1", x1), ("x2", x2), ("x3", x3))
        }
        tree = Tree(x1, (Tree(x2, (1, 2, 3)), Tree(x3, (4, 5))))
        e = FreeOperadElement(5, {tree: Fraction(1)})
        rule = {name: corolla(bar) for name, bar in bars.items()}
        derived = extend_derivation(rule, k - 1, e)
        t1 = Tree(bars["x1"], (Tree(x2, (1, 2, 3)), Tree(x3, (4, 5))))
        t2 = Tree(x1, (Tree(bars["x2"], (1, 2, 3)), Tree(x3, (4, 5))))
        t3 = Tree(x1, (Tree(x2, (1, 2, 3)), Tree(bars["x3"], (4, 5))))
        expected = {
            t1: Fraction(1),
            t2: Fraction(sign_of((k - 1) * d1)),
            t3: Fraction(sign_of((k - 1) * (d1 + d2))),
        }
        assert derived.terms == expected


class TestDSquared:
    @pytest.mark.parametrize("preset", ["ass", "lie"])
    @pytest.mark.parametrize("k", [0, 1])
    def test_small_window(self, preset, k):
        report = check_d_squared(preset, k, 4)
        assert report.ok, [
            (c.generator, to_latex(c.residue)) for c in report.checks if not c.ok
        ]

    def test_structure_part_is_k_independent(self):
        r0 = check_d_squared("ass", 0, 3)
        r1 = check_d_squared("ass", 1, 3)
        for c0, c1 in zip(r0.checks, r1.checks):
            if c0.generator.startswith("x") and not c0.generator.startswith("xb"):
                assert c0.ok and c1.ok

    @pytest.mark.parametrize("preset", ["ass", "lie"])
    def test_mutation_is_caught(self, preset):
        report = check_d_squared(preset, 1, 4, flip_term=(2, 3, 1))
        assert not report.ok
        bad = [c.generator for c in report.checks if not c.ok]
        assert "x4" in bad

    def test_every_single_ass_flip_is_caught(self):
        # flipping any one sign in the arity-4 structure differential breaks d^2
        for i in (2, 3):
            j = 5 - i
            for l in range(1, i + 1):
                report = check_d_squared("ass", 1, 4, flip_term=(i, j, l))
                assert not report.ok, (i, j, l)


class TestEvaluate:
    def setup_method(self):
        self.space = GradedVectorSpace.from_pairs([("a", 0), ("b", 1)])
        self.rng = random.Random(71)

    def maps_for_ass(self, k):
        m = {i: random_map(self.space, i, 2 - i, self.rng) for i in (2, 3, 4)}
        th = {i: random_map(self.space, i, k - i + 1, self.rng) for i in (1, 2, 3, 4)}
        d = random_map(self.space, 1, 1, self.rng)
        return d, m, th

    def assignment_ass(self, d, m, th, k, up_to=4):
        assign = {"phi": th[1].scale(sign_of(k))}
        for i in range(2, up_to + 1):
            assign[f"x{i}"] = m[i]
            assign[f"xb{i}"] = th[i]
        return assign

    def test_single_corolla(self):
        f = random_map(self.space, 2, 0, self.rng)
        assign = {"x2": f}
        got = evaluate(corolla(ASS.x(2)), assign, self.space)
        assert got == f

    def test_evaluate_dx3_is_associativity_element(self):
        m2 = random_map(self.space, 2, 0, self.rng)
        got = evaluate(structure_differential(ASS, 3), {"x2": m2}, self.space)
        assert got == compose_at(m2, 1, m2) - compose_at(m2, 2, m2)

    def test_homomorphism_property(self):
        e1 = structure_differential(ASS, 3)
        e2 = corolla(ASS.x(2))
        m2 = random_map(self.space, 2, 0, self.rng)
        assign = {"x2": m2}
        for slot in (1, 2, 3):
            lhs = evaluate(tree_compose(e1, slot, e2), assign, self.space)
            rhs = compose_at(evaluate(e1, assign, self.space), slot, m2)
            assert lhs == rhs, slot

    def test_equivariance_regular(self):
        e = structure_differential(ASS, 3)
        m2 = random_map(self.space, 2, 0, self.rng)
        assign = {"x2": m2}
        for p in all_permutations(3):
            lhs = evaluate(sigma_act(p, e), assign, self.space)
            rhs = map_sigma_act(p, evaluate(e, assign, self.space))
            assert lhs == rhs

    def test_equivariance_sign(self):
        from shd.graded import map_sigma_act as act_map

        e = structure_differential(LIE, 3)
        raw = random_map(self.space, 2, 0, self.rng)
        skew = MultilinearMap.zero(self.space, 2, 0)
        for p in all_permutations(2):
            skew = skew + act_map(p, raw).scale(sgn(p))
        assign = {"x2": skew}
        for p in all_permutations(3):
            lhs = evaluate(sigma_act(p, e), assign, self.space)
            rhs = map_sigma_act(p, evaluate(e, assign, self.space))
            assert lhs == rhs

    def test_rejects_non_skew_for_sign_rep(self):
        f = MultilinearMap(self.space, 2, 0, {("a", "a"): {"a": 1}})
        with pytest.raises(ValueError, match="does not respect"):
            evaluate(corolla(LIE.x(2)), {"x2": f}, self.space)

    @pytest.mark.parametrize("k", [0, 1, 2])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_evaluation_bridge_ass(self, k, n):
        # evaluate(d xbar^n) + unsuspended defect == End-operad differential
        # of theta_n, as an identity of maps for arbitrary random families
        from shd.homotopy_assoc import unsuspended_sh_defect

        d, m, th = self.maps_for_ass(k)
        assign = self.assignment_ass(d, m, th, k)
        assign["phi"] = th[1].scale(sign_of(k))
        e = derivation_generator_differential(ASS, n, k)
        got = evaluate(e, assign, self.space, zero_degree=(2 - n) + k)
        theta_n = th[n]
        sign_theta = sign_of(k - n + 1)
        d_end = compose_at(d, 1, theta_n)
        for l in range(1, n + 1):
            d_end = d_end - compose_at(theta_n, l, d).scale(sign_theta)
        defect = unsuspended_sh_defect(d, m, th, k, n)
        assert got + defect == d_end, (k, n)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_evaluation_bridge_structure(self, n):
        from shd.homotopy_assoc import unsuspended_ainfty_defect

        d, m, _ = self.maps_for_ass(0)
        assign = {f"x{i}": m[i] for i in (2, 3, 4)}
        got = evaluate(structure_differential(ASS, n), assign, self.space, zero_degree=3 - n)
        m_n = m[n]
        d_end = compose_at(d, 1, m_n)
        for l in range(1, n + 1):
            d_end = d_end - compose_at(m_n, l, d).scale(sign_of(n))
        defect = unsuspended_ainfty_defect(d, m, n)
        assert got + defect == d_end, n

    @pytest.mark.parametrize("k", [0, 1, 2])
    @pytest.mark.parametrize("n", [2, 3])
    def test_evaluation_bridge_lie(self, k, n):
        from shd.graded import map_sigma_act as act_map
        from shd.homotopy_lie import unsuspended_lie_sh_defect

        def skew(f):
            out = MultilinearMap.zero(self.space, f.arity, f.degree)
            for p in all_permutations(f.arity):
                out = out + act_map(p, f).scale(sgn(p))
            return out

        l_maps = {i: skew(random_map(self.space, i, 2 - i, self.rng)) for i in (2, 3, 4)}
        th = {i: skew(random_map(self.space, i, k - i + 1, self.rng)) for i in (1, 2, 3, 4)}
        d = random_map(self.space, 1, 1, self.rng)
        assign = {"phi": th[1].scale(sign_of(k + 1))}
        for i in (2, 3, 4):
            assign[f"x{i}"] = l_maps[i]
            assign[f"xb{i}"] = th[i]
        e = derivation_generator_differential(LIE, n, k)
        got = evaluate(e, assign, self.space, zero_degree=(2 - n) + k)
        theta_n = th[n]
        sign_theta = sign_of(k - n + 1)
        d_end = compose_at(d, 1, theta_n)
        for l in range(1, n + 1):
            d_end = d_end - compose_at(theta_n, l, d).scale(sign_theta)
        defect = unsuspended_lie_sh_defect(d, l_maps, th, k, n)
        assert got + defect == d_end, (k, n)


class TestLatex:
    def test_zero(self):
        assert to_latex(FreeOperadElement.zero(3)) == "0"

    def test_dx3_rendering(self):
        assert (
            to_latex(structure_differential(ASS, 3))
            == r"x^{2}\circ_{1}x^{2} - x^{2}\circ_{2}x^{2}"
        )

    def test_round_trip_stability(self):
        for e in (
            structure_differential(ASS, 4),
            structure_differential(LIE, 4),
            generator_differential("lie", "xb3", 1),
        ):
            assert to_latex(e) == to_latex(e)

    def test_labeled_rendering(self):
        d = structure_differential(LIE, 3)
        text = to_latex(d)
        assert r"x^{2}\circ_{1}x^{2}" in text
        assert r"x^{2}(x^{2}(1,3),2)" in text


class TestTreeProperties:
    """Randomized structural laws for the tree calculus."""

    @staticmethod
    def random_tree(rng, preset, arity):
        # random binary-ish tree with the preset's generators, leaves 1..arity
        labels = list(range(1, arity + 1))
        rng.shuffle(labels)

        def build(slots):
            if len(slots) == 1:
                return slots[0]
            cut = rng.randint(1, len(slots) - 1)
            parts = [slots[:cut], slots[cut:]]
            kids = tuple(build(p) if len(p) > 1 or rng.random() < 0.7 else p[0] for p in parts)
            kids = tuple(k if isinstance(k, (int, Tree)) else k for k in kids)
            return Tree(preset.x(2), kids)

        tree = build(labels)
        if isinstance(tree, int):
            tree = Tree(preset.x(2), (1, 2))
        return tree

    @pytest.mark.parametrize("preset", [ASS, LIE])
    def test_canonicalize_idempotent_random(self, preset):
        rng = random.Random(101)
        for arity in (2, 3, 4, 5):
            for _ in range(20):
                t = self.random_tree(rng, preset, arity)
                canon, s = canonicalize(t)
                assert s in (-1, 1)
                canon2, s2 = canonicalize(canon)
                assert canon2 == canon and s2 == 1

    @pytest.mark.parametrize("preset", [ASS, LIE])
    def test_sigma_double_relabel_is_identity(self, preset):
        rng = random.Random(102)
        for arity in (3, 4):
            for _ in range(10):
                t = self.random_tree(rng, preset, arity)
                canon, s = canonicalize(t)
                e = FreeOperadElement(arity, {canon: Fraction(s)})
                for p in all_permutations(arity):
                    back = sigma_act(p.inverse(), sigma_act(p, e))
                    assert back == e, p.images
