"""Built-in example algebras, shipped as regression anchors.

Each builder returns the ungraded input data (space, product/bracket,
differential) together with the suspended structure; the CLI can emit them
as JSON documents carrying a provenance note.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .graded import GradedVector, GradedVectorSpace, MultilinearMap, symmetrize
from .homotopy_assoc import AInfinityStructure, from_dga
from .homotopy_lie import LInfinityStructure, from_dgla

FIXTURE_NOTES = {
    "dual-numbers": "dual numbers Q[eps]/(eps^2), eps in degree 0, zero differential",
    "exterior": "exterior algebra on one odd generator e (degree 1), zero differential",
    "solvable2": "2-dimensional solvable Lie algebra [e1, e2] = e2, zero differential",
}


def dual_numbers(truncation: int = 4) -> AInfinityStructure:
    """Q[eps]/(eps^2) with eps in degree 0 and d = 0, suspended."""
    A = GradedVectorSpace.from_pairs([("one", 0), ("eps", 0)])
    product = MultilinearMap(
        A,
        2,
        0,
        {
            ("one", "one"): {"one": 1},
            ("one", "eps"): {"eps": 1},
            ("eps", "one"): {"eps": 1},
        },
    )
    return from_dga(product, truncation=truncation)


def exterior_algebra(truncation: int = 4) -> AInfinityStructure:
    """Exterior algebra on one odd generator: 1 in degree 0, e in degree 1."""
    A = GradedVectorSpace.from_pairs([("one", 0), ("e", 1)])
    product = MultilinearMap(
        A,
        2,
        0,
        {
            ("one", "one"): {"one": 1},
            ("one", "e"): {"e": 1},
            ("e", "one"): {"e": 1},
        },
    )
    return from_dga(product, truncation=truncation)


def solvable2(truncation: int = 4) -> LInfinityStructure:
    """The nonabelian 2-dimensional Lie algebra [e1, e2] = e2 in degree 0."""
    A = GradedVectorSpace.from_pairs([("e1", 0), ("e2", 0)])
    bracket = MultilinearMap(
        A,
        2,
        0,
        {
            ("e1", "e2"): {"e2": 1},
            ("e2", "e1"): {"e2": -1},
        },
    )
    return from_dgla(bracket, truncation=truncation)


def ainfty_fixtures(truncation: int = 4) -> dict[str, AInfinityStructure]:
    return {
        "dual-numbers": dual_numbers(truncation),
        "exterior": exterior_algebra(truncation),
    }


def linfty_fixtures(truncation: int = 4) -> dict[str, LInfinityStructure]:
    return {"solvable2": solvable2(truncation)}


# -- seeded random data (report-reproducible) --------------------------------


def random_map(
    space: GradedVectorSpace,
    arity: int,
    degree: int,
    rng: random.Random,
    density: float = 0.7,
    symmetric: bool = False,
) -> MultilinearMap:
    """Random homogeneous map with small integer coefficients."""
    import itertools

    table = {}
    for inputs in itertools.product(space.labels, repeat=arity):
        want = space.tuple_degree(inputs) + degree
        targets = [l for l in space.labels if space.degree(l) == want]
        if not targets or rng.random() > density:
            continue
        coeffs = {}
        for t in targets:
            c = rng.randint(-2, 2)
            if c:
                coeffs[t] = Fraction(c)
        if coeffs:
            table[inputs] = coeffs
    f = MultilinearMap(space, arity, degree, table)
    if symmetric and arity >= 2:
        f = symmetrize(f)
    return f


def random_derivation_family(
    space: GradedVectorSpace,
    k: int,
    rng: random.Random,
    max_arity: int = 3,
    symmetric: bool = False,
) -> dict[int, MultilinearMap]:
    out = {}
    for n in range(1, max_arity + 1):
        f = random_map(space, n, k, rng, symmetric=symmetric)
        if not f.is_zero():
            out[n] = f
    return out
