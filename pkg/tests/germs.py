"""Seeded random rational germs for each class row."""

import random
from fractions import Fraction

from fold_atlas.jets import TruncatedPolynomial, monomials
from fold_atlas.surface import SurfaceGerm


def rat(rng: random.Random, bound=5, max_den=10) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(-bound * den, bound * den), den)


def nonzero(rng, bound=5, max_den=10) -> Fraction:
    while True:
        q = rat(rng, bound, max_den)
        if q:
            return q


def random_coefficients(rng, order=5) -> dict:
    return {(i, j): rat(rng) for i in range(order + 1) for j in range(order + 1 - i) if i + j >= 2}


def random_germ(rng, tag: str, umbilic: bool = False, order: int = 5) -> SurfaceGerm:
    """A germ satisfying the relations of row ``tag``; non-umbilic unless asked."""
    a = random_coefficients(rng, order)
    if tag == "S0":
        a[(1, 1)] = nonzero(rng)
    else:
        a[(1, 1)] = 0
        if tag == "S1":
            a[(2, 1)], a[(0, 3)] = nonzero(rng), nonzero(rng)
        elif tag == "S2":
            a[(2, 1)], a[(0, 3)], a[(3, 1)] = 0, nonzero(rng), nonzero(rng)
        elif tag == "B2":
            a[(2, 1)], a[(0, 3)] = nonzero(rng), 0
            while 3 * a[(2, 1)] * a[(0, 5)] - 5 * a[(1, 3)] ** 2 == 0:
                a[(0, 5)] = rat(rng)
        else:
            raise ValueError(tag)
    if umbilic:
        a[(0, 2)] = a[(2, 0)]
    else:
        while a[(0, 2)] == a[(2, 0)]:
            a[(0, 2)] = rat(rng)
    return SurfaceGerm.from_coefficients(a, order)


def with_coefficient(germ: SurfaceGerm, **updates) -> SurfaceGerm:
    """Copy with a_ij replaced, e.g. with_coefficient(g, a12=3)."""
    a = germ.coefficients()
    for key, val in updates.items():
        a[(int(key[1]), int(key[2]))] = Fraction(val)
    return SurfaceGerm.from_coefficients(a, germ.order)


def random_poly(rng, num_vars, order, n_terms=4, bound=3, constant=True) -> TruncatedPolynomial:
    exps = monomials(num_vars, order)
    if not constant:
        exps = exps[1:]
    terms = {}
    for _ in range(rng.randint(0, n_terms)):
        terms[rng.choice(exps)] = Fraction(rng.randint(-bound, bound), rng.randint(1, 4))
    return TruncatedPolynomial(num_vars, order, terms)
