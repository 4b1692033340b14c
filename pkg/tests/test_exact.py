import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from fold_atlas.gaussian import GaussianRational as G
from fold_atlas.linalg import bareiss_rank, column_rank_profile, determinant, rank, rank_rows
from fold_atlas.univariate import count_real_roots, real_roots, squarefree_decomposition


def test_gaussian_arithmetic():
    a, b = G(1, 2), G(Fraction(1, 3), -1)
    assert a * b == G(Fraction(1, 3) + 2, -1 + Fraction(2, 3))
    assert (a / b) * b == a
    assert a.conjugate().norm() == 5
    assert G.parse("1/2,-3") == G(Fraction(1, 2), -3)
    assert (G(0, 1) ** 2) == -1


def test_rank_small_cases():
    assert rank_rows([[1, 0, -1], [0, 2, 2], [1, 2, 0]]) == 3
    # rows dependent once k1 == k2
    assert rank_rows([[1, 0, -1], [0, 2, 2], [1, 1, 0]]) == 2
    assert rank_rows([[0, 0], [0, 0]]) == 0
    assert rank([]) == 0


def test_rank_profile():
    cols = [[1, 0, 0], [2, 0, 0], [0, 1, 0], [1, 1, 0]]
    assert column_rank_profile(cols) == [1, 1, 2, 2]


@settings(max_examples=80, deadline=None)
@given(
    st.lists(
        st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=5), min_size=5, max_size=5),
        min_size=1,
        max_size=7,
    )
)
def test_rank_matches_sympy(rows):
    want = sympy.Matrix(rows).rank()
    assert rank_rows(rows) == want


def test_rank_invariant_under_permutation_and_scaling():
    rng = random.Random(3)
    for _ in range(30):
        cols = [[Fraction(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(6)] for _ in range(5)]
        cols.append([a + b for a, b in zip(cols[0], cols[1])])
        r = rank(cols)
        shuffled = cols[:]
        rng.shuffle(shuffled)
        factors = [Fraction(rng.choice([-3, 2, 7]), 5) for _ in shuffled]
        scaled = [[v * k for v in c] for c, k in zip(shuffled, factors)]
        assert rank(shuffled) == r == rank(scaled)


def test_bareiss_agrees():
    rng = random.Random(5)
    for _ in range(40):
        m = [[rng.randint(-3, 3) for _ in range(5)] for _ in range(4)]
        m.append([a - b for a, b in zip(m[0], m[2])])
        assert bareiss_rank(m) == rank_rows(m) == sympy.Matrix(m).rank()


def test_determinant_fraction_and_gaussian():
    m = [[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]]
    assert determinant(m) == -2
    gm = [[G(1, 1), G(0, 1)], [G(2), G(1, -1)]]
    assert determinant(gm) == G(1, 1) * G(1, -1) - G(0, 1) * G(2)
    assert determinant([[Fraction(0), Fraction(1)], [Fraction(0), Fraction(2)]]) == 0


def test_real_roots_with_multiplicity():
    # -x^3 + 3x - 2 = -(x - 1)^2 (x + 2)
    assert real_roots([-2, 3, 0, -1]) == [(-2.0, 1), (1.0, 2)]
    assert real_roots([0, 0, 0, 1]) == [(0.0, 3)]
    assert real_roots([1, 0, 1]) == []
    with pytest.raises(ValueError):
        real_roots([])


def test_real_roots_irrational():
    roots = real_roots([-2, 0, 1])
    assert [m for _, m in roots] == [1, 1]
    assert abs(roots[1][0] - 2**0.5) < 1e-15


def test_squarefree_and_sturm():
    p = [Fraction(c) for c in sympy.Poly((sympy.Symbol("x") - 3) ** 3 * (sympy.Symbol("x") + 1), sympy.Symbol("x")).all_coeffs()[::-1]]
    mults = sorted(m for _, m in squarefree_decomposition(p))
    assert mults == [1, 3]
    assert count_real_roots([-1, 0, 0, 0, 1]) == 2
