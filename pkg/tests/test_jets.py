from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fold_atlas.errors import CompositionDomainError, DimensionError
from fold_atlas.jets import TruncatedPolynomial as TP
from fold_atlas.jets import compose, from_normalized, monomials, odd_part, variables


def xy(order):
    return variables(2, order)


def test_add_examples():
    x, y = xy(3)
    assert (x + y) + (x - y) == 2 * x
    p = x * y + 3
    assert p + TP.zero(2, 3) == p
    x2, y2 = xy(2)
    assert x2 * x2 + y2 * y2 == TP(2, 2, {(2, 0): 1, (0, 2): 1})


def test_add_dimension_mismatch():
    with pytest.raises(DimensionError):
        TP.variable(0, 2, 3) + TP.variable(0, 3, 3)


def test_mul_examples():
    x, y = xy(2)
    assert (x + y) * (x - y) == x * x - y * y
    x3, y3 = xy(3)
    assert (x3 * x3) * (y3 * y3) == TP.zero(2, 3)
    assert (1 + x) ** 2 == 1 + 2 * x + x * x


def test_mul_takes_min_order():
    a = TP.variable(0, 1, 5)
    b = TP.variable(0, 1, 2)
    assert (a * b).order == 2


def test_partial_derivative_examples():
    x, y = xy(4)
    assert (y**3).diff(1) == 3 * y * y
    assert (y * y).diff(0).is_zero()
    assert (x * x * y + y**3).diff(1) == x * x + 3 * y * y


def test_derivative_lowers_reliable_degree():
    x, y = xy(5)
    f = x**3 + y**5
    assert f.reliable_degree == 5
    assert f.diff(0).reliable_degree == 4
    assert f.diff(0).diff(1).reliable_degree == 3
    # multiplying by y restores one degree of trust
    assert (y * f.diff(1)).reliable_degree == 5


def test_compose_examples():
    x, y = xy(4)
    X, Y, Z = variables(3, 4)
    f = x * x * y
    assert Z.compose([x, y * y, f]) == x * x * y
    assert (X * Y).compose([x, y * y, f]) == x * y * y
    q = (x * x + y * y) * Fraction(1, 2)
    got = (Z * Z).compose([x, y * y, q])
    want = TP(2, 4, {(4, 0): Fraction(1, 4), (2, 2): Fraction(1, 2), (0, 4): Fraction(1, 4)})
    assert got == want


def test_compose_rejects_constant_term():
    x, y = xy(3)
    with pytest.raises(CompositionDomainError):
        compose(TP.variable(0, 1, 3), [x + 1])


def test_evaluate_examples():
    x, y = xy(3)
    assert (x * x + y).evaluate([Fraction(1, 2), Fraction(1, 3)]) == Fraction(7, 12)
    assert TP.zero(2, 3)(5, 7) == 0
    x1, t1 = xy(3)
    assert (x1**3 - 3 * x1 * x1 + t1)(1, 3) == 1


def test_odd_part_examples():
    x, y = xy(4)
    assert odd_part(y**3 - x * x * y + x * x, 1) == y**3 - x * x * y
    assert odd_part(x * x, 1).is_zero()


def test_odd_part_of_figure_family_is_everything():
    # a treated as a third variable
    x, y, a = variables(3, 10)
    g = y**5 - x * x * y + a**4 * y - 2 * a * a * y**3
    assert odd_part(g, 1) == g


def test_odd_part_matches_definition():
    x, y = xy(5)
    p = 3 * y**3 + x * y * y - x**4 * y + 2
    flipped = p.compose([x, -y])
    assert p.odd_part(1) == (p - flipped) * Fraction(1, 2)


def test_canonical_form_drops_zeros_and_high_terms():
    p = TP(2, 2, {(1, 0): 0, (3, 0): 5, (0, 1): 1, (0, 0): Fraction(0)})
    assert dict(p.terms) == {(0, 1): Fraction(1)}


def test_floats_refused():
    with pytest.raises(TypeError):
        TP(1, 2, {(1,): 0.5})


def test_monomials_grlex():
    assert monomials(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(monomials(2, 5)) == 21


def test_terms_iterate_in_grlex_order():
    p = TP(2, 3, {(0, 2): 1, (1, 0): 2, (2, 1): 3, (1, 1): 4})
    assert list(p.terms) == [(1, 0), (1, 1), (0, 2), (2, 1)]


def test_json_round_trip():
    x, y = xy(4)
    p = Fraction(3, 7) * x * y - y**4 + 2
    doc = p.to_json()
    assert doc["terms"][0] == {"exp": [0, 0], "coef": "2"}
    assert TP.from_json(doc) == p


def test_json_rejects_duplicates():
    doc = {"vars": 1, "order": 2, "terms": [{"exp": [1], "coef": "1"}, {"exp": [1], "coef": "2"}]}
    with pytest.raises(ValueError):
        TP.from_json(doc)


def test_from_normalized_uses_factorials():
    p = from_normalized({(2, 1): 2, (0, 5): 120}, 5)
    assert p.coefficient((2, 1)) == 1
    assert p.coefficient((0, 5)) == 1


def test_float_function_matches_exact():
    x, y = xy(4)
    p = Fraction(1, 3) * x**3 - 2 * x * y + y**4
    f = p.to_float_function()
    assert abs(f(0.5, -0.25) - float(p(Fraction(1, 2), Fraction(-1, 4)))) < 1e-15


def test_substitute_values():
    x, y = xy(3)
    p = x * x * y + y
    q = p.substitute_values({0: 2})
    assert q == 5 * y


# -- hypothesis -----------------------------------------------------------------

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def polys(draw, num_vars=2, order=4, constant=True):
    exps = st.tuples(*[st.integers(0, order)] * num_vars).filter(
        lambda e: sum(e) <= order and (constant or sum(e) > 0)
    )
    terms = draw(st.dictionaries(exps, rationals, max_size=5))
    return TP(num_vars, order, terms)


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == TP.zero(2, 4)


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_leibniz(p, q):
    lhs = (p * q).diff(0)
    rhs = p * q.diff(0) + q * p.diff(0)
    assert lhs.truncate(3) == rhs.truncate(3)


@settings(max_examples=40, deadline=None)
@given(polys(3, 4), polys(2, 4, False), polys(2, 4, False), polys(2, 4, False))
def test_chain_rule(outer, a, b, c):
    inner = [a, b, c]
    lhs = outer.compose(inner).diff(0)
    rhs = TP.zero(2, 4)
    for j in range(3):
        rhs = rhs + outer.diff(j).compose(inner) * inner[j].diff(0)
    assert lhs.truncate(3) == rhs.truncate(3)


@settings(max_examples=40, deadline=None)
@given(polys(2, 4), polys(2, 4))
def test_evaluate_is_homomorphism(p, q):
    pt = [Fraction(1, 3), Fraction(-2, 5)]
    # evaluation of a truncated product only agrees when nothing was cut
    if p.degree() + q.degree() <= 4:
        assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
