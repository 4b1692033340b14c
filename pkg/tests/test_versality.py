import random
from fractions import Fraction

import pytest

from fold_atlas.errors import InsufficientJetError, InvariantError, UnsupportedClassError
from fold_atlas.folding import build_folding_map, classify
from fold_atlas.jets import variables
from fold_atlas.surface import SurfaceGerm
from fold_atlas.versality import (
    EXPECTED_CODIMENSION,
    JetBasis,
    assemble_tangent_matrix,
    codimension,
    determinacy_degree,
    is_versal_rotation,
    main_theorem_check,
    rank_exact,
    tangent_matrix_for,
    target_monomials,
)

from germs import nonzero, random_germ, with_coefficient

S1 = {(2, 0): 1, (0, 2): 2, (2, 1): 2, (0, 3): 6}
S2 = {(2, 0): 1, (0, 2): 2, (0, 3): 6, (3, 1): 6}
B2 = {(2, 0): 1, (2, 1): 2, (0, 5): 120}


def germ(coeffs, order=5):
    return SurfaceGerm.from_coefficients(coeffs, order)


def test_determinacy_degrees():
    assert [determinacy_degree(t) for t in ("S0", "S1", "S2", "B2")] == [2, 3, 4, 5]
    with pytest.raises(UnsupportedClassError):
        determinacy_degree("BeyondCodim2")


def test_jet_basis_size_and_order():
    for k in range(6):
        assert len(JetBasis(k)) == 3 * (k + 1) * (k + 2) // 2
    assert JetBasis(1).entries()[:4] == [((0, 0), 1), ((0, 0), 2), ((0, 0), 3), ((1, 0), 1)]
    assert len(JetBasis(5)) == 63


def test_target_monomial_bound():
    assert target_monomials(2) == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (2, 0, 0)]
    assert all(a + 2 * b + 2 * c <= 5 for a, b, c in target_monomials(5))


def test_tF_column_example():
    x, y = variables(2, 3)
    m = assemble_tangent_matrix(build_folding_map(germ({(1, 1): 1}, 3)), 2, include_vr=False)
    j = m.labels.index("tF:F_y*x^0y^0")
    assert m.fields[j][1] == 2 * y.truncate(3) and m.fields[j][2] == x


def test_omega_column_example():
    x, y = variables(2, 5)
    m = assemble_tangent_matrix(build_folding_map(germ({(2, 0): 1, (0, 2): 2, (0, 3): 6})), 3)
    j = m.labels.index("wF:eta(0,0,1).e3")
    assert m.fields[j][2] == Fraction(1, 2) * x * x + y * y + y**3


def test_vr_columns_are_the_generators():
    m = tangent_matrix_for(germ(S1), 3)
    x, y = variables(2, 4)
    assert m.labels[-2:] == ["VR:1", "VR:2"]
    assert m.fields[-2][0] == -y and m.fields[-2][1] == 2 * x * y


def test_insufficient_order_rejected():
    with pytest.raises(InsufficientJetError):
        assemble_tangent_matrix(build_folding_map(germ(S1, 3)), 3)


def test_rank_submatrix_examples():
    assert rank_exact([[1, 0, 1], [0, 2, 2], [-1, 2, 0]]) == 3
    assert rank_exact([[1, 0, 1], [0, 2, 1], [-1, 2, 0]]) == 2
    assert rank_exact([[0, 0], [0, 0]]) == 0


@pytest.mark.parametrize(
    "coeffs, tag, codim",
    [
        ({(1, 1): 1}, "S0", 0),
        (S1, "S1", 1),
        (B2, "B2", 2),
        ({(2, 0): 2, (0, 2): 2, (0, 3): 6, (3, 1): -24}, "S2", 2),
    ],
)
def test_codimension_examples(coeffs, tag, codim):
    g = germ(coeffs)
    assert classify(g).tag == tag
    assert codimension(g, tag) == codim == EXPECTED_CODIMENSION[tag]


def test_codimension_of_normal_forms_over_a_short_jet():
    # (x, y^2, y^3 - x^2 y) needs only its 3-jet
    g = germ({(0, 3): 6, (2, 1): -2}, order=3)
    assert codimension(g, "S1") == 1


def test_versality_examples():
    assert is_versal_rotation(germ(S2)).versal_by_rank
    assert not is_versal_rotation(germ({(2, 0): 1, (0, 2): 1, (0, 3): 6, (3, 1): 6})).versal_by_rank
    transverse = germ({(2, 0): 1, (2, 1): 2, (1, 3): 6, (0, 5): 120})
    assert is_versal_rotation(transverse).versal_by_rank
    umb = germ({(2, 0): 1, (0, 2): 1, (2, 1): 2, (3, 0): 1, (0, 5): 120})
    rep = is_versal_rotation(umb)
    assert not rep.versal_by_rank and not rep.versal_by_formula and rep.agreement


def test_report_bookkeeping():
    rep = is_versal_rotation(germ(B2))
    assert rep.k_used == 5 and rep.rows == 63
    assert rep.codimension == rep.rows - rep.rank_without_vr == 2
    assert 0 <= rep.rank_with_vr - rep.rank_without_vr <= 2


def test_beyond_codim2_unsupported():
    with pytest.raises(UnsupportedClassError):
        is_versal_rotation(germ({(2, 0): 1, (0, 2): 2, (3, 0): 6}))


def test_reduced_and_exact_vr_give_the_same_rank():
    rng = random.Random(21)
    for tag in ("S1", "S2", "B2"):
        for _ in range(8):
            g = random_germ(rng, tag, umbilic=rng.random() < 0.3)
            k = determinacy_degree(tag)
            assert rank_exact(tangent_matrix_for(g, k, "generators")) == rank_exact(tangent_matrix_for(g, k, "exact"))


def test_extra_target_monomials_never_raise_rank():
    rng = random.Random(22)
    for tag in ("S1", "S2", "B2"):
        g = random_germ(rng, tag)
        k = determinacy_degree(tag)
        F = build_folding_map(SurfaceGerm(g.jet.extend(k + 3).truncate(k + 1)))
        base = rank_exact(assemble_tangent_matrix(F, k))
        extra = [(a, b, c) for a in range(k + 2) for b in range(3) for c in range(3) if a + 2 * b + 2 * c in (k + 1, k + 2)]
        assert rank_exact(assemble_tangent_matrix(F, k, extra_target=extra)) == base


def test_boundary_cases_are_not_versal():
    rng = random.Random(23)
    for _ in range(10):
        g = random_germ(rng, "S2", umbilic=True)
        assert not is_versal_rotation(g).versal_by_rank
        g = random_germ(rng, "B2")
        a21, a13 = g.a(2, 1), g.a(1, 3)
        if a13 == 0:
            g = with_coefficient(g, a13=nonzero(rng))
            a13 = g.a(1, 3)
            if classify(g).tag != "B2":
                continue
        g = with_coefficient(g, a12=a13 * (g.k1 - g.k2) / (3 * a21))
        assert not is_versal_rotation(g).versal_by_rank


def test_main_theorem_examples():
    rep = main_theorem_check(germ({(2, 0): 1, (2, 1): 2, (1, 3): 6, (0, 5): 120}))
    assert rep.geometric_verdict and rep.algebraic_verdict
    # numerator 3 a21 a12 + a13 (k2 - k1) over k2 - k1
    assert (rep.detail["ridge_u_numerator"], rep.detail["ridge_u_coefficient"]) == ("-6", "6")
    assert not main_theorem_check(germ({(2, 0): 1, (0, 2): 1, (0, 3): 6, (3, 1): 6})).geometric_verdict
    assert main_theorem_check(germ(S1)).reason == "S1 is always versal"


def test_main_theorem_random_agreement():
    rng = random.Random(24)
    for tag in ("S1", "S2", "B2"):
        for _ in range(15):
            g = random_germ(rng, tag, umbilic=rng.random() < 0.4)
            rep = main_theorem_check(g)
            assert rep.geometric_verdict == rep.algebraic_verdict


def test_main_theorem_umbilic_edge_case_raises():
    # B = 0 (the cubic x(x^2 + 6xy + 9y^2)/6 has a repeated factor) yet a12 != 0
    g = germ({(2, 0): 1, (0, 2): 1, (2, 1): 2, (3, 0): 1, (1, 2): 3, (0, 5): 120})
    assert is_versal_rotation(g).versal_by_rank
    with pytest.raises(InvariantError) as err:
        main_theorem_check(g)
    assert err.value.payload["resultant_bracket"] == "0"


def test_matrix_json_dump():
    doc = tangent_matrix_for(germ(S1), 3).to_json()
    assert doc["rows"] == 30 and doc["k"] == 3
    assert doc["columns"][-1]["label"] == "VR:2"
