"""Tangent spaces of the folding map in the k-jet quotient, codimension and versality."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InsufficientJetError, InvariantError, UnsupportedClassError
from .folding import (
    FoldingMap,
    SingularityClass,
    build_folding_map,
    classify,
    rotation_parameter_derivatives,
    vr_generators,
)
from .jets import TruncatedPolynomial, monomials
from .linalg import column_rank_profile
from .surface import (
    SurfaceGerm,
    resultant_bracket,
    ridge_field_expansion,
    umbilic_classify,
    umbilic_cubic,
)

_DETERMINACY = {"S0": 2, "S1": 3, "S2": 4, "B2": 5}
EXPECTED_CODIMENSION = {"S0": 0, "S1": 1, "S2": 2, "B2": 2}


def determinacy_degree(cls: SingularityClass | str) -> int:
    tag = cls if isinstance(cls, str) else cls.tag
    try:
        return _DETERMINACY[tag]
    except KeyError:
        raise UnsupportedClassError(f"no determinacy degree for {tag}") from None


@dataclass(frozen=True)
class JetBasis:
    """Basis m * e_s of theta(F) / m^{k+1} theta(F), monomial-major, grlex."""

    k: int

    @property
    def monomials(self) -> list[tuple[int, int]]:
        return monomials(2, self.k)

    def __len__(self):
        return 3 * (self.k + 1) * (self.k + 2) // 2

    def entries(self) -> list[tuple[tuple[int, int], int]]:
        return [(m, s) for m in self.monomials for s in (1, 2, 3)]

    def index(self) -> dict[tuple[int, int], int]:
        return {m: i for i, m in enumerate(self.monomials)}


Field = Sequence[TruncatedPolynomial]


@dataclass
class TangentSpaceMatrix:
    basis: JetBasis
    labels: list[str]
    fields: list[tuple[TruncatedPolynomial, ...]]
    columns: list[list[Fraction]]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.basis), len(self.columns)

    def block(self, prefix: str) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab.startswith(prefix)]

    def to_json(self) -> dict:
        return {
            "k": self.basis.k,
            "rows": len(self.basis),
            "columns": [
                {"label": lab, "field": [c.truncate(self.basis.k).to_json() for c in fld]}
                for lab, fld in zip(self.labels, self.fields)
            ],
        }


def _column(basis: JetBasis, index: dict, fld: Field) -> list[Fraction]:
    k = basis.k
    col = [Fraction(0)] * len(basis)
    for s, comp in enumerate(fld):
        if comp.reliable_degree < k:
            raise InsufficientJetError(
                f"component {s + 1} is reliable only to degree {comp.reliable_degree}, need {k}"
            )
        for e, c in comp.terms.items():
            if sum(e) <= k:
                col[3 * index[e] + s] = c
    return col


def target_monomials(k: int) -> list[tuple[int, int, int]]:
    """Exponents (a, b, c) of X^a Y^b Z^c with a + 2b + 2c <= k."""
    return [
        (a, b, c)
        for a in range(k + 1)
        for b in range(k // 2 + 1)
        for c in range(k // 2 + 1)
        if a + 2 * b + 2 * c <= k
    ]


def _omega_fields(F: FoldingMap, k: int, exps) -> list[tuple[str, tuple]]:
    n = F.source_order
    zero = TruncatedPolynomial.zero(2, n)
    out = []
    for a, b, c in exps:
        eta = TruncatedPolynomial.monomial((a, b, c), n).compose(list(F.components))
        for s in range(3):
            fld = [zero, zero, zero]
            fld[s] = eta
            out.append((f"wF:eta({a},{b},{c}).e{s + 1}", tuple(fld)))
    return out


def assemble_tangent_matrix(
    F: FoldingMap,
    k: int,
    include_vr: bool = True,
    vr_fields: Sequence[Field] | None = None,
    extra_target: Sequence[tuple[int, int, int]] = (),
) -> TangentSpaceMatrix:
    """Columns of tF(theta_2) + omegaF(theta_3) [+ V_R] truncated at degree k.

    Column order is tF, then omegaF, then V_R, so a rank profile over the
    columns yields both ranks in one elimination.
    """
    if F.source_order < k + 1:
        raise InsufficientJetError(
            f"need the surface jet to order {k + 1} so that f_x, f_y are exact at degree {k}"
        )
    n = F.source_order
    basis = JetBasis(k)
    index = basis.index()
    zero = TruncatedPolynomial.zero(2, n)
    one = TruncatedPolynomial.constant(1, 2, n)
    y = TruncatedPolynomial.variable(1, 2, n)
    f = F.f
    fx, fy = f.diff(0), f.diff(1)
    gx = (one, zero, fx)
    gy = (zero, 2 * y, fy)

    labelled: list[tuple[str, tuple]] = []
    for m in basis.monomials:
        mono = TruncatedPolynomial.monomial(m, n)
        labelled.append((f"tF:F_x*x^{m[0]}y^{m[1]}", tuple(mono * c for c in gx)))
        labelled.append((f"tF:F_y*x^{m[0]}y^{m[1]}", tuple(mono * c for c in gy)))
    labelled += _omega_fields(F, k, list(target_monomials(k)) + list(extra_target))
    if include_vr:
        if vr_fields is None:
            vr_fields = vr_generators(SurfaceGerm(f))
        for i, fld in enumerate(vr_fields, 1):
            labelled.append((f"VR:{i}", tuple(fld)))
    labels = [lab for lab, _ in labelled]
    fields = [fld for _, fld in labelled]
    return TangentSpaceMatrix(basis, labels, fields, [_column(basis, index, fld) for fld in fields])


def rank_exact(m: TangentSpaceMatrix | Sequence[Sequence]) -> int:
    cols = m.columns if isinstance(m, TangentSpaceMatrix) else m
    prof = column_rank_profile(cols)
    return prof[-1] if prof else 0


def _ranks(m: TangentSpaceMatrix) -> tuple[int, int]:
    """(rank without V_R, rank with V_R) from a single elimination."""
    prof = column_rank_profile(m.columns)
    base = len(m.block("tF")) + len(m.block("wF"))
    return prof[base - 1], prof[-1]


def _jet_for(germ: SurfaceGerm, k: int) -> SurfaceGerm:
    # k-determinacy: the k-jet decides everything, so higher terms may be taken as zero
    if germ.order >= k + 1:
        return SurfaceGerm(germ.jet.truncate(k + 1))
    return SurfaceGerm(germ.jet.truncate(min(germ.order, k)).extend(k + 1))


def codimension(F: FoldingMap | SurfaceGerm, cls: SingularityClass | str) -> int:
    """dim theta(F) / T A_e F computed in the k-jet quotient, k the determinacy degree."""
    k = determinacy_degree(cls)
    if isinstance(F, SurfaceGerm):
        F = build_folding_map(_jet_for(F, k))
    m = assemble_tangent_matrix(F, k, include_vr=False)
    return len(m.basis) - rank_exact(m)


def versal_by_formula(germ: SurfaceGerm, cls: SingularityClass) -> bool:
    a = germ.a
    if cls.tag in ("S0", "S1"):
        return True
    if cls.tag == "S2":
        return germ.k1 != germ.k2
    if cls.tag == "B2":
        return a(1, 3) * (germ.k1 - germ.k2) - 3 * a(2, 1) * a(1, 2) != 0
    raise UnsupportedClassError(f"no versality criterion for {cls.tag}")


@dataclass(frozen=True)
class VersalityReport:
    cls: SingularityClass
    k_used: int
    rows: int
    rank_without_vr: int
    rank_with_vr: int
    codimension: int
    versal_by_rank: bool
    versal_by_formula: bool
    agreement: bool

    def to_json(self) -> dict:
        return {
            "class": self.cls.tag,
            "k_used": self.k_used,
            "rows": self.rows,
            "rank_without_vr": self.rank_without_vr,
            "rank_with_vr": self.rank_with_vr,
            "codimension": self.codimension,
            "versal_by_rank": self.versal_by_rank,
            "versal_by_formula": self.versal_by_formula,
            "agreement": self.agreement,
        }


def tangent_matrix_for(germ: SurfaceGerm, k: int, vr: str = "generators") -> TangentSpaceMatrix:
    g = _jet_for(germ, k)
    fields = vr_generators(g) if vr == "generators" else rotation_parameter_derivatives(g)
    return assemble_tangent_matrix(build_folding_map(g), k, True, fields)


def is_versal_rotation(germ: SurfaceGerm, cls: SingularityClass | None = None) -> VersalityReport:
    cls = cls or classify(germ)
    k = determinacy_degree(cls)
    m = tangent_matrix_for(germ, k)
    without, with_vr = _ranks(m)
    by_rank = with_vr == len(m.basis)
    by_formula = versal_by_formula(germ, cls)
    report = VersalityReport(
        cls, k, len(m.basis), without, with_vr, len(m.basis) - without, by_rank, by_formula, by_rank == by_formula
    )
    if not report.agreement:
        raise InvariantError(
            f"rank and closed form disagree for class {cls.tag}",
            payload={"report": report.to_json(), "matrix": m.to_json()},
        )
    return report


@dataclass(frozen=True)
class MainTheoremReport:
    cls: str
    umbilic: bool
    geometric_verdict: bool
    algebraic_verdict: bool
    reason: str
    detail: dict

    def to_json(self) -> dict:
        return {
            "class": self.cls,
            "umbilic": self.umbilic,
            "versal_geometric": self.geometric_verdict,
            "versal_algebraic": self.algebraic_verdict,
            "reason": self.reason,
            **self.detail,
        }


def geometric_versality(germ: SurfaceGerm, cls: SingularityClass) -> tuple[bool, str, dict]:
    """The geometric side: ridge transversality, umbilicity, or the D4 resultant test."""
    if cls.tag == "S1":
        return True, "S1 is always versal", {}
    if cls.tag == "S2":
        if germ.is_umbilic:
            return False, "umbilic", {}
        return True, "not umbilic", {}
    if cls.tag == "B2":
        if not germ.is_umbilic:
            coef = ridge_field_expansion(germ).v2k2.u
            ok = coef != 0
            reason = "ridge line transverse to the mirror plane" if ok else "ridge line tangent to the mirror plane"
            a = germ.a
            numerator = 3 * a(2, 1) * a(1, 2) + a(1, 3) * (germ.k2 - germ.k1)
            return ok, reason, {"ridge_u_coefficient": str(coef), "ridge_u_numerator": str(numerator)}
        c = umbilic_cubic(germ)
        rep = umbilic_classify(c)
        ok = rep.d4_resultant
        detail = {
            "resultant_bracket": str(resultant_bracket(c)),
            "alpha_norm": str(c.alpha.norm()),
            "umbilic_report": rep.to_json(),
        }
        return ok, "D4 umbilic" if ok else "umbilic, not D4", detail
    raise UnsupportedClassError(f"main theorem covers S1, S2, B2; got {cls.tag}")


def main_theorem_check(germ: SurfaceGerm, cls: SingularityClass | None = None) -> MainTheoremReport:
    cls = cls or classify(germ)
    geo, reason, detail = geometric_versality(germ, cls)
    alg = is_versal_rotation(germ, cls).versal_by_rank
    if geo != alg:
        raise InvariantError(
            f"geometric verdict {geo} ({reason}) but rank verdict {alg}",
            payload={"class": cls.to_json(), **detail},
        )
    return MainTheoremReport(cls.tag, germ.is_umbilic, geo, alg, reason, detail)
