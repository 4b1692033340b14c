"""The folding map F = (x, y^2, f), its rotation unfolding and the class criteria."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateDirectionError,
    InputError,
    InsufficientJetError,
    InvariantError,
    UnsupportedClassError,
)
from .jets import TruncatedPolynomial
from .surface import (
    SurfaceGerm,
    ridge_subparabolic_flags,
    umbilic_classify,
    umbilic_cubic,
)

CLASS_TAGS = ("S0", "S1", "S2", "B2", "BeyondCodim2")


@dataclass(frozen=True)
class FoldingMap:
    """Components (x, y^2, f) as jets in (x, y)."""

    components: tuple[TruncatedPolynomial, TruncatedPolynomial, TruncatedPolynomial]

    @property
    def source_order(self) -> int:
        return self.components[2].order

    @property
    def f(self) -> TruncatedPolynomial:
        return self.components[2]


def build_folding_map(germ: SurfaceGerm) -> FoldingMap:
    n = germ.order
    x = TruncatedPolynomial.variable(0, 2, n)
    y = TruncatedPolynomial.variable(1, 2, n)
    return FoldingMap((x, y * y, germ.jet))


@dataclass(frozen=True)
class Witness:
    name: str
    value: Fraction
    relation: str  # "!= 0" or "== 0"
    holds: bool

    def to_json(self):
        return {"name": self.name, "value": str(self.value), "relation": self.relation, "holds": self.holds}


@dataclass(frozen=True)
class SingularityClass:
    tag: str
    witness: tuple[Witness, ...]

    def __post_init__(self):
        if self.tag not in CLASS_TAGS:
            raise ValueError(f"unknown class tag {self.tag!r}")

    def __str__(self):
        return self.tag

    def to_json(self):
        return {"class": self.tag, "witness": [w.to_json() for w in self.witness]}


# rows of the criteria table: (tag, [(name, must_vanish)])
_ROWS = (
    ("S0", (("a11", False),)),
    ("S1", (("a11", True), ("a21", False), ("a03", False))),
    ("S2", (("a11", True), ("a21", True), ("a03", False), ("a31", False))),
    ("B2", (("a11", True), ("a21", False), ("a03", True), ("3*a21*a05-5*a13^2", False))),
)


def class_invariants(germ: SurfaceGerm) -> dict[str, Fraction]:
    a = germ.a
    return {
        "a11": a(1, 1),
        "a21": a(2, 1),
        "a03": a(0, 3),
        "a31": a(3, 1),
        "a13": a(1, 3),
        "a05": a(0, 5),
        "3*a21*a05-5*a13^2": 3 * a(2, 1) * a(0, 5) - 5 * a(1, 3) ** 2,
    }


def classify(germ: SurfaceGerm) -> SingularityClass:
    """First matching row among S0, S1, S2, B2; BeyondCodim2 otherwise."""
    if germ.order < 5:
        raise InsufficientJetError(f"classification reads a05; need order >= 5, got {germ.order}")
    inv = class_invariants(germ)
    failed: list[Witness] = []
    for tag, tests in _ROWS:
        ws = []
        for name, vanish in tests:
            v = inv[name]
            ok = (v == 0) if vanish else (v != 0)
            ws.append(Witness(name, v, "== 0" if vanish else "!= 0", ok))
        if all(w.holds for w in ws):
            return SingularityClass(tag, tuple(ws))
        failed.append(next(w for w in ws if not w.holds))
    # one failed relation per row, in table order
    return SingularityClass("BeyondCodim2", tuple(failed))


_EXPECTED_FLAGS = {"S1": (False, False), "S2": (False, True), "B2": (True, False)}

_PHRASES = {
    (False, False): "not v2-ridge, not v2-subparabolic",
    (False, True): "v2-subparabolic, not v2-ridge",
    (True, False): "v2-ridge, not v2-subparabolic",
    (True, True): "v2-ridge and v2-subparabolic",
}


def geometric_report(germ: SurfaceGerm, cls: SingularityClass | None = None) -> dict:
    """Restate the class in terms of ridges, subparabolics and umbilics."""
    cls = cls or classify(germ)
    if cls.tag not in _EXPECTED_FLAGS:
        raise UnsupportedClassError(f"geometric report covers S1, S2, B2; got {cls.tag}")
    out = {"class": cls.tag, "k1": str(germ.k1), "k2": str(germ.k2)}
    if germ.is_umbilic:
        rep = umbilic_classify(umbilic_cubic(germ))
        out["umbilic"] = True
        out["umbilic_report"] = rep.to_json()
        out["summary"] = "umbilic; " + ("D4 type" if rep.d4 else "not D4 type")
        return out
    flags = ridge_subparabolic_flags(germ)
    if flags != _EXPECTED_FLAGS[cls.tag]:
        raise InvariantError(
            f"class {cls.tag} but ridge/subparabolic flags {flags}",
            payload={"class": cls.to_json(), "flags": flags},
        )
    out["umbilic"] = False
    out["v2_ridge"], out["v2_subparabolic"] = flags
    out["summary"] = _PHRASES[flags]
    return out


# -- rotation unfolding ------------------------------------------------------


@dataclass(frozen=True)
class FoldDirection:
    """Unit fold direction v in R^3 with v3^2 != 1."""

    v1: float
    v2: float
    v3: float

    def __post_init__(self):
        n = self.v1**2 + self.v2**2 + self.v3**2
        if abs(n - 1) > 1e-12:
            raise InputError(f"fold direction must be a unit vector, |v|^2 = {n}")
        if 1 - self.v3**2 <= 0:
            raise DegenerateDirectionError("fold direction is parallel to the surface normal")

    @classmethod
    def parse(cls, text: str) -> "FoldDirection":
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 3:
            raise InputError("direction must be v1,v2,v3")
        return cls(*parts)

    @classmethod
    def from_chart(cls, v1: float, v3: float) -> "FoldDirection":
        """The chart of S^2 around e2: v2 = sqrt(1 - v1^2 - v3^2)."""
        return cls(v1, math.sqrt(1 - v1 * v1 - v3 * v3), v3)

    def frame(self) -> np.ndarray:
        """Rows: (v x nu)/|.|, v, ((v x nu) x v)/|.| with nu = e3."""
        v = np.array([self.v1, self.v2, self.v3])
        w = np.sqrt(1 - self.v3**2)
        a = np.array([self.v2, -self.v1, 0.0]) / w
        b = np.cross(a, v)
        return np.stack([a, v, b])


E2 = FoldDirection(0.0, 1.0, 0.0)


def _float_f(f) -> Callable:
    if isinstance(f, SurfaceGerm):
        return f.float_function()
    if isinstance(f, TruncatedPolynomial):
        return f.to_float_function()
    return f


def rotation_unfolding_eval(f, x, y, v: FoldDirection) -> np.ndarray:
    """R(x, y; v) = s (v x nu)/|.| + t^2 v + r ((v x nu) x v)/|.|, vectorised over x, y."""
    if 1 - v.v3**2 <= 0:
        raise DegenerateDirectionError("v3^2 = 1")
    fn = _float_f(f)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fz = np.asarray(fn(x, y), dtype=float)
    w = math.sqrt(1 - v.v3**2)
    s = (v.v2 * x - v.v1 * y) / w
    t = v.v1 * x + v.v2 * y + v.v3 * fz
    r = (-v.v1 * v.v3 * x - v.v2 * v.v3 * y + (1 - v.v3**2) * fz) / w
    a, vv, b = v.frame()
    return s[..., None] * a + (t * t)[..., None] * vv + r[..., None] * b


Field = tuple[TruncatedPolynomial, TruncatedPolynomial, TruncatedPolynomial]


def _xy(order: int):
    return TruncatedPolynomial.variable(0, 2, order), TruncatedPolynomial.variable(1, 2, order)


def vr_generators(germ: SurfaceGerm) -> tuple[Field, Field]:
    """Generators of V_R in reduced form: (-y, 2xy, 0) and (0, 2yf, -y)."""
    n = germ.order
    x, y = _xy(n)
    zero = TruncatedPolynomial.zero(2, n)
    f = germ.jet
    return (-y, 2 * x * y, zero), (zero, 2 * y * f, -y)


def rotation_parameter_derivatives(germ: SurfaceGerm) -> tuple[Field, Field]:
    """Exact dR/dv1 and dR/dv3 at v = e2 in the chart v2 = sqrt(1 - v1^2 - v3^2).

    These differ from vr_generators by y^2 e1 - x e2 and -f e2 + y^2 e3, both of
    which lie in the image of the target vector fields, so the spans agree
    modulo the tangent space.
    """
    n = germ.order
    x, y = _xy(n)
    zero = TruncatedPolynomial.zero(2, n)
    f = germ.jet
    return (y * y - y, 2 * x * y - x, zero), (zero, 2 * y * f - f, y * y - y)


@dataclass(frozen=True)
class FiniteDifferenceResult:
    max_relative_error: float
    max_abs_error: float
    scale: float
    reference: str


def vr_finite_difference_check(
    germ: SurfaceGerm,
    h: float,
    points: Sequence[tuple[float, float]],
    reference: str = "generators",
) -> FiniteDifferenceResult:
    """Central differences of R in (v1, v3) at e2 against a reference pair of fields.

    reference="generators" compares with vr_generators, "exact" with
    rotation_parameter_derivatives.  The error is max |fd - ref| divided by
    max(1, max |ref|) over all points and components.
    """
    if not 1e-8 < h < 1e-2:
        raise InputError("step must satisfy 1e-8 < h < 1e-2")
    # one extra order so that the products y*f are not truncated
    wide = SurfaceGerm.from_coefficients(germ.coefficients(), germ.order + 1)
    if reference == "generators":
        fields = vr_generators(wide)
    elif reference == "exact":
        fields = rotation_parameter_derivatives(wide)
    else:
        raise InputError(f"unknown reference {reference!r}")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    f = germ.float_function()

    def R(v1, v3):
        return rotation_unfolding_eval(f, x, y, FoldDirection.from_chart(v1, v3))

    fd = [(R(h, 0) - R(-h, 0)) / (2 * h), (R(0, h) - R(0, -h)) / (2 * h)]
    ref = [np.stack([c.to_float_function()(x, y) * np.ones_like(x) for c in fld], axis=-1) for fld in fields]
    err = max(float(np.max(np.abs(a - b))) for a, b in zip(fd, ref))
    scale = max(1.0, max(float(np.max(np.abs(b))) for b in ref))
    return FiniteDifferenceResult(err / scale, err, scale, reference)
