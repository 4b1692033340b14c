"""Surface germs in Monge form and their local differential geometry.

A germ is stored as an exact jet of f(x, y).  Coefficients are addressed in
Taylor normalisation, ``a(i, j) = i! j! * [x^i y^j] f``, so that
``f = (k1 x^2 + k2 y^2)/2 + sum a_ij x^i y^j / (i! j!)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping

import numpy as np

from .errors import DimensionError, InputError, NotARotationError, UndefinedFrameError
from .gaussian import GaussianRational, I
from .jets import TruncatedPolynomial, as_rational, from_normalized
from .linalg import determinant

# det(Sylvester) = SYLVESTER_FACTOR * |alpha|^2 * B(alpha, beta); checked symbolically in the tests
SYLVESTER_FACTOR = -8


@dataclass(frozen=True)
class SurfaceGerm:
    """Jet of a Monge-form height function f(x, y)."""

    jet: TruncatedPolynomial

    def __post_init__(self):
        if self.jet.num_vars != 2:
            raise DimensionError("a surface germ is a function of two variables")
        for e in ((0, 0), (1, 0), (0, 1)):
            if self.jet.coefficient(e):
                raise InputError(f"not in Monge form: coefficient of x^{e[0]} y^{e[1]} is nonzero")

    @classmethod
    def from_coefficients(cls, coefficients: Mapping[tuple[int, int], object], order: int) -> "SurfaceGerm":
        """Build from Taylor-normalised a_ij (e.g. {(2, 0): k1, (0, 2): k2, (2, 1): a21})."""
        return cls(from_normalized(coefficients, order))

    @property
    def order(self) -> int:
        return self.jet.order

    def a(self, i: int, j: int) -> Fraction:
        return self.jet.coefficient((i, j)) * math.factorial(i) * math.factorial(j)

    @property
    def k1(self) -> Fraction:
        return self.a(2, 0)

    @property
    def k2(self) -> Fraction:
        return self.a(0, 2)

    @property
    def is_umbilic(self) -> bool:
        return self.k1 == self.k2 and self.a(1, 1) == 0

    def coefficients(self) -> dict[tuple[int, int], Fraction]:
        """Nonzero normalised coefficients a_ij."""
        return {e: self.a(*e) for e in self.jet.terms}

    def extended(self, order: int) -> "SurfaceGerm":
        """Same germ at a higher cutoff, higher coefficients taken as zero."""
        return SurfaceGerm(self.jet.extend(order))

    def scaled(self, factor) -> "SurfaceGerm":
        return SurfaceGerm(self.jet * as_rational(factor))

    @cached_property
    def _float_derivs(self):
        p = self.jet
        fx, fy = p.diff(0), p.diff(1)
        return tuple(
            q.to_float_function()
            for q in (p, fx, fy, fx.diff(0), fx.diff(1), fy.diff(1))
        )

    def float_function(self):
        return self._float_derivs[0]

    def __str__(self):
        return str(self.jet)


def rotate_source(germ: SurfaceGerm, c, sn) -> SurfaceGerm:
    """Germ of f(c x - sn y, sn x + c y); (c, sn) must lie exactly on the unit circle."""
    c, sn = as_rational(c), as_rational(sn)
    if c * c + sn * sn != 1:
        raise NotARotationError(f"c^2 + s^2 = {c * c + sn * sn}, not 1")
    n = germ.order
    x = TruncatedPolynomial.variable(0, 2, n)
    y = TruncatedPolynomial.variable(1, 2, n)
    return SurfaceGerm(germ.jet.compose([x * c - y * sn, x * sn + y * c]))


def curvature_data(germ: SurfaceGerm) -> tuple[Fraction, Fraction, Fraction]:
    """(a20, a02, a11); principal curvatures and axes frame when a11 == 0."""
    return germ.a(2, 0), germ.a(0, 2), germ.a(1, 1)


def _require_principal_frame(germ: SurfaceGerm):
    if germ.a(1, 1):
        raise UndefinedFrameError(
            "the y-axis is not a principal direction (a11 != 0); rotate the germ first"
        )
    if germ.k1 == germ.k2:
        raise UndefinedFrameError("the origin is an umbilic; ridge and subparabolic sets are undefined")


def ridge_subparabolic_flags(germ: SurfaceGerm) -> tuple[bool, bool]:
    """(origin is a v2-ridge point, origin is a v2-subparabolic point)."""
    _require_principal_frame(germ)
    return germ.a(0, 3) == 0, germ.a(2, 1) == 0


@dataclass(frozen=True)
class AffineForm:
    const: Fraction
    u: Fraction
    v: Fraction

    def __call__(self, u, v):
        return self.const + self.u * u + self.v * v


@dataclass(frozen=True)
class RidgeExpansion:
    """First-order expansions of v2(kappa2) and v2(kappa1) about the origin."""

    v2k2: AffineForm
    v2k1: AffineForm


def ridge_field_expansion(germ: SurfaceGerm) -> RidgeExpansion:
    _require_principal_frame(germ)
    a = germ.a
    k1, k2 = germ.k1, germ.k2
    d = k2 - k1
    v2k2 = AffineForm(
        a(0, 3),
        (3 * a(2, 1) * a(1, 2) + a(1, 3) * d) / d,
        (3 * a(1, 2) ** 2 + (a(0, 4) - 3 * k2**3) * d) / d,
    )
    # u-coefficient carries a21*(2*a12 - a30); cross-checked against finite differences
    v2k1 = AffineForm(
        a(2, 1),
        (a(2, 1) * (2 * a(1, 2) - a(3, 0)) + a(3, 1) * (-d)) / (-d),
        (a(1, 2) * (2 * a(1, 2) - a(3, 0)) + (a(2, 2) - k1 * k2**2) * (-d)) / (-d),
    )
    return RidgeExpansion(v2k2, v2k1)


# -- numeric principal fields ----------------------------------------------


@dataclass(frozen=True)
class PrincipalFrame:
    """Principal data at an array of points; directions are metric-unit, parameter-space."""

    k1: np.ndarray
    k2: np.ndarray
    v1: np.ndarray  # shape (..., 2)
    v2: np.ndarray
    umbilic: np.ndarray


def _oriented(w):
    # largest-magnitude component positive, ties to the first
    idx = np.argmax(np.abs(w), axis=-1)
    lead = np.take_along_axis(w, idx[..., None], axis=-1)
    return np.where(lead < 0, -w, w)


def principal_frame(germ: SurfaceGerm, u, v, umbilic_tol: float = 1e-8) -> PrincipalFrame:
    f, fx, fy, fxx, fxy, fyy = germ._float_derivs
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u, v)
    px, py = fx(u, v), fy(u, v)
    E, F, G = 1 + px * px, px * py, 1 + py * py
    W = np.sqrt(1 + px * px + py * py)
    L, M, N = fxx(u, v) / W, fxy(u, v) / W, fyy(u, v) / W
    det = E * G - F * F
    H = (E * N - 2 * F * M + G * L) / (2 * det)
    K = (L * N - M * M) / det
    root = np.sqrt(np.maximum(H * H - K, 0.0))
    hi, lo = H + root, H - root
    # label so that kappa2 continues a02 and kappa1 continues a20 from the origin
    if germ.k2 >= germ.k1:
        kap1, kap2 = lo, hi
    else:
        kap1, kap2 = hi, lo

    def direction(kap):
        wa = np.stack([M - kap * F, -(L - kap * E)], axis=-1)
        wb = np.stack([N - kap * G, -(M - kap * F)], axis=-1)
        na = np.hypot(wa[..., 0], wa[..., 1])
        nb = np.hypot(wb[..., 0], wb[..., 1])
        w = np.where((na >= nb)[..., None], wa, wb)
        norm = np.sqrt(E * w[..., 0] ** 2 + 2 * F * w[..., 0] * w[..., 1] + G * w[..., 1] ** 2)
        with np.errstate(invalid="ignore", divide="ignore"):
            w = w / norm[..., None]
        return _oriented(w)

    umb = (2 * root) < umbilic_tol
    return PrincipalFrame(kap1, kap2, direction(kap1), direction(kap2), umb)


def curvature_derivative(germ: SurfaceGerm, u, v, curvature: int = 2, along: int = 2, step: float = 1e-5):
    """Central-difference derivative of kappa_curvature along unit v_along (arclength)."""
    if curvature not in (1, 2) or along not in (1, 2):
        raise ValueError("curvature and along must be 1 or 2")
    fr = principal_frame(germ, u, v)
    w = fr.v1 if along == 1 else fr.v2
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    plus = principal_frame(germ, u + step * w[..., 0], v + step * w[..., 1])
    minus = principal_frame(germ, u - step * w[..., 0], v - step * w[..., 1])
    kp = plus.k1 if curvature == 1 else plus.k2
    km = minus.k1 if curvature == 1 else minus.k2
    return (kp - km) / (2 * step)


@dataclass(frozen=True)
class Grid:
    u_min: float
    u_max: float
    v_min: float
    v_max: float
    nu: int
    nv: int

    @classmethod
    def parse(cls, text: str) -> "Grid":
        parts = [p for p in text.split(",")]
        if len(parts) == 5:
            a, b, c, d, n = parts
            return cls(float(a), float(b), float(c), float(d), int(n), int(n))
        if len(parts) == 6:
            a, b, c, d, n, m = parts
            return cls(float(a), float(b), float(c), float(d), int(n), int(m))
        raise ValueError("grid must be umin,umax,vmin,vmax,n[,m]")

    def mesh(self):
        us = np.linspace(self.u_min, self.u_max, self.nu)
        vs = np.linspace(self.v_min, self.v_max, self.nv)
        return np.meshgrid(us, vs, indexing="ij")


@dataclass
class FieldScan:
    u: np.ndarray
    v: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    dk2_dv2: np.ndarray
    umbilic: np.ndarray

    @property
    def umbilic_count(self) -> int:
        return int(self.umbilic.sum())

    CSV_HEADER = ("u", "v", "k1", "k2", "v2x", "v2y", "dk2_dv2")

    def rows(self):
        """CSV rows in index order; masked (umbilic) cells carry empty direction fields."""
        for idx in np.ndindex(self.u.shape):
            if self.umbilic[idx]:
                yield (self.u[idx], self.v[idx], self.k1[idx], self.k2[idx], "", "", "")
            else:
                yield (
                    self.u[idx],
                    self.v[idx],
                    self.k1[idx],
                    self.k2[idx],
                    self.v2[idx][0],
                    self.v2[idx][1],
                    self.dk2_dv2[idx],
                )


def numeric_principal_fields(
    germ: SurfaceGerm, grid: Grid, umbilic_tol: float = 1e-8, step: float = 1e-5
) -> FieldScan:
    U, V = grid.mesh()
    fr = principal_frame(germ, U, V, umbilic_tol)
    dk = curvature_derivative(germ, U, V, 2, 2, step)
    dk = np.where(fr.umbilic, np.nan, dk)
    return FieldScan(U, V, fr.k1, fr.k2, fr.v1, fr.v2, dk, fr.umbilic)


# -- umbilics ----------------------------------------------------------------


@dataclass(frozen=True)
class UmbilicCubic:
    """Cubic part written as (alpha z^3 + 3 beta z^2 zbar + conjugates) / 6."""

    alpha: GaussianRational
    beta: GaussianRational

    def __post_init__(self):
        object.__setattr__(self, "alpha", GaussianRational.coerce(self.alpha))
        object.__setattr__(self, "beta", GaussianRational.coerce(self.beta))

    @classmethod
    def from_cubic_coefficients(cls, a30, a21, a12, a03) -> "UmbilicCubic":
        a30, a21, a12, a03 = map(as_rational, (a30, a21, a12, a03))
        alpha = GaussianRational((a30 - 3 * a12) / 8, (a03 - 3 * a21) / 8)
        beta = GaussianRational((a30 + a12) / 8, -(a21 + a03) / 8)
        return cls(alpha, beta)

    def cubic_coefficients(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """(a30, a21, a12, a03)."""
        al, be = self.alpha, self.beta
        return (
            2 * (al.re + 3 * be.re),
            -2 * (al.im + be.im),
            2 * (be.re - al.re),
            2 * (al.im - 3 * be.im),
        )


def umbilic_cubic(germ: SurfaceGerm) -> UmbilicCubic:
    if not germ.is_umbilic:
        raise UndefinedFrameError("umbilic_cubic needs k1 == k2 and a11 == 0")
    a = germ.a
    return UmbilicCubic.from_cubic_coefficients(a(3, 0), a(2, 1), a(1, 2), a(0, 3))


@dataclass(frozen=True)
class CurveDistance:
    distance: float
    theta: float


def _min_distance_to_curve(target: complex, p: complex, q: complex, samples: int, refinements: int) -> CurveDistance:
    """min over theta of |target - C(theta)|, C(theta) = -(p e^{2i theta} + q e^{-4i theta})."""
    if samples < 3:
        raise ValueError("need at least 3 theta samples")

    def curve(t):
        return -(p * np.exp(2j * t) + q * np.exp(-4j * t))

    def slope(t):
        # derivative of |target - C|^2
        c = curve(t)
        dc = -(2j * p * np.exp(2j * t) - 4j * q * np.exp(-4j * t))
        return -2.0 * np.real(np.conj(target - c) * dc)

    thetas = 2 * np.pi * np.arange(samples) / samples
    d = np.abs(target - curve(thetas))
    best = CurveDistance(float(d.min()), float(thetas[int(d.argmin())]))
    prev, nxt = np.roll(d, 1), np.roll(d, -1)
    for k in np.nonzero((d <= prev) & (d <= nxt))[0]:
        lo, hi = thetas[k] - 2 * np.pi / samples, thetas[k] + 2 * np.pi / samples
        if slope(lo) > 0 or slope(hi) < 0:
            continue
        for _ in range(refinements):
            mid = 0.5 * (lo + hi)
            if slope(mid) < 0:
                lo = mid
            else:
                hi = mid
        t = 0.5 * (lo + hi)
        dist = float(abs(target - curve(t)))
        if dist < best.distance:
            best = CurveDistance(dist, float(t % (2 * np.pi)))
    return best


@dataclass(frozen=True)
class UmbilicReport:
    three_beta_ne_alpha: bool  # (i)   3|beta| != |alpha|
    d4: bool  # (ii)  3 beta off the alpha-deltoid
    beta_ne_alpha: bool  # (iii) |beta| != |alpha|
    limiting_directions_generic: bool  # (iv)  beta off the unscaled deltoid
    arg_distinct: bool  # (v)   arg alpha != arg beta
    d4_resultant: bool  # exact: the cubic has no repeated linear factor
    d4_margin: float
    iv_margin: float
    degenerate: bool
    tol: float
    theta_samples: int

    def conditions(self) -> dict[str, bool]:
        return {
            "i": self.three_beta_ne_alpha,
            "ii": self.d4,
            "iii": self.beta_ne_alpha,
            "iv": self.limiting_directions_generic,
            "v": self.arg_distinct,
        }

    def to_json(self) -> dict:
        return {
            "conditions": self.conditions(),
            "d4": self.d4,
            "d4_resultant": self.d4_resultant,
            "d4_margin": self.d4_margin,
            "iv_margin": self.iv_margin,
            "degenerate": self.degenerate,
            "tol": self.tol,
            "theta_samples": self.theta_samples,
        }


def umbilic_classify(
    c: UmbilicCubic, theta_samples: int = 4096, tol: float = 1e-9, refinements: int = 40
) -> UmbilicReport:
    al, be = c.alpha, c.beta
    na, nb = al.norm(), be.norm()
    prod = al.conjugate() * be
    a, b = complex(al), complex(be)
    d4 = _min_distance_to_curve(3 * b, 2 * a, a.conjugate(), theta_samples, refinements)
    iv = _min_distance_to_curve(b, 2.0, 1.0, theta_samples, refinements)
    return UmbilicReport(
        three_beta_ne_alpha=9 * nb != na,
        d4=d4.distance > tol,
        beta_ne_alpha=nb != na,
        limiting_directions_generic=iv.distance > tol,
        arg_distinct=not (prod.im == 0 and prod.re > 0),
        d4_resultant=not resultant_vanishes(c),
        d4_margin=d4.distance,
        iv_margin=iv.distance,
        degenerate=not al,
        tol=tol,
        theta_samples=theta_samples,
    )


def resultant_bracket(c: UmbilicCubic) -> Fraction:
    """B = |a|^4 - 3|b|^4 - 6|a|^2|b|^2 + 4(a conj(b)^3 + conj(a) b^3); always real."""
    al, be = c.alpha, c.beta
    na, nb = al.norm(), be.norm()
    cross = al * be.conjugate() ** 3 + al.conjugate() * be**3
    assert cross.im == 0
    return na * na - 3 * nb * nb - 6 * na * nb + 4 * cross.re


def resultant_closed_form(c: UmbilicCubic) -> GaussianRational:
    """(i / 6^6) |alpha|^2 B; the determinant route gives SYLVESTER_FACTOR times this."""
    return I * (c.alpha.norm() * resultant_bracket(c) / 6**6)


def resultant_vanishes(c: UmbilicCubic) -> bool:
    """Exact zero test of |alpha|^2 B; equivalent to a repeated root of the cubic."""
    return c.alpha.norm() * resultant_bracket(c) == 0


def sylvester_matrix(c: UmbilicCubic) -> list[list[GaussianRational]]:
    """Sylvester matrix of the two cubics in u = w^2 whose common roots rotate a12 and a03 to zero."""
    al, be = c.alpha, c.beta
    alc, bec = al.conjugate(), be.conjugate()
    z = GaussianRational(0)
    p = [al, -be, -bec, alc]
    q = [al, -3 * be, 3 * bec, -alc]
    rows = []
    for coeffs in (p, q):
        for shift in range(3):
            rows.append([z] * shift + coeffs + [z] * (2 - shift))
    return rows


def sylvester_determinant(c: UmbilicCubic) -> GaussianRational:
    return determinant(sylvester_matrix(c))


def resultant_oracle(c: UmbilicCubic) -> GaussianRational:
    """Res(a12, a03) from the determinant, with the leading factors (i/6)^3 (-1/6)^3."""
    scale = (I / 6) ** 3 * GaussianRational(Fraction(-1, 6)) ** 3
    return sylvester_determinant(c) * scale
