"""Bifurcation sets of the standard S2 and B2 unfoldings (x, y^2, g(x, y; s, t)).

Variables of g are ordered (x, y, s, t).  A mono-germ point is a singular
point on the mirror y = 0 that is worse than a cross-cap; a bi-germ point is
a pair (x, +-y), y != 0, with a common tangent plane.
"""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import InputError, MirrorSymmetricError
from .jets import TruncatedPolynomial, as_rational
from .univariate import derivative as uderiv
from .univariate import pmul, psub, real_roots, trim

X, Y, S, T = range(4)


def thread_count() -> int:
    """Worker cap from FOLD_ATLAS_THREADS (default 1)."""
    raw = os.environ.get("FOLD_ATLAS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"FOLD_ATLAS_THREADS must be an integer, got {raw!r}") from None


def parallel_map(fn, items):
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))  # map preserves input order


def _poly4(terms: dict, order: int) -> TruncatedPolynomial:
    return TruncatedPolynomial(4, order, terms)


@dataclass(frozen=True)
class UnfoldingFamily:
    family_id: str
    g: TruncatedPolynomial

    def __post_init__(self):
        if self.g.num_vars != 4:
            raise InputError("g must be a polynomial in (x, y, s, t)")

    @classmethod
    def standard(cls, name: str, sign: int = -1) -> "UnfoldingFamily":
        """S2std: y^3 + sign x^3 y + s y + t x y.  B2std: y^5 + sign x^2 y + s y + t y^3."""
        if sign not in (1, -1):
            raise InputError("sign must be +1 or -1")
        key = name.upper().replace("STD", "")
        if key == "S2":
            g = _poly4({(0, 3, 0, 0): 1, (3, 1, 0, 0): sign, (0, 1, 1, 0): 1, (1, 1, 0, 1): 1}, 5)
            return cls("S2std" if sign == -1 else "S2std+", g)
        if key == "B2":
            g = _poly4({(0, 5, 0, 0): 1, (2, 1, 0, 0): sign, (0, 1, 1, 0): 1, (0, 3, 0, 1): 1}, 6)
            return cls("B2std" if sign == -1 else "B2std+", g)
        raise InputError(f"unknown family {name!r}; expected S2 or B2")

    @classmethod
    def custom(cls, g: TruncatedPolynomial) -> "UnfoldingFamily":
        return cls("custom", g)

    @property
    def is_standard(self) -> bool:
        return self.family_id in ("S2std", "B2std")

    def is_odd_in_y(self) -> bool:
        return self.g.odd_part(Y) == self.g


# -- mirror polynomials ------------------------------------------------------


def _mirror_slice(p: TruncatedPolynomial) -> tuple[list, list, list]:
    """p(x, 0, s, t) = p0(x) + s p1(x) + t p2(x); raises if not affine in (s, t)."""
    parts = [dict(), dict(), dict()]
    for (i, j, a, b), c in p.terms.items():
        if j:
            continue
        if a + b > 1:
            raise InputError("family is not affine in the parameters (s, t)")
        slot = 1 if a else 2 if b else 0
        parts[slot][i] = c
    return tuple(trim([d.get(i, 0) for i in range(max(d, default=-1) + 1)]) for d in parts)


def _mirror_univariate(p: TruncatedPolynomial, s, t) -> list[Fraction]:
    s, t = _exact(s), _exact(t)
    coeffs: dict[int, Fraction] = {}
    for (i, j, a, b), c in p.terms.items():
        if j:
            continue
        coeffs[i] = coeffs.get(i, 0) + c * s**a * t**b
    return trim([coeffs.get(i, 0) for i in range(max(coeffs, default=-1) + 1)])


def _exact(v) -> Fraction:
    # floats are converted exactly (binary value), so root multiplicities stay exact
    if isinstance(v, float):
        return Fraction(v)
    return as_rational(v)


class SingularPoint(NamedTuple):
    x: float
    y: float
    multiplicity: int


def singular_points(fam: UnfoldingFamily, s, t) -> list[SingularPoint]:
    """Singular points of (x, y^2, g): y = 0 and g_y(x, 0) = 0."""
    p = _mirror_univariate(fam.g.diff(Y), s, t)
    if not p:
        raise InputError("g_y vanishes identically on the mirror; every point is singular")
    return [SingularPoint(x, 0.0, m) for x, m in real_roots(p)]


# -- curves --------------------------------------------------------------------


@dataclass(frozen=True)
class CurveSample:
    a: float
    s: float
    t: float
    sources: tuple[tuple[float, float], ...]
    residual: float


@dataclass
class BifurcationCurve:
    branch: str  # "mono_germ" or "bi_germ"
    samples: list[CurveSample]
    parametrization: Callable[[float], tuple[float, float]] | None = None
    exact: dict = field(default_factory=dict)
    note: str = ""

    def points(self) -> np.ndarray:
        return np.array([(p.s, p.t) for p in self.samples]).reshape(-1, 2)


def _sample_values(a_range, n) -> np.ndarray:
    a0, a1 = a_range
    if n <= 0:
        return []
    if n == 1:
        return [float(a0)]
    return [float(a) for a in np.linspace(float(a0), float(a1), int(n))]


def _peval_float(p, x):
    acc = 0.0
    for c in reversed(p):
        acc = acc * x + float(c)
    return acc


@dataclass(frozen=True)
class MonoElimination:
    """Exact solution of g_y(x,0) = g_xy(x,0) = 0 for (s, t).

    Either a rational parametrisation by x = a (``s_num/den``, ``t_num/den``),
    or for a degenerate system the finite set of x-roots with a parameter line
    through each.
    """

    s_num: list
    t_num: list
    den: list
    lines: tuple = ()


def eliminate_mono(fam: UnfoldingFamily) -> MonoElimination:
    gy = fam.g.diff(Y)
    p0, p1, p2 = _mirror_slice(gy)
    q0, q1, q2 = uderiv(p0), uderiv(p1), uderiv(p2)
    det = psub(pmul(p1, q2), pmul(p2, q1))
    if det:
        # Cramer on [p1 p2; q1 q2] (s, t) = -(p0, q0)
        s_num = psub(pmul(p2, q0), pmul(p0, q2))
        t_num = psub(pmul(q1, p0), pmul(p1, q0))
        return MonoElimination(s_num, t_num, det)
    if q1 or q2:
        raise InputError("degenerate mono-germ system beyond the supported forms")
    # g_xy(x,0) = q0(x) does not involve (s, t): finitely many x, a line of (s, t) each
    lines = []
    for x0, _ in real_roots(q0):
        c0, c1, c2 = (_peval_float(p, x0) for p in (p0, p1, p2))
        lines.append((x0, c0, c1, c2))  # c0 + c1 s + c2 t = 0
    return MonoElimination([], [], [], tuple(lines))


def _line_point(c0, c1, c2, a):
    # + 0.0 folds -0.0 into 0.0 so output is sign-stable
    if c2:
        return a + 0.0, -(c0 + c1 * a) / c2 + 0.0
    if c1:
        return -c0 / c1 + 0.0, a + 0.0
    raise InputError("mirror slice gives no constraint on (s, t)")


def _mono_residual(fam_d, x0, s, t):
    gy = fam_d[(0, 1)](x0, 0.0, s, t)
    gxy = fam_d[(1, 1)](x0, 0.0, s, t)
    return max(abs(gy), abs(gxy))


def mono_germ_locus(fam: UnfoldingFamily, a_range=(-1.0, 1.0), n_samples: int = 101) -> BifurcationCurve:
    """Parameters where a singular point on the mirror is worse than a cross-cap."""
    elim = eliminate_mono(fam)
    derivs = _param_derivs(fam)
    samples = []
    if elim.den:
        def param(a):
            d = _peval_float(elim.den, a)
            return _peval_float(elim.s_num, a) / d, _peval_float(elim.t_num, a) / d

        for a in _sample_values(a_range, n_samples):
            if _peval_float(elim.den, a) == 0:
                continue
            s, t = param(a)
            samples.append(CurveSample(float(a), s, t, ((float(a), 0.0),), _mono_residual(derivs, a, s, t)))
        exact = {"s": [str(c) for c in elim.s_num], "t": [str(c) for c in elim.t_num], "den": [str(c) for c in elim.den]}
        return BifurcationCurve("mono_germ", samples, param, exact)
    lines = elim.lines
    for a in _sample_values(a_range, n_samples):
        for x0, c0, c1, c2 in lines:
            s, t = _line_point(c0, c1, c2, a)
            samples.append(CurveSample(float(a), s, t, ((x0, 0.0),), _mono_residual(derivs, x0, s, t)))
    param = None
    if len(lines) == 1:
        x0, c0, c1, c2 = lines[0]
        param = lambda a: _line_point(c0, c1, c2, a)  # noqa: E731
    exact = {"lines": [{"x0": x0, "c0": c0, "cs": c1, "ct": c2} for x0, c0, c1, c2 in lines]}
    return BifurcationCurve("mono_germ", samples, param, exact)


def _param_derivs(fam: UnfoldingFamily):
    g = fam.g
    out = {}
    for i in range(3):
        for j in range(3):
            d = g
            for _ in range(i):
                d = d.diff(X)
            for _ in range(j):
                d = d.diff(Y)
            out[(i, j)] = d.to_float_function()
    return out


def mono_germ_numeric(fam: UnfoldingFamily, values: Sequence[float]) -> list[CurveSample]:
    """Newton continuation on g_y(x,0) = g_xy(x,0) = 0, independent of the elimination.

    Each step fixes x = a and solves for (s, t); if that Jacobian is singular
    (the parameters do not enter g_xy) it fixes t = a and solves for (x, s).
    """
    d = _param_derivs(fam)
    gy = fam.g.diff(Y)
    par = {
        (q, v): gy.diff(X).diff(v).to_float_function() if q else gy.diff(v).to_float_function()
        for q in (0, 1)
        for v in (S, T)
    }
    gxxy = gy.diff(X).diff(X).to_float_function()

    def eqs(x, s, t):
        return np.array([d[(0, 1)](x, 0.0, s, t), d[(1, 1)](x, 0.0, s, t)])

    out = []
    z_st = np.zeros(2)
    z_xs = np.zeros(2)
    for a in values:
        fx_st = lambda z: eqs(a, z[0], z[1])  # noqa: E731
        jac_st = lambda z: np.array(  # noqa: E731
            [[par[(q, v)](a, 0.0, z[0], z[1]) for v in (S, T)] for q in (0, 1)]
        )
        sol = None
        if abs(np.linalg.det(jac_st(z_st))) > 1e-12:
            r = _newton(fx_st, jac_st, z_st)
            if r is not None:
                z_st = r
                sol = (a, r[0], r[1])
        if sol is None:
            fx_xs = lambda z: eqs(z[0], z[1], a)  # noqa: E731
            jac_xs = lambda z: np.array(  # noqa: E731
                [
                    [d[(1, 1)](z[0], 0.0, z[1], a), par[(0, S)](z[0], 0.0, z[1], a)],
                    [gxxy(z[0], 0.0, z[1], a), par[(1, S)](z[0], 0.0, z[1], a)],
                ]
            )
            r = _newton(fx_xs, jac_xs, z_xs)
            if r is None:
                continue
            z_xs = r
            sol = (r[0], r[1], a)
        x, s, t = (float(v) + 0.0 for v in sol)
        res = float(np.max(np.abs(eqs(x, s, t))))
        if res <= 1e-9:
            out.append(CurveSample(float(a), s, t, ((x, 0.0),), res))
    return out


# -- bi-germs ---------------------------------------------------------------------


def bi_germ_certificate(fam: UnfoldingFamily) -> str | None:
    """Reason the bi-germ set is empty, when it is provably so.

    With g = y H(x, y^2), the conditions g = g_x = g_y = 0 (y != 0) become
    H = H_x = H_Y = 0.  A nonzero constant H_Y rules out every solution.
    """
    if not fam.is_odd_in_y():
        return None
    # H_Y = (g_y - g / y) / (2 y^2); read it off term by term
    hy: dict = {}
    for (i, j, a, b), c in fam.g.terms.items():
        k = (j - 1) // 2  # power of Y in H
        if k >= 1:
            e = (i, k - 1, a, b)
            hy[e] = hy.get(e, 0) + c * k
    hy = {e: c for e, c in hy.items() if c}
    if len(hy) == 1 and (0, 0, 0, 0) in hy:
        return f"H_Y = {hy[(0, 0, 0, 0)]} is a nonzero constant"
    return None


def _bi_closed_form(fam: UnfoldingFamily):
    if fam.family_id == "B2std":
        return lambda a: (a**4, -2 * a**2), lambda a: 0.0
    return None


def bi_germ_closed_form_identity(fam: UnfoldingFamily) -> bool:
    """Substitute (x, y, s, t) = (0, a, a^4, -2a^2) into g, g_x, g_y; exact zero test."""
    if fam.family_id != "B2std":
        raise InputError("closed form is recorded only for B2std")
    order = 12
    a = TruncatedPolynomial.variable(0, 1, order)
    zero = TruncatedPolynomial.zero(1, order)
    inner = [zero, a, a**4, -2 * a * a]
    g = fam.g.extend(order)
    return all(p.compose(inner).is_zero() for p in (g, g.diff(X), g.diff(Y)))


def _newton(fun, jac, z0, max_iter=60, tol=1e-14):
    z = np.array(z0, dtype=float)
    for _ in range(max_iter):
        J = jac(z)
        try:
            step = np.linalg.solve(J, -fun(z))
        except np.linalg.LinAlgError:
            return None
        z = z + step
        if not np.all(np.isfinite(z)):
            return None
        if np.max(np.abs(step)) <= tol * max(1.0, np.max(np.abs(z))):
            return z
    return z


def bi_germ_numeric(fam: UnfoldingFamily, a: float, seed=(0.0, 0.0, 0.0)):
    """Newton on g = g_x = g_y = 0 at y = a in the unknowns (x, s, t)."""
    gd = _param_derivs(fam)
    g = fam.g
    gs, gt = g.diff(S), g.diff(T)
    ders = {
        "g_s": gs.to_float_function(),
        "g_t": gt.to_float_function(),
        "gx_s": gs.diff(X).to_float_function(),
        "gx_t": gt.diff(X).to_float_function(),
        "gy_s": gs.diff(Y).to_float_function(),
        "gy_t": gt.diff(Y).to_float_function(),
    }

    def fun(z):
        x, s, t = z
        return np.array([gd[(0, 0)](x, a, s, t), gd[(1, 0)](x, a, s, t), gd[(0, 1)](x, a, s, t)])

    def jac(z):
        x, s, t = z
        return np.array(
            [
                [gd[(1, 0)](x, a, s, t), ders["g_s"](x, a, s, t), ders["g_t"](x, a, s, t)],
                [gd[(2, 0)](x, a, s, t), ders["gx_s"](x, a, s, t), ders["gx_t"](x, a, s, t)],
                [gd[(1, 1)](x, a, s, t), ders["gy_s"](x, a, s, t), ders["gy_t"](x, a, s, t)],
            ]
        )

    z = _newton(fun, jac, seed)
    if z is None:
        return None
    res = float(np.max(np.abs(fun(z))))
    return z, res


def bi_germ_locus(
    fam: UnfoldingFamily, a_range=(-1.0, 1.0), n_samples: int = 101, min_abs_a: float = 1e-3
) -> BifurcationCurve:
    """Parameters with a self-tangency between (x, a) and (x, -a)."""
    cert = bi_germ_certificate(fam)
    if cert:
        return BifurcationCurve("bi_germ", [], None, {"empty": True}, cert)
    closed = _bi_closed_form(fam)
    values = [a for a in _sample_values(a_range, n_samples) if abs(a) > min_abs_a]
    # numeric continuation from a neutral seed, independent of any closed form
    samples = []
    seed = (0.0, 0.0, 0.0)
    for a in values:
        out = bi_germ_numeric(fam, a, seed)
        if out is None or out[1] > 1e-9:
            out = bi_germ_numeric(fam, a, (0.0, 0.0, 0.0))
        if out is None or out[1] > 1e-9:
            continue
        (x, s, t), res = out
        seed = (x, s, t)
        samples.append(CurveSample(a, float(s) + 0.0, float(t) + 0.0, ((float(x) + 0.0, a), (float(x) + 0.0, -a)), res))
    exact = {"s": "a^4", "t": "-2a^2", "x0": "0"} if closed else {}
    return BifurcationCurve("bi_germ", samples, closed[0] if closed else None, exact)


def bi_germ_search(fam: UnfoldingFamily, s: float, t: float, box=(-2.0, 2.0), n_seeds: int = 9, min_abs_y: float = 1e-3):
    """Self-tangency pairs for fixed (s, t): Newton on (g_x, g_y), g as the filter."""
    g = fam.g.substitute_values({S: _exact(s), T: _exact(t)})
    # drop to two variables
    terms = {(i, j): c for (i, j, _, _), c in g.terms.items()}
    f2 = TruncatedPolynomial(2, g.order, terms)
    return self_tangency_search(f2, (box[0], box[1], min_abs_y, box[1]), n_seeds=n_seeds)


# -- self-tangency ------------------------------------------------------------


@dataclass(frozen=True)
class SelfTangency:
    point: tuple[float, float]
    mirror: tuple[float, float]
    residual: float


def _callable_odd_parts(f, h=1e-5):
    fo = lambda x, y: 0.5 * (f(x, y) - f(x, -y))  # noqa: E731

    def fx(x, y):
        return (fo(x + h, y) - fo(x - h, y)) / (2 * h)

    def fy(x, y):
        return (fo(x, y + h) - fo(x, y - h)) / (2 * h)

    def hess(x, y):
        return np.array(
            [
                [(fx(x + h, y) - fx(x - h, y)) / (2 * h), (fx(x, y + h) - fx(x, y - h)) / (2 * h)],
                [(fy(x + h, y) - fy(x - h, y)) / (2 * h), (fy(x, y + h) - fy(x, y - h)) / (2 * h)],
            ]
        )

    return fo, fx, fy, hess


def self_tangency_search(
    f,
    region=(-1.0, 1.0, 1e-3, 1.0),
    tol: float = 1e-9,
    n_seeds: int = 21,
    max_iter: int = 100,
) -> list[SelfTangency]:
    """Pairs ((x, y), (x, -y)), y > 0, with f_o = d f_o/dx = d f_o/dy = 0.

    Newton runs on the gradient of the odd part f_o from a seed grid; a
    converged point is kept only if |f_o| < tol there.
    """
    xmin, xmax, ymin, ymax = region
    ymin = max(ymin, 10 * tol)
    if isinstance(f, TruncatedPolynomial):
        odd = f.odd_part(1)
        if odd.is_zero():
            raise MirrorSymmetricError("f is even in y: its odd part vanishes and every point is a solution")
        fo = odd.to_float_function()
        fx_p, fy_p = odd.diff(0), odd.diff(1)
        fx, fy = fx_p.to_float_function(), fy_p.to_float_function()
        hxx, hxy, hyy = (fx_p.diff(0).to_float_function(), fx_p.diff(1).to_float_function(), fy_p.diff(1).to_float_function())

        def hess(x, y):
            return np.array([[hxx(x, y), hxy(x, y)], [hxy(x, y), hyy(x, y)]])
    else:
        fo, fx, fy, hess = _callable_odd_parts(f)
        probe = np.linspace(0.1, 1.0, 7)
        if np.allclose([fo(u, v) for u in probe for v in probe], 0.0, atol=1e-14):
            raise MirrorSymmetricError("f is even in y on the probe grid")

    def polish(seed):
        z = np.array(seed, dtype=float)
        for _ in range(max_iter):
            try:
                step = np.linalg.solve(hess(*z), -np.array([fx(*z), fy(*z)]))
            except np.linalg.LinAlgError:
                return None
            z = z + step
            if not np.all(np.isfinite(z)) or np.max(np.abs(z)) > 1e6:
                return None
            if np.max(np.abs(step)) <= 1e-15 * max(1.0, np.max(np.abs(z))):
                return float(z[0]), float(z[1])
        return None

    seeds = [(x0, y0) for x0 in np.linspace(xmin, xmax, n_seeds) for y0 in np.linspace(ymin, ymax, n_seeds)]
    found: list[SelfTangency] = []
    for z in parallel_map(polish, seeds):
        if z is None:
            continue
        x, y = z
        # region check also rejects the slow crawl towards the mirror y = 0
        if not (xmin - tol <= x <= xmax + tol and ymin <= y <= ymax + tol):
            continue
        res = max(abs(fo(x, y)), abs(fx(x, y)), abs(fy(x, y)))
        if abs(fo(x, y)) >= tol or res >= tol:
            continue
        if any(abs(x - p.point[0]) < 1e-7 and abs(y - p.point[1]) < 1e-7 for p in found):
            continue
        found.append(SelfTangency((x + 0.0, y), (x + 0.0, -y), float(res)))
    return sorted(found, key=lambda p: (p.point[1], p.point[0]))


def figure_family(a) -> TruncatedPolynomial:
    """y^5 - x^2 y + a^4 y - 2 a^2 y^3 as a jet in (x, y)."""
    a = _exact(a)
    return TruncatedPolynomial(2, 6, {(0, 5): 1, (2, 1): -1, (0, 1): a**4, (0, 3): -2 * a**2})


# -- output -----------------------------------------------------------------------


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return math.inf
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


CSV_COLUMNS = ("branch", "a", "s", "t", "x0", "y0")


def curves_csv(curves: Sequence[BifurcationCurve]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for c in curves:
        for p in c.samples:
            x0, y0 = p.sources[0]
            lines.append(f"{c.branch},{p.a!r},{p.s!r},{p.t!r},{x0!r},{y0!r}")
    return "\n".join(lines) + "\n"


def curves_svg(curves: Sequence[BifurcationCurve], title: str = "", size: int = 480) -> str:
    pts = np.concatenate([c.points() for c in curves] + [np.zeros((1, 2))])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    lo, hi = lo - 0.08 * span, hi + 0.08 * span
    pad = 40

    def sx(v):
        return pad + (v - lo[0]) / (hi[0] - lo[0]) * (size - 2 * pad)

    def sy(v):
        return size - pad - (v - lo[1]) / (hi[1] - lo[1]) * (size - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<line x1="{pad}" y1="{sy(0):.3f}" x2="{size - pad}" y2="{sy(0):.3f}" stroke="#888"/>',
        f'<line x1="{sx(0):.3f}" y1="{pad}" x2="{sx(0):.3f}" y2="{size - pad}" stroke="#888"/>',
        f'<text x="{size - pad + 4}" y="{sy(0) + 4:.3f}" font-size="12">s</text>',
        f'<text x="{sx(0) - 4:.3f}" y="{pad - 6}" font-size="12">t</text>',
    ]
    if title:
        out.append(f'<text x="{pad}" y="20" font-size="14">{title}</text>')
    styles = {"mono_germ": "", "bi_germ": ' stroke-dasharray="6,4"'}
    colours = {"mono_germ": "#1f4e9c", "bi_germ": "#b03020"}
    for c in curves:
        if not c.samples:
            continue
        # separate polylines for disconnected pieces (e.g. the two signs of a)
        pieces, cur = [], []
        for p in c.samples:
            if cur and (p.a > 0) != (cur[-1].a > 0) and c.branch == "bi_germ":
                pieces.append(cur)
                cur = []
            cur.append(p)
        pieces.append(cur)
        for piece in pieces:
            coords = " ".join(f"{sx(p.s):.3f},{sy(p.t):.3f}" for p in piece)
            out.append(
                f'<polyline points="{coords}" fill="none" stroke="{colours[c.branch]}" stroke-width="2"{styles[c.branch]}/>'
            )
    ly = size - 14
    out.append(f'<line x1="{pad}" y1="{ly}" x2="{pad + 30}" y2="{ly}" stroke="{colours["mono_germ"]}" stroke-width="2"/>')
    out.append(f'<text x="{pad + 36}" y="{ly + 4}" font-size="12">mono-germ</text>')
    out.append(
        f'<line x1="{pad + 130}" y1="{ly}" x2="{pad + 160}" y2="{ly}" stroke="{colours["bi_germ"]}" stroke-width="2" stroke-dasharray="6,4"/>'
    )
    out.append(f'<text x="{pad + 166}" y="{ly + 4}" font-size="12">bi-germ (self-tangency)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def trace_and_render(fam: UnfoldingFamily, a_range, n_samples: int, output_prefix: str):
    """Write <prefix>.csv and <prefix>.svg; returns the two curves."""
    curves = [mono_germ_locus(fam, a_range, n_samples), bi_germ_locus(fam, a_range, n_samples)]
    try:
        atomic_write(output_prefix + ".csv", curves_csv(curves))
        atomic_write(output_prefix + ".svg", curves_svg(curves, fam.family_id))
    except OSError as exc:
        raise InputError(f"cannot write output: {exc}") from exc
    return curves
