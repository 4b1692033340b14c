"""Exact truncated multivariate polynomials over the rationals.

A :class:`TruncatedPolynomial` is an element of Q[x_1..x_n] / (x)^(order+1),
i.e. a k-jet with exact rational coefficients.  Terms are kept in canonical
sparse form (no zero coefficients, no term above the cutoff) and iterate in
graded-lexicographic order so that every downstream matrix layout is
deterministic.

Besides the cutoff ``order`` each value records ``reliable_degree``: the
highest total degree whose coefficients are known to be exact for the germ the
jet approximates.  Differentiation lowers it by one; products and
compositions propagate it.  Matrix assembly refuses to read past it.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CompositionDomainError, DimensionError

Exponent = tuple[int, ...]

_INF = 10**9


def grlex_key(exp: Exponent):
    """Sort key: total degree first, then lexicographic with x_1 dominant."""
    return (sum(exp), tuple(-e for e in exp))


def monomials(num_vars: int, max_degree: int) -> list[Exponent]:
    """All exponents of total degree <= max_degree, graded-lex ordered."""
    out: list[Exponent] = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    for d in range(max_degree + 1):
        rec((), d, num_vars)
    return out


def as_rational(value) -> Fraction:
    """Coerce an exact scalar to Fraction. Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"exact rational required, got {type(value).__name__}: {value!r}")


class TruncatedPolynomial:
    __slots__ = ("num_vars", "order", "reliable_degree", "_terms", "_hash")

    def __init__(
        self,
        num_vars: int,
        order: int,
        terms: Mapping[Sequence[int], object] | None = None,
        reliable_degree: int | None = None,
    ):
        if num_vars < 1:
            raise DimensionError("num_vars must be positive")
        if order < 0:
            raise ValueError("order must be non-negative")
        self.num_vars = num_vars
        self.order = order
        canon: dict[Exponent, Fraction] = {}
        for exp, coef in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != num_vars:
                raise DimensionError(f"exponent {exp} does not have {num_vars} entries")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent {exp}")
            if sum(exp) > order:
                continue
            c = as_rational(coef)
            if c:
                canon[exp] = canon.get(exp, Fraction(0)) + c
        canon = {e: c for e, c in canon.items() if c}
        self._terms = dict(sorted(canon.items(), key=lambda kv: grlex_key(kv[0])))
        rd = order if reliable_degree is None else min(reliable_degree, order)
        self.reliable_degree = max(rd, -1)
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def _raw(cls, num_vars, order, terms, reliable_degree):
        # trusted fast path: terms already exact, in range and nonzero
        self = object.__new__(cls)
        self.num_vars = num_vars
        self.order = order
        self._terms = dict(sorted(terms.items(), key=lambda kv: grlex_key(kv[0])))
        self.reliable_degree = max(min(reliable_degree, order), -1)
        self._hash = None
        return self

    @classmethod
    def zero(cls, num_vars: int, order: int) -> "TruncatedPolynomial":
        return cls(num_vars, order)

    @classmethod
    def constant(cls, value, num_vars: int, order: int) -> "TruncatedPolynomial":
        return cls(num_vars, order, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, index: int, num_vars: int, order: int) -> "TruncatedPolynomial":
        if not 0 <= index < num_vars:
            raise DimensionError(f"variable index {index} out of range")
        exp = tuple(1 if i == index else 0 for i in range(num_vars))
        return cls(num_vars, order, {exp: 1})

    @classmethod
    def monomial(cls, exp: Sequence[int], order: int, coef=1) -> "TruncatedPolynomial":
        return cls(len(exp), order, {tuple(exp): coef})

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Highest total degree present; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def valuation(self) -> int:
        """Lowest total degree present; a large sentinel for zero."""
        return min((sum(e) for e in self._terms), default=_INF)

    def homogeneous_part(self, degree: int) -> "TruncatedPolynomial":
        return TruncatedPolynomial._raw(
            self.num_vars,
            self.order,
            {e: c for e, c in self._terms.items() if sum(e) == degree},
            self.reliable_degree,
        )

    # -- order bookkeeping ------------------------------------------------

    def truncate(self, order: int) -> "TruncatedPolynomial":
        """Drop everything above ``order`` (which must not exceed the current one)."""
        if order > self.order:
            raise ValueError("truncate cannot raise the order; use extend()")
        return TruncatedPolynomial._raw(
            self.num_vars,
            order,
            {e: c for e, c in self._terms.items() if sum(e) <= order},
            min(self.reliable_degree, order),
        )

    def extend(self, order: int) -> "TruncatedPolynomial":
        """Raise the cutoff, declaring the missing higher coefficients to be zero."""
        if order < self.order:
            return self.truncate(order)
        return TruncatedPolynomial._raw(self.num_vars, order, dict(self._terms), order)

    def _check(self, other: "TruncatedPolynomial"):
        if self.num_vars != other.num_vars:
            raise DimensionError(
                f"mismatched number of variables: {self.num_vars} vs {other.num_vars}"
            )

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncatedPolynomial):
            try:
                other = TruncatedPolynomial.constant(as_rational(other), self.num_vars, self.order)
            except TypeError:
                return NotImplemented
        self._check(other)
        order = min(self.order, other.order)
        out = {e: c for e, c in self._terms.items() if sum(e) <= order}
        for e, c in other._terms.items():
            if sum(e) > order:
                continue
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return TruncatedPolynomial._raw(
            self.num_vars, order, out, min(self.reliable_degree, other.reliable_degree)
        )

    __radd__ = __add__

    def __neg__(self):
        return TruncatedPolynomial._raw(
            self.num_vars, self.order, {e: -c for e, c in self._terms.items()}, self.reliable_degree
        )

    def __sub__(self, other):
        if not isinstance(other, TruncatedPolynomial):
            try:
                other = as_rational(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "TruncatedPolynomial":
        k = as_rational(factor)
        if not k:
            return TruncatedPolynomial._raw(self.num_vars, self.order, {}, self.order)
        return TruncatedPolynomial._raw(
            self.num_vars, self.order, {e: k * c for e, c in self._terms.items()}, self.reliable_degree
        )

    def __mul__(self, other):
        if not isinstance(other, TruncatedPolynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        order = min(self.order, other.order)
        out: dict[Exponent, Fraction] = {}
        b_items = [(e, sum(e), c) for e, c in other._terms.items()]
        for ea, ca in self._terms.items():
            da = sum(ea)
            if da > order:
                continue
            for eb, db, cb in b_items:
                if da + db > order:
                    continue
                e = tuple(i + j for i, j in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        out = {e: c for e, c in out.items() if c}
        # an error above degree r in one factor reaches degree r + 1 + val(other factor)
        rel = min(
            order,
            self.reliable_degree + other.valuation(),
            other.reliable_degree + self.valuation(),
        )
        return TruncatedPolynomial._raw(self.num_vars, order, out, rel)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = TruncatedPolynomial.constant(1, self.num_vars, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedPolynomial):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self.order == other.order
            and self._terms == other._terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, self.order, tuple(self._terms.items())))
        return self._hash

    # -- calculus ----------------------------------------------------------

    def partial_derivative(self, var_index: int) -> "TruncatedPolynomial":
        if not 0 <= var_index < self.num_vars:
            raise DimensionError(f"variable index {var_index} out of range")
        out = {}
        for e, c in self._terms.items():
            k = e[var_index]
            if k:
                ne = e[:var_index] + (k - 1,) + e[var_index + 1 :]
                out[ne] = c * k
        return TruncatedPolynomial._raw(self.num_vars, self.order, out, self.reliable_degree - 1)

    diff = partial_derivative

    def compose(self, inner: Sequence["TruncatedPolynomial"]) -> "TruncatedPolynomial":
        """Substitute ``inner[j]`` for variable j. Inner arguments must vanish at 0."""
        if len(inner) != self.num_vars:
            raise DimensionError(f"need {self.num_vars} inner polynomials, got {len(inner)}")
        if not inner:
            raise DimensionError("empty substitution")
        n = inner[0].num_vars
        for q in inner:
            if q.num_vars != n:
                raise DimensionError("inner polynomials disagree on the number of variables")
            if q.coefficient((0,) * n):
                raise CompositionDomainError("inner polynomial has a nonzero constant term")
        order = min(q.order for q in inner)
        vmin = min(q.valuation() for q in inner)
        powers: list[list[TruncatedPolynomial]] = []
        for j, q in enumerate(inner):
            q = q.truncate(order) if q.order > order else q
            top = max((e[j] for e in self._terms), default=0)
            # q**k has valuation >= k * val(q); beyond the cutoff it is zero
            top = min(top, order // q.valuation())
            pw = [TruncatedPolynomial.constant(1, n, order)]
            for _ in range(top):
                pw.append(pw[-1] * q)
            powers.append(pw)
        acc: dict[Exponent, Fraction] = {}
        for e, c in self._terms.items():
            if any(k >= len(powers[j]) for j, k in enumerate(e)):
                continue  # vanishes modulo the cutoff
            term = None
            for j, k in enumerate(e):
                if k:
                    term = powers[j][k] if term is None else term * powers[j][k]
            if term is None:
                acc[(0,) * n] = acc.get((0,) * n, 0) + c
                continue
            for te, tc in term._terms.items():
                acc[te] = acc.get(te, 0) + c * tc
        acc = {e: c for e, c in acc.items() if c}
        rel = min([order] + [q.reliable_degree for q in inner])
        if vmin < _INF:
            rel = min(rel, (self.reliable_degree + 1) * vmin - 1)
        return TruncatedPolynomial._raw(n, order, acc, rel)

    def evaluate(self, point: Sequence):
        """Evaluate the stored polynomial; exact for rational input."""
        if len(point) != self.num_vars:
            raise DimensionError(f"point has {len(point)} coordinates, need {self.num_vars}")
        total = Fraction(0)
        for e, c in self._terms.items():
            t = c
            for p, k in zip(point, e):
                if k:
                    t = t * p**k
            total = total + t
        return total

    def __call__(self, *point):
        return self.evaluate(point)

    def odd_part(self, var_index: int) -> "TruncatedPolynomial":
        """Half the difference of p and p with ``var_index`` negated."""
        if not 0 <= var_index < self.num_vars:
            raise DimensionError(f"variable index {var_index} out of range")
        return TruncatedPolynomial._raw(
            self.num_vars,
            self.order,
            {e: c for e, c in self._terms.items() if e[var_index] % 2},
            self.reliable_degree,
        )

    def even_part(self, var_index: int) -> "TruncatedPolynomial":
        return self - self.odd_part(var_index)

    def substitute_values(self, values: Mapping[int, object]) -> "TruncatedPolynomial":
        """Set some variables to exact constants; the ring is unchanged."""
        vals = {i: as_rational(v) for i, v in values.items()}
        out: dict[Exponent, Fraction] = {}
        for e, c in self._terms.items():
            t = c
            ne = list(e)
            for i, v in vals.items():
                if e[i]:
                    t *= v ** e[i]
                    ne[i] = 0
            if t:
                ne = tuple(ne)
                out[ne] = out.get(ne, 0) + t
        return TruncatedPolynomial(self.num_vars, self.order, out, self.reliable_degree)

    # -- float path ------------------------------------------------------

    def to_float_function(self):
        """Vectorised float evaluator ``f(*arrays)`` of the stored polynomial."""
        exps = np.array(list(self._terms) or [(0,) * self.num_vars], dtype=int)
        coefs = np.array([float(c) for c in self._terms.values()] or [0.0])

        def f(*args):
            args = [np.asarray(a, dtype=float) for a in args]
            shape = np.broadcast(*args).shape
            out = np.zeros(shape)
            for row, c in zip(exps, coefs):
                t = np.full(shape, c)
                for a, k in zip(args, row):
                    if k:
                        t = t * a**k
                out = out + t
            return out if shape else float(out)

        return f

    # -- serialisation ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vars": self.num_vars,
            "order": self.order,
            "terms": [{"exp": list(e), "coef": str(c)} for e, c in self._terms.items()],
        }

    @classmethod
    def from_json(cls, doc) -> "TruncatedPolynomial":
        if isinstance(doc, str):
            doc = json.loads(doc)
        try:
            n = int(doc["vars"])
            k = int(doc["order"])
            terms: dict[Exponent, Fraction] = {}
            for t in doc["terms"]:
                exp = tuple(int(e) for e in t["exp"])
                if exp in terms:
                    raise ValueError(f"duplicate exponent {exp}")
                if not isinstance(t["coef"], (str, int)):
                    raise ValueError("coefficients must be rational strings")
                terms[exp] = Fraction(str(t["coef"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed polynomial document: {exc}") from exc
        return cls(n, k, terms)

    def __repr__(self):
        return f"TruncatedPolynomial({self.num_vars}, {self.order}, {self!s})"

    def __str__(self):
        if not self._terms:
            return "0"
        names = "xyzw" if self.num_vars <= 4 else None
        parts = []
        for e, c in self._terms.items():
            mono = []
            for i, k in enumerate(e):
                if k:
                    v = names[i] if names else f"x{i + 1}"
                    mono.append(v if k == 1 else f"{v}^{k}")
            m = "*".join(mono)
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(m)
            elif c == -1:
                parts.append("-" + m)
            else:
                parts.append(f"{c}*{m}")
        return " + ".join(parts).replace("+ -", "- ")


def add(p: TruncatedPolynomial, q: TruncatedPolynomial) -> TruncatedPolynomial:
    return p + q


def mul(p: TruncatedPolynomial, q: TruncatedPolynomial) -> TruncatedPolynomial:
    return p * q


def partial_derivative(p: TruncatedPolynomial, var_index: int) -> TruncatedPolynomial:
    return p.partial_derivative(var_index)


def compose(outer: TruncatedPolynomial, inner: Sequence[TruncatedPolynomial]) -> TruncatedPolynomial:
    return outer.compose(inner)


def evaluate(p: TruncatedPolynomial, point: Sequence):
    return p.evaluate(point)


def odd_part(p: TruncatedPolynomial, var_index: int) -> TruncatedPolynomial:
    return p.odd_part(var_index)


def variables(num_vars: int, order: int) -> list[TruncatedPolynomial]:
    return [TruncatedPolynomial.variable(i, num_vars, order) for i in range(num_vars)]


def from_normalized(coefficients: Mapping[tuple[int, int], object], order: int) -> TruncatedPolynomial:
    """Two-variable jet from Taylor-normalised data a_ij (coefficient of x^i y^j is a_ij/(i! j!))."""
    terms = {
        (i, j): as_rational(a) / (math.factorial(i) * math.factorial(j))
        for (i, j), a in coefficients.items()
    }
    return TruncatedPolynomial(2, order, terms)


def sum_polys(polys: Iterable[TruncatedPolynomial], num_vars: int, order: int) -> TruncatedPolynomial:
    acc = TruncatedPolynomial.zero(num_vars, order)
    for p in polys:
        acc = acc + p
    return acc
