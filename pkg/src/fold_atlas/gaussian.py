"""Gaussian rationals Q(i), exact."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .jets import as_rational


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", as_rational(self.re))
        object.__setattr__(self, "im", as_rational(self.im))

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (tuple, list)):
            return cls(value[0], value[1])
        return cls(value, 0)

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse "p/q" or "p/q,r/s" (real, imaginary)."""
        parts = [t for t in text.replace(" ", "").split(",") if t]
        if len(parts) == 1:
            return cls(Fraction(parts[0]))
        if len(parts) == 2:
            return cls(Fraction(parts[0]), Fraction(parts[1]))
        raise ValueError(f"cannot parse Gaussian rational {text!r}")

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        n = o.norm()
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        q = self * o.conjugate()
        return GaussianRational(q.re / n, q.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, n: int):
        out = GaussianRational(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """|z|**2."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if not self.im:
            return str(self.re)
        return f"{self.re}+{self.im}i".replace("+-", "-")

    def to_json(self):
        return [str(self.re), str(self.im)]


I = GaussianRational(0, 1)
