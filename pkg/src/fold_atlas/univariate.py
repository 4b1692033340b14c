"""Univariate polynomials over Q and exact real-root isolation.

Polynomials are lists of Fractions, lowest degree first, without trailing
zeros (the zero polynomial is ``[]``).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Poly = list[Fraction]


def trim(p: Sequence) -> Poly:
    out = [Fraction(c) for c in p]
    while out and not out[-1]:
        out.pop()
    return out


def degree(p: Poly) -> int:
    return len(p) - 1


def padd(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def psub(p: Poly, q: Poly) -> Poly:
    return padd(p, [-c for c in q])


def pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def pscale(p: Poly, k) -> Poly:
    return trim([c * k for c in p])


def pdivmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(trim(p))
    quot = [Fraction(0)] * max(len(r) - len(q) + 1, 0)
    lead = q[-1]
    while len(r) >= len(q) and r:
        shift = len(r) - len(q)
        f = r[-1] / lead
        quot[shift] = f
        for i, c in enumerate(q):
            r[shift + i] -= f * c
        r = trim(r)
    return trim(quot), r


def monic(p: Poly) -> Poly:
    return [c / p[-1] for c in p] if p else []


def pgcd(p: Poly, q: Poly) -> Poly:
    a, b = trim(p), trim(q)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return monic(a)


def derivative(p: Poly) -> Poly:
    return trim([i * c for i, c in enumerate(p)][1:])


def peval(p: Poly, x):
    acc = 0 * x if not isinstance(x, Fraction) else Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: p = c * prod(f_i ** i) with f_i squarefree and coprime."""
    p = trim(p)
    if len(p) <= 1:
        return []
    out = []
    dp = derivative(p)
    a = pgcd(p, dp)
    b = pdivmod(p, a)[0]
    c = pdivmod(dp, a)[0]
    d = psub(c, derivative(b))
    i = 1
    while len(b) > 1:
        a = pgcd(b, d)
        if len(a) > 1:
            out.append((a, i))
        b = pdivmod(b, a)[0]
        c = pdivmod(d, a)[0]
        d = psub(c, derivative(b))
        i += 1
    return out


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [trim(p), derivative(p)]
    while seq[-1]:
        r = pdivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _variations(values) -> int:
    signs = [v > 0 for v in values if v]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_at(seq, x: Fraction) -> int:
    return _variations([peval(s, x) for s in seq])


def _count_at_inf(seq, positive: bool) -> int:
    vals = []
    for s in seq:
        lead = s[-1]
        if not positive and (len(s) - 1) % 2:
            lead = -lead
        vals.append(lead)
    return _variations(vals)


def root_bound(p: Poly) -> Fraction:
    """Cauchy bound: all roots lie in |x| < bound."""
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def count_real_roots(p: Poly) -> int:
    """Number of distinct real roots."""
    p = trim(p)
    if len(p) <= 1:
        return 0
    seq = sturm_sequence(p)
    return _count_at_inf(seq, False) - _count_at_inf(seq, True)


def isolate_real_roots(p: Poly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (lo, hi], each holding exactly one distinct real root."""
    p = trim(p)
    if len(p) <= 1:
        return []
    seq = sturm_sequence(p)
    b = root_bound(p)
    out = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        n = _count_at(seq, lo) - _count_at(seq, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    return sorted(out)


def refine_root(p: Poly, lo: Fraction, hi: Fraction, rel_tol: float = 1e-16) -> Fraction:
    """Bisect an isolating interval of a squarefree factor down to float resolution."""
    if not peval(p, hi):
        return hi
    s_lo = peval(p, lo)
    if not s_lo:
        # root sits at the open end, which the interval excludes; step inside
        lo = lo + (hi - lo) / 2**60
        s_lo = peval(p, lo)
    for _ in range(400):
        if hi - lo <= Fraction(rel_tol) * max(1, abs(lo), abs(hi)):
            break
        mid = (lo + hi) / 2
        v = peval(p, mid)
        if not v:
            return mid
        if (v > 0) == (s_lo > 0):
            lo, s_lo = mid, v
        else:
            hi = mid
    return (lo + hi) / 2


def real_roots(p: Sequence) -> list[tuple[float, int]]:
    """Real roots with multiplicities, ascending. Exact isolation, float output."""
    p = trim(p)
    if not p:
        raise ValueError("the zero polynomial has every real number as a root")
    out = []
    for factor, mult in squarefree_decomposition(p):
        for lo, hi in isolate_real_roots(factor):
            out.append((float(refine_root(factor, lo, hi)), mult))
    return sorted(out)
