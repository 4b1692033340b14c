"""Exact linear algebra: fraction-free rank and field determinants."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


def _integer_columns(columns: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    # scaling a column by a nonzero constant preserves rank
    out = []
    for col in columns:
        den = 1
        for v in col:
            v = Fraction(v)
            if v:
                den = den * v.denominator // math.gcd(den, v.denominator)
        out.append([int(Fraction(v) * den) for v in col])
    return out


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {k: v // g for k, v in row.items()}
    return row


def column_rank_profile(columns: Sequence[Sequence]) -> list[int]:
    """Rank of each leading block of columns.

    ``profile[c]`` is the rank of columns[0..c].  Elimination runs column by
    column over the integers (after clearing denominators per column), using
    cross-multiplication and content removal, so no fractions ever appear.
    """
    if not columns:
        return []
    int_cols = _integer_columns(columns)
    nrows = len(int_cols[0])
    # sparse rows: row index -> {column: value}
    rows: list[dict[int, int]] = [dict() for _ in range(nrows)]
    for c, col in enumerate(int_cols):
        if len(col) != nrows:
            raise ValueError("ragged matrix")
        for r, v in enumerate(col):
            if v:
                rows[r][c] = v
    free = set(range(nrows))
    rank = 0
    profile = []
    for c in range(len(int_cols)):
        candidates = [r for r in free if rows[r].get(c)]
        if candidates:
            # smallest row keeps fill-in down
            piv = min(candidates, key=lambda r: (len(rows[r]), abs(rows[r][c]), r))
            free.discard(piv)
            prow = rows[piv]
            p = prow[c]
            for r in candidates:
                if r == piv:
                    continue
                row = rows[r]
                a = row[c]
                g = math.gcd(p, a)
                mp, ma = p // g, a // g
                new = {k: mp * v for k, v in row.items()}
                for k, v in prow.items():
                    nv = new.get(k, 0) - ma * v
                    if nv:
                        new[k] = nv
                    else:
                        new.pop(k, None)
                rows[r] = _primitive(new)
            rank += 1
        profile.append(rank)
    return profile


def rank(columns: Sequence[Sequence]) -> int:
    """Exact rank of the matrix given as a list of columns."""
    prof = column_rank_profile(columns)
    return prof[-1] if prof else 0


def rank_rows(rows: Sequence[Sequence]) -> int:
    """Exact rank of a row-major matrix."""
    if not rows:
        return 0
    return rank([list(col) for col in zip(*rows)])


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Classical Bareiss elimination on an integer matrix; returns the rank."""
    m = [list(map(int, r)) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    prev = 1
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                m[i][j] = (p * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def determinant(matrix: Sequence[Sequence]):
    """Determinant over any exact field (Fraction, GaussianRational) by elimination."""
    m = [list(row) for row in matrix]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    det = None
    sign = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return m[0][0] * 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        p = m[c][c]
        det = p if det is None else det * p
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / p
                for j in range(c, n):
                    m[r][j] = m[r][j] - f * m[c][j]
    return det if sign == 1 else -det
