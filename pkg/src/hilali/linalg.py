"""Exact linear algebra over Q on sparse row vectors.

Rows are dicts ``column key -> coefficient``; column keys only need to be
mutually comparable.  Rank uses fraction-free integer elimination with
primitive rows, which keeps entries small on the sparse +-1-heavy matrices
coming from differentials.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def integral_row(row: dict) -> dict:
    """Scale a rational row to a primitive integer row (same span)."""
    if not row:
        return {}
    den = 1
    for v in row.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = lcm(den, v.denominator)
    out = {k: int(v * den) for k, v in row.items() if v}
    return primitive(out)


def primitive(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {k: v // g for k, v in row.items()}
    return row


class RowEchelon:
    """Incremental fraction-free echelon form; ``add`` reports independence."""

    def __init__(self):
        self.pivots = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict) -> dict:
        row = integral_row(row)
        pivots = self.pivots
        while row:
            c = min(row)
            p = pivots.get(c)
            if p is None:
                return row
            a = p[c]
            b = row[c]
            g = gcd(a, b)
            a //= g
            b //= g
            new = {k: a * v for k, v in row.items()} if a != 1 else dict(row)
            for k, v in p.items():
                w = new.get(k, 0) - b * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            row = primitive(new)
        return row

    def add(self, row: dict) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        self.pivots[min(row)] = row
        return True


def exact_rank(rows) -> int:
    ech = RowEchelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def rref(matrix: list, ncols: int):
    """Reduced row echelon form of a dense rational matrix; returns (R, pivot_cols)."""
    R = [[Fraction(x) for x in row] for row in matrix]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return R[:r], pivots


def nullspace(matrix: list, ncols: int) -> list:
    """Basis of {v : M v = 0} for a dense rational matrix with ``ncols`` columns."""
    if not matrix:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, pivots = rref(matrix, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis
