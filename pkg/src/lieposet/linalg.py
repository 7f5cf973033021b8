"""Exact rational dense linear algebra.

Scalars are ``fractions.Fraction`` (arbitrary precision, always reduced,
positive denominator). Rank and determinant run fraction-free
(Bareiss) on integer-scaled rows to bound coefficient growth; kernels
and solves do an integer forward pass and only back-substitute with
rationals.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

Rational = Fraction

_MODP = (1 << 61) - 1  # Mersenne prime used by the probabilistic rank fast path


class ShapeError(ValueError):
    """Operands have incompatible or unsupported dimensions."""


class RatMatrix:
    """Dense matrix of Fractions, row major."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, rows):
        rows = [[Fraction(x) for x in row] for row in rows]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ShapeError("ragged rows")
        else:
            width = 0
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = width

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls([[0] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, n):
        m = cls.zeros(n, n)
        for i in range(n):
            m.rows[i][i] = Fraction(1)
        return m

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def __setitem__(self, idx, value):
        i, j = idx
        self.rows[i][j] = Fraction(value)

    def __eq__(self, other):
        return (
            isinstance(other, RatMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"RatMatrix({self.rows!r})"

    def copy(self):
        return RatMatrix(self.rows)

    def transpose(self):
        return RatMatrix([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)])

    def __add__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeError("size mismatch in addition")
        return RatMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __neg__(self):
        return RatMatrix([[-a for a in row] for row in self.rows])

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ShapeError("size mismatch in product")
        bt = other.transpose().rows
        return RatMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in bt] for row in self.rows]
        )

    def scale(self, c):
        c = Fraction(c)
        return RatMatrix([[c * a for a in row] for row in self.rows])

    def mul_vector(self, vec):
        if len(vec) != self.ncols:
            raise ShapeError("vector length mismatch")
        return [sum(a * Fraction(x) for a, x in zip(row, vec)) for row in self.rows]

    def is_skew_symmetric(self):
        if self.nrows != self.ncols:
            return False
        return all(
            self.rows[i][j] == -self.rows[j][i]
            for i in range(self.nrows)
            for j in range(i, self.ncols)
        )

    def is_zero(self):
        return all(x == 0 for row in self.rows for x in row)


def _int_rows(m):
    """Clear denominators row by row; returns plain int rows."""
    out = []
    for row in m.rows:
        d = 1
        for x in row:
            d = lcm(d, x.denominator)
        out.append([int(x * d) for x in row])
    return out


def _int_echelon(rows, ncols, augmented_from=None):
    """Fraction-free (Bareiss) forward elimination on integer rows.

    Returns (rows, pivot_cols). When ``augmented_from`` is given, pivots
    are only selected among columns < augmented_from (the tail columns
    ride along as an augmented block).
    """
    rows = [r[:] for r in rows]
    pivot_limit = ncols if augmented_from is None else augmented_from
    pivots = []
    prev = 1
    r = 0
    for c in range(pivot_limit):
        piv = None
        best = None
        for i in range(r, len(rows)):
            v = rows[i][c]
            if v:
                if best is None or abs(v) < best:
                    piv, best = i, abs(v)
                    if best == 1:
                        break
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
        prc = rows[r][c]
        for i in range(r + 1, len(rows)):
            ric = rows[i][c]
            ri, rr = rows[i], rows[r]
            if ric:
                for j in range(c + 1, ncols):
                    ri[j] = (ri[j] * prc - ric * rr[j]) // prev
                ri[c] = 0
            elif prc != prev:
                for j in range(c + 1, ncols):
                    ri[j] = (ri[j] * prc) // prev
        prev = prc
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(m):
    """Exact rank via fraction-free elimination."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    _, pivots = _int_echelon(_int_rows(m), m.ncols)
    return len(pivots)


def rank_mod_p(int_rows, ncols, p=_MODP):
    """Rank of an integer matrix over GF(p); a lower bound for the true rank."""
    rows = [[x % p for x in r] for r in int_rows]
    r = 0
    rk = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rr = [(x * inv) % p for x in rows[r]]
        rows[r] = rr
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                ri = rows[i]
                rows[i] = [(a - f * b) % p for a, b in zip(ri, rr)]
        r += 1
        rk += 1
        if r == len(rows):
            break
    return rk


def kernel_basis(m):
    """Basis of the right null space, one vector per free column.

    Each vector is a list of Fractions of length ``m.ncols``; the basis
    has dimension ``ncols - rank``.
    """
    n = m.ncols
    if n == 0:
        return []
    if m.nrows == 0:
        basis = []
        for f in range(n):
            v = [Fraction(0)] * n
            v[f] = Fraction(1)
            basis.append(v)
        return basis
    ech, pivots = _int_echelon(_int_rows(m), n)
    pivot_set = set(pivots)
    free_cols = [c for c in range(n) if c not in pivot_set]
    basis = []
    for f in free_cols:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for k in range(len(pivots) - 1, -1, -1):
            c = pivots[k]
            row = ech[k]
            s = sum(Fraction(row[j]) * v[j] for j in range(c + 1, n) if row[j] and v[j])
            v[c] = -s / row[c]
        basis.append(v)
    return basis


def determinant(m):
    if m.nrows != m.ncols:
        raise ShapeError("determinant requires a square matrix")
    n = m.nrows
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    rows = []
    for row in m.rows:
        d = 1
        for x in row:
            d = lcm(d, x.denominator)
        scale *= d
        rows.append([int(x * d) for x in row])
    sign = 1
    prev = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            sign = -sign
        prc = rows[c][c]
        for i in range(c + 1, n):
            ric = rows[i][c]
            ri, rc = rows[i], rows[c]
            for j in range(c + 1, n):
                ri[j] = (ri[j] * prc - ric * rc[j]) // prev
            ri[c] = 0
        prev = prc
    return Fraction(sign * rows[n - 1][n - 1]) / scale


def solve(m, b):
    """One exact solution of ``m x = b``, or None when inconsistent."""
    if len(b) != m.nrows:
        raise ShapeError("right-hand side length mismatch")
    n = m.ncols
    aug = RatMatrix([list(row) + [Fraction(bi)] for row, bi in zip(m.rows, b)])
    if m.nrows == 0:
        return [Fraction(0)] * n
    ech, pivots = _int_echelon(_int_rows(aug), n + 1, augmented_from=n)
    # inconsistent iff some residual row is 0 ... 0 | nonzero
    for k in range(len(pivots), len(ech)):
        row = ech[k]
        if not any(row[:n]) and row[n]:
            return None
    x = [Fraction(0)] * n
    for k in range(len(pivots) - 1, -1, -1):
        c = pivots[k]
        row = ech[k]
        s = sum(Fraction(row[j]) * x[j] for j in range(c + 1, n) if row[j] and x[j])
        x[c] = (Fraction(row[n]) - s) / row[c]
    return x


def _poly_mul_linear(coeffs, d):
    """Multiply a monic polynomial (descending coefficients) by (x - d)."""
    out = coeffs + [Fraction(0)]
    for k in range(len(coeffs)):
        out[k + 1] -= d * coeffs[k]
    return out


def _charpoly_faddeev_int(rows):
    n = len(rows)
    coeffs = [1]
    mk = [r[:] for r in rows]
    for k in range(1, n + 1):
        tr = sum(mk[i][i] for i in range(n))
        ck = -(tr // k)
        if -ck * k != tr:
            raise ArithmeticError("trace not divisible in Faddeev-LeVerrier step")
        coeffs.append(ck)
        if k == n:
            break
        for i in range(n):
            mk[i][i] += ck
        nxt = []
        for i in range(n):
            arow = rows[i]
            idx = [t for t in range(n) if arow[t]]
            nxt.append([sum(arow[t] * mk[t][j] for t in idx) for j in range(n)])
        mk = nxt
    return coeffs


def char_poly(m):
    """Monic characteristic polynomial det(xI - M).

    Returned as descending coefficients ``[1, c_1, ..., c_n]`` of length
    side + 1.
    """
    if m.nrows != m.ncols:
        raise ShapeError("characteristic polynomial requires a square matrix")
    n = m.nrows
    if n == 0:
        return [Fraction(1)]
    upper = all(m.rows[i][j] == 0 for i in range(n) for j in range(i))
    lower = upper or all(m.rows[i][j] == 0 for i in range(n) for j in range(i + 1, n))
    if upper or lower:
        coeffs = [Fraction(1)]
        for i in range(n):
            coeffs = _poly_mul_linear(coeffs, m.rows[i][i])
        return coeffs
    d = 1
    for row in m.rows:
        for x in row:
            d = lcm(d, x.denominator)
    rows = [[int(x * d) for x in row] for row in m.rows]
    scaled = _charpoly_faddeev_int(rows)
    # char_{dM}(x) = d^n char_M(x/d): coefficient i of M is scaled[i] / d^i
    return [Fraction(scaled[i], d**i) for i in range(n + 1)]


def poly_eval_matrix(coeffs, m):
    """Evaluate a polynomial (descending coefficients) at a square matrix."""
    n = m.nrows
    acc = RatMatrix.zeros(n, n)
    for c in coeffs:
        acc = acc @ m
        for i in range(n):
            acc.rows[i][i] += Fraction(c)
    return acc


def integer_sqrt_exact(q):
    """Exact square root of a nonnegative rational, or None."""
    q = Fraction(q)
    if q < 0:
        return None
    from math import isqrt

    rn, rd = isqrt(q.numerator), isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None
