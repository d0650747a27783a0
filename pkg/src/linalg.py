"""Exact dense linear algebra over Scalars.

Matrices are tuples of row tuples; nothing here mutates its input. Sizes are
tiny (rank <= 8, Hessian matrices <= 36x36), so plain nested loops are used.
"""

from fractions import Fraction
from math import lcm
from typing import List, Sequence, Tuple

from src.errors import DimensionMismatch, SingularCartan
from src.scalars import ONE, ZERO, Field, Scalar, UniPoly, as_scalar, field_of, join_fields

Vector = Tuple[Scalar, ...]
Matrix = Tuple[Vector, ...]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(as_scalar(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def zero_matrix(rows: int, cols: int) -> Matrix:
    return tuple(tuple(ZERO for _ in range(cols)) for _ in range(rows))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def _zero_for(*matrices) -> Scalar:
    """Zero tagged with the joint field, so products never drop the GOLDEN tag."""
    field = Field.RATIONAL
    for m in matrices:
        for row in m:
            field = join_fields(field, field_of(row))
    return Scalar(0, 0, field)


def mat_mul(x: Matrix, y: Matrix) -> Matrix:
    if x and len(x[0]) != len(y):
        raise DimensionMismatch(f"cannot multiply {len(x)}x{len(x[0])} by {len(y)}x{len(y[0]) if y else 0}")
    cols = transpose(y)
    zero = _zero_for(x, y)
    out = []
    for row in x:
        out_row = []
        for col in cols:
            acc = zero
            for a, b in zip(row, col):
                if not a.is_zero() and not b.is_zero():
                    acc = acc + a * b
            out_row.append(acc)
        out.append(tuple(out_row))
    return tuple(out)


def mat_pow(m: Matrix, exponent: int) -> Matrix:
    result = identity(len(m))
    base = m
    while exponent:
        if exponent & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        exponent >>= 1
    return result


def mat_vec(m: Matrix, v: Sequence[Scalar]) -> Vector:
    """Column action m * v."""
    zero = _zero_for(m, [v])
    out = []
    for row in m:
        acc = zero
        for a, b in zip(row, v):
            if not a.is_zero() and not b.is_zero():
                acc = acc + a * b
        out.append(acc)
    return tuple(out)


def vec_mat(v: Sequence[Scalar], m: Matrix) -> Vector:
    """Row action v * m."""
    return mat_vec(transpose(m), v)


def dot(x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
    acc = ZERO
    for a, b in zip(x, y):
        acc = acc + a * b
    return acc


def is_identity(m: Matrix) -> bool:
    n = len(m)
    return all(m[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))


def matrix_key(m: Matrix) -> Tuple[str, ...]:
    """Canonical serialization used for set membership and hashing."""
    return tuple(x.serialize() for row in m for x in row)


def inverse(m: Matrix) -> Matrix:
    """Gauss-Jordan inverse; SingularCartan when no pivot exists."""
    n = len(m)
    a = [list(row) for row in m]
    b = [list(row) for row in identity(n)]
    for i in range(n):
        pivot = next((r for r in range(i, n) if not a[r][i].is_zero()), None)
        if pivot is None:
            raise SingularCartan("matrix is not invertible")
        if pivot != i:
            a[i], a[pivot] = a[pivot], a[i]
            b[i], b[pivot] = b[pivot], b[i]
        p = a[i][i].inverse()
        a[i] = [x * p for x in a[i]]
        b[i] = [x * p for x in b[i]]
        for r in range(n):
            if r == i or a[r][i].is_zero():
                continue
            f = a[r][i]
            a[r] = [x - f * y for x, y in zip(a[r], a[i])]
            b[r] = [x - f * y for x, y in zip(b[r], b[i])]
    return tuple(tuple(row) for row in b)


def _bareiss(a: List[List], exact_div) -> object:
    """Fraction-free elimination; entries may be ints or Scalars."""
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = exact_div(row_i[j] * akk - aik * row_k[j], prev)
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def determinant(m: Sequence[Sequence[Scalar]]) -> Scalar:
    """Exact determinant by Bareiss elimination.

    Rational matrices are scaled row-by-row to integers first so the
    elimination runs on Python ints; golden matrices stay in Scalars.
    """
    n = len(m)
    if any(len(row) != n for row in m):
        raise DimensionMismatch("determinant of a non-square matrix")
    if all(x.is_rational() for row in m for x in row):
        rows = []
        scale = Fraction(1)
        for row in m:
            fracs = [x.a for x in row]
            den = lcm(*(f.denominator for f in fracs)) if fracs else 1
            rows.append([f.numerator * (den // f.denominator) for f in fracs])
            scale *= den
        value = _bareiss(rows, lambda x, y: x // y)
        return Scalar(Fraction(value) / scale)
    rows = [list(row) for row in m]
    value = _bareiss(rows, lambda x, y: x / y)
    return as_scalar(value)


def hessenberg(m: Matrix) -> List[List[Scalar]]:
    """Upper Hessenberg form by elementary similarity transforms."""
    n = len(m)
    h = [list(row) for row in m]
    for c in range(n - 2):
        pivot = next((i for i in range(c + 1, n) if not h[i][c].is_zero()), None)
        if pivot is None:
            continue
        if pivot != c + 1:
            h[pivot], h[c + 1] = h[c + 1], h[pivot]
            for row in h:
                row[pivot], row[c + 1] = row[c + 1], row[pivot]
        p = h[c + 1][c]
        for r in range(c + 2, n):
            if h[r][c].is_zero():
                continue
            u = h[r][c] / p
            h[r] = [x - u * y for x, y in zip(h[r], h[c + 1])]
            for row in h:
                row[c + 1] = row[c + 1] + u * row[r]
    return h


def char_poly_monic(m: Matrix) -> UniPoly:
    """det(x I - m) via the Hessenberg recurrence."""
    n = len(m)
    h = hessenberg(m)
    x = UniPoly([0, 1])
    polys = [UniPoly([1])]
    for k in range(1, n + 1):
        pk = (x - UniPoly([h[k - 1][k - 1]])) * polys[k - 1]
        t = ONE
        for i in range(k - 1, 0, -1):
            t = t * h[i][i - 1]
            coeff = h[i - 1][k - 1] * t
            if not coeff.is_zero():
                pk = pk - polys[i - 1] * coeff
        polys.append(pk)
    return polys[n]


def char_poly_reversed(m: Matrix) -> UniPoly:
    """det(1 - t m): the coefficients of det(x I - m) read backwards."""
    n = len(m)
    monic = char_poly_monic(m)
    return UniPoly(monic[n - k] for k in range(n + 1))
