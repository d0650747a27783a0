"""Exact scalars over Q and the golden field Q(sqrt5), plus univariate
polynomials and truncated power series over them.

A Scalar a + b*sqrt5 stores two Fractions and a field tag. RATIONAL scalars
always have b == 0; GOLDEN scalars may have any b. Arithmetic joins tags, so a
RATIONAL value combined with a GOLDEN one is GOLDEN.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, List, Sequence, Tuple, Union

from src.errors import DivisionByZero, NonUnitConstantTerm


class Field(str, Enum):
    """Field tag carried by every scalar."""
    RATIONAL = "RATIONAL"
    GOLDEN = "GOLDEN"


def join_fields(left: Field, right: Field) -> Field:
    """Smallest field containing both tags."""
    if left is Field.GOLDEN or right is Field.GOLDEN:
        return Field.GOLDEN
    return Field.RATIONAL


Number = Union[int, Fraction, "Scalar"]


@total_ordering
class Scalar:
    """Exact element a + b*sqrt5 of Q(sqrt5), tagged RATIONAL or GOLDEN."""

    __slots__ = ("_a", "_b", "_field")

    def __init__(self, a: Union[int, Fraction, str] = 0, b: Union[int, Fraction, str] = 0,
                 field: Field = None) -> None:
        if type(a) is not Fraction:
            a = Fraction(a)
        if type(b) is not Fraction:
            b = Fraction(b)
        if field is None:
            field = Field.RATIONAL if b == 0 else Field.GOLDEN
        elif field is Field.RATIONAL and b != 0:
            raise ValueError(f"RATIONAL scalar cannot carry a sqrt5 part: {b}")
        self._a = a
        self._b = b
        self._field = field

    # Accessors

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def field(self) -> Field:
        return self._field

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_rational(self) -> bool:
        return self._b == 0

    def is_integer(self) -> bool:
        return self._b == 0 and self._a.denominator == 1

    def to_fraction(self) -> Fraction:
        """Rational value; raises ValueError when the sqrt5 part is nonzero."""
        if self._b != 0:
            raise ValueError(f"{self} is not rational")
        return self._a

    def to_int(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self} is not an integer")
        return self._a.numerator

    def as_golden(self) -> "Scalar":
        return Scalar(self._a, self._b, Field.GOLDEN)

    def conjugate(self) -> "Scalar":
        """Galois conjugate a - b*sqrt5."""
        return Scalar(self._a, -self._b, self._field)

    def norm(self) -> Fraction:
        """Field norm a^2 - 5 b^2."""
        return self._a * self._a - 5 * self._b * self._b

    def sign(self) -> int:
        """Sign of the real number a + b*sqrt5, decided exactly."""
        sa = (self._a > 0) - (self._a < 0)
        sb = (self._b > 0) - (self._b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with 5 b^2
        diff = self._a * self._a - 5 * self._b * self._b
        if diff == 0:
            return 0
        return sa if diff > 0 else sb

    # Arithmetic

    @staticmethod
    def _coerce(other) -> "Scalar":
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self._a + other._a, self._b + other._b,
                      join_fields(self._field, other._field))

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(-self._a, -self._b, self._field)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self._a - other._a, self._b - other._b,
                      join_fields(self._field, other._field))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self._a, self._b, other._a, other._b
        if b == 0 and d == 0:
            return Scalar(a * c, 0, join_fields(self._field, other._field))
        return Scalar(a * c + 5 * b * d, a * d + b * c,
                      join_fields(self._field, other._field))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        """(a + b sqrt5)^-1 = (a - b sqrt5) / (a^2 - 5 b^2)."""
        if self.is_zero():
            raise DivisionByZero("division by zero scalar")
        if self._b == 0:
            return Scalar(1 / self._a, 0, self._field)
        n = self.norm()
        return Scalar(self._a / n, -self._b / n, self._field)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise DivisionByZero(f"division of {self} by zero")
        if self._b == 0 and other._b == 0:
            return Scalar(self._a / other._a, 0, join_fields(self._field, other._field))
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, exponent: int) -> "Scalar":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        if self._b == 0:
            return Scalar(self._a ** exponent, 0, self._field)
        result = Scalar(1, 0, self._field)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # Comparison and hashing

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._a == other._a and self._b == other._b

    def __lt__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def __bool__(self) -> bool:
        return not self.is_zero()

    # Text

    def serialize(self) -> str:
        """Canonical text: "num/den" for RATIONAL, "a|b" for GOLDEN."""
        if self._field is Field.RATIONAL:
            return str(self._a)
        return f"{self._a}|{self._b}"

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        text = text.strip()
        if "|" in text:
            a, b = text.split("|", 1)
            return cls(Fraction(a), Fraction(b), Field.GOLDEN)
        return cls(Fraction(text))

    def __repr__(self) -> str:
        return f"Scalar({self.serialize()!r})"

    def __str__(self) -> str:
        if self._b == 0:
            return str(self._a)
        if self._a == 0:
            return f"{self._b}*sqrt5"
        sign = "+" if self._b > 0 else "-"
        return f"{self._a} {sign} {abs(self._b)}*sqrt5"


ZERO = Scalar(0)
ONE = Scalar(1)
SQRT5 = Scalar(0, 1)
# golden ratio (1 + sqrt5) / 2
PHI = Scalar(Fraction(1, 2), Fraction(1, 2))


def as_scalar(value: Number) -> Scalar:
    if isinstance(value, Scalar):
        return value
    return Scalar(value)


def scalar_arith(op: str, x: Number, y: Number) -> Scalar:
    """Apply one of add/sub/mul/div to two scalars."""
    x, y = as_scalar(x), as_scalar(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"Unknown scalar operation '{op}'")


def golden_is_rational(x: Scalar) -> bool:
    """True iff the sqrt5 component is exactly zero."""
    return x.b == 0


def field_of(values: Iterable[Scalar]) -> Field:
    field = Field.RATIONAL
    for value in values:
        field = join_fields(field, value.field)
    return field


def promote(value: Number, field: Field) -> Scalar:
    """Retag a scalar into `field`; keys of one group must share a tag."""
    value = as_scalar(value)
    if field is Field.GOLDEN and value.field is not Field.GOLDEN:
        return value.as_golden()
    return value


class UniPoly:
    """Univariate polynomial with Scalar coefficients, lowest degree first."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()) -> None:
        values = [as_scalar(c) for c in coeffs]
        while values and values[-1].is_zero():
            values.pop()
        self._coeffs: Tuple[Scalar, ...] = tuple(values)

    @classmethod
    def monomial(cls, degree: int, coeff: Number = 1) -> "UniPoly":
        return cls([0] * degree + [coeff])

    @property
    def coeffs(self) -> Tuple[Scalar, ...]:
        return self._coeffs

    def degree(self) -> int:
        """Degree, -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return not self._coeffs

    def __getitem__(self, k: int) -> Scalar:
        if 0 <= k < len(self._coeffs):
            return self._coeffs[k]
        return ZERO

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self._coeffs), len(other._coeffs))
        return UniPoly(self[k] + other[k] for k in range(n))

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self._coeffs), len(other._coeffs))
        return UniPoly(self[k] - other[k] for k in range(n))

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self._coeffs)

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            factor = as_scalar(other)
            return UniPoly(c * factor for c in self._coeffs)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [ZERO] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other._coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "UniPoly":
        result = UniPoly([1])
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniPoly):
            return False
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def evaluate(self, x: Number) -> Scalar:
        x = as_scalar(x)
        acc = ZERO
        for c in reversed(self._coeffs):
            acc = acc * x + c
        return acc

    __call__ = evaluate

    def to_field(self, field: Field) -> "UniPoly":
        return UniPoly(promote(c, field) for c in self._coeffs)

    def key(self) -> Tuple[str, ...]:
        """Canonical coefficient-vector key (serialized coefficients)."""
        return tuple(c.serialize() for c in self._coeffs)

    @classmethod
    def from_key(cls, key: Sequence[str]) -> "UniPoly":
        return cls(Scalar.parse(text) for text in key)

    def integer_coefficients(self) -> List[int]:
        """Coefficients as ints; ValueError if any is not an integer."""
        return [c.to_int() for c in self._coeffs]

    def __repr__(self) -> str:
        return f"UniPoly({[c.serialize() for c in self._coeffs]})"

    def __str__(self) -> str:
        terms = []
        for k in range(len(self._coeffs) - 1, -1, -1):
            c = self._coeffs[k]
            if c.is_zero():
                continue
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append("t" if k == 1 else f"t^{k}")
            else:
                terms.append(f"({c})*t" if k == 1 else f"({c})*t^{k}")
        return " + ".join(terms) if terms else "0"


class TruncatedSeries:
    """Power series kept modulo t^order."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Number], order: int) -> None:
        if order < 1:
            raise ValueError(f"truncation order must be positive, got {order}")
        values = [as_scalar(c) for c in coeffs][:order]
        values.extend([ZERO] * (order - len(values)))
        self._coeffs: List[Scalar] = values

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls([], order)

    @classmethod
    def from_poly(cls, poly: UniPoly, order: int) -> "TruncatedSeries":
        return cls(poly.coeffs, order)

    @property
    def order(self) -> int:
        return len(self._coeffs)

    @property
    def coeffs(self) -> List[Scalar]:
        return list(self._coeffs)

    def __getitem__(self, k: int) -> Scalar:
        return self._coeffs[k]

    def _check(self, other: "TruncatedSeries") -> None:
        if other.order != self.order:
            raise ValueError(f"truncation orders differ: {self.order} vs {other.order}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        return TruncatedSeries((a + b for a, b in zip(self._coeffs, other._coeffs)), self.order)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        return TruncatedSeries((a - b for a, b in zip(self._coeffs, other._coeffs)), self.order)

    def scale(self, factor: Number) -> "TruncatedSeries":
        factor = as_scalar(factor)
        return TruncatedSeries((c * factor for c in self._coeffs), self.order)

    def __mul__(self, other) -> "TruncatedSeries":
        if isinstance(other, UniPoly):
            other = TruncatedSeries.from_poly(other, self.order)
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        n = self.order
        out = [ZERO] * n
        for i, a in enumerate(self._coeffs):
            if a.is_zero():
                continue
            for j in range(n - i):
                b = other._coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return TruncatedSeries(out, n)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self._coeffs[:order], order)

    def to_poly(self) -> UniPoly:
        return UniPoly(self._coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return False
        return self._coeffs == other._coeffs

    def __repr__(self) -> str:
        return f"TruncatedSeries({[c.serialize() for c in self._coeffs]})"


def series_inverse(p: UniPoly, order: int) -> TruncatedSeries:
    """q with p*q = 1 mod t^order, by long division from the constant term."""
    if order < 1:
        raise ValueError(f"truncation order must be positive, got {order}")
    c0 = p[0]
    if c0.is_zero():
        raise NonUnitConstantTerm(f"constant term of {p} is zero")
    inv_c0 = c0.inverse()
    coeffs = p.coeffs
    q: List[Scalar] = [inv_c0]
    for k in range(1, order):
        acc = ZERO
        for j in range(1, min(k, len(coeffs) - 1) + 1):
            if not coeffs[j].is_zero():
                acc = acc + coeffs[j] * q[k - j]
        q.append(-acc * inv_c0)
    return TruncatedSeries(q, order)
