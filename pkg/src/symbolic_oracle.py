"""Sparse multivariate polynomials and polarization operators.

An independent check on the closed-form jets in src.certifier: invariants are
expanded into monomials and differentiated term by term. Polynomials in m
point-variables u_1..u_m of a rank-n group use exponent vectors of length
n*m, block k occupying positions (k-1)*n .. k*n - 1.
"""

import itertools
import logging
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.coxeter import CovectorOrbit, GroupElement
from src.errors import BlockIndexOutOfRange, DimensionMismatch, ExpansionTooLarge
from src.linalg import Matrix, Vector
from src.scalars import ONE, ZERO, Number, Scalar, as_scalar

logger = logging.getLogger(__name__)

MAX_EXPANSION_RANK = 4
MAX_EXPANSION_MONOMIALS = 100_000

Exponent = Tuple[int, ...]


class MultiPoly:
    """Polynomial as {exponent vector: coefficient}; zero coefficients are never stored."""

    __slots__ = ("_terms", "_nvars")

    def __init__(self, terms: Optional[Mapping[Exponent, Number]] = None, nvars: int = 1) -> None:
        self._nvars = nvars
        self._terms: Dict[Exponent, Scalar] = {}
        for exponent, coeff in (terms or {}).items():
            exponent = tuple(exponent)
            if len(exponent) != nvars:
                raise DimensionMismatch(f"exponent {exponent} has length {len(exponent)}, expected {nvars}")
            coeff = as_scalar(coeff)
            if not coeff.is_zero():
                self._terms[exponent] = coeff

    @classmethod
    def constant(cls, value: Number, nvars: int) -> "MultiPoly":
        return cls({(0,) * nvars: value}, nvars)

    @classmethod
    def variable(cls, index: int, nvars: int) -> "MultiPoly":
        exponent = [0] * nvars
        exponent[index] = 1
        return cls({tuple(exponent): ONE}, nvars)

    @property
    def nvars(self) -> int:
        return self._nvars

    @property
    def terms(self) -> Dict[Exponent, Scalar]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def coefficient(self, exponent: Sequence[int]) -> Scalar:
        return self._terms.get(tuple(exponent), ZERO)

    def _check(self, other: "MultiPoly") -> None:
        if other._nvars != self._nvars:
            raise DimensionMismatch(f"polynomials in {self._nvars} and {other._nvars} variables")

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(other, self._nvars)

    def __add__(self, other) -> "MultiPoly":
        other = self._lift(other)
        terms = dict(self._terms)
        for exponent, coeff in other._terms.items():
            terms[exponent] = terms.get(exponent, ZERO) + coeff
        return MultiPoly(terms, self._nvars)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({e: -c for e, c in self._terms.items()}, self._nvars)

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._lift(other))

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            factor = as_scalar(other)
            return MultiPoly({e: c * factor for e, c in self._terms.items()}, self._nvars)
        self._check(other)
        terms: Dict[Exponent, Scalar] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exponent = tuple(x + y for x, y in zip(e1, e2))
                terms[exponent] = terms.get(exponent, ZERO) + c1 * c2
        return MultiPoly(terms, self._nvars)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "MultiPoly":
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        out = MultiPoly.constant(ONE, self._nvars)
        for _ in range(exponent):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self._nvars == other._nvars and self._terms == other._terms
        return self == MultiPoly.constant(other, self._nvars)

    def __hash__(self) -> int:
        return hash((self._nvars, frozenset(self._terms.items())))

    def derivative(self, index: int) -> "MultiPoly":
        """Partial derivative with respect to variable `index`."""
        if not 0 <= index < self._nvars:
            raise DimensionMismatch(f"variable {index} out of range for {self._nvars} variables")
        terms = {}
        for exponent, coeff in self._terms.items():
            power = exponent[index]
            if power == 0:
                continue
            lowered = list(exponent)
            lowered[index] -= 1
            terms[tuple(lowered)] = coeff * power
        return MultiPoly(terms, self._nvars)

    def evaluate(self, point: Sequence[Number]) -> Scalar:
        point = [as_scalar(x) for x in point]
        if len(point) != self._nvars:
            raise DimensionMismatch(f"point has {len(point)} coordinates, polynomial has {self._nvars} variables")
        acc = ZERO
        for exponent, coeff in self._terms.items():
            term = coeff
            for x, power in zip(point, exponent):
                if power:
                    term = term * x ** power
            acc = acc + term
        return acc

    def extend_blocks(self, n: int, blocks: int) -> "MultiPoly":
        """Reinterpret as a polynomial in `blocks` blocks of n variables, new blocks unused."""
        if blocks * n < self._nvars or self._nvars % n:
            raise DimensionMismatch(f"cannot widen {self._nvars} variables to {blocks} blocks of {n}")
        pad = (0,) * (blocks * n - self._nvars)
        return MultiPoly({e + pad: c for e, c in self._terms.items()}, blocks * n)

    def substitute(self, element: GroupElement) -> "MultiPoly":
        """f(g u_1, ..., g u_m): the same linear map applied to every block."""
        matrix = element.matrix
        n = len(matrix)
        if self._nvars % n:
            raise DimensionMismatch(f"{self._nvars} variables do not split into blocks of {n}")
        blocks = self._nvars // n
        images = []
        for k in range(blocks):
            for a in range(n):
                image = MultiPoly(nvars=self._nvars)
                for b in range(n):
                    if not matrix[a][b].is_zero():
                        image = image + MultiPoly.variable(k * n + b, self._nvars) * matrix[a][b]
                images.append(image)
        out = MultiPoly(nvars=self._nvars)
        for exponent, coeff in self._terms.items():
            term = MultiPoly.constant(coeff, self._nvars)
            for image, power in zip(images, exponent):
                if power:
                    term = term * image ** power
            out = out + term
        return out

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exponent in sorted(self._terms, reverse=True):
            factors = [f"x{k}" + (f"^{p}" if p > 1 else "") for k, p in enumerate(exponent) if p]
            coeff = self._terms[exponent]
            if not factors:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"({coeff})*" + "*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"MultiPoly({self}, nvars={self._nvars})"


class PolarizationOp:
    """D_ij: differentiate block j in the direction of block i (1-based)."""

    __slots__ = ("i", "j")

    def __init__(self, i: int, j: int) -> None:
        self.i = i
        self.j = j

    def __repr__(self) -> str:
        return f"D({self.i},{self.j})"


def _monomial_exponents(n: int, m: int) -> Iterable[Exponent]:
    for combo in itertools.combinations_with_replacement(range(n), m):
        exponent = [0] * n
        for k in combo:
            exponent[k] += 1
        yield tuple(exponent)


def _multinomial(exponent: Exponent) -> int:
    out, remaining = 1, sum(exponent)
    for power in exponent:
        out *= comb(remaining, power)
        remaining -= power
    return out


def expand_psi(orbit: CovectorOrbit, m: int, cartan: Matrix) -> MultiPoly:
    """psi_m = sum over the orbit of (l . x)^m, fully expanded.

    Raises:
        ExpansionTooLarge: Rank above 4 or more than 10^5 monomials of degree m
    """
    n = len(cartan)
    if m < 0:
        raise ValueError(f"degree must be nonnegative, got {m}")
    monomials = comb(m + n - 1, n - 1)
    if n > MAX_EXPANSION_RANK or monomials > MAX_EXPANSION_MONOMIALS:
        raise ExpansionTooLarge(
            f"{orbit.label}: psi_{m} in rank {n} has {monomials} monomials "
            f"(limits: rank {MAX_EXPANSION_RANK}, {MAX_EXPANSION_MONOMIALS} monomials)")
    forms = orbit.linear_forms(cartan)
    terms: Dict[Exponent, Scalar] = {}
    for exponent in _monomial_exponents(n, m):
        acc = ZERO
        for form in forms:
            term = ONE
            for x, power in zip(form, exponent):
                if power:
                    term = term * x ** power
            acc = acc + term
        if not acc.is_zero():
            terms[exponent] = acc * _multinomial(exponent)
    return MultiPoly(terms, n)


def polarize(op: PolarizationOp, f: MultiPoly, m: int) -> MultiPoly:
    """(D_ij f)(u) = sum_a u_{i,a} d f / d u_{j,a}.

    Raises:
        BlockIndexOutOfRange: i or j outside 1..m
    """
    if m < 1 or f.nvars % m:
        raise DimensionMismatch(f"{f.nvars} variables do not split into {m} blocks")
    for index in (op.i, op.j):
        if not 1 <= index <= m:
            raise BlockIndexOutOfRange(f"{op!r}: block {index} outside 1..{m}")
    n = f.nvars // m
    out = MultiPoly(nvars=f.nvars)
    for a in range(n):
        partial = f.derivative((op.j - 1) * n + a)
        if partial.is_zero():
            continue
        out = out + MultiPoly.variable((op.i - 1) * n + a, f.nvars) * partial
    return out


def differential_by_polarization(f: MultiPoly) -> List[MultiPoly]:
    """Gradient of a single-block f read off D_{2,1} f, linear in u_2."""
    n = f.nvars
    df = polarize(PolarizationOp(2, 1), f.extend_blocks(n, 2), 2)
    parts: List[Dict[Exponent, Scalar]] = [{} for _ in range(n)]
    for exponent, coeff in df.terms.items():
        second = exponent[n:]
        a = second.index(1)
        parts[a][exponent[:n]] = coeff
    return [MultiPoly(p, n) for p in parts]


def hessian_by_polarization(f: MultiPoly) -> List[List[MultiPoly]]:
    """Hessian of a single-block f read off D_{2,1}(D_{3,1} f), bilinear in (u_2, u_3)."""
    n = f.nvars
    wide = f.extend_blocks(n, 3)
    hess = polarize(PolarizationOp(2, 1), polarize(PolarizationOp(3, 1), wide, 3), 3)
    parts: List[List[Dict[Exponent, Scalar]]] = [[{} for _ in range(n)] for _ in range(n)]
    for exponent, coeff in hess.terms.items():
        a = exponent[n:2 * n].index(1)
        b = exponent[2 * n:].index(1)
        parts[a][b][exponent[:n]] = coeff
    return [[MultiPoly(p, n) for p in row] for row in parts]


def symbolic_jet(f: MultiPoly, v: Sequence[Number]) -> Tuple[Scalar, Vector, Matrix]:
    """(value, gradient, Hessian) of a single-block polynomial at v, by term-wise differentiation."""
    point = [as_scalar(x) for x in v]
    if len(point) != f.nvars:
        raise DimensionMismatch(f"point has {len(point)} coordinates, polynomial has {f.nvars} variables")
    n = f.nvars
    firsts = [f.derivative(a) for a in range(n)]
    gradient = tuple(p.evaluate(point) for p in firsts)
    hessian = tuple(tuple(firsts[a].derivative(b).evaluate(point) for b in range(n)) for a in range(n))
    return f.evaluate(point), gradient, hessian
