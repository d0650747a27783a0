"""Finite reflection groups built from Cartan matrices.

Points live in the simple-root basis (coordinate columns a), covectors in the
co-root basis (rows mu). A covector pairs with a point as mu * C * a. The
generator R_i acts on points by (R_i a)_i = a_i - sum_j C_ij a_j, and on
covectors by mu -> mu - (mu C)_i e_i, i.e. pull-back along R_i.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.errors import InvalidCartan, RelationViolation, SingularCartan, UnknownLabel, UnsupportedRank
from src.linalg import (
    Matrix,
    Vector,
    char_poly_reversed,
    determinant,
    identity,
    inverse,
    is_identity,
    mat_mul,
    mat_pow,
    mat_vec,
    matrix_key,
    to_matrix,
)
from src.scalars import ONE, ZERO, Field, Scalar, UniPoly, as_scalar, field_of, promote

logger = logging.getLogger(__name__)

MAX_RANK = 8

# -phi = zeta^2 + zeta^3 with zeta = exp(2 pi i / 5)
GOLDEN_BOND = Scalar(Fraction(-1, 2), Fraction(-1, 2))
# C_ij * C_ji for a bond of order 5
PHI_SQUARED = Scalar(Fraction(3, 2), Fraction(1, 2))

BOND_ORDERS = {0: 2, 1: 3, 2: 4, 3: 6}

E_SERIES_EDGES = {
    6: [(1, 3), (3, 4), (4, 5), (5, 6), (2, 4)],
    7: [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (2, 4)],
    8: [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)],
}

_SIMPLE_LABEL = re.compile(r"^([A-H])(\d+)$")
_DIHEDRAL_LABEL = re.compile(r"^I2\((\d+)\)$")


@dataclass(frozen=True)
class CartanDatum:
    """Cartan matrix C_ij = r_i^v(r_j) with its label and field tag.

    Attributes:
        label: Group identifier ("H3", "E7", "A1xA2", ...)
        matrix: n x n matrix of Scalars
        field: RATIONAL for crystallographic data, GOLDEN for H-type bonds
        node_permutation: Relabelling applied to the catalog numbering, if any
    """
    label: str
    matrix: Matrix
    field: Field
    node_permutation: Tuple[int, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def canonical_text(self) -> str:
        """Serialization hashed by the histogram cache."""
        return ";".join(",".join(x.serialize() for x in row) for row in self.matrix)

    def bond_product(self, i: int, j: int) -> Scalar:
        return self.matrix[i][j] * self.matrix[j][i]

    def bond_order(self, i: int, j: int) -> int:
        """Order m_ij of R_i R_j decoded from C_ij C_ji = 4 cos^2(pi/m)."""
        if i == j:
            return 1
        product = self.bond_product(i, j)
        if product == PHI_SQUARED:
            return 5
        if product.is_integer() and product.to_int() in BOND_ORDERS:
            return BOND_ORDERS[product.to_int()]
        raise InvalidCartan(f"{self.label}: unsupported bond C[{i}][{j}]*C[{j}][{i}] = {product}")

    def validate(self) -> None:
        """Check the diagonal, the zero pattern and every bond product."""
        n = self.rank
        errors = []
        for i in range(n):
            if len(self.matrix[i]) != n:
                errors.append(f"row {i} has length {len(self.matrix[i])}, expected {n}")
                continue
            if self.matrix[i][i] != 2:
                errors.append(f"diagonal entry C[{i}][{i}] = {self.matrix[i][i]}, expected 2")
        if errors:
            raise InvalidCartan(f"{self.label}: " + "; ".join(errors))
        for i in range(n):
            for j in range(i + 1, n):
                if self.matrix[i][j].is_zero() != self.matrix[j][i].is_zero():
                    errors.append(f"C[{i}][{j}] and C[{j}][{i}] disagree on zero")
                    continue
                try:
                    self.bond_order(i, j)
                except InvalidCartan as exc:
                    errors.append(str(exc))
        if errors:
            raise InvalidCartan(f"{self.label}: " + "; ".join(errors))

    def relabel_last(self, node: int) -> "CartanDatum":
        """Datum with `node` swapped into the last position."""
        n = self.rank
        perm = list(range(n))
        perm[node], perm[n - 1] = perm[n - 1], perm[node]
        matrix = tuple(tuple(self.matrix[perm[i]][perm[j]] for j in range(n)) for i in range(n))
        return CartanDatum(self.label, matrix, self.field, tuple(perm))


@dataclass(frozen=True)
class GroupElement:
    """Matrix acting on simple-root coordinate columns."""
    matrix: Matrix

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(mat_mul(self.matrix, other.matrix))

    def apply(self, point: Sequence[Scalar]) -> Vector:
        return mat_vec(self.matrix, point)

    def inverse(self) -> "GroupElement":
        return GroupElement(inverse(self.matrix))

    def is_identity(self) -> bool:
        return is_identity(self.matrix)

    def determinant(self) -> Scalar:
        return determinant(self.matrix)

    def key(self) -> Tuple[str, ...]:
        return matrix_key(self.matrix)


@dataclass(frozen=True)
class ReflectionGroup:
    """Cartan datum together with its simple reflections R_1..R_n."""
    datum: CartanDatum
    generators: Tuple[GroupElement, ...]

    @property
    def label(self) -> str:
        return self.datum.label

    @property
    def rank(self) -> int:
        return self.datum.rank

    @property
    def cartan(self) -> Matrix:
        return self.datum.matrix

    @property
    def field(self) -> Field:
        return self.datum.field

    def identity(self) -> GroupElement:
        return GroupElement(_promote_matrix(identity(self.rank), self.field))


@dataclass(frozen=True)
class Covector:
    """Linear form sum_j mu_j r_j^v, stored by its co-root coordinates."""
    mu: Vector

    def key(self) -> Tuple[str, ...]:
        return tuple(x.serialize() for x in self.mu)

    def value_key(self) -> Tuple[Tuple[Fraction, Fraction], ...]:
        """Tag-independent key used for membership tests."""
        return tuple((x.a, x.b) for x in self.mu)

    def linear_form(self, cartan: Matrix) -> Vector:
        """Row l = mu * C, so that lambda(v) = l . a."""
        n = len(self.mu)
        return tuple(
            _sum(self.mu[k] * cartan[k][j] for k in range(n) if not self.mu[k].is_zero())
            for j in range(n)
        )

    def pair(self, cartan: Matrix, point: Sequence[Scalar]) -> Scalar:
        return _sum(l * a for l, a in zip(self.linear_form(cartan), point))

    def reflect(self, cartan: Matrix, i: int) -> "Covector":
        """Pull-back along R_i: mu - (mu C)_i e_i."""
        n = len(self.mu)
        coupling = _sum(self.mu[k] * cartan[k][i] for k in range(n) if not self.mu[k].is_zero())
        if coupling.is_zero():
            return self
        mu = list(self.mu)
        mu[i] = mu[i] - coupling
        return Covector(tuple(mu))


@dataclass(frozen=True)
class CovectorOrbit:
    """W-orbit of a covector, in deterministic breadth-first order."""
    elements: Tuple[Covector, ...]
    label: str
    _keys: frozenset = field(default=frozenset(), compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_keys", frozenset(c.value_key() for c in self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, covector: Covector) -> bool:
        return covector.value_key() in self._keys

    def linear_forms(self, cartan: Matrix) -> List[Vector]:
        return [c.linear_form(cartan) for c in self.elements]

    def to_json(self) -> List[List[str]]:
        return [list(c.key()) for c in self.elements]


@dataclass(frozen=True)
class RelationVerdict:
    """Outcome of checking (R_i R_j)^m_ij = I for one generator pair."""
    i: int
    j: int
    order: int
    holds: bool


def _promote_matrix(matrix: Matrix, field: Field) -> Matrix:
    return tuple(tuple(promote(x, field) for x in row) for row in matrix)


def _sum(values: Iterable[Scalar]) -> Scalar:
    acc = ZERO
    for value in values:
        acc = acc + value
    return acc


def _matrix_from_edges(n: int, edges: Sequence[Tuple[int, int]]) -> List[List[Scalar]]:
    rows = [[Scalar(2) if i == j else ZERO for j in range(n)] for i in range(n)]
    for a, b in edges:
        rows[a - 1][b - 1] = Scalar(-1)
        rows[b - 1][a - 1] = Scalar(-1)
    return rows


def _chain(n: int) -> List[Tuple[int, int]]:
    return [(k, k + 1) for k in range(1, n)]


def _simple_catalog(family: str, n: int) -> List[List[Scalar]]:
    if n < 1 or n > MAX_RANK:
        raise UnsupportedRank(f"{family}{n}: rank must be between 1 and {MAX_RANK}")
    if family == "A":
        return _matrix_from_edges(n, _chain(n))
    if family in ("B", "C"):
        if n < 2:
            raise UnsupportedRank(f"{family}{n}: rank must be at least 2")
        rows = _matrix_from_edges(n, _chain(n))
        if family == "B":
            rows[n - 1][n - 2] = Scalar(-2)
        else:
            rows[n - 2][n - 1] = Scalar(-2)
        return rows
    if family == "D":
        if n < 4:
            raise UnsupportedRank(f"D{n}: rank must be at least 4")
        return _matrix_from_edges(n, _chain(n - 1) + [(n - 2, n)])
    if family == "E":
        if n not in E_SERIES_EDGES:
            raise UnsupportedRank(f"E{n}: only E6, E7, E8 are supported")
        return _matrix_from_edges(n, E_SERIES_EDGES[n])
    if family == "F":
        if n != 4:
            raise UnsupportedRank(f"F{n}: only F4 exists")
        return [[Scalar(x) for x in row] for row in
                ((2, -1, 0, 0), (-1, 2, -1, 0), (0, -2, 2, -1), (0, 0, -1, 2))]
    if family == "G":
        if n != 2:
            raise UnsupportedRank(f"G{n}: only G2 exists")
        return [[Scalar(2), Scalar(-3)], [Scalar(-1), Scalar(2)]]
    if family == "H":
        if n not in (3, 4):
            raise UnsupportedRank(f"H{n}: only H3 and H4 are supported")
        rows = _matrix_from_edges(n, _chain(n))
        rows[0][1] = GOLDEN_BOND
        rows[1][0] = GOLDEN_BOND
        return rows
    raise UnknownLabel(f"Unknown group family '{family}'")


def _dihedral_catalog(m: int) -> List[List[Scalar]]:
    if m == 5:
        return [[Scalar(2), GOLDEN_BOND], [GOLDEN_BOND, Scalar(2)]]
    off = {2: 0, 3: 1, 4: 2, 6: 3}
    if m not in off:
        raise UnsupportedRank(f"I2({m}): only m in 2..6 is supported")
    product = off[m]
    if product == 0:
        return [[Scalar(2), ZERO], [ZERO, Scalar(2)]]
    return [[Scalar(2), Scalar(-product)], [Scalar(-1), Scalar(2)]]


def _block_diagonal(blocks: Sequence[Matrix]) -> Matrix:
    n = sum(len(b) for b in blocks)
    rows = [[ZERO] * n for _ in range(n)]
    offset = 0
    for block in blocks:
        for i, row in enumerate(block):
            for j, x in enumerate(row):
                rows[offset + i][offset + j] = x
        offset += len(block)
    return to_matrix(rows)


def split_product_label(label: str) -> List[str]:
    return [part.strip() for part in re.split(r"[x×*]", label) if part.strip()]


def catalog(label: str) -> CartanDatum:
    """Cartan datum for a group label such as "H3", "E8", "A5", "I2(5)" or "A1xA2"."""
    if not isinstance(label, str) or not label.strip():
        raise UnknownLabel(f"Invalid group label {label!r}")
    label = label.strip()
    parts = split_product_label(label)
    if len(parts) > 1:
        factors = [catalog(part) for part in parts]
        matrix = _block_diagonal([f.matrix for f in factors])
        datum = CartanDatum("x".join(f.label for f in factors), matrix, field_of(x for row in matrix for x in row))
        datum.validate()
        return datum
    match = _SIMPLE_LABEL.match(label.upper())
    dihedral = _DIHEDRAL_LABEL.match(label.upper())
    if match:
        rows = _simple_catalog(match.group(1), int(match.group(2)))
        label = label.upper()
    elif dihedral:
        rows = _dihedral_catalog(int(dihedral.group(1)))
        label = label.upper()
    else:
        raise UnknownLabel(f"Unknown group label '{label}'")
    matrix = to_matrix(rows)
    datum = CartanDatum(label, matrix, field_of(x for row in matrix for x in row))
    datum.validate()
    return datum


def build_group(datum: CartanDatum) -> ReflectionGroup:
    """Simple reflections: R_i is the identity with row i replaced by e_i - C[i]."""
    datum.validate()
    n = datum.rank
    generators = []
    for i in range(n):
        rows = [list(row) for row in identity(n)]
        rows[i] = [(ONE if j == i else ZERO) - datum.matrix[i][j] for j in range(n)]
        generators.append(GroupElement(_promote_matrix(to_matrix(rows), datum.field)))
    return ReflectionGroup(datum, tuple(generators))


def coxeter_relation_check(group: ReflectionGroup, strict: bool = True) -> List[RelationVerdict]:
    """Check R_i^2 = I and that R_i R_j has order exactly m_ij."""
    verdicts = []
    n = group.rank
    for i in range(n):
        for j in range(i, n):
            order = 2 if i == j else group.datum.bond_order(i, j)
            base = group.generators[i].matrix if i == j else mat_mul(
                group.generators[i].matrix, group.generators[j].matrix)
            if i == j:
                holds = is_identity(mat_pow(group.generators[i].matrix, 2)) and not is_identity(base)
            else:
                holds = is_identity(mat_pow(base, order)) and not any(
                    is_identity(mat_pow(base, k)) for k in range(1, order))
            verdicts.append(RelationVerdict(i, j, order, holds))
            if strict and not holds:
                raise RelationViolation(
                    f"{group.label}: relation (R_{i + 1} R_{j + 1})^{order} = I fails")
    return verdicts


def fundamental_covector(group: ReflectionGroup) -> Covector:
    """mu = (0, ..., 0, 1) * C^-1, the last row of C^-1."""
    try:
        c_inv = inverse(group.cartan)
    except SingularCartan:
        raise SingularCartan(f"{group.label}: Cartan matrix is singular")
    return Covector(tuple(promote(x, group.field) for x in c_inv[group.rank - 1]))


def orbit(group: ReflectionGroup, seed: Covector) -> CovectorOrbit:
    """Breadth-first closure under pull-back by the generators.

    Each new layer is sorted by canonical key, so the element order does not
    depend on dictionary iteration.
    """
    seed = Covector(tuple(promote(x, group.field) for x in seed.mu))
    seen = {seed.key()}
    elements = [seed]
    layer = [seed]
    while layer:
        fresh: Dict[Tuple[str, ...], Covector] = {}
        for covector in layer:
            for i in range(group.rank):
                image = covector.reflect(group.cartan, i)
                key = image.key()
                if key not in seen and key not in fresh:
                    fresh[key] = image
        layer = [fresh[key] for key in sorted(fresh)]
        seen.update(fresh)
        elements.extend(layer)
    return CovectorOrbit(tuple(elements), group.label)


def root_system(group: ReflectionGroup) -> Tuple[Vector, ...]:
    """All roots, as the W-orbit of the simple roots, in coordinate columns."""
    n = group.rank
    start = [tuple(promote(ONE if k == i else ZERO, group.field) for k in range(n)) for i in range(n)]
    seen = {tuple(x.serialize() for x in r) for r in start}
    roots = list(start)
    queue = list(start)
    while queue:
        fresh = []
        for root in queue:
            for gen in group.generators:
                image = gen.apply(root)
                key = tuple(x.serialize() for x in image)
                if key not in seen:
                    seen.add(key)
                    fresh.append(image)
        roots.extend(fresh)
        queue = fresh
    return tuple(roots)


def coroot_forms(group: ReflectionGroup) -> Tuple[Covector, ...]:
    """All co-roots: union of the orbits of the simple co-roots e_i."""
    n = group.rank
    seen = set()
    out = []
    for i in range(n):
        seed = Covector(tuple(ONE if k == i else ZERO for k in range(n)))
        if seed.key() in seen:
            continue
        for covector in orbit(group, seed):
            if covector.key() not in seen:
                seen.add(covector.key())
                out.append(covector)
    return tuple(out)


def is_regular(group: ReflectionGroup, point: Sequence) -> bool:
    """True when the point lies on no reflecting hyperplane."""
    point = [as_scalar(x) for x in point]
    return all(not c.pair(group.cartan, point).is_zero() for c in coroot_forms(group))


def char_poly(element: GroupElement) -> UniPoly:
    """det(1 - t w), constant term 1."""
    field = field_of(x for row in element.matrix for x in row)
    return char_poly_reversed(element.matrix).to_field(field)


def product_group(left: ReflectionGroup, right: ReflectionGroup) -> ReflectionGroup:
    """W1 x W2 acting block-diagonally on the concatenated coordinates."""
    matrix = _block_diagonal([left.cartan, right.cartan])
    datum = CartanDatum(f"{left.label}x{right.label}", matrix,
                        field_of(x for row in matrix for x in row))
    return build_group(datum)


def align_last_node(datum: CartanDatum, expected_orbit_size: int) -> CartanDatum:
    """Relabel so the fundamental covector of the last node has the expected orbit.

    The catalog numbering already satisfies this for every reference group;
    the search only runs when a datum with another numbering is supplied.
    """
    group = build_group(datum)
    if len(orbit(group, fundamental_covector(group))) == expected_orbit_size:
        return datum
    for node in range(datum.rank - 1):
        candidate = datum.relabel_last(node)
        group = build_group(candidate)
        if len(orbit(group, fundamental_covector(group))) == expected_orbit_size:
            logger.warning(
                f"{datum.label}: relabelled node {node + 1} as last to match orbit size "
                f"{expected_orbit_size}; permutation {candidate.node_permutation}"
            )
            return candidate
    raise InvalidCartan(
        f"{datum.label}: no node yields a fundamental orbit of size {expected_orbit_size}")
