"""Data models shared by the certifier, the CLI and the reports."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from src.linalg import Matrix, Vector
from src.scalars import Scalar, UniPoly

PASS = "PASS"
FAIL = "FAIL"


@dataclass
class PointJet:
    """Values, gradients and Hessians of a family of invariants at one point.

    Attributes:
        point: Coordinates in the simple-root basis
        degrees: Degree of each invariant
        values: psi(v) per invariant
        gradients: n-vector per invariant
        hessians: Symmetric n x n matrix per invariant
    """
    point: Vector
    degrees: List[int]
    values: List[Scalar]
    gradients: List[Vector]
    hessians: List[Matrix]

    @property
    def rank(self) -> int:
        return len(self.point)


@dataclass(frozen=True)
class CandidateSet:
    """A set T = {rho_i} + chosen products rho_i rho_j.

    Attributes:
        rank: Number of basic invariants n
        pairs: Chosen index pairs (i <= j), 0-based, in canonical order
    """
    rank: int
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def singles(self) -> Tuple[int, ...]:
        return tuple(range(self.rank))

    def size(self) -> int:
        return self.rank + len(self.pairs)

    def members(self) -> List[Tuple[int, ...]]:
        """Singles as (i,), products as (i, j)."""
        return [(i,) for i in self.singles] + list(self.pairs)

    def degree_census(self, degrees: List[int]) -> UniPoly:
        """sum over Q in T of t^(deg Q - 2)."""
        counts: Dict[int, int] = {}
        for member in self.members():
            exponent = sum(degrees[i] for i in member) - 2
            counts[exponent] = counts.get(exponent, 0) + 1
        top = max(counts) if counts else 0
        return UniPoly(counts.get(k, 0) for k in range(top + 1))

    def labels(self) -> List[str]:
        out = []
        for member in self.members():
            if len(member) == 1:
                out.append(f"rho{member[0] + 1}")
            elif member[0] == member[1]:
                out.append(f"rho{member[0] + 1}^2")
            else:
                out.append(f"rho{member[0] + 1}*rho{member[1] + 1}")
        return out

    def to_dict(self) -> Dict:
        return {'pairs': [[i + 1, j + 1] for i, j in self.pairs], 'labels': self.labels()}


@dataclass
class CandidateVerdict:
    """Hessian certificate of one candidate set."""
    candidate: CandidateSet
    determinant: Scalar
    nonzero: bool

    def to_dict(self) -> Dict:
        out = self.candidate.to_dict()
        out['determinant'] = self.determinant.serialize()
        out['nonzero'] = self.nonzero
        return out


@dataclass
class CertificationReport:
    """Outcome of the full certification pipeline for one group.

    Attributes:
        label: Group label
        rank: Rank n
        degrees: Degrees of the basic invariants
        degree_source: "computed" or "paper-table"
        orbit_size: |O| as computed
        expected_orbit_size: Reference |O| (corrected), if any
        published_orbit_size: |O| as printed, when it differs
        node_permutation: Relabelling applied to the catalog numbering
        v: Point used, simple-root coordinates
        numerator: Sym^2 numerator coefficients, constant term first
        numerator_source: "computed" or "paper-table"
        jacobian_determinant: det J at v
        jacobian_nonzero: det J != 0
        regular: v avoids every reflecting hyperplane
        candidate_sets: One verdict per candidate set
        expected_choices: Reference number of candidate sets, if any
        group_order: Order from the enumeration, when it ran
        verdict: PASS or FAIL
        warnings: Diagnostics recorded instead of raised
        timings: Seconds per stage
    """
    label: str
    rank: int
    degrees: List[int]
    degree_source: str
    orbit_size: int
    v: Vector
    numerator: List[int]
    numerator_source: str
    jacobian_determinant: Scalar
    jacobian_nonzero: bool
    regular: bool
    candidate_sets: List[CandidateVerdict] = field(default_factory=list)
    expected_orbit_size: Optional[int] = None
    published_orbit_size: Optional[int] = None
    node_permutation: Tuple[int, ...] = ()
    expected_choices: Optional[int] = None
    group_order: Optional[int] = None
    verdict: str = FAIL
    warnings: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def decide(self) -> str:
        """PASS iff det J != 0, T exists, and every det M != 0."""
        ok = (
            self.jacobian_nonzero
            and bool(self.candidate_sets)
            and all(c.nonzero for c in self.candidate_sets)
        )
        self.verdict = PASS if ok else FAIL
        return self.verdict

    def to_dict(self, include_timings: bool = True) -> Dict:
        out = {
            'label': self.label,
            'rank': self.rank,
            'degrees': list(self.degrees),
            'degree_source': self.degree_source,
            'orbit_size': self.orbit_size,
            'expected_orbit_size': self.expected_orbit_size,
            'published_orbit_size': self.published_orbit_size,
            'node_permutation': list(self.node_permutation),
            'v': [x.serialize() for x in self.v],
            'numerator': list(self.numerator),
            'numerator_source': self.numerator_source,
            'jacobian_determinant': self.jacobian_determinant.serialize(),
            'jacobian_nonzero': self.jacobian_nonzero,
            'regular': self.regular,
            'candidate_sets': [c.to_dict() for c in self.candidate_sets],
            'expected_choices': self.expected_choices,
            'group_order': str(self.group_order) if self.group_order is not None else None,
            'verdict': self.verdict,
            'warnings': list(self.warnings),
        }
        if include_timings:
            out['timings'] = {k: round(t, 3) for k, t in self.timings.items()}
        return out


@dataclass
class ProductBasisResult:
    """Combined Hessian-basis generators for W1 x W2 and their certificate.

    Attributes:
        label: Product label "W1xW2"
        generators: Labels of the combined generators
        candidate: Combined candidate set on the product invariants
        determinant: det M of the combined set at the concatenated point
        nonzero: det M != 0
    """
    label: str
    generators: List[str]
    candidate: CandidateSet
    determinant: Scalar
    nonzero: bool

    @property
    def count(self) -> int:
        return len(self.generators)

    def to_dict(self) -> Dict:
        return {
            'label': self.label,
            'generators': list(self.generators),
            'count': self.count,
            'determinant': self.determinant.serialize(),
            'nonzero': self.nonzero,
        }


@dataclass
class TableRow:
    """One computed-vs-reference comparison line.

    Attributes:
        label: Group label
        quantity: "degrees", "|O|", "numerator" or "choices"
        computed: Rendered computed value (empty when skipped)
        expected: Rendered reference value
        status: MATCH, MISMATCH or SKIPPED
        note: Provenance or reason for skipping
    """
    label: str
    quantity: str
    computed: str
    expected: str
    status: str
    note: str = ""

    def to_dict(self) -> Dict:
        return {
            'label': self.label,
            'quantity': self.quantity,
            'computed': self.computed,
            'expected': self.expected,
            'status': self.status,
            'note': self.note,
        }
