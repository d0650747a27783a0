"""Chern-class invariants, point jets, and the Jacobian and Hessian certificates.

psi_m = sum over the orbit O of lambda^m. Derivatives are never taken
symbolically: with l = mu C and s = l . v,

    psi_d(v)      = sum s^d
    grad psi_d    = d sum s^(d-1) l
    Hess psi_d    = d (d-1) sum s^(d-2) l l^T

so a jet costs O(|O| n^2) per degree. Hessian rows of a product rho_i rho_j
come from the product rule, and M stacks the upper-triangular entries of
Hess(Q)(v) for Q in a candidate set T.
"""

import itertools
import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from src.coxeter import (
    CovectorOrbit,
    ReflectionGroup,
    align_last_node,
    build_group,
    catalog,
    coxeter_relation_check,
    fundamental_covector,
    is_regular,
    orbit,
    product_group,
    split_product_label,
)
from src.errors import (
    DimensionMismatch,
    InputNotCertified,
    NoCandidateSets,
    PointNotRegular,
)
from src.linalg import Matrix, Vector, determinant, dot
from src.models import (
    FAIL,
    CandidateSet,
    CandidateVerdict,
    CertificationReport,
    PointJet,
    ProductBasisResult,
)
from src.molien import CharPolyHistogram, CovariantClass, covariant_series, histogram, numerator, recover_degrees
from src.reference_data import COMPUTED_SOURCE, NUMERATOR_SOURCES, TABLE_SOURCE, reference_row
from src.scalars import ZERO, Scalar, UniPoly, as_scalar

logger = logging.getLogger(__name__)

HistogramProvider = Callable[[ReflectionGroup], CharPolyHistogram]


@dataclass(frozen=True)
class BasicInvariantSet:
    """psi_{d_1}, ..., psi_{d_n} built from one covector orbit.

    Attributes:
        label: Group label
        orbit: Orbit O of the fundamental covector
        degrees: d_1 <= ... <= d_n
        forms: l = mu C for every orbit element, in orbit order
    """
    label: str
    orbit: CovectorOrbit
    degrees: Tuple[int, ...]
    forms: Tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def _point(self, v: Sequence) -> Vector:
        point = tuple(as_scalar(x) for x in v)
        if self.forms and len(point) != len(self.forms[0]):
            raise DimensionMismatch(f"{self.label}: point has {len(point)} coordinates, expected {len(self.forms[0])}")
        return point

    def psi(self, m: int, v: Sequence) -> Scalar:
        point = self._point(v)
        acc = ZERO
        for form in self.forms:
            acc = acc + dot(form, point) ** m
        return acc

    def jet_at(self, v: Sequence) -> PointJet:
        point = self._point(v)
        n = len(point)
        pairings = [dot(form, point) for form in self.forms]
        upper = [(a, b) for a in range(n) for b in range(a, n)]
        outer = [[form[a] * form[b] for a, b in upper] for form in self.forms]
        values, gradients, hessians = [], [], []
        for d in self.degrees:
            value = ZERO
            grad = [ZERO] * n
            hess = [ZERO] * len(upper)
            for form, s, products in zip(self.forms, pairings, outer):
                if s.is_zero() and d > 2:
                    continue
                low = s ** (d - 2)
                mid = low * s
                value = value + mid * s
                if not mid.is_zero():
                    for a in range(n):
                        if not form[a].is_zero():
                            grad[a] = grad[a] + mid * form[a]
                for k, product in enumerate(products):
                    if not product.is_zero():
                        hess[k] = hess[k] + low * product
            full = [[ZERO] * n for _ in range(n)]
            for (a, b), entry in zip(upper, hess):
                entry = entry * (d * (d - 1))
                full[a][b] = entry
                full[b][a] = entry
            values.append(value)
            gradients.append(tuple(x * d for x in grad))
            hessians.append(tuple(tuple(row) for row in full))
        return PointJet(point, list(self.degrees), values, gradients, hessians)


@dataclass(frozen=True)
class ProductInvariantSet:
    """Invariants of W1 x W2: those of W1 on the first block, then those of W2.

    Either side may itself be a product, so longer products nest to the left.
    """
    left: "InvariantFamily"
    right: "InvariantFamily"

    @property
    def label(self) -> str:
        return f"{self.left.label}x{self.right.label}"

    @property
    def degrees(self) -> Tuple[int, ...]:
        return self.left.degrees + self.right.degrees

    @property
    def rank(self) -> int:
        return self.left.rank + self.right.rank

    def jet_at(self, v: Sequence) -> PointJet:
        n1, n2 = self.left.rank, self.right.rank
        point = tuple(as_scalar(x) for x in v)
        if len(point) != n1 + n2:
            raise DimensionMismatch(f"{self.label}: point has {len(point)} coordinates, expected {n1 + n2}")
        first = self.left.jet_at(point[:n1])
        second = self.right.jet_at(point[n1:])
        pad_left = (ZERO,) * n2
        pad_right = (ZERO,) * n1
        gradients = [g + pad_left for g in first.gradients] + [pad_right + g for g in second.gradients]
        zero_row = (ZERO,) * (n1 + n2)
        hessians = [tuple(row + pad_left for row in h) + (zero_row,) * n2 for h in first.hessians]
        hessians += [(zero_row,) * n1 + tuple(pad_right + row for row in h) for h in second.hessians]
        return PointJet(point, list(self.degrees), first.values + second.values, gradients, hessians)


InvariantFamily = Union[BasicInvariantSet, ProductInvariantSet]


def basic_invariants(group: ReflectionGroup, degrees: Sequence[int],
                     covectors: Optional[CovectorOrbit] = None) -> BasicInvariantSet:
    """rho_i = psi_{d_i} over the orbit of the fundamental covector.

    Covectors pair with points as lambda(v) = (mu C) . v, v in simple-root
    coordinates. For A1 the forms are +-1, so psi_2 = 2 x^2 rather than the
    x^2 / 2 of the normalized inner product; the two differ by a constant
    and give the same certificates.
    """
    if covectors is None:
        covectors = orbit(group, fundamental_covector(group))
    if len(degrees) != group.rank:
        raise DimensionMismatch(f"{group.label}: {len(degrees)} degrees for rank {group.rank}")
    forms = tuple(c.linear_form(group.cartan) for c in covectors)
    return BasicInvariantSet(group.label, covectors, tuple(sorted(degrees)), forms)


def psi_eval(b: BasicInvariantSet, m: int, v: Sequence) -> Scalar:
    """Exact psi_m(v) = sum over O of (mu C v)^m."""
    if m < 0:
        raise ValueError(f"degree must be nonnegative, got {m}")
    return b.psi(m, v)


def jet_at(b: InvariantFamily, v: Sequence) -> PointJet:
    return b.jet_at(v)


def jacobian_certificate(b: InvariantFamily, v: Sequence) -> Tuple[Scalar, bool]:
    """det of the gradient rows; nonzero means basic invariants and v regular."""
    jet = b.jet_at(v)
    det = determinant(tuple(jet.gradients))
    return det, not det.is_zero()


def enumerate_candidate_sets(degrees: Sequence[int], numerator_poly: Union[UniPoly, Sequence[int]]) -> List[CandidateSet]:
    """All T whose census sum t^(deg Q - 2) equals the numerator.

    Every rho_i is in T; products are grouped by exponent d_i + d_j - 2 and
    chosen without repetition.
    """
    degrees = list(degrees)
    n = len(degrees)
    if isinstance(numerator_poly, UniPoly):
        coeffs = numerator_poly.integer_coefficients()
    else:
        coeffs = [int(c) for c in numerator_poly]
    if sum(coeffs) != n * (n + 1) // 2:
        raise NoCandidateSets(
            f"numerator evaluates to {sum(coeffs)} at t = 1, expected {n * (n + 1) // 2}")
    residual = list(coeffs)
    for d in degrees:
        exponent = d - 2
        if exponent >= len(residual) or residual[exponent] == 0:
            raise NoCandidateSets(f"numerator has no room for rho of degree {d}")
        residual[exponent] -= 1

    by_exponent: Dict[int, List[Tuple[int, int]]] = {}
    for i in range(n):
        for j in range(i, n):
            by_exponent.setdefault(degrees[i] + degrees[j] - 2, []).append((i, j))

    choices = []
    for exponent, needed in enumerate(residual):
        if needed == 0:
            continue
        available = by_exponent.get(exponent, [])
        if len(available) < needed:
            raise NoCandidateSets(
                f"need {needed} products of degree {exponent + 2}, only {len(available)} exist")
        choices.append(list(itertools.combinations(available, needed)))

    sets = []
    for combo in itertools.product(*choices):
        pairs = tuple(sorted(p for group in combo for p in group))
        sets.append(CandidateSet(n, pairs))
    if not sets:
        raise NoCandidateSets("no candidate set matches the numerator")
    return sorted(sets, key=lambda c: c.pairs)


def _member_hessian(jet: PointJet, member: Tuple[int, ...]) -> Matrix:
    if len(member) == 1:
        return jet.hessians[member[0]]
    i, j = member
    n = jet.rank
    fi, fj = jet.values[i], jet.values[j]
    gi, gj = jet.gradients[i], jet.gradients[j]
    hi, hj = jet.hessians[i], jet.hessians[j]
    return tuple(
        tuple(fi * hj[a][c] + fj * hi[a][c] + gi[a] * gj[c] + gj[a] * gi[c] for c in range(n))
        for a in range(n)
    )


def hessian_matrix(jet: PointJet, candidate: CandidateSet) -> Matrix:
    """M: one row per Q in T, columns at the upper-triangular positions (a <= b)."""
    n = jet.rank
    if candidate.rank != len(jet.degrees) or candidate.size() != n * (n + 1) // 2:
        raise DimensionMismatch(
            f"candidate set of size {candidate.size()} over {candidate.rank} invariants "
            f"does not fit rank {n}")
    rows = []
    for member in candidate.members():
        hess = _member_hessian(jet, member)
        rows.append(tuple(hess[a][b] for a in range(n) for b in range(a, n)))
    return tuple(rows)


def hessian_from_jet(jet: PointJet, candidate: CandidateSet) -> Tuple[Scalar, bool]:
    det = determinant(hessian_matrix(jet, candidate))
    return det, not det.is_zero()


def hessian_certificate(b: InvariantFamily, candidate: CandidateSet, v: Sequence,
                        jet: Optional[PointJet] = None, strict: bool = False) -> Tuple[Scalar, bool]:
    """det M for one candidate set at v.

    A zero Jacobian makes the verdict meaningless: it is logged (or raised as
    PointNotRegular when strict) and the determinant is still returned.
    """
    jet = jet or b.jet_at(v)
    jac = determinant(tuple(jet.gradients))
    if jac.is_zero():
        message = f"{b.label}: point {[str(x) for x in jet.point]} is not regular"
        if strict:
            raise PointNotRegular(message)
        logger.warning(message)
    return hessian_from_jet(jet, candidate)


def _default_provider(group: ReflectionGroup) -> CharPolyHistogram:
    return histogram(group)


def certify(
    label: str,
    v: Optional[Sequence] = None,
    numerator_source: str = COMPUTED_SOURCE,
    histogram_provider: Optional[HistogramProvider] = None,
    truncation_order: int = 64,
    degree_truncation_order: int = 140,
    strict: bool = False,
) -> CertificationReport:
    """Run orbit, degrees, numerator, Jacobian, candidate sets and Hessians for one group.

    Products such as "A1xA2" are certified factor by factor and combined with
    every cross-block product (see combine_candidate_sets).

    Args:
        label: Catalog label (any family, or a product such as "A1xA2")
        v: Point in simple-root coordinates; defaults to the reference point
        numerator_source: "computed" runs the Molien sum, "paper-table" reads the reference row
        histogram_provider: Supplies the char-poly histogram (cache-aware in the CLI)
        truncation_order: Series order for the numerator
        degree_truncation_order: Series order for degree recovery
        strict: Raise PointNotRegular instead of recording it

    Returns:
        CertificationReport with verdict PASS or FAIL
    """
    if numerator_source not in NUMERATOR_SOURCES:
        raise ValueError(f"numerator source must be one of {NUMERATOR_SOURCES}, got '{numerator_source}'")
    options = dict(
        numerator_source=numerator_source,
        histogram_provider=histogram_provider,
        truncation_order=truncation_order,
        degree_truncation_order=degree_truncation_order,
        strict=strict,
    )
    parts = split_product_label(label) if isinstance(label, str) else []
    if len(parts) > 1:
        return _certify_product(parts, v, **options)
    report, _, _ = _certify_irreducible(label, v, **options)
    return report


def _certify_irreducible(
    label: str,
    v: Optional[Sequence],
    numerator_source: str,
    histogram_provider: Optional[HistogramProvider],
    truncation_order: int,
    degree_truncation_order: int,
    strict: bool,
) -> Tuple[CertificationReport, BasicInvariantSet, ReflectionGroup]:
    timings: Dict[str, float] = {}
    warnings: List[str] = []
    started = time.perf_counter()

    datum = catalog(label)
    row = reference_row(datum.label)
    group = build_group(datum)
    coxeter_relation_check(group)
    covectors = orbit(group, fundamental_covector(group))
    if row is not None and len(covectors) != row.orbit_size:
        datum = align_last_node(datum, row.orbit_size)
        group = build_group(datum)
        covectors = orbit(group, fundamental_covector(group))
    timings['orbit'] = time.perf_counter() - started

    stage = time.perf_counter()
    group_order = None
    if numerator_source == TABLE_SOURCE:
        if row is None:
            raise ValueError(f"{datum.label}: no reference row; use the computed numerator")
        degrees = list(row.degrees)
        numerator_coeffs = list(row.sym2_numerator)
        degree_source = TABLE_SOURCE
    else:
        provider = histogram_provider or _default_provider
        hist = provider(group)
        group_order = hist.total
        invariant_series = covariant_series(hist, CovariantClass.TRIVIAL, degree_truncation_order)
        degrees = recover_degrees(invariant_series, group.rank)
        numerator_coeffs = numerator(hist, CovariantClass.SYM2, degrees, truncation_order).numerator_coefficients()
        degree_source = COMPUTED_SOURCE
        if row is not None:
            if tuple(degrees) != row.degrees:
                warnings.append(f"computed degrees {degrees} differ from reference {list(row.degrees)}")
            if tuple(numerator_coeffs) != row.sym2_numerator:
                warnings.append("computed Sym^2 numerator differs from the reference table")
    timings['molien'] = time.perf_counter() - stage

    if v is None:
        if row is None:
            raise ValueError(f"{datum.label}: no default point; pass one explicitly")
        v = row.v
    point = tuple(as_scalar(x) for x in v)
    if len(point) != group.rank:
        raise DimensionMismatch(f"{datum.label}: point has {len(point)} coordinates, rank is {group.rank}")

    stage = time.perf_counter()
    invariants = basic_invariants(group, degrees, covectors)
    jet = invariants.jet_at(point)
    jac = determinant(tuple(jet.gradients))
    regular = is_regular(group, point)
    _check_regularity(datum.label, point, jac, regular, warnings, strict)
    timings['jacobian'] = time.perf_counter() - stage

    stage = time.perf_counter()
    try:
        candidates = enumerate_candidate_sets(degrees, numerator_coeffs)
    except NoCandidateSets as e:
        candidates = []
        warnings.append(f"NoCandidateSets: {e}")
    if row is not None and candidates and len(candidates) != row.choices:
        warnings.append(f"{len(candidates)} candidate sets, reference lists {row.choices}")
    verdicts = _hessian_verdicts(datum.label, jet, candidates)
    timings['hessian'] = time.perf_counter() - stage
    timings['total'] = time.perf_counter() - started

    report = CertificationReport(
        label=datum.label,
        rank=group.rank,
        degrees=list(degrees),
        degree_source=degree_source,
        orbit_size=len(covectors),
        v=point,
        numerator=numerator_coeffs,
        numerator_source=numerator_source,
        jacobian_determinant=jac,
        jacobian_nonzero=not jac.is_zero(),
        regular=regular,
        candidate_sets=verdicts,
        expected_orbit_size=row.orbit_size if row else None,
        published_orbit_size=row.published_orbit_size if row else None,
        node_permutation=datum.node_permutation,
        expected_choices=row.choices if row else None,
        group_order=group_order,
        verdict=FAIL,
        warnings=warnings,
        timings=timings,
    )
    _finish(report)
    return report, invariants, group


def _certify_product(parts: Sequence[str], v: Optional[Sequence], **options) -> CertificationReport:
    """Certify each irreducible factor on its slice of v, then the combined sets."""
    started = time.perf_counter()
    ranks = [catalog(part).rank for part in parts]
    slices: List[Optional[Vector]] = [None] * len(parts)
    if v is not None:
        point = tuple(as_scalar(x) for x in v)
        if len(point) != sum(ranks):
            raise DimensionMismatch(
                f"{'x'.join(parts)}: point has {len(point)} coordinates, rank is {sum(ranks)}")
        offset = 0
        for k, rank in enumerate(ranks):
            slices[k] = point[offset:offset + rank]
            offset += rank

    factors = [_certify_irreducible(part, piece, **options) for part, piece in zip(parts, slices)]
    reports = [report for report, _, _ in factors]
    family: InvariantFamily = factors[0][1]
    group = factors[0][2]
    for _, invariants, factor_group in factors[1:]:
        family = ProductInvariantSet(family, invariants)
        group = product_group(group, factor_group)
    label = group.label

    timings: Dict[str, float] = {}
    for report in reports:
        for stage_name, seconds in report.timings.items():
            timings[stage_name] = timings.get(stage_name, 0.0) + seconds
    warnings = [f"{report.label}: {w}" for report in reports for w in report.warnings]

    stage = time.perf_counter()
    point = tuple(x for report in reports for x in report.v)
    jet = family.jet_at(point)
    jac = determinant(tuple(jet.gradients))
    regular = is_regular(group, point)
    _check_regularity(label, point, jac, regular, warnings, options['strict'])

    combos = itertools.product(*[[c.candidate for c in report.candidate_sets] for report in reports])
    candidates = [combine_candidate_sets(combo) for combo in combos]
    verdicts = _hessian_verdicts(label, jet, candidates)
    timings['hessian'] = timings.get('hessian', 0.0) + time.perf_counter() - stage
    timings['total'] = time.perf_counter() - started

    orders = [report.group_order for report in reports]
    group_order = None
    if all(order is not None for order in orders):
        group_order = 1
        for order in orders:
            group_order *= order
    node_permutation: Tuple[int, ...] = ()
    if any(report.node_permutation for report in reports):
        offset = 0
        for report in reports:
            perm = report.node_permutation or tuple(range(report.rank))
            node_permutation += tuple(i + offset for i in perm)
            offset += report.rank

    report = CertificationReport(
        label=label,
        rank=sum(ranks),
        degrees=[d for report in reports for d in report.degrees],
        degree_source=reports[0].degree_source,
        orbit_size=sum(report.orbit_size for report in reports),
        v=point,
        numerator=product_numerator(reports),
        numerator_source=reports[0].numerator_source,
        jacobian_determinant=jac,
        jacobian_nonzero=not jac.is_zero(),
        regular=regular,
        candidate_sets=verdicts,
        node_permutation=node_permutation,
        group_order=group_order,
        verdict=FAIL,
        warnings=warnings,
        timings=timings,
    )
    _finish(report)
    return report


def _check_regularity(label: str, point: Vector, jac: Scalar, regular: bool,
                      warnings: List[str], strict: bool) -> None:
    if regular != (not jac.is_zero()):
        warnings.append("Jacobian verdict and hyperplane check disagree")
    if jac.is_zero():
        message = f"PointNotRegular: det J vanishes at {[str(x) for x in point]}"
        if strict:
            raise PointNotRegular(message)
        warnings.append(message)
        logger.warning(f"{label}: {message}")


def _hessian_verdicts(label: str, jet: PointJet, candidates: Sequence[CandidateSet]) -> List[CandidateVerdict]:
    verdicts = []
    for candidate in candidates:
        det, nonzero = hessian_from_jet(jet, candidate)
        verdicts.append(CandidateVerdict(candidate, det, nonzero))
        if not nonzero:
            logger.warning(f"{label}: det M vanishes for {candidate.labels()}")
    return verdicts


def _finish(report: CertificationReport) -> None:
    report.decide()
    logger.info(
        f"{report.label}: {report.verdict} with {len(report.candidate_sets)} candidate sets "
        f"in {report.timings['total']:.2f}s"
    )


def combine_candidate_sets(parts: Sequence[CandidateSet]) -> CandidateSet:
    """Candidate set of a product from one set per factor.

    Each factor keeps its own products on shifted indices; every product of
    invariants from two different factors is added. M is then block
    triangular and det M is a product of the factor determinants and of
    powers of the factor Jacobians.
    """
    pairs: List[Tuple[int, int]] = []
    offsets = []
    offset = 0
    for part in parts:
        offsets.append(offset)
        pairs += [(i + offset, j + offset) for i, j in part.pairs]
        offset += part.rank
    for a, b in itertools.combinations(range(len(parts)), 2):
        pairs += [(offsets[a] + i, offsets[b] + j)
                  for i in range(parts[a].rank) for j in range(parts[b].rank)]
    return CandidateSet(offset, tuple(sorted(pairs)))


def product_numerator(reports: Sequence[CertificationReport]) -> List[int]:
    """Sym^2 numerator of a product: sum of the factors' plus V_a V_b for a < b.

    V_a = sum of t^(d - 1) over the degrees of factor a.
    """
    total = UniPoly()
    vectors = []
    for report in reports:
        total = total + UniPoly(report.numerator)
        vector = UniPoly()
        for d in report.degrees:
            vector = vector + UniPoly.monomial(d - 1)
        vectors.append(vector)
    for a, b in itertools.combinations(range(len(vectors)), 2):
        total = total + vectors[a] * vectors[b]
    return total.integer_coefficients()


def _product_labels(left: CandidateSet, right: CandidateSet) -> List[str]:
    names = [f"rho{i + 1}" for i in range(left.rank)]
    names += [f"psi{j + 1}" for j in range(right.rank)]
    return names


def compose_product_basis(a: CertificationReport, b: CertificationReport) -> ProductBasisResult:
    """Hessian basis of W1 x W2 from certified bases of the factors.

    Generators: T1 on the first block, T2 on the second, and every product
    rho_i psi_j across blocks. The combined set is then certified directly at
    the concatenated point.
    """
    for report in (a, b):
        if not report.passed or not report.candidate_sets:
            raise InputNotCertified(f"{report.label}: report verdict is {report.verdict}")
    left_group = build_group(catalog(a.label))
    right_group = build_group(catalog(b.label))
    combined_group = product_group(left_group, right_group)
    family = ProductInvariantSet(
        basic_invariants(left_group, a.degrees),
        basic_invariants(right_group, b.degrees),
    )
    t1 = a.candidate_sets[0].candidate
    t2 = b.candidate_sets[0].candidate
    candidate = combine_candidate_sets([t1, t2])

    names = _product_labels(t1, t2)
    generators = []
    for member in candidate.members():
        if len(member) == 1:
            generators.append(names[member[0]])
        elif member[0] == member[1]:
            generators.append(f"{names[member[0]]}^2")
        else:
            generators.append(f"{names[member[0]]}*{names[member[1]]}")

    point = tuple(a.v) + tuple(b.v)
    if not is_regular(combined_group, point):
        logger.warning(f"{combined_group.label}: concatenated point is not regular")
    det, nonzero = hessian_certificate(family, candidate, point)
    return ProductBasisResult(combined_group.label, generators, candidate, det, nonzero)
