"""Molien series of invariant and covariant modules.

The group is compressed into a histogram of det(1 - t w) over all elements;
every character needed here is a function of that polynomial, so each series
is a sum over at most a few hundred distinct keys:

    P_chi(t) = (1/|W|) sum_w chi(w) / det(1 - t w)
"""

import logging
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from src.coxeter import ReflectionGroup
from src.errors import BudgetExceeded, NonPolynomialQuotient, NotAFreeAlgebraShape
from src.job_monitor import JobMonitor
from src.ring_kernels import PolyKey, kernel_for
from src.scalars import ONE, Scalar, TruncatedSeries, UniPoly, series_inverse
from src.stabilizer_chain import (
    DEFAULT_BFS_BUDGET,
    DEFAULT_CHUNK_SIZE,
    EnumerationMode,
    StabilizerChain,
    bfs_batches,
)

logger = logging.getLogger(__name__)

BlockCallback = Callable[[int, Dict[PolyKey, int]], None]


class CovariantClass(str, Enum):
    """Representation U whose covariants are counted."""
    TRIVIAL = "trivial"
    VECTOR = "vector"
    SYM2 = "sym2"
    ALT2 = "alt2"
    TENSOR2 = "tensor2"

    @property
    def tensor_degree(self) -> int:
        return {"trivial": 0, "vector": 1}.get(self.value, 2)

    def dimension(self, n: int) -> int:
        return {
            "trivial": 1,
            "vector": n,
            "sym2": n * (n + 1) // 2,
            "alt2": n * (n - 1) // 2,
            "tensor2": n * n,
        }[self.value]

    def character(self, poly: UniPoly) -> Scalar:
        """chi(w) read off det(1 - t w) = 1 - e1 t + e2 t^2 - ..."""
        if self is CovariantClass.TRIVIAL:
            return ONE
        trace = -poly[1]
        e2 = poly[2]
        if self is CovariantClass.VECTOR:
            return trace
        if self is CovariantClass.SYM2:
            return trace * trace - e2
        if self is CovariantClass.ALT2:
            return e2
        return trace * trace


@dataclass
class CharPolyHistogram:
    """Multiset of det(1 - t w) over the group, keyed canonically.

    Attributes:
        label: Group label
        entries: Coefficient key -> multiplicity
        complete: False while blocks are still missing
        completed_blocks: Blocks already folded into `entries`
    """
    label: str
    entries: Dict[PolyKey, int] = field(default_factory=dict)
    complete: bool = True
    completed_blocks: Tuple[int, ...] = ()

    @property
    def total(self) -> int:
        return sum(self.entries.values())

    def merge(self, counts: Dict[PolyKey, int]) -> None:
        merged = Counter(self.entries)
        merged.update(counts)
        self.entries = dict(merged)

    def sorted_entries(self) -> List[Tuple[PolyKey, int]]:
        return sorted(self.entries.items())

    def multiplicity(self, poly: UniPoly) -> int:
        return self.entries.get(poly.key(), 0)

    def identity_multiplicity(self, rank: int, field=None) -> int:
        """Multiplicity of (1 - t)^n, which only the identity has."""
        poly = UniPoly([1, -1]) ** rank
        if field is not None:
            poly = poly.to_field(field)
        return self.multiplicity(poly)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CharPolyHistogram):
            return False
        return self.label == other.label and self.entries == other.entries


@dataclass
class PoincareResult:
    """Covariant series with its numerator over prod (1 - t^d).

    Attributes:
        cls: Covariant class
        series: Truncated Molien series
        numerator: series * prod (1 - t^d_i)
        degrees: Degrees used for the denominator
        source: "computed" or "paper-table"
    """
    cls: CovariantClass
    series: Optional[TruncatedSeries]
    numerator: UniPoly
    degrees: List[int]
    source: str = "computed"

    def numerator_coefficients(self) -> List[int]:
        return self.numerator.integer_coefficients()

    def value_at_one(self) -> int:
        return sum(self.numerator_coefficients())


def _count_block(chain: StabilizerChain, block: int, chunk_size: int) -> Tuple[Dict[PolyKey, int], int]:
    counts: Counter = Counter()
    elements = 0
    for batch in chain.iter_block_batches(block, chunk_size):
        counts.update(chain.kernel.char_poly_counts(batch))
        elements += batch.shape[1]
    return dict(counts), elements


def histogram(
    group: ReflectionGroup,
    partitions: int = 1,
    workers: int = 1,
    mode: EnumerationMode = EnumerationMode.CHAIN,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    budget: int = DEFAULT_BFS_BUDGET,
    max_order: Optional[int] = None,
    resume: Optional[CharPolyHistogram] = None,
    on_block: Optional[BlockCallback] = None,
    monitor_interval: int = 30,
    memory_warning_percent: float = 80.0,
) -> CharPolyHistogram:
    """Exact histogram of characteristic polynomials over the whole group.

    In CHAIN mode the group is split into blocks by top-level transversal
    representative; blocks are dealt round-robin to `partitions` tasks run on
    `workers` threads. The result does not depend on either number.

    Args:
        group: Group to enumerate
        partitions: Number of tasks the blocks are dealt into
        workers: Thread count
        mode: BFS (bounded by `budget`) or CHAIN
        chunk_size: Maximum elements per numpy batch
        budget: Element bound for BFS mode
        max_order: Refuse CHAIN runs on groups larger than this
        resume: Partial histogram whose completed blocks are skipped
        on_block: Called on the calling thread after every finished block
        monitor_interval: Seconds between job monitor checks
        memory_warning_percent: Memory threshold for monitor warnings

    Returns:
        Complete CharPolyHistogram

    Raises:
        BudgetExceeded: Group larger than the BFS budget or `max_order`
    """
    if partitions < 1 or workers < 1:
        raise ValueError(f"partitions and workers must be positive, got {partitions}, {workers}")
    result = CharPolyHistogram(group.label)

    if mode is EnumerationMode.BFS:
        kernel = kernel_for(group.field)
        counts: Counter = Counter()
        for batch in bfs_batches(group, budget):
            counts.update(kernel.char_poly_counts(batch))
        result.merge(counts)
        return result

    chain = StabilizerChain(group)
    if max_order is not None and chain.order > max_order:
        raise BudgetExceeded(
            f"{group.label}: order {chain.order} exceeds the limit {max_order}; enable long mode")
    done = set()
    if resume is not None:
        result.merge(resume.entries)
        done = set(resume.completed_blocks)
    pending = [b for b in range(chain.block_count) if b not in done]
    tasks = [pending[p::partitions] for p in range(partitions)]
    tasks = [t for t in tasks if t]
    logger.info(
        f"{group.label}: histogram over {chain.order} elements, {len(pending)} of "
        f"{chain.block_count} blocks pending, {len(tasks)} partitions on {workers} workers"
    )

    lock = threading.Lock()
    finished: List[Tuple[int, Dict[PolyKey, int]]] = []

    def run_task(blocks: Sequence[int]) -> None:
        for block in blocks:
            counts, elements = _count_block(chain, block, chunk_size)
            monitor.record_block(elements)
            with lock:
                finished.append((block, counts))

    def drain() -> None:
        with lock:
            batch = list(finished)
            finished.clear()
        for block, counts in batch:
            result.merge(counts)
            done.add(block)
            result.completed_blocks = tuple(sorted(done))
            if on_block is not None:
                on_block(block, counts)

    monitor = JobMonitor(group.label, chain.block_count, monitor_interval, memory_warning_percent)
    monitor.blocks_done = len(done)
    with monitor:
        if workers == 1:
            for task in tasks:
                for block in task:
                    run_task([block])
                    drain()
        else:
            with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="molien") as executor:
                futures = [executor.submit(run_task, task) for task in tasks]
                for future in as_completed(futures):
                    future.result()
                    drain()
    drain()
    result.complete = len(done) == chain.block_count
    return result


def covariant_series(h: CharPolyHistogram, cls: CovariantClass, order: int) -> TruncatedSeries:
    """Molien average (1/|W|) sum chi(w) / det(1 - t w), truncated at `order`."""
    if order < 1:
        raise ValueError(f"truncation order must be positive, got {order}")
    total = h.total
    if total == 0:
        raise ValueError(f"{h.label}: empty histogram")
    acc = TruncatedSeries.zero(order)
    for key, count in h.sorted_entries():
        poly = UniPoly.from_key(key)
        weight = cls.character(poly) * count
        if weight.is_zero():
            continue
        acc = acc + series_inverse(poly, order).scale(weight)
    return acc.scale(Fraction(1, total))


def recover_degrees(invariant_series: TruncatedSeries, n: int) -> List[int]:
    """Peel prod 1/(1 - t^d_i) off an invariant series, smallest degree first."""
    series = invariant_series
    if series[0] != 1:
        raise NotAFreeAlgebraShape(f"constant term {series[0]} is not 1")
    degrees = []
    for _ in range(n):
        d = next((k for k in range(1, series.order) if not series[k].is_zero()), None)
        if d is None:
            raise NotAFreeAlgebraShape(
                f"series exhausted after degrees {degrees}; raise the truncation order")
        c = series[d]
        if not c.is_integer() or c.to_int() <= 0:
            raise NotAFreeAlgebraShape(f"coefficient {c} at t^{d} is not a positive integer")
        degrees.append(d)
        series = series * (UniPoly([1]) - UniPoly.monomial(d))
    leftover = next((k for k in range(1, series.order) if not series[k].is_zero()), None)
    if leftover is not None:
        raise NotAFreeAlgebraShape(
            f"remainder has nonzero coefficient at t^{leftover} after degrees {degrees}")
    return degrees


def degree_product(degrees: Iterable[int]) -> UniPoly:
    out = UniPoly([1])
    for d in degrees:
        out = out * (UniPoly([1]) - UniPoly.monomial(d))
    return out


def numerator(h: CharPolyHistogram, cls: CovariantClass, degrees: Sequence[int],
              order: int = 64) -> PoincareResult:
    """Numerator of the covariant series over prod (1 - t^d_i).

    A class of tensor degree k has numerator degree at most k (d_n - 1); every
    coefficient above that bound must vanish within the truncation, and the
    rest must be nonnegative integers.
    """
    degrees = sorted(degrees)
    bound = cls.tensor_degree * (degrees[-1] - 1) if degrees else 0
    if order <= bound:
        raise ValueError(f"truncation order {order} must exceed the numerator bound {bound}")
    series = covariant_series(h, cls, order)
    product = series * degree_product(degrees)
    tail = [k for k in range(bound + 1, order) if not product[k].is_zero()]
    if tail:
        raise NonPolynomialQuotient(
            f"{h.label} {cls.value}: coefficient at t^{tail[0]} = {product[tail[0]]} "
            f"beyond bound {bound}; degrees {degrees} or histogram are wrong")
    poly = UniPoly(product.coeffs[:bound + 1])
    for k, c in enumerate(poly.coeffs):
        if not c.is_integer() or c.to_int() < 0:
            raise NonPolynomialQuotient(
                f"{h.label} {cls.value}: coefficient {c} at t^{k} is not a nonnegative integer")
    return PoincareResult(cls, series, UniPoly(c.to_int() for c in poly.coeffs), list(degrees))
