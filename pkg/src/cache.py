"""Persistent JSON cache for characteristic-polynomial histograms.

One file per group: <cache_dir>/<label>.histogram.json. Writes go to a
temporary file in the same directory followed by os.replace, so readers only
ever see complete files. Partial runs store their completed block list and
resume from it.
"""

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from src.coxeter import CartanDatum, ReflectionGroup
from src.errors import CorruptPayload, HashMismatch, SchemaMismatch
from src.molien import CharPolyHistogram, histogram
from src.stabilizer_chain import DEFAULT_BFS_BUDGET, DEFAULT_CHUNK_SIZE, EnumerationMode

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def cartan_hash(datum: CartanDatum) -> str:
    """sha256 of the canonical Cartan serialization."""
    return hashlib.sha256(datum.canonical_text().encode("utf-8")).hexdigest()


@dataclass
class CacheEntry:
    """On-disk form of a (possibly partial) histogram.

    Attributes:
        schema_version: Format version
        group_label: Group label
        cartan_hash: Hash of the Cartan matrix the histogram belongs to
        entries: [[coefficient strings...], count string] pairs, sorted
        total: Sum of counts, as a string
        complete: True once every block is folded in
        checkpoint: Completed block indices
    """
    schema_version: int
    group_label: str
    cartan_hash: str
    entries: List[list] = field(default_factory=list)
    total: str = "0"
    complete: bool = False
    checkpoint: List[int] = field(default_factory=list)

    @classmethod
    def from_histogram(cls, hist: CharPolyHistogram, datum: CartanDatum) -> "CacheEntry":
        return cls(
            schema_version=SCHEMA_VERSION,
            group_label=datum.label,
            cartan_hash=cartan_hash(datum),
            entries=[[list(key), str(count)] for key, count in hist.sorted_entries()],
            total=str(hist.total),
            complete=hist.complete,
            checkpoint=sorted(hist.completed_blocks),
        )

    def to_histogram(self) -> CharPolyHistogram:
        entries = {tuple(key): int(count) for key, count in self.entries}
        return CharPolyHistogram(
            label=self.group_label,
            entries=entries,
            complete=self.complete,
            completed_blocks=tuple(self.checkpoint),
        )

    def to_dict(self) -> Dict:
        return {
            'schema_version': self.schema_version,
            'group_label': self.group_label,
            'cartan_hash': self.cartan_hash,
            'total': self.total,
            'entries': self.entries,
            'complete': self.complete,
            'checkpoint': self.checkpoint,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "CacheEntry":
        """Parse and structurally check a decoded cache file."""
        if not isinstance(data, dict):
            raise CorruptPayload("cache payload is not a JSON object")
        version = data.get('schema_version')
        if version != SCHEMA_VERSION:
            raise SchemaMismatch(f"cache schema {version}, expected {SCHEMA_VERSION}")
        try:
            entry = cls(
                schema_version=version,
                group_label=str(data['group_label']),
                cartan_hash=str(data['cartan_hash']),
                entries=list(data['entries']),
                total=str(data['total']),
                complete=bool(data['complete']),
                checkpoint=[int(b) for b in data.get('checkpoint', [])],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise CorruptPayload(f"cache payload is malformed: {e}")
        entry.check_payload()
        return entry

    def check_payload(self) -> None:
        total = 0
        for item in self.entries:
            if (not isinstance(item, list) or len(item) != 2 or not isinstance(item[0], list)
                    or not all(isinstance(c, str) for c in item[0])):
                raise CorruptPayload(f"bad histogram entry {item!r}")
            try:
                count = int(item[1])
            except (TypeError, ValueError):
                raise CorruptPayload(f"bad multiplicity {item[1]!r}")
            if count <= 0:
                raise CorruptPayload(f"nonpositive multiplicity {count}")
            total += count
        if str(total) != self.total:
            raise CorruptPayload(f"entries sum to {total}, header says {self.total}")


def cache_path(cache_dir: str, label: str) -> Path:
    return Path(cache_dir) / f"{label}.histogram.json"


def load(cache_dir: str, datum: CartanDatum, expected_order: Optional[int] = None) -> Optional[CacheEntry]:
    """Read the cache entry for a datum; None when no file exists.

    Raises:
        SchemaMismatch: Written by another schema version
        HashMismatch: Belongs to a different Cartan matrix
        CorruptPayload: Unparseable, inconsistent, or a complete entry of the wrong order
    """
    path = cache_path(cache_dir, datum.label)
    if not path.exists():
        return None
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise CorruptPayload(f"cannot read {path}: {e}")
    entry = CacheEntry.from_dict(data)
    expected_hash = cartan_hash(datum)
    if entry.cartan_hash != expected_hash:
        raise HashMismatch(f"{path}: Cartan hash {entry.cartan_hash[:12]} != {expected_hash[:12]}")
    if entry.complete and expected_order is not None and int(entry.total) != expected_order:
        raise CorruptPayload(f"{path}: complete entry totals {entry.total}, group order is {expected_order}")
    return entry


def store(cache_dir: str, entry: CacheEntry) -> Path:
    """Atomically write an entry; returns the final path."""
    directory = Path(cache_dir)
    directory.mkdir(parents=True, exist_ok=True)
    path = cache_path(cache_dir, entry.group_label)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{entry.group_label}.", suffix=".tmp", dir=str(directory))
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            json.dump(entry.to_dict(), f, indent=1)
        os.replace(tmp_name, path)
    except Exception:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise
    return path


def checkpoint(cache_dir: str, hist: CharPolyHistogram, datum: CartanDatum) -> Path:
    """Store a partial histogram with its completed blocks."""
    entry = CacheEntry.from_histogram(hist, datum)
    entry.complete = False
    return store(cache_dir, entry)


def cache_io(entry: CacheEntry, op: str, cache_dir: str, datum: Optional[CartanDatum] = None):
    """Dispatch load / store / checkpoint on one entry."""
    if op == "load":
        if datum is None:
            raise ValueError("load needs the Cartan datum to check the hash")
        return load(cache_dir, datum)
    if op == "store":
        return store(cache_dir, entry)
    if op == "checkpoint":
        entry.complete = False
        return store(cache_dir, entry)
    raise ValueError(f"Unknown cache operation '{op}'")


class CachedHistogramProvider:
    """Histogram source that reads, resumes and writes the cache.

    Args:
        cache_dir: Cache directory
        workers: Thread count for the histogram job
        partitions: Task count; defaults to workers
        chunk_size: Elements per numpy batch
        max_order: Refuse groups above this order (None for no limit)
        expected_orders: Known orders used to validate complete entries
        monitor_interval: Seconds between job monitor checks
        memory_warning_percent: Memory threshold for monitor warnings
        mode: CHAIN streams resumable blocks; BFS walks the group by word length
        bfs_budget: Element bound for BFS mode
    """

    def __init__(self, cache_dir: str, workers: int = 1, partitions: Optional[int] = None,
                 chunk_size: int = DEFAULT_CHUNK_SIZE, max_order: Optional[int] = None,
                 expected_orders: Optional[Dict[str, int]] = None,
                 monitor_interval: int = 30, memory_warning_percent: float = 80.0,
                 mode: EnumerationMode = EnumerationMode.CHAIN, bfs_budget: int = DEFAULT_BFS_BUDGET):
        self.cache_dir = cache_dir
        self.workers = workers
        self.partitions = partitions or workers
        self.chunk_size = chunk_size
        self.max_order = max_order
        self.expected_orders = expected_orders or {}
        self.monitor_interval = monitor_interval
        self.memory_warning_percent = memory_warning_percent
        self.mode = mode
        self.bfs_budget = bfs_budget
        self.last_source = "computed"

    def cached(self, datum: CartanDatum) -> Optional[CacheEntry]:
        return load(self.cache_dir, datum, self.expected_orders.get(datum.label))

    def __call__(self, group: ReflectionGroup) -> CharPolyHistogram:
        datum = group.datum
        entry = self.cached(datum)
        if entry is not None and entry.complete:
            logger.info(f"{datum.label}: histogram loaded from cache ({entry.total} elements)")
            self.last_source = "cache"
            return entry.to_histogram()
        if self.mode is EnumerationMode.BFS:
            hist = histogram(group, mode=EnumerationMode.BFS, budget=self.bfs_budget)
            store(self.cache_dir, CacheEntry.from_histogram(hist, datum))
            self.last_source = "computed"
            return hist
        resume = entry.to_histogram() if entry is not None else None
        if resume is not None:
            logger.info(f"{datum.label}: resuming from {len(resume.completed_blocks)} completed blocks")

        partial = CharPolyHistogram(datum.label, dict(resume.entries) if resume else {}, False,
                                    resume.completed_blocks if resume else ())

        def on_block(block, counts):
            partial.merge(counts)
            partial.completed_blocks = tuple(sorted(set(partial.completed_blocks) | {block}))
            checkpoint(self.cache_dir, partial, datum)

        hist = histogram(
            group,
            partitions=self.partitions,
            workers=self.workers,
            mode=EnumerationMode.CHAIN,
            chunk_size=self.chunk_size,
            max_order=self.max_order,
            resume=resume,
            on_block=on_block,
            monitor_interval=self.monitor_interval,
            memory_warning_percent=self.memory_warning_percent,
        )
        store(self.cache_dir, CacheEntry.from_histogram(hist, datum))
        self.last_source = "computed"
        return hist
