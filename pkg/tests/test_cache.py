"""Tests for the on-disk histogram cache and the cache-aware provider."""

import json
import os
import shutil
import tempfile
from contextlib import contextmanager

import pytest

from src.cache import (
    SCHEMA_VERSION,
    CacheEntry,
    CachedHistogramProvider,
    cache_io,
    cache_path,
    cartan_hash,
    checkpoint,
    load,
    store,
)
from src.coxeter import build_group, catalog
from src.errors import BudgetExceeded, CorruptPayload, HashMismatch, SchemaMismatch
from src.molien import CharPolyHistogram, histogram
from src.stabilizer_chain import EnumerationMode, StabilizerChain


@contextmanager
def temp_directory():
    """Context manager for creating and cleaning up temporary directories."""
    temp_dir = tempfile.mkdtemp()
    try:
        yield temp_dir
    finally:
        shutil.rmtree(temp_dir, ignore_errors=True)


def _rewrite(path, mutate):
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    mutate(data)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f)


class TestCacheFile:
    """Store, load and validation of cache entries."""

    def setup_method(self):
        self.datum = catalog("H3")
        self.hist = histogram(build_group(self.datum))

    def test_round_trip(self):
        with temp_directory() as cache_dir:
            path = store(cache_dir, CacheEntry.from_histogram(self.hist, self.datum))
            assert path == cache_path(cache_dir, "H3")
            entry = load(cache_dir, self.datum, expected_order=120)
            assert entry.complete
            assert entry.total == "120"
            assert entry.schema_version == SCHEMA_VERSION
            assert entry.to_histogram() == self.hist
            assert not [name for name in os.listdir(cache_dir) if name.endswith(".tmp")]

    def test_missing_file(self):
        with temp_directory() as cache_dir:
            assert load(cache_dir, self.datum) is None

    def test_hash_mismatch(self):
        with temp_directory() as cache_dir:
            store(cache_dir, CacheEntry.from_histogram(self.hist, self.datum))
            _rewrite(cache_path(cache_dir, "H3"), lambda d: d.update(cartan_hash="0" * 64))
            with pytest.raises(HashMismatch):
                load(cache_dir, self.datum)

    def test_schema_mismatch(self):
        with temp_directory() as cache_dir:
            store(cache_dir, CacheEntry.from_histogram(self.hist, self.datum))
            _rewrite(cache_path(cache_dir, "H3"), lambda d: d.update(schema_version=SCHEMA_VERSION + 1))
            with pytest.raises(SchemaMismatch):
                load(cache_dir, self.datum)

    @pytest.mark.parametrize("mutate", [
        lambda d: d.update(total="121"),
        lambda d: d['entries'].append([["1"], "0"]),
        lambda d: d['entries'].append(["1", "2"]),
        lambda d: d['entries'][0].__setitem__(1, "many"),
        lambda d: d.pop('group_label'),
    ])
    def test_corrupt_payload(self, mutate):
        with temp_directory() as cache_dir:
            store(cache_dir, CacheEntry.from_histogram(self.hist, self.datum))
            _rewrite(cache_path(cache_dir, "H3"), mutate)
            with pytest.raises(CorruptPayload):
                load(cache_dir, self.datum)

    def test_unparseable_file(self):
        with temp_directory() as cache_dir:
            with open(cache_path(cache_dir, "H3"), 'w', encoding='utf-8') as f:
                f.write("{not json")
            with pytest.raises(CorruptPayload):
                load(cache_dir, self.datum)

    def test_complete_entry_of_wrong_order(self):
        with temp_directory() as cache_dir:
            store(cache_dir, CacheEntry.from_histogram(self.hist, self.datum))
            with pytest.raises(CorruptPayload):
                load(cache_dir, self.datum, expected_order=240)

    def test_checkpoint_marks_incomplete(self):
        with temp_directory() as cache_dir:
            checkpoint(cache_dir, self.hist, self.datum)
            entry = load(cache_dir, self.datum, expected_order=240)
            assert not entry.complete

    def test_cache_hash_is_stable(self):
        assert cartan_hash(catalog("H3")) == cartan_hash(catalog("h3"))
        assert cartan_hash(catalog("H3")) != cartan_hash(catalog("A3"))

    def test_cache_io_dispatch(self):
        entry = CacheEntry.from_histogram(self.hist, self.datum)
        with temp_directory() as cache_dir:
            cache_io(entry, "store", cache_dir)
            assert cache_io(entry, "load", cache_dir, self.datum).complete
            cache_io(entry, "checkpoint", cache_dir)
            assert not cache_io(entry, "load", cache_dir, self.datum).complete
            with pytest.raises(ValueError):
                cache_io(entry, "load", cache_dir)
            with pytest.raises(ValueError):
                cache_io(entry, "delete", cache_dir)


class TestCachedHistogramProvider:
    """Read-through cache with checkpoint and resume."""

    def test_second_call_reads_the_cache(self):
        group = build_group(catalog("B3"))
        with temp_directory() as cache_dir:
            provider = CachedHistogramProvider(cache_dir)
            first = provider(group)
            assert provider.last_source == "computed"
            assert cache_path(cache_dir, "B3").exists()
            second = provider(group)
            assert provider.last_source == "cache"
            assert first == second
            assert second.total == 48

    def test_resume_from_half_checkpoint(self):
        group = build_group(catalog("F4"))
        full = histogram(group)
        blocks = StabilizerChain(group).block_count
        seen = []
        histogram(group, on_block=lambda block, counts: seen.append((block, counts)))

        partial = CharPolyHistogram("F4", complete=False)
        for block, counts in seen[: blocks // 2]:
            partial.merge(counts)
        partial.completed_blocks = tuple(sorted(b for b, _ in seen[: blocks // 2]))

        with temp_directory() as cache_dir:
            checkpoint(cache_dir, partial, group.datum)
            provider = CachedHistogramProvider(cache_dir, workers=2, expected_orders={"F4": 1152})
            resumed = provider(group)
            assert resumed == full
            entry = load(cache_dir, group.datum, expected_order=1152)
            assert entry.complete
            assert sorted(entry.checkpoint) == list(range(blocks))

    def test_max_order(self):
        with temp_directory() as cache_dir:
            provider = CachedHistogramProvider(cache_dir, max_order=100)
            with pytest.raises(BudgetExceeded):
                provider(build_group(catalog("F4")))
            assert not cache_path(cache_dir, "F4").exists()

    def test_corrupt_cache_is_reported(self):
        group = build_group(catalog("A3"))
        with temp_directory() as cache_dir:
            provider = CachedHistogramProvider(cache_dir, expected_orders={"A3": 24})
            provider(group)
            _rewrite(cache_path(cache_dir, "A3"), lambda d: d.update(total="25"))
            with pytest.raises(CorruptPayload):
                provider(group)

    def test_bfs_mode_respects_the_budget(self):
        group = build_group(catalog("A3"))
        with temp_directory() as cache_dir:
            provider = CachedHistogramProvider(cache_dir, mode=EnumerationMode.BFS, bfs_budget=10)
            with pytest.raises(BudgetExceeded, match="budget of 10"):
                provider(group)
            assert not cache_path(cache_dir, "A3").exists()

    def test_bfs_mode_matches_chain(self):
        group = build_group(catalog("B3"))
        with temp_directory() as cache_dir:
            provider = CachedHistogramProvider(cache_dir, mode=EnumerationMode.BFS, bfs_budget=48)
            hist = provider(group)
            assert provider.last_source == "computed"
            assert hist.entries == histogram(group).entries
            assert load(cache_dir, group.datum, expected_order=48).complete
