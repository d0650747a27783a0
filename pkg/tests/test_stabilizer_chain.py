"""Tests for Schreier-Sims chains and the element streams built on them."""

import pytest

from src.coxeter import GroupElement, build_group, catalog
from src.errors import BudgetExceeded, ChainInconsistent
from src.linalg import to_matrix
from src.stabilizer_chain import (
    EnumerationMode,
    StabilizerChain,
    bfs_batches,
    enumerate_elements,
    iter_batches,
)

ORDERS = {
    "A1": 2, "A2": 6, "B2": 8, "G2": 12, "A3": 24, "B3": 48, "D4": 192,
    "H3": 120, "F4": 1152, "H4": 14400, "E6": 51840, "A1xA2": 12,
}


class TestStabilizerChain:
    """Chain construction and membership."""

    @pytest.mark.parametrize("label,order", sorted(ORDERS.items()))
    def test_order(self, label, order):
        chain = StabilizerChain(build_group(catalog(label)))
        assert chain.order == order
        chain.verify(expected_order=order)

    @pytest.mark.slow
    def test_e7_order(self):
        assert StabilizerChain(build_group(catalog("E7"))).order == 2903040

    def test_e8_order(self):
        chain = StabilizerChain(build_group(catalog("E8")))
        assert chain.order == 696729600
        assert chain.order == chain.block_count * chain.block_size

    def test_verify_rejects_wrong_order(self):
        chain = StabilizerChain(build_group(catalog("A3")))
        with pytest.raises(ChainInconsistent):
            chain.verify(expected_order=25)

    def test_contains(self):
        group = build_group(catalog("B3"))
        chain = StabilizerChain(group)
        w = group.generators[0] * group.generators[2] * group.generators[1]
        assert chain.contains(w)

    def test_non_root_preserving_matrix(self):
        chain = StabilizerChain(build_group(catalog("A2")))
        with pytest.raises(ChainInconsistent):
            chain.permutation_of(GroupElement(to_matrix([[2, 0], [0, 1]])))

    def test_transversals_multiply_to_order(self):
        chain = StabilizerChain(build_group(catalog("H3")))
        sizes = [len(level) for level in chain.transversals()]
        product = 1
        for size in sizes:
            product *= size
        assert product == 120
        assert tuple(sizes) == chain.transversal_sizes

    def test_block_out_of_range(self):
        chain = StabilizerChain(build_group(catalog("A2")))
        with pytest.raises(IndexError):
            next(chain.iter_block_images(chain.block_count))


class TestEnumeration:
    """Both enumeration modes cover the group exactly once."""

    @pytest.mark.parametrize("label", ["A3", "B3", "H3", "G2"])
    def test_modes_agree(self, label):
        group = build_group(catalog(label))
        bfs = {w.key() for w in enumerate_elements(group, EnumerationMode.BFS)}
        chain = [w.key() for w in enumerate_elements(group, EnumerationMode.CHAIN, chunk_size=7)]
        assert len(bfs) == ORDERS[label]
        assert len(chain) == len(set(chain)) == ORDERS[label]
        assert set(chain) == bfs

    def test_bfs_layers_follow_word_length(self):
        # A3 length generating function: 1, 3, 5, 6, 5, 3, 1
        group = build_group(catalog("A3"))
        assert [b.shape[1] for b in bfs_batches(group)] == [1, 3, 5, 6, 5, 3, 1]

    def test_bfs_budget(self):
        group = build_group(catalog("F4"))
        with pytest.raises(BudgetExceeded):
            for _ in bfs_batches(group, budget=100):
                pass

    def test_chunks_respect_size(self):
        group = build_group(catalog("F4"))
        sizes = [batch.shape[1] for batch in iter_batches(group, EnumerationMode.CHAIN, chunk_size=50)]
        assert max(sizes) <= 50
        assert sum(sizes) == 1152

    def test_blocks_partition_the_group(self):
        group = build_group(catalog("H3"))
        chain = StabilizerChain(group)
        seen = set()
        for block in range(chain.block_count):
            for batch in chain.iter_block_batches(block):
                for k in range(batch.shape[1]):
                    key = chain.kernel.decode_matrix(batch[:, k])
                    assert key not in seen
                    seen.add(key)
        assert len(seen) == 120
