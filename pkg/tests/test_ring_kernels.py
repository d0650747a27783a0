"""Tests for the batched integer and Z[phi] matrix kernels."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.coxeter import build_group, catalog, char_poly
from src.ring_kernels import GoldenKernel, IntegerKernel, kernel_for
from src.scalars import PHI, Field, Scalar, UniPoly
from src.stabilizer_chain import EnumerationMode, enumerate_elements, iter_batches


def test_kernel_selection():
    assert isinstance(kernel_for(Field.RATIONAL), IntegerKernel)
    assert isinstance(kernel_for(Field.GOLDEN), GoldenKernel)


@given(st.integers(min_value=-1000, max_value=1000), st.integers(min_value=-1000, max_value=1000))
@settings(max_examples=100, deadline=None)
def test_golden_encoding_is_exact(x, y):
    """x + y*phi survives encode/decode unchanged."""
    kernel = GoldenKernel()
    value = Scalar(x) + Scalar(y) * PHI
    assert kernel.encode_scalar(value) == (x, y)
    assert kernel.decode_scalar((x, y)) == value


def test_golden_encoding_rejects_non_integers():
    with pytest.raises(ValueError):
        GoldenKernel().encode_scalar(Scalar(1, 1) / 2 + Scalar(0, 1) / 4)
    with pytest.raises(ValueError):
        GoldenKernel().encode_scalar(Scalar(1) / 2)


@pytest.mark.parametrize("label", ["A3", "H3"])
def test_matmul_agrees_with_exact_product(label):
    group = build_group(catalog(label))
    kernel = kernel_for(group.field)
    gens = group.generators
    batch = kernel.stack([g.matrix for g in gens])
    flipped = kernel.stack([g.matrix for g in reversed(gens)])
    product = kernel.matmul(batch, flipped)
    for k, (g, h) in enumerate(zip(gens, reversed(gens))):
        assert kernel.decode_matrix(product[:, k]) == (g * h).matrix


def test_flatten_round_trip():
    kernel = GoldenKernel()
    group = build_group(catalog("H3"))
    batch = kernel.stack([g.matrix for g in group.generators])
    assert np.array_equal(kernel.unflatten(kernel.flatten(batch), 3), batch)


def test_a2_char_poly_counts():
    group = build_group(catalog("A2"))
    kernel = kernel_for(group.field)
    counts = {}
    for batch in iter_batches(group, EnumerationMode.BFS):
        for key, count in kernel.char_poly_counts(batch).items():
            counts[key] = counts.get(key, 0) + count
    polys = {UniPoly.from_key(key): count for key, count in counts.items()}
    assert polys == {
        UniPoly([1, -2, 1]): 1,
        UniPoly([1, 0, -1]): 3,
        UniPoly([1, 1, 1]): 2,
    }


def test_empty_batch_has_no_counts():
    kernel = IntegerKernel()
    assert kernel.char_poly_counts(np.zeros((1, 0, 2, 2), dtype=np.int64)) == {}


def test_h3_char_coeffs_match_exact_char_poly():
    """Faddeev-LeVerrier in Z[phi] agrees with the exact Hessenberg route."""
    group = build_group(catalog("H3"))
    kernel = kernel_for(group.field)
    elements = list(enumerate_elements(group))
    batch = kernel.stack([w.matrix for w in elements])
    coeffs = kernel.char_coeffs(batch)
    for k, w in enumerate(elements):
        assert kernel.decode_poly(coeffs[:, k]) == char_poly(w)
        assert kernel.decode_poly(coeffs[:, k]).key() == char_poly(w).key()
