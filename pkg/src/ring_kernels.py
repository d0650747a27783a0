"""Integer encodings of group matrices for batched numpy kernels.

Crystallographic generators are integer matrices; H3/H4 generators have
entries in Z[phi]. Both are stored as int64 arrays with a leading component
axis: one component for Z, two for Z[phi] where (x, y) means x + y*phi.
Every group element of a catalog group stays inside these rings, so the
batched characteristic polynomials below are exact.
"""

import logging
from collections import Counter
from fractions import Fraction
from typing import Dict, Sequence, Tuple

import numpy as np

from src.linalg import Matrix
from src.scalars import Field, Scalar, UniPoly

logger = logging.getLogger(__name__)

PolyKey = Tuple[str, ...]


class RingKernel:
    """Batched arithmetic on encoded matrices of shape (components, N, n, n)."""

    components = 1
    field = Field.RATIONAL

    # Encoding

    def encode_scalar(self, x: Scalar) -> Tuple[int, ...]:
        raise NotImplementedError

    def decode_scalar(self, parts: Sequence[int]) -> Scalar:
        raise NotImplementedError

    def encode_matrix(self, m: Matrix) -> np.ndarray:
        n = len(m)
        out = np.zeros((self.components, n, n), dtype=np.int64)
        for i, row in enumerate(m):
            for j, x in enumerate(row):
                out[:, i, j] = self.encode_scalar(x)
        return out

    def encode_vector(self, v: Sequence[Scalar]) -> np.ndarray:
        out = np.zeros((self.components, len(v)), dtype=np.int64)
        for i, x in enumerate(v):
            out[:, i] = self.encode_scalar(x)
        return out

    def decode_matrix(self, arr: np.ndarray) -> Matrix:
        _, n, _ = arr.shape
        return tuple(
            tuple(self.decode_scalar(arr[:, i, j]) for j in range(n)) for i in range(n)
        )

    def stack(self, matrices: Sequence[Matrix]) -> np.ndarray:
        return np.stack([self.encode_matrix(m) for m in matrices], axis=1)

    # Arithmetic

    def matmul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def identity(self, n: int, count: int = 1) -> np.ndarray:
        out = np.zeros((self.components, count, n, n), dtype=np.int64)
        out[0] = np.eye(n, dtype=np.int64)
        return out

    def char_coeffs(self, batch: np.ndarray) -> np.ndarray:
        """Coefficients of det(1 - t w) for every w in the batch.

        Faddeev-LeVerrier: M_k = A M_{k-1} + c_{k-1} I, c_k = -tr(A M_k) / k,
        with c_0 = 1. The c_k read upwards are the coefficients of det(1 - t A).
        Shape of the result: (components, N, n + 1).
        """
        c, count, n, _ = batch.shape
        coeffs = np.zeros((c, count, n + 1), dtype=np.int64)
        coeffs[0, :, 0] = 1
        eye = np.eye(n, dtype=np.int64)
        m = np.zeros_like(batch)
        for k in range(1, n + 1):
            m = self.matmul(batch, m) + coeffs[:, :, k - 1][:, :, None, None] * eye
            trace = np.trace(self.matmul(batch, m), axis1=-2, axis2=-1)
            if np.any(trace % k):
                raise ArithmeticError(f"trace not divisible by {k} in char-poly recurrence")
            coeffs[:, :, k] = -(trace // k)
        return coeffs

    def decode_poly(self, row: np.ndarray) -> UniPoly:
        """Row of shape (components, n + 1) to a UniPoly tagged with this field."""
        return UniPoly(self.decode_scalar(row[:, k]) for k in range(row.shape[1])).to_field(self.field)

    def char_poly_counts(self, batch: np.ndarray) -> Dict[PolyKey, int]:
        """Multiplicity of each det(1 - t w) key over the batch."""
        if batch.shape[1] == 0:
            return {}
        coeffs = self.char_coeffs(batch)
        c, _, width = coeffs.shape
        flat = np.concatenate(list(coeffs), axis=1)
        rows, counts = np.unique(flat, axis=0, return_counts=True)
        out: Counter = Counter()
        for row, count in zip(rows, counts):
            out[self.decode_poly(row.reshape(c, width)).key()] += int(count)
        return dict(out)

    def flatten(self, batch: np.ndarray) -> np.ndarray:
        """(components, N, n, n) -> (N, components * n * n) rows for np.unique."""
        c, count, n, _ = batch.shape
        return np.ascontiguousarray(batch.transpose(1, 0, 2, 3).reshape(count, c * n * n))

    def unflatten(self, rows: np.ndarray, n: int) -> np.ndarray:
        count = rows.shape[0]
        return rows.reshape(count, self.components, n, n).transpose(1, 0, 2, 3)


class IntegerKernel(RingKernel):
    """Z-valued matrices of crystallographic groups."""

    components = 1
    field = Field.RATIONAL

    def encode_scalar(self, x: Scalar) -> Tuple[int, ...]:
        return (x.to_int(),)

    def decode_scalar(self, parts: Sequence[int]) -> Scalar:
        return Scalar(int(parts[0]))

    def matmul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.matmul(x[0], y[0])[None]


class GoldenKernel(RingKernel):
    """Z[phi]-valued matrices of H3/H4, with phi^2 = phi + 1."""

    components = 2
    field = Field.GOLDEN

    def encode_scalar(self, x: Scalar) -> Tuple[int, ...]:
        # a + b sqrt5 = (a - b) + 2b phi
        x_part = x.a - x.b
        y_part = 2 * x.b
        if x_part.denominator != 1 or y_part.denominator != 1:
            raise ValueError(f"{x} is not in Z[phi]")
        return (x_part.numerator, y_part.numerator)

    def decode_scalar(self, parts: Sequence[int]) -> Scalar:
        x, y = int(parts[0]), int(parts[1])
        half = Fraction(y, 2)
        return Scalar(x + half, half, Field.GOLDEN)

    def matmul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        ac = np.matmul(x[0], y[0])
        bd = np.matmul(x[1], y[1])
        cross = np.matmul(x[0], y[1]) + np.matmul(x[1], y[0])
        return np.stack([ac + bd, cross + bd])


def kernel_for(field: Field) -> RingKernel:
    return GoldenKernel() if field is Field.GOLDEN else IntegerKernel()


def images_to_matrices(root_codes: np.ndarray, images: np.ndarray) -> np.ndarray:
    """Group matrices from the images of the simple roots.

    root_codes has shape (components, R, n): encoded coordinates of every root.
    images has shape (N, n): index of w(r_j) in the root list for each element.
    Column j of the result is the coordinate vector of w(r_j).
    """
    picked = root_codes[:, images, :]
    return np.ascontiguousarray(picked.transpose(0, 1, 3, 2))
