"""Stabilizer chains over the root permutation action, and element streams.

A group element acts on the root list by a permutation p with p[r] the index
of w(root r). Composition follows matrix multiplication: p_{gh} = p_g[p_h].
The chain factors every element uniquely as u_0 u_1 ... u_k with u_i taken
from the transversal of level i, so the group can be streamed block by block
(one block per u_0) without ever holding all elements in memory.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from src.coxeter import GroupElement, ReflectionGroup, root_system
from src.errors import BudgetExceeded, ChainInconsistent
from src.ring_kernels import RingKernel, images_to_matrices, kernel_for

logger = logging.getLogger(__name__)

DEFAULT_BFS_BUDGET = 5_000_000
DEFAULT_CHUNK_SIZE = 262_144


class EnumerationMode(str, Enum):
    """How enumerate_elements walks the group."""
    BFS = "BFS"
    CHAIN = "CHAIN"


def _is_identity(perm: np.ndarray) -> bool:
    return bool(np.all(perm == np.arange(len(perm))))


def _first_moved(perm: np.ndarray) -> int:
    return int(np.flatnonzero(perm != np.arange(len(perm)))[0])


def _invert(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm), dtype=perm.dtype)
    return inv


@dataclass
class ChainLevel:
    """One level of the chain: base point, strong generators, transversal.

    Attributes:
        point: Base point (root index) stabilized by all deeper levels
        generators: Strong generators fixing every earlier base point
        orbit: Orbit of `point`, in discovery order
        transversal: orbit point gamma -> permutation u with u[point] = gamma
        inverse: orbit point gamma -> inverse of transversal[gamma]
        checked: (gamma, generator index) pairs whose Schreier generator sifted
    """
    point: int
    generators: List[np.ndarray] = field(default_factory=list)
    orbit: List[int] = field(default_factory=list)
    transversal: Dict[int, np.ndarray] = field(default_factory=dict)
    inverse: Dict[int, np.ndarray] = field(default_factory=dict)
    checked: Set[Tuple[int, int]] = field(default_factory=set)

    def extend_orbit(self, degree: int) -> None:
        """Close the orbit under the current generators.

        Existing transversal entries are kept, so Schreier generators already
        checked stay valid.
        """
        if not self.orbit:
            start = np.arange(degree, dtype=np.int32)
            self.orbit.append(self.point)
            self.transversal[self.point] = start
            self.inverse[self.point] = start
        queue = list(self.orbit)
        while queue:
            gamma = queue.pop(0)
            u = self.transversal[gamma]
            for s in self.generators:
                delta = int(s[gamma])
                if delta in self.transversal:
                    continue
                image = s[u]
                self.orbit.append(delta)
                self.transversal[delta] = image
                self.inverse[delta] = _invert(image)
                queue.append(delta)

    def perm_matrix(self) -> np.ndarray:
        """Transversal as an array of shape (|orbit|, degree), in orbit order."""
        return np.stack([self.transversal[gamma] for gamma in self.orbit])


class StabilizerChain:
    """Schreier-Sims chain of a reflection group acting on its roots.

    Args:
        group: Group to factor
    """

    def __init__(self, group: ReflectionGroup) -> None:
        self.group = group
        self.kernel: RingKernel = kernel_for(group.field)
        self.roots = root_system(group)
        self.degree = len(self.roots)
        self._index = {self._root_key(r): i for i, r in enumerate(self.roots)}
        # root_system lists the simple roots first
        self.simple = np.arange(group.rank, dtype=np.int32)
        self.root_codes = np.stack(
            [self.kernel.encode_vector(r) for r in self.roots], axis=1)
        self.generator_perms = [self.permutation_of(g) for g in group.generators]
        self.levels: List[ChainLevel] = []
        self._build()
        self._perm_matrices = [level.perm_matrix() for level in self.levels]
        logger.debug(
            f"{group.label}: chain with base {self.base} and transversal sizes "
            f"{self.transversal_sizes}, order {self.order}"
        )

    @staticmethod
    def _root_key(root) -> Tuple:
        return tuple((x.a, x.b) for x in root)

    def permutation_of(self, element: GroupElement) -> np.ndarray:
        """Permutation induced on the root list; ChainInconsistent if a root leaves it."""
        perm = np.empty(self.degree, dtype=np.int32)
        for i, root in enumerate(self.roots):
            key = self._root_key(element.apply(root))
            if key not in self._index:
                raise ChainInconsistent(f"{self.group.label}: image of root {i} is not a root")
            perm[i] = self._index[key]
        return perm

    # Construction

    def _sift(self, perm: np.ndarray, start: int = 0) -> Tuple[np.ndarray, int]:
        for depth in range(start, len(self.levels)):
            level = self.levels[depth]
            inv = level.inverse.get(int(perm[level.point]))
            if inv is None:
                return perm, depth
            perm = inv[perm]
        return perm, len(self.levels)

    def _build(self) -> None:
        generators = [p for p in self.generator_perms if not _is_identity(p)]
        for g in generators:
            if all(g[level.point] == level.point for level in self.levels):
                self.levels.append(ChainLevel(point=_first_moved(g)))
        for depth, level in enumerate(self.levels):
            fixed = [self.levels[k].point for k in range(depth)]
            level.generators = [g for g in generators if all(g[b] == b for b in fixed)]
            level.extend_orbit(self.degree)

        depth = len(self.levels) - 1
        while depth >= 0:
            level = self.levels[depth]
            residue_found = False
            for gamma in list(level.orbit):
                for s_index, s in enumerate(level.generators):
                    if (gamma, s_index) in level.checked:
                        continue
                    level.checked.add((gamma, s_index))
                    delta = int(s[gamma])
                    schreier = level.inverse[delta][s[level.transversal[gamma]]]
                    residue, stop = self._sift(schreier, depth + 1)
                    if _is_identity(residue):
                        continue
                    if stop == len(self.levels):
                        self.levels.append(ChainLevel(point=_first_moved(residue)))
                    for deeper in range(depth + 1, stop + 1):
                        self.levels[deeper].generators.append(residue)
                        self.levels[deeper].extend_orbit(self.degree)
                    depth = stop
                    residue_found = True
                    break
                if residue_found:
                    break
            if not residue_found:
                depth -= 1

    # Queries

    @property
    def base(self) -> Tuple[int, ...]:
        return tuple(level.point for level in self.levels)

    @property
    def transversal_sizes(self) -> Tuple[int, ...]:
        return tuple(len(level.orbit) for level in self.levels)

    @property
    def order(self) -> int:
        order = 1
        for size in self.transversal_sizes:
            order *= size
        return order

    @property
    def block_count(self) -> int:
        """Number of disjoint blocks, one per top-level representative."""
        return self.transversal_sizes[0] if self.levels else 1

    @property
    def block_size(self) -> int:
        return self.order // self.block_count

    def contains(self, element: GroupElement) -> bool:
        residue, _ = self._sift(self.permutation_of(element))
        return _is_identity(residue)

    def transversals(self) -> List[List[GroupElement]]:
        """Coset representatives per level, as matrices."""
        out = []
        for perms in self._perm_matrices:
            batch = images_to_matrices(self.root_codes, perms[:, self.simple])
            out.append([GroupElement(self.kernel.decode_matrix(batch[:, k])) for k in range(batch.shape[1])])
        return out

    def verify(self, expected_order: Optional[int] = None) -> None:
        """Raise ChainInconsistent unless every generator sifts and the order matches."""
        for i, perm in enumerate(self.generator_perms):
            residue, _ = self._sift(perm)
            if not _is_identity(residue):
                raise ChainInconsistent(f"{self.group.label}: generator R_{i + 1} does not sift")
        if expected_order is not None and self.order != expected_order:
            raise ChainInconsistent(
                f"{self.group.label}: chain order {self.order} != expected {expected_order}")

    # Streaming

    def iter_block_images(self, block: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> Iterator[np.ndarray]:
        """Yield arrays (N, n) of simple-root images for every element of a block.

        Block b holds the elements whose top-level factor is the b-th
        transversal representative; blocks partition the group.
        """
        n = self.group.rank
        if not self.levels:
            yield self.simple[None, :].copy()
            return
        if not 0 <= block < self.block_count:
            raise IndexError(f"block {block} outside 0..{self.block_count - 1}")
        sizes = self.transversal_sizes
        top = self._perm_matrices[0][block]
        tail = self.simple[None, :]
        split = len(self.levels)
        while split > 1 and tail.shape[0] * sizes[split - 1] <= chunk_size:
            split -= 1
            tail = self._perm_matrices[split][:, tail].reshape(-1, n)
        for combo in itertools.product(*(range(sizes[k]) for k in range(1, split))):
            prefix = top
            for depth, choice in zip(range(1, split), combo):
                prefix = prefix[self._perm_matrices[depth][choice]]
            images = prefix[tail]
            for start in range(0, images.shape[0], chunk_size):
                yield images[start:start + chunk_size]

    def iter_block_batches(self, block: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> Iterator[np.ndarray]:
        """Encoded matrices (components, N, n, n) for every element of a block."""
        for images in self.iter_block_images(block, chunk_size):
            yield images_to_matrices(self.root_codes, images)

    def iter_batches(self, chunk_size: int = DEFAULT_CHUNK_SIZE,
                     blocks: Optional[Sequence[int]] = None) -> Iterator[np.ndarray]:
        for block in (range(self.block_count) if blocks is None else blocks):
            yield from self.iter_block_batches(block, chunk_size)


def bfs_batches(group: ReflectionGroup, budget: int = DEFAULT_BFS_BUDGET) -> Iterator[np.ndarray]:
    """Breadth-first walk by word length, one encoded batch per length layer.

    Right multiplication by a simple reflection changes the length by exactly
    one, so the next layer is the set of neighbours of the current layer minus
    the previous layer.
    """
    kernel = kernel_for(group.field)
    n = group.rank
    gens = kernel.stack([g.matrix for g in group.generators])
    current = kernel.identity(n)
    previous_rows = kernel.flatten(current[:, :0])
    total = 0
    while current.shape[1]:
        total += current.shape[1]
        if total > budget:
            raise BudgetExceeded(
                f"{group.label}: breadth-first enumeration passed the budget of {budget} elements")
        yield current
        count = current.shape[1]
        products = [kernel.matmul(current, np.repeat(gens[:, k:k + 1], count, axis=1))
                    for k in range(n)]
        candidates = np.unique(kernel.flatten(np.concatenate(products, axis=1)), axis=0)
        merged = np.concatenate([previous_rows, candidates])
        _, first = np.unique(merged, axis=0, return_index=True)
        fresh = merged[np.sort(first[first >= previous_rows.shape[0]])]
        previous_rows = kernel.flatten(current)
        current = kernel.unflatten(fresh, n)


def iter_batches(group: ReflectionGroup, mode: EnumerationMode = EnumerationMode.CHAIN,
                 budget: int = DEFAULT_BFS_BUDGET, chunk_size: int = DEFAULT_CHUNK_SIZE,
                 chain: Optional[StabilizerChain] = None) -> Iterator[np.ndarray]:
    """Encoded element batches covering the group exactly once."""
    if mode is EnumerationMode.BFS:
        yield from bfs_batches(group, budget)
        return
    chain = chain or StabilizerChain(group)
    yield from chain.iter_batches(chunk_size)


def enumerate_elements(group: ReflectionGroup, mode: EnumerationMode = EnumerationMode.BFS,
                       budget: int = DEFAULT_BFS_BUDGET,
                       chunk_size: int = DEFAULT_CHUNK_SIZE) -> Iterator[GroupElement]:
    """Stream every group element exactly once as an exact matrix."""
    kernel = kernel_for(group.field)
    for batch in iter_batches(group, mode, budget, chunk_size):
        for k in range(batch.shape[1]):
            yield GroupElement(kernel.decode_matrix(batch[:, k]))
