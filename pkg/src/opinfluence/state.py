"""Binary opinion configurations and the Yes-fractions individuals observe."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graphs import GraphTopology


@dataclass(frozen=True, eq=False)
class OpinionVector:
    """Opinions of all individuals at one slot; ``bits[i] == 1`` means Yes."""

    bits: np.ndarray
    yes_count: int

    @classmethod
    def from_bits(cls, bits) -> "OpinionVector":
        arr = np.array(bits, dtype=np.int8).ravel()
        if arr.size == 0 or np.any((arr != 0) & (arr != 1)):
            raise ValueError("bits must be a non-empty 0/1 vector")
        arr.setflags(write=False)
        return cls(arr, int(arr.sum()))

    @classmethod
    def random_fixed_count(cls, node_count: int, yes: int, rng: np.random.Generator) -> "OpinionVector":
        if not 0 <= yes <= node_count:
            raise ValueError("yes count out of range")
        bits = np.zeros(node_count, dtype=np.int8)
        bits[rng.permutation(node_count)[:yes]] = 1
        return cls.from_bits(bits)

    @property
    def size(self) -> int:
        return int(self.bits.size)

    def flipped(self, i: int) -> "OpinionVector":
        b = self.bits.copy()
        b[i] ^= 1
        return OpinionVector.from_bits(b)

    def __eq__(self, other):
        if not isinstance(other, OpinionVector):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __repr__(self):
        return f"OpinionVector({''.join(map(str, self.bits.tolist()))})"


def global_fraction(s: OpinionVector) -> float:
    return s.yes_count / s.size


def neighborhood_fraction(s: OpinionVector, g: GraphTopology, i: int) -> Optional[float]:
    """Yes-fraction among the neighbours of ``i``; None for an isolated node."""
    if not 0 <= i < g.node_count:
        raise IndexError(f"node {i} out of range")
    nbrs = g.adjacency[i]
    if not nbrs:
        return None
    return float(s.bits[list(nbrs)].sum()) / len(nbrs)


def sampled_fraction(s: OpinionVector, k: int, rng: np.random.Generator) -> float:
    """Yes-fraction in ``k`` opinions drawn uniformly with replacement (self included)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    idx = rng.integers(0, s.size, size=k)
    return float(s.bits[idx].sum()) / k
