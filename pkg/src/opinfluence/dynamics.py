"""One time-slot of the influenced voter-type Markov process.

A single individual is chosen uniformly per slot.  Without influence a Yes
holder flips with probability ``p * (No-fraction it observes)`` and a No
holder with ``q * (Yes-fraction it observes)``; under influence the flip
probabilities are the constants ``p_inf`` / ``q_inf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Union

import numpy as np

from .graphs import GraphTopology
from .state import OpinionVector, global_fraction, neighborhood_fraction, sampled_fraction

MAX_ENUM_K = 20


@dataclass(frozen=True)
class DynamicsParams:
    p: float
    q: float
    p_inf: float
    q_inf: float
    node_count: int
    effective: bool = False

    def problems(self) -> list[str]:
        out = []
        for name in ("p", "q", "p_inf", "q_inf"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                out.append(f"{name} must lie in [0,1] (got {v})")
        if self.node_count < 2:
            out.append("node_count must be >= 2")
        if self.effective and not (self.p_inf < self.p and self.q_inf > self.q):
            out.append(
                "effective influence requires p_inf < p and q_inf > q "
                f"(got p={self.p}, p_inf={self.p_inf}, q={self.q}, q_inf={self.q_inf})"
            )
        return out

    def validate(self) -> "DynamicsParams":
        errs = self.problems()
        if errs:
            raise ValueError("; ".join(errs))
        return self


@dataclass(frozen=True)
class KDistribution:
    """Finite law of the number of opinions a chosen individual samples."""

    support: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if not self.support:
            raise ValueError("KDistribution needs a non-empty support")
        for k, w in self.support:
            if int(k) != k or k < 1:
                raise ValueError(f"k values must be integers >= 1 (got {k})")
            if not w > 0:
                raise ValueError(f"probabilities must be > 0 (got {w})")
        if abs(sum(w for _, w in self.support) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    @classmethod
    def fixed(cls, k: int) -> "KDistribution":
        return cls(((k, 1.0),))

    @property
    def ks(self) -> np.ndarray:
        return np.array([k for k, _ in self.support], dtype=np.int64)

    @property
    def probs(self) -> np.ndarray:
        return np.array([w for _, w in self.support], dtype=float)

    @property
    def k_max(self) -> int:
        return int(max(k for k, _ in self.support))

    def sample(self, rng: np.random.Generator, size=None):
        return self.ks[rng.choice(len(self.support), size=size, p=self.probs)]

    def expected_sampled_fraction(self, beta: float) -> float:
        """E[n_y / K] when K ~ self and n_y | K ~ Binomial(K, beta), by enumeration."""
        if self.k_max > MAX_ENUM_K:
            raise ValueError(f"enumeration needs every k <= {MAX_ENUM_K}")
        total = 0.0
        for k, w in self.support:
            total += w * sum(
                (n / k) * comb(k, n) * beta**n * (1.0 - beta) ** (k - n) for n in range(k + 1)
            )
        return total


@dataclass(frozen=True)
class RandomSample:
    k_dist: KDistribution


@dataclass(frozen=True)
class GraphNeighborhood:
    graph: GraphTopology


InteractionMode = Union[RandomSample, GraphNeighborhood]


@dataclass(frozen=True)
class StepOutcome:
    chosen: int
    delta: int
    next_state: OpinionVector


def flip_probabilities(s, i, mode, influenced, params, rng=None) -> tuple[float, float]:
    """(p_t, q_t) for individual ``i``: Yes->No and No->Yes flip probabilities."""
    if not 0 <= i < s.size:
        raise IndexError(f"node {i} out of range")
    if influenced:
        return params.p_inf, params.q_inf
    if isinstance(mode, RandomSample):
        k = int(mode.k_dist.sample(rng))
        f = sampled_fraction(s, k, rng)
    else:
        f = neighborhood_fraction(s, mode.graph, i)
        if f is None:
            return 0.0, 0.0
    return params.p * (1.0 - f), params.q * f


def step(s, mode, influenced, params, rng) -> StepOutcome:
    i = int(rng.integers(0, s.size))
    p_t, q_t = flip_probabilities(s, i, mode, influenced, params, rng)
    u = rng.random()
    if s.bits[i] == 1:
        flip, delta = u < p_t, -1
    else:
        flip, delta = u < q_t, 1
    if not flip:
        return StepOutcome(i, 0, s)
    return StepOutcome(i, delta, s.flipped(i))


def _expected_flip_probs(s, mode, influenced, params):
    """Per-node (E[p_t], E[q_t]) with the opinion collection marginalised exactly."""
    M = s.size
    if influenced:
        return np.full(M, params.p_inf), np.full(M, params.q_inf)
    if isinstance(mode, RandomSample):
        f = mode.k_dist.expected_sampled_fraction(global_fraction(s))
        return np.full(M, params.p * (1.0 - f)), np.full(M, params.q * f)
    g = mode.graph
    deg = g.degree_array
    nb_yes = g.matrix.astype(np.int64) @ s.bits.astype(np.int64)
    f = np.divide(nb_yes, deg, out=np.zeros(M), where=deg > 0)
    isolated = deg == 0
    pt = np.where(isolated, 0.0, params.p * (1.0 - f))
    qt = np.where(isolated, 0.0, params.q * f)
    return pt, qt


def one_step_delta_distribution(s, mode, influenced, params) -> dict[int, float]:
    """Exact law of the net-opinion change over one slot, as {-1, 0, +1} -> prob."""
    pt, qt = _expected_flip_probs(s, mode, influenced, params)
    yes = s.bits == 1
    M = s.size
    down = float(pt[yes].sum()) / M
    up = float(qt[~yes].sum()) / M
    return {-1: down, 0: 1.0 - up - down, 1: up}
