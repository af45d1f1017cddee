"""Exact evolution of the full opinion distribution for small populations.

States are integers in [0, 2**M); bit i of the integer is individual i's
opinion.  Flipping individual i is the involution ``s -> s ^ (1 << i)``,
so one slot is M permuted multiply-adds over a dense probability vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .dynamics import DynamicsParams, GraphNeighborhood, RandomSample
from .schedules import Horizon, InfluenceSchedule, enumerate_all, first_slots, last_slots
from .state import OpinionVector

MAX_NODES = 14


@dataclass(frozen=True, eq=False)
class StateDistribution:
    node_count: int
    probs: np.ndarray

    def __post_init__(self):
        if self.node_count > MAX_NODES:
            raise ValueError(f"exact evolution is limited to M <= {MAX_NODES}")
        if self.probs.shape != (2**self.node_count,):
            raise ValueError("probs must have length 2**node_count")

    @classmethod
    def point(cls, s: OpinionVector) -> "StateDistribution":
        M = s.size
        if M > MAX_NODES:
            raise ValueError(f"exact evolution is limited to M <= {MAX_NODES}")
        probs = np.zeros(2**M)
        probs[int(sum(int(b) << i for i, b in enumerate(s.bits.tolist())))] = 1.0
        return cls(M, probs)

    @classmethod
    def uniform_with_yes(cls, node_count: int, yes: int) -> "StateDistribution":
        """Uniform over all configurations with exactly ``yes`` Yes opinions."""
        if node_count > MAX_NODES:
            raise ValueError(f"exact evolution is limited to M <= {MAX_NODES}")
        counts = _bit_matrix(node_count).sum(axis=1)
        probs = (counts == yes).astype(float) / comb(node_count, yes)
        return cls(node_count, probs)

    def mean_fraction(self) -> float:
        return float(self.probs @ (_bit_matrix(self.node_count).sum(axis=1) / self.node_count))

    def total(self) -> float:
        return float(self.probs.sum())


def _bit_matrix(M: int) -> np.ndarray:
    states = np.arange(2**M)
    return ((states[:, None] >> np.arange(M)[None, :]) & 1).astype(np.int64)


def _flip_probs(M, mode, influenced, params):
    """(S, M) matrix of the probability that node i flips when chosen in state s."""
    bits = _bit_matrix(M)
    if influenced:
        pt = np.full(bits.shape, params.p_inf)
        qt = np.full(bits.shape, params.q_inf)
    elif isinstance(mode, RandomSample):
        yes = bits.sum(axis=1)
        # marginalise sample size and binomial sample outcome by enumeration
        by_count = np.array([mode.k_dist.expected_sampled_fraction(y / M) for y in range(M + 1)])
        f = by_count[yes][:, None]
        pt = np.broadcast_to(params.p * (1.0 - f), bits.shape)
        qt = np.broadcast_to(params.q * f, bits.shape)
    else:
        g = mode.graph
        if g.node_count != M:
            raise ValueError("graph size does not match the distribution")
        deg = g.degree_array
        nb = bits @ g.matrix.astype(np.int64)
        f = np.divide(nb, deg, out=np.zeros(nb.shape), where=deg > 0)
        pt = np.where(deg > 0, params.p * (1.0 - f), 0.0)
        qt = np.where(deg > 0, params.q * f, 0.0)
    return np.where(bits == 1, pt, qt)


class _Kernel:
    def __init__(self, M, mode, params):
        self.M = M
        self.states = np.arange(2**M)
        self.flip = {flag: _flip_probs(M, mode, flag, params) for flag in (False, True)}

    def apply(self, probs, influenced):
        fp = self.flip[influenced]
        out = probs.copy()
        for i in range(self.M):
            moved = probs * fp[:, i] / self.M
            out -= moved
            out += moved[self.states ^ (1 << i)]
        return out


def evolve_exact(dist: StateDistribution, mode, influenced: bool, params: DynamicsParams) -> StateDistribution:
    k = _Kernel(dist.node_count, mode, params)
    return StateDistribution(dist.node_count, k.apply(dist.probs, influenced))


def expected_terminal(initial: StateDistribution, mode, params, h: Horizon, sched: InfluenceSchedule, _kernel=None) -> float:
    sched.check(h)
    kernel = _kernel or _Kernel(initial.node_count, mode, params)
    probs = initial.probs
    for flag in sched.mask(h.T).tolist():
        probs = kernel.apply(probs, flag)
    return StateDistribution(initial.node_count, probs).mean_fraction()


@dataclass
class OrderingReport:
    values: dict[str, float]
    argmax: list[str]
    argmin: list[str]
    regime: str
    prediction_holds: bool
    first: str = ""
    last: str = ""
    params: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "params": self.params,
                "values": self.values,
                "argmax": self.argmax,
                "argmin": self.argmin,
                "first_slots": self.first,
                "last_slots": self.last,
                "regime": self.regime,
                "prediction_holds": self.prediction_holds,
            },
            indent=2,
            sort_keys=True,
        )


def verify_ordering(mode, params: DynamicsParams, h: Horizon, initial: StateDistribution, tol: float = 1e-10) -> OrderingReport:
    """Exhaustive check of which full-budget schedules maximise E[beta(T)].

    Predicted: first_slots is optimal when p < q, last_slots when p > q, and
    every schedule ties when p == q.  The verdict is reported, not enforced.
    """
    kernel = _Kernel(initial.node_count, mode, params)
    values = {
        s.to_string(): expected_terminal(initial, mode, params, h, s, _kernel=kernel)
        for s in enumerate_all(h)
    }
    hi, lo = max(values.values()), min(values.values())
    argmax = [k for k, v in values.items() if hi - v <= tol]
    argmin = [k for k, v in values.items() if v - lo <= tol]
    first, last = first_slots(h).to_string(), last_slots(h).to_string()
    if params.p < params.q:
        regime, holds = "p<q", first in argmax
    elif params.p > params.q:
        regime, holds = "p>q", last in argmax
    else:
        regime, holds = "p=q", hi - lo <= tol
    prm = {
        "p": params.p, "q": params.q, "p_inf": params.p_inf, "q_inf": params.q_inf,
        "M": params.node_count, "T": h.T, "b": h.b, "budget": h.budget,
    }
    return OrderingReport(values, argmax, argmin, regime, bool(holds), first, last, prm)
