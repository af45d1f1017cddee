"""Open-loop influence schedules over a finite horizon of slots 1..T."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

import numpy as np

MAX_ENUMERATION = 10**6


@dataclass(frozen=True)
class Horizon:
    T: int
    b: float

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ValueError(f"T must be an integer >= 1 (got {self.T})")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must lie in [0,1] (got {self.b})")

    @property
    def budget(self) -> int:
        # tolerance guards float products such as 0.29 * 100 = 28.999...
        return min(self.T, math.floor(self.b * self.T + 1e-9))


@dataclass(frozen=True)
class InfluenceSchedule:
    slots: frozenset

    @classmethod
    def of(cls, slots) -> "InfluenceSchedule":
        return cls(frozenset(int(s) for s in slots))

    def check(self, h: Horizon) -> "InfluenceSchedule":
        if len(self.slots) > h.budget:
            raise ValueError(f"schedule uses {len(self.slots)} slots, budget is {h.budget}")
        bad = [s for s in self.slots if not 1 <= s <= h.T]
        if bad:
            raise ValueError(f"slots {sorted(bad)} outside 1..{h.T}")
        return self

    def mask(self, T: int) -> np.ndarray:
        """Boolean array; entry t-1 is True when slot t is influenced."""
        m = np.zeros(T, dtype=bool)
        if self.slots:
            m[np.array(sorted(self.slots)) - 1] = True
        return m

    def to_string(self) -> str:
        return ",".join(str(s) for s in sorted(self.slots))

    @classmethod
    def parse(cls, text: str) -> "InfluenceSchedule":
        text = text.strip()
        if not text:
            return cls(frozenset())
        return cls.of(int(tok) for tok in text.split(","))

    def __len__(self):
        return len(self.slots)


def first_slots(h: Horizon) -> InfluenceSchedule:
    return InfluenceSchedule.of(range(1, h.budget + 1))


def last_slots(h: Horizon) -> InfluenceSchedule:
    return InfluenceSchedule.of(range(h.T - h.budget + 1, h.T + 1))


def consecutive(h: Horizon, t_start: int) -> InfluenceSchedule:
    if not 1 <= t_start <= h.T - h.budget + 1:
        raise ValueError(f"t_start must lie in [1, {h.T - h.budget + 1}] (got {t_start})")
    return InfluenceSchedule.of(range(t_start, t_start + h.budget))


def enumerate_all(h: Horizon) -> Iterator[InfluenceSchedule]:
    """Every schedule using exactly the full budget.

    Restricting to full-budget sets is sufficient only under effective
    influence, where an extra influenced slot never lowers the outcome.
    """
    n = math.comb(h.T, h.budget)
    if n > MAX_ENUMERATION:
        raise ValueError(f"C({h.T},{h.budget}) = {n} schedules exceeds the {MAX_ENUMERATION} guard")
    for c in combinations(range(1, h.T + 1), h.budget):
        yield InfluenceSchedule(frozenset(c))
