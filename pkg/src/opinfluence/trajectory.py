from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Yes-fraction at slots 0..T; ``influenced[t-1]`` flags slot t."""

    beta_series: np.ndarray
    influenced: Optional[np.ndarray] = None

    @property
    def terminal(self) -> float:
        return float(self.beta_series[-1])

    @property
    def T(self) -> int:
        return len(self.beta_series) - 1

    def to_csv(self, path) -> None:
        flags = self.influenced if self.influenced is not None else np.zeros(self.T, dtype=bool)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["slot", "beta", "influenced"])
            for t, beta in enumerate(self.beta_series.tolist()):
                w.writerow([t, repr(float(beta)), int(flags[t - 1]) if t else 0])
