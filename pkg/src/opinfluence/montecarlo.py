"""Monte Carlo estimation of the terminal Yes-fraction under a schedule.

Each trial owns its random streams, derived from ``(base_seed, trial_index)``
only: one for the initial state, one each for the chosen individual, the
flip uniform, the sample size and the sampled indices.  The streams do not
depend on the schedule, so schedules compared with the same config are
coupled through common random numbers and differ only in which slots are
influenced.  Trials are simulated in vectorised chunks; a chunk of one
trial reproduces ``run_trial`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .dynamics import DynamicsParams, GraphNeighborhood, InteractionMode, RandomSample
from .schedules import Horizon, InfluenceSchedule
from .state import OpinionVector
from .trajectory import Trajectory

CHUNK = 1024


@dataclass(frozen=True)
class RandomInitial:
    """floor(beta0 * M) Yes opinions on a uniformly random subset of nodes.

    ``pinned`` fixes (node, opinion) pairs first; the remaining Yes count is
    spread over the other nodes.  ``seed=None`` draws a fresh subset per trial.
    """

    beta0: float
    seed: Optional[int] = None
    pinned: tuple[tuple[int, int], ...] = ()

    def draw(self, M: int, rng: np.random.Generator) -> np.ndarray:
        bits = np.zeros(M, dtype=np.int8)
        target = int(np.floor(self.beta0 * M + 1e-9))
        fixed = dict(self.pinned)
        free = np.array([i for i in range(M) if i not in fixed], dtype=np.int64)
        for i, v in fixed.items():
            bits[i] = v
        need = target - int(sum(fixed.values()))
        need = min(max(need, 0), free.size)
        bits[rng.permutation(free)[:need]] = 1
        return bits


@dataclass(frozen=True)
class TrialConfig:
    params: DynamicsParams
    mode: InteractionMode
    horizon: Horizon
    schedule: InfluenceSchedule
    initial: Union[OpinionVector, RandomInitial]
    n_trials: int
    base_seed: int = 0

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        self.params.validate()
        self.schedule.check(self.horizon)
        if isinstance(self.mode, GraphNeighborhood) and self.mode.graph.node_count != self.params.node_count:
            raise ValueError("graph size does not match node_count")
        if isinstance(self.initial, OpinionVector) and self.initial.size != self.params.node_count:
            raise ValueError("initial state size does not match node_count")

    def with_schedule(self, schedule: InfluenceSchedule) -> "TrialConfig":
        return replace(self, schedule=schedule)


@dataclass(frozen=True, eq=False)
class EstimateSummary:
    mean_terminal: float
    std_error: float
    n_trials: int
    mean_series: np.ndarray


def combined_se(a: EstimateSummary, b: EstimateSummary) -> float:
    return float(np.hypot(a.std_error, b.std_error))


def is_hub_spoke(g) -> bool:
    deg = g.degree_array
    return bool(deg[0] == g.node_count - 1 and np.all(deg[1:] == 1))


def _draw_streams(cfg: TrialConfig, trial_index: int, conditioned: bool, hub_slot: Optional[int]):
    M, T = cfg.params.node_count, cfg.horizon.T
    init_ss, chosen_ss, flip_ss, k_ss, idx_ss = np.random.SeedSequence([cfg.base_seed, trial_index]).spawn(5)
    if isinstance(cfg.initial, OpinionVector):
        bits = np.array(cfg.initial.bits, dtype=np.int8)
    else:
        seed = cfg.initial.seed
        rng = np.random.default_rng(init_ss if seed is None else seed)
        bits = cfg.initial.draw(M, rng)
    rng = np.random.default_rng(chosen_ss)
    if conditioned:
        t_h = int(rng.integers(1, T + 1)) if hub_slot is None else hub_slot
        chosen = rng.integers(1, M, size=T)
        chosen[t_h - 1] = 0
    else:
        chosen = rng.integers(0, M, size=T)
    u = np.random.default_rng(flip_ss).random(T)
    ks = idx = None
    if isinstance(cfg.mode, RandomSample):
        kd = cfg.mode.k_dist
        ks = kd.sample(np.random.default_rng(k_ss), size=T)
        idx = np.random.default_rng(idx_ss).integers(0, M, size=(T, kd.k_max))
    return bits, chosen, u, ks, idx


def _simulate_chunk(cfg, indices, conditioned=False, hub_slot=None) -> np.ndarray:
    prm, T, M = cfg.params, cfg.horizon.T, cfg.params.node_count
    draws = [_draw_streams(cfg, int(i), conditioned, hub_slot) for i in indices]
    n = len(draws)
    bits = np.stack([d[0] for d in draws])
    chosen = np.stack([d[1] for d in draws])
    u = np.stack([d[2] for d in draws])
    random_mode = isinstance(cfg.mode, RandomSample)
    if random_mode:
        ks = np.stack([d[3] for d in draws])
        idx = np.stack([d[4] for d in draws])
        kpos = np.arange(idx.shape[2])
    else:
        g = cfg.mode.graph
        A = g.matrix
        deg = g.degree_array
    mask = cfg.schedule.mask(T)
    rows = np.arange(n)
    yes = bits.sum(axis=1).astype(np.int64)
    out = np.empty((n, T + 1))
    out[:, 0] = yes / M
    for t in range(T):
        c = chosen[:, t]
        cur = bits[rows, c]
        if mask[t]:
            pt, qt = prm.p_inf, prm.q_inf
        else:
            if random_mode:
                k = ks[:, t]
                seen = bits[rows[:, None], idx[:, t, :]] * (kpos[None, :] < k[:, None])
                f = seen.sum(axis=1) / k
                pt, qt = prm.p * (1.0 - f), prm.q * f
            else:
                d = deg[c]
                nb = (A[c] & bits).sum(axis=1)
                f = np.divide(nb, d, out=np.zeros(n), where=d > 0)
                pt = np.where(d > 0, prm.p * (1.0 - f), 0.0)
                qt = np.where(d > 0, prm.q * f, 0.0)
        flip = np.where(cur == 1, u[:, t] < pt, u[:, t] < qt)
        bits[rows, c] = cur ^ flip
        yes += np.where(flip, 1 - 2 * cur.astype(np.int64), 0)
        out[:, t + 1] = yes / M
    return out


def simulate(cfg: TrialConfig, indices: Sequence[int], conditioned=False, hub_slot=None) -> np.ndarray:
    """Yes-fraction paths for the given trial indices, shape (n, T + 1)."""
    indices = list(indices)
    parts = [
        _simulate_chunk(cfg, indices[i : i + CHUNK], conditioned, hub_slot)
        for i in range(0, len(indices), CHUNK)
    ]
    return np.concatenate(parts, axis=0)


def run_trial(cfg: TrialConfig, trial_index: int) -> Trajectory:
    path = simulate(cfg, [trial_index])[0]
    return Trajectory(path, cfg.schedule.mask(cfg.horizon.T))


def _summarise(paths: np.ndarray) -> EstimateSummary:
    n = paths.shape[0]
    term = paths[:, -1]
    se = float(term.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return EstimateSummary(float(term.mean()), se, n, paths.mean(axis=0))


def estimate(cfg: TrialConfig) -> EstimateSummary:
    return _summarise(simulate(cfg, range(cfg.n_trials)))


def compare_strategies(cfg_base: TrialConfig, schedules) -> list[tuple[InfluenceSchedule, EstimateSummary]]:
    """Estimate every schedule on the same trial streams; best mean first."""
    results = [(s, estimate(cfg_base.with_schedule(s.check(cfg_base.horizon)))) for s in schedules]
    return sorted(results, key=lambda r: -r[1].mean_terminal)


def _require_hub(cfg):
    if not (isinstance(cfg.mode, GraphNeighborhood) and is_hub_spoke(cfg.mode.graph)):
        raise ValueError("conditioned hub trials need a hub-and-spoke graph with hub 0")


def run_conditioned_hub_trial(cfg: TrialConfig, trial_index: int, hub_slot: Optional[int] = None) -> Trajectory:
    """One trial in which the hub is selected exactly once.

    The hub's slot is uniform on 1..T (or fixed at ``hub_slot``); every other
    slot selects uniformly among the spokes, which is the uniform-selection
    law conditioned on a single hub selection.
    """
    _require_hub(cfg)
    path = simulate(cfg, [trial_index], conditioned=True, hub_slot=hub_slot)[0]
    return Trajectory(path, cfg.schedule.mask(cfg.horizon.T))


def estimate_conditioned(cfg: TrialConfig, hub_slot: Optional[int] = None) -> EstimateSummary:
    _require_hub(cfg)
    if hub_slot is not None and not 1 <= hub_slot <= cfg.horizon.T:
        raise ValueError("hub_slot must lie in 1..T")
    return _summarise(simulate(cfg, range(cfg.n_trials), conditioned=True, hub_slot=hub_slot))
