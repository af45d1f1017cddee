"""Experiment configuration: TOML text in, validated ``ExperimentConfig`` out."""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .graphs import GraphSpec

EXPERIMENT_KINDS = ("figure2", "figure5", "trichotomy-sweep", "oracle-verify", "custom")

FIG_GRID = [[0.3, 0.6], [0.6, 0.3], [0.5, 0.5]]

DEFAULTS: dict[str, dict[str, Any]] = {
    "figure2": dict(
        node_count=100, T=500, budgets=[0.2], p_inf=0.0, q_inf=0.75, grid=FIG_GRID,
        graphs=[{"kind": "barabasi_albert", "m_attach": 2}, {"kind": "erdos_renyi", "edge_prob": 0.05}],
    ),
    "figure5": dict(
        node_count=500, T=500, budgets=[0.2], p_inf=0.0, q_inf=0.75, grid=FIG_GRID,
        graphs=[{"kind": "hub_spoke"}],
    ),
    "trichotomy-sweep": dict(
        node_count=100, T=500, budgets=[0.1, 0.2, 0.5], p_inf=0.0, q_inf=0.9,
        grid=[[p, q] for p in (0.2, 0.5, 0.8) for q in (0.2, 0.5, 0.8)],
        horizons=[[500, 100], [200, 200]],
    ),
    "oracle-verify": dict(
        node_count=4, T=6, budgets=[1 / 3], p_inf=0.0, q_inf=0.9, setting="random",
        grid=[[0.2, 0.8], [0.8, 0.2], [0.5, 0.5]],
    ),
    "custom": dict(),
}


class ConfigError(ValueError):
    def __init__(self, diagnostics: list[str]):
        super().__init__("invalid experiment config:\n  " + "\n  ".join(diagnostics))
        self.diagnostics = diagnostics


@dataclass
class ExperimentConfig:
    kind: str
    out: str = "results"
    seed: int = 0
    n_trials: int = 2000
    node_count: int = 100
    T: int = 500
    budgets: list = field(default_factory=lambda: [0.2])
    p_inf: float = 0.0
    q_inf: float = 0.75
    effective: bool = True
    grid: list = field(default_factory=lambda: [list(x) for x in FIG_GRID])
    beta0: list = field(default_factory=lambda: [0.5])
    setting: str = "graph"
    graphs: list = field(default_factory=list)
    k_support: list = field(default_factory=lambda: [[1, 1.0]])
    schedules: list = field(default_factory=lambda: ["first", "last"])
    horizons: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def graph_specs(self) -> list[GraphSpec]:
        return [
            GraphSpec(
                kind=g["kind"],
                node_count=self.node_count,
                d=g.get("d"),
                edge_prob=g.get("edge_prob"),
                m_attach=g.get("m_attach"),
                seed=g.get("seed", self.seed),
            )
            for g in self.graphs
        ]

    def horizon_pairs(self) -> list[tuple[int, int]]:
        return [tuple(h) for h in self.horizons] or [(self.T, self.node_count)]


_FIELDS = set(ExperimentConfig.__dataclass_fields__)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Fill kind defaults and validate; every problem is reported at once."""
    errs: list[str] = []
    raw = dict(raw)
    if "b" in raw:
        b = raw.pop("b")
        raw.setdefault("budgets", b if isinstance(b, list) else [b])
    kind = raw.get("kind")
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError([f"kind: must be one of {', '.join(EXPERIMENT_KINDS)} (got {kind!r})"])
    for key in sorted(set(raw) - _FIELDS):
        errs.append(f"{key}: unknown field")
    merged = {**DEFAULTS[kind], **{k: v for k, v in raw.items() if k in _FIELDS}}
    cfg = ExperimentConfig(**merged)

    if not _is_int(cfg.seed) or cfg.seed < 0:
        errs.append("seed: must be a non-negative integer")
    if not _is_int(cfg.n_trials) or cfg.n_trials < 1:
        errs.append("n_trials: must be an integer >= 1")
    if not _is_int(cfg.node_count) or cfg.node_count < 2:
        errs.append("node_count: must be an integer >= 2")
    if not _is_int(cfg.T) or cfg.T < 1:
        errs.append("T: must be an integer >= 1")
    if not isinstance(cfg.budgets, list) or not cfg.budgets:
        errs.append("budgets: must be a non-empty list")
    else:
        for i, b in enumerate(cfg.budgets):
            if not _is_num(b) or not 0.0 <= b <= 1.0:
                errs.append(f"budgets[{i}]: b must lie in [0,1] (got {b})")
    for name in ("p_inf", "q_inf"):
        v = getattr(cfg, name)
        if not _is_num(v) or not 0.0 <= v <= 1.0:
            errs.append(f"{name}: must lie in [0,1] (got {v})")
    if not isinstance(cfg.grid, list) or not cfg.grid:
        errs.append("grid: must be a non-empty list of [p, q] pairs")
    else:
        for i, pq in enumerate(cfg.grid):
            if not (isinstance(pq, list) and len(pq) == 2 and all(_is_num(x) for x in pq)):
                errs.append(f"grid[{i}]: must be a [p, q] pair")
                continue
            p, q = pq
            if not (0 <= p <= 1 and 0 <= q <= 1):
                errs.append(f"grid[{i}]: p and q must lie in [0,1] (got {pq})")
            elif cfg.effective and _is_num(cfg.p_inf) and _is_num(cfg.q_inf) and not (cfg.p_inf < p and cfg.q_inf > q):
                errs.append(
                    f"grid[{i}]: effective influence requires p_inf < p and q_inf > q "
                    f"(p={p}, q={q}, p_inf={cfg.p_inf}, q_inf={cfg.q_inf})"
                )
    for i, b0 in enumerate(cfg.beta0 if isinstance(cfg.beta0, list) else [cfg.beta0]):
        if not _is_num(b0) or not 0 <= b0 <= 1:
            errs.append(f"beta0[{i}]: must lie in [0,1] (got {b0})")
    if not isinstance(cfg.beta0, list):
        cfg.beta0 = [cfg.beta0]
    if cfg.setting not in ("graph", "random"):
        errs.append(f"setting: must be 'graph' or 'random' (got {cfg.setting!r})")
    if cfg.setting == "random":
        ks = cfg.k_support
        if not isinstance(ks, list) or not ks or not all(isinstance(e, list) and len(e) == 2 for e in ks):
            errs.append("k_support: must be a non-empty list of [k, prob] pairs")
        else:
            if any(not _is_int(k) or k < 1 for k, _ in ks):
                errs.append("k_support: every k must be an integer >= 1")
            if any(not _is_num(w) or w <= 0 for _, w in ks):
                errs.append("k_support: every probability must be > 0")
            elif abs(sum(w for _, w in ks) - 1.0) > 1e-12:
                errs.append("k_support: probabilities must sum to 1")
    elif kind != "trichotomy-sweep":
        if not cfg.graphs:
            errs.append("graphs: at least one graph is required for setting 'graph'")
        for i, g in enumerate(cfg.graphs):
            if not isinstance(g, dict) or "kind" not in g:
                errs.append(f"graphs[{i}]: must be a table with a 'kind' key")
                continue
            extra = set(g) - {"kind", "d", "edge_prob", "m_attach", "seed"}
            if extra:
                errs.append(f"graphs[{i}]: unknown keys {sorted(extra)}")
            if _is_int(cfg.node_count) and cfg.node_count >= 2:
                spec = GraphSpec(g["kind"], cfg.node_count, g.get("d"), g.get("edge_prob"), g.get("m_attach"))
                errs.extend(f"graphs[{i}]: {m}" for m in spec.problems())
    if kind == "oracle-verify" and _is_int(cfg.node_count) and cfg.node_count > 14:
        errs.append("node_count: exact oracle needs node_count <= 14")
    for i, s in enumerate(cfg.schedules):
        if not _schedule_name_ok(s):
            errs.append(f"schedules[{i}]: expected 'first', 'last', 'consecutive:<t>' or 'slots:<a,b,...>' (got {s!r})")
    for i, h in enumerate(cfg.horizons):
        if not (isinstance(h, list) and len(h) == 2 and all(_is_int(x) and x >= 1 for x in h)):
            errs.append(f"horizons[{i}]: must be a [T, M] pair of positive integers")
    if errs:
        raise ConfigError(errs)
    return cfg


def _schedule_name_ok(s) -> bool:
    if not isinstance(s, str):
        return False
    if s in ("first", "last"):
        return True
    head, _, tail = s.partition(":")
    if head == "consecutive":
        return tail.isdigit()
    if head == "slots":
        return all(t.strip().isdigit() for t in tail.split(",")) if tail.strip() else True
    return False


def validate_config(text: str) -> ExperimentConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"<parse>: {exc}"]) from None
    return config_from_dict(raw)
