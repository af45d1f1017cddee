"""Config-driven experiment pipelines writing CSV tables and a JSON manifest."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, config_from_dict
from .dynamics import DynamicsParams, GraphNeighborhood, KDistribution, RandomSample
from .graphs import generate
from .meanfield import OdeParams, terminal_from_plan
from .montecarlo import RandomInitial, TrialConfig, combined_se, estimate
from .oracle import StateDistribution, verify_ordering
from .schedules import Horizon, InfluenceSchedule, consecutive, first_slots, last_slots

log = logging.getLogger(__name__)

Z_THRESHOLD = 3.0


def resolve_schedule(name: str, h: Horizon) -> InfluenceSchedule:
    if name == "first":
        return first_slots(h)
    if name == "last":
        return last_slots(h)
    head, _, tail = name.partition(":")
    if head == "consecutive":
        return consecutive(h, int(tail))
    return InfluenceSchedule.parse(tail).check(h)


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


class _Writer:
    """Tracks written files so a failed run can remove its partial output."""

    def __init__(self, out: Path):
        self.out = out
        self.created_dir = not out.exists()
        self.files: list[Path] = []

    def csv(self, name, header, rows):
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        self.files.append(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(x) for x in r])
        return path

    def text(self, name, text):
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        self.files.append(path)
        path.write_text(text)
        return path

    def cleanup(self):
        for f in self.files:
            f.unlink(missing_ok=True)
        if self.created_dir and self.out.exists() and not any(self.out.iterdir()):
            self.out.rmdir()


def run_experiment(cfg: ExperimentConfig) -> list[Path]:
    """Run the configured pipeline; returns the written paths (manifest last)."""
    w = _Writer(Path(cfg.out))
    try:
        runner = {
            "figure2": _run_monte_carlo,
            "figure5": _run_monte_carlo,
            "custom": _run_monte_carlo,
            "trichotomy-sweep": _run_trichotomy,
            "oracle-verify": _run_oracle,
        }[cfg.kind]
        runner(cfg, w)
        manifest = {
            "library": "opinfluence",
            "version": __version__,
            "config": cfg.to_dict(),
            "outputs": [f.name for f in w.files],
        }
        w.text("manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    except BaseException:
        w.cleanup()
        raise
    return list(w.files)


def load_manifest(path) -> ExperimentConfig:
    data = json.loads(Path(path).read_text())
    return config_from_dict(data["config"])


MC_PARAM_COLS = [
    "kind", "graph", "graph_seed", "setting", "M", "T", "b", "budget",
    "p", "q", "p_inf", "q_inf", "beta0", "n_trials", "base_seed",
]


def _mc_cases(cfg: ExperimentConfig):
    if cfg.setting == "random":
        kd = KDistribution(tuple((int(k), float(w)) for k, w in cfg.k_support))
        yield f"random_sample(k={cfg.k_support})", "", RandomSample(kd)
    else:
        for spec in cfg.graph_specs():
            yield spec.label(), spec.seed, GraphNeighborhood(generate(spec))


def _run_monte_carlo(cfg: ExperimentConfig, w: _Writer):
    results, series, comparisons = [], [], []
    for label, gseed, mode in _mc_cases(cfg):
        for b in cfg.budgets:
            h = Horizon(cfg.T, b)
            scheds = [(name, resolve_schedule(name, h)) for name in cfg.schedules]
            for p, q in cfg.grid:
                params = DynamicsParams(p, q, cfg.p_inf, cfg.q_inf, cfg.node_count, cfg.effective)
                for beta0 in cfg.beta0:
                    base = [cfg.kind, label, gseed, cfg.setting, cfg.node_count, cfg.T, b, h.budget,
                            p, q, cfg.p_inf, cfg.q_inf, beta0, cfg.n_trials, cfg.seed]
                    trial = TrialConfig(params, mode, h, scheds[0][1], RandomInitial(beta0), cfg.n_trials, cfg.seed)
                    summ = {}
                    for name, s in scheds:
                        e = estimate(trial.with_schedule(s))
                        summ[name] = e
                        log.info("%s p=%s q=%s b=%s %s: %.5f +- %.5f", label, p, q, b, name, e.mean_terminal, e.std_error)
                        results.append(base + [name, s.to_string(), e.mean_terminal, e.std_error])
                        series.extend(base + [name, t, v] for t, v in enumerate(e.mean_series.tolist()))
                    if "first" in summ and "last" in summ:
                        F, L = summ["first"], summ["last"]
                        diff = F.mean_terminal - L.mean_terminal
                        se = combined_se(F, L)
                        z = diff / se if se > 0 else (0.0 if diff == 0 else float(np.sign(diff)) * np.inf)
                        verdict = "first" if z > Z_THRESHOLD else "last" if z < -Z_THRESHOLD else "indistinguishable"
                        comparisons.append(base + [diff, se, z, verdict])
    w.csv("results.csv", MC_PARAM_COLS + ["schedule_id", "schedule", "mean_terminal", "std_error"], results)
    w.csv("series.csv", MC_PARAM_COLS + ["schedule_id", "slot", "mean_beta"], series)
    if comparisons:
        w.csv("comparison.csv", MC_PARAM_COLS + ["first_minus_last", "combined_se", "z", "verdict"], comparisons)


def trichotomy_rows(cfg: ExperimentConfig) -> list[list]:
    rows = []
    for T, M in cfg.horizon_pairs():
        for b in cfg.budgets:
            h = Horizon(T, b)
            for p, q in cfg.grid:
                for beta0 in cfg.beta0:
                    prm = OdeParams(p, q, cfg.p_inf, cfg.q_inf, M, beta0)
                    sf = terminal_from_plan(prm, h, first_slots(h))
                    sl = terminal_from_plan(prm, h, last_slots(h))
                    diff = sf - sl
                    sign = 0 if abs(diff) <= 1e-10 else int(np.sign(diff))
                    expected = int(np.sign(q - p))
                    rows.append([T, M, b, h.budget, p, q, cfg.p_inf, cfg.q_inf, beta0,
                                 sf, sl, diff, sign, expected, int(sign == expected)])
    return rows


TRICHOTOMY_COLS = ["T", "M", "b", "budget", "p", "q", "p_inf", "q_inf", "beta0",
                   "beta_first", "beta_last", "first_minus_last", "sign_diff", "sign_q_minus_p", "agrees"]


def _run_trichotomy(cfg: ExperimentConfig, w: _Writer):
    w.csv("trichotomy.csv", TRICHOTOMY_COLS, trichotomy_rows(cfg))


def oracle_reports(cfg: ExperimentConfig):
    M = cfg.node_count
    if cfg.setting == "random":
        mode = RandomSample(KDistribution(tuple((int(k), float(w)) for k, w in cfg.k_support)))
    else:
        mode = GraphNeighborhood(generate(cfg.graph_specs()[0]))
    out = []
    for b in cfg.budgets:
        h = Horizon(cfg.T, b)
        for p, q in cfg.grid:
            params = DynamicsParams(p, q, cfg.p_inf, cfg.q_inf, M, cfg.effective)
            for beta0 in cfg.beta0:
                init = StateDistribution.uniform_with_yes(M, int(np.floor(beta0 * M + 1e-9)))
                out.append((b, beta0, verify_ordering(mode, params, h, init)))
    return out


def _run_oracle(cfg: ExperimentConfig, w: _Writer):
    rows, reports = [], []
    for b, beta0, rep in oracle_reports(cfg):
        prm = rep.params
        for sched, val in rep.values.items():
            rows.append([prm["M"], prm["T"], b, prm["budget"], prm["p"], prm["q"], prm["p_inf"], prm["q_inf"],
                         beta0, sched, val, int(sched in rep.argmax), int(sched in rep.argmin)])
        reports.append({**json.loads(rep.to_json()), "beta0": beta0})
    w.csv("oracle.csv", ["M", "T", "b", "budget", "p", "q", "p_inf", "q_inf", "beta0",
                         "schedule", "expected_terminal", "in_argmax", "in_argmin"], rows)
    w.text("oracle_report.json", json.dumps(reports, indent=2, sort_keys=True) + "\n")
