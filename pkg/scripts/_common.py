import argparse
from pathlib import Path

from opinfluence.config import config_from_dict, validate_config
from opinfluence.experiments import run_experiment

CONFIGS = Path(__file__).parent / "configs"


def run_config(name: str, description: str) -> None:
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--trials", type=int, help="override n_trials")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = validate_config((CONFIGS / f"{name}.toml").read_text())
    overrides = {k: v for k, v in (("n_trials", args.trials), ("seed", args.seed), ("out", args.out)) if v is not None}
    if overrides:
        cfg = config_from_dict({**cfg.to_dict(), **overrides})
    for path in run_experiment(cfg):
        print(path)
