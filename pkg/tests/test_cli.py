import csv
import json

import pytest

from opinfluence import experiments
from opinfluence.cli import main
from opinfluence.config import DEFAULTS, ConfigError, config_from_dict, validate_config
from opinfluence.experiments import load_manifest, resolve_schedule, run_experiment
from opinfluence.graphs import read_edge_list
from opinfluence.schedules import Horizon

SMALL = """
kind = "custom"
seed = 4
n_trials = 40
node_count = 12
T = 30
b = 0.2
q_inf = 0.9
grid = [[0.3, 0.6], [0.6, 0.3]]
schedules = ["first", "last", "consecutive:5"]

[[graphs]]
kind = "barabasi_albert"
m_attach = 2
"""


def diagnostics(text):
    with pytest.raises(ConfigError) as info:
        validate_config(text)
    return info.value.diagnostics


def test_out_of_range_budget_is_reported():
    diags = diagnostics('kind = "trichotomy-sweep"\nbudgets = [0.1, 1.5]\n')
    assert diags == ["budgets[1]: b must lie in [0,1] (got 1.5)"]


def test_ineffective_influence_is_reported_per_cell():
    diags = diagnostics('kind = "trichotomy-sweep"\nq_inf = 0.5\ngrid = [[0.2, 0.2], [0.2, 0.8]]\n')
    assert len(diags) == 1
    assert diags[0].startswith("grid[1]: effective influence requires p_inf < p and q_inf > q")


def test_all_problems_reported_together():
    diags = diagnostics('kind = "custom"\nT = 0\nbogus = 1\nschedules = ["middle"]\n')
    heads = sorted(d.split(":")[0] for d in diags)
    assert heads == ["T", "bogus", "graphs", "schedules[0]"]


def test_unknown_kind_and_bad_toml():
    assert diagnostics('kind = "figure9"')[0].startswith("kind:")
    assert diagnostics("kind = ")[0].startswith("<parse>")


def test_effective_check_can_be_disabled():
    cfg = validate_config('kind = "trichotomy-sweep"\nq_inf = 0.5\neffective = false\n')
    assert cfg.q_inf == 0.5


def test_minimal_config_takes_kind_defaults(tmp_path):
    cfg = validate_config(f'kind = "oracle-verify"\nout = "{tmp_path}"\n')
    for key, val in DEFAULTS["oracle-verify"].items():
        assert getattr(cfg, key) == val
    run_experiment(cfg)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["node_count"] == 4 and manifest["config"]["grid"] == DEFAULTS["oracle-verify"]["grid"]
    assert manifest["outputs"] == ["oracle.csv", "oracle_report.json"]
    reports = json.loads((tmp_path / "oracle_report.json").read_text())
    assert all(r["prediction_holds"] for r in reports)


def test_resolve_schedule_names():
    h = Horizon(10, 0.3)
    assert resolve_schedule("consecutive:2", h).slots == frozenset({2, 3, 4})
    assert resolve_schedule("slots:1,5,9", h).slots == frozenset({1, 5, 9})
    with pytest.raises(ValueError):
        resolve_schedule("slots:1,2,3,4", h)


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_custom_run_writes_tables(tmp_path):
    cfg = config_from_dict({**validate_config(SMALL).to_dict(), "out": str(tmp_path)})
    paths = run_experiment(cfg)
    assert [p.name for p in paths] == ["results.csv", "series.csv", "comparison.csv", "manifest.json"]
    res = read_rows(tmp_path / "results.csv")
    assert len(res) == 2 * 3
    assert {r["schedule_id"] for r in res} == {"first", "last", "consecutive:5"}
    assert all(0 <= float(r["mean_terminal"]) <= 1 for r in res)
    assert len(read_rows(tmp_path / "series.csv")) == 2 * 3 * 31
    comp = read_rows(tmp_path / "comparison.csv")
    assert [r["verdict"] in ("first", "last", "indistinguishable") for r in comp] == [True, True]


def test_manifest_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(write(tmp_path / "c.toml", SMALL)), "--out", str(a)]) == 0
    assert main(["run", str(a / "manifest.json"), "--out", str(b)]) == 0
    for name in ("results.csv", "series.csv", "comparison.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert load_manifest(b / "manifest.json").seed == 4


def test_failed_run_leaves_no_partial_output(tmp_path, monkeypatch):
    def boom(*_):
        raise RuntimeError("disk full")

    monkeypatch.setattr(experiments, "combined_se", boom)
    out = tmp_path / "partial"
    cfg = config_from_dict({**validate_config(SMALL).to_dict(), "out": str(out)})
    with pytest.raises(RuntimeError):
        run_experiment(cfg)
    assert not out.exists()


def write(path, text):
    path.write_text(text)
    return path


def test_cli_reports_config_errors(tmp_path, capsys):
    bad = write(tmp_path / "bad.toml", 'kind = "custom"\nb = 1.5\nq_inf = 2.0\n')
    assert main(["run", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "budgets[0]: b must lie in [0,1] (got 1.5)" in err
    assert "q_inf: must lie in [0,1]" in err


def test_cli_verify_trichotomy(capsys):
    assert main(["verify-trichotomy"]) == 0
    assert "54/54 cells agree" in capsys.readouterr().out


def test_cli_oracle(capsys):
    assert main(["oracle", "--p", "0.8", "--q", "0.2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert "5,6" in rep["argmax"]
    assert main(["oracle", "--graph", "hub_spoke", "--k", "ignored"]) in (0, 1)


def test_cli_graph_gen_round_trip(tmp_path, capsys):
    path = tmp_path / "g.txt"
    assert main(["graph-gen", "--kind", "barabasi_albert", "--M", "30", "--m-attach", "2", "--seed", "5", "--out", str(path)]) == 0
    g = read_edge_list(path)
    assert g.node_count == 30 and g.edge_count == 3 + 2 * 27
    assert f"E={g.edge_count}" in capsys.readouterr().out
    assert main(["graph-gen", "--kind", "d_regular", "--M", "5", "--d", "3"]) == 2
