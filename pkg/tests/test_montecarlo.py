import numpy as np
import pytest

from opinfluence.dynamics import DynamicsParams, GraphNeighborhood, KDistribution, RandomSample, one_step_delta_distribution
from opinfluence.graphs import GraphSpec, generate
from opinfluence.montecarlo import (
    RandomInitial,
    TrialConfig,
    _draw_streams,
    combined_se,
    compare_strategies,
    estimate,
    estimate_conditioned,
    run_conditioned_hub_trial,
    run_trial,
    simulate,
)
from opinfluence.oracle import StateDistribution, expected_terminal
from opinfluence.schedules import Horizon, InfluenceSchedule, first_slots, last_slots
from opinfluence.state import OpinionVector


def make_cfg(M=20, T=60, b=0.2, p=0.3, q=0.6, p_inf=0.0, q_inf=0.75, graph="complete", n=200, seed=1, initial=None, mode=None):
    h = Horizon(T, b)
    if mode is None:
        mode = GraphNeighborhood(generate(GraphSpec(graph, M, m_attach=2, edge_prob=0.2, seed=3)))
    return TrialConfig(
        DynamicsParams(p, q, p_inf, q_inf, M),
        mode,
        h,
        first_slots(h),
        initial or RandomInitial(0.5),
        n,
        seed,
    )


def test_initial_state_has_fixed_yes_count():
    init = RandomInitial(0.37)
    bits = init.draw(50, np.random.default_rng(0))
    assert bits.sum() == 18
    pinned = RandomInitial(0.5, pinned=((0, 1),)).draw(10, np.random.default_rng(1))
    assert pinned[0] == 1 and pinned.sum() == 5


def test_zero_rates_give_flat_paths():
    cfg = make_cfg(p=0, q=0, q_inf=0)
    tr = run_trial(cfg, 0)
    assert np.all(tr.beta_series == tr.beta_series[0])


def test_full_budget_pure_yes_influence_is_monotone():
    cfg = make_cfg(b=1.0, p_inf=0.0, q_inf=1.0)
    paths = simulate(cfg, range(50))
    assert np.all(np.diff(paths, axis=1) >= 0)


def test_trial_determinism_and_chunk_independence():
    cfg = make_cfg(graph="barabasi_albert")
    a = run_trial(cfg, 7).beta_series
    assert np.array_equal(a, run_trial(cfg, 7).beta_series)
    assert np.array_equal(simulate(cfg, range(10))[7], a)


def test_estimate_reproducible():
    cfg = make_cfg(n=300)
    e1, e2 = estimate(cfg), estimate(cfg)
    assert e1.mean_terminal == e2.mean_terminal and np.array_equal(e1.mean_series, e2.mean_series)


def test_deterministic_dynamics_have_zero_std_error():
    cfg = make_cfg(p=0, q=0, q_inf=0, initial=OpinionVector.from_bits([1] * 10 + [0] * 10))
    assert estimate(cfg).std_error == 0.0


@pytest.mark.parametrize("graph", ["complete", "erdos_renyi", "hub_spoke"])
def test_paths_move_at_most_one_individual_per_slot(graph):
    cfg = make_cfg(graph=graph, p=0.9, q=0.9)
    paths = simulate(cfg, range(100))
    assert np.max(np.abs(np.diff(paths, axis=1))) <= 1 / 20 + 1e-15
    assert np.all((paths >= 0) & (paths <= 1))


def test_consensus_is_absorbing_without_influence():
    cfg = make_cfg(M=6, T=400, b=0.0, p=1.0, q=1.0)
    for path in simulate(cfg, range(100)):
        hits = np.flatnonzero((path == 0) | (path == 1))
        if hits.size:
            assert np.all(path[hits[0]:] == path[hits[0]])


def test_duplicate_schedules_give_identical_summaries():
    cfg = make_cfg()
    h = cfg.horizon
    (s1, e1), (s2, e2) = compare_strategies(cfg, [last_slots(h), last_slots(h)])
    assert e1.mean_terminal == e2.mean_terminal and e1.std_error == e2.std_error


def test_compare_ranks_by_mean():
    cfg = make_cfg(n=400)
    h = cfg.horizon
    ranked = compare_strategies(cfg, [last_slots(h), first_slots(h), InfluenceSchedule(frozenset())])
    means = [e.mean_terminal for _, e in ranked]
    assert means == sorted(means, reverse=True)
    assert ranked[-1][0] == InfluenceSchedule(frozenset())


def test_p_equals_q_no_detectable_gap():
    cfg = make_cfg(M=30, T=120, p=0.5, q=0.5, n=4000)
    h = cfg.horizon
    ranked = dict((s.to_string(), e) for s, e in compare_strategies(cfg, [first_slots(h), last_slots(h)]))
    F, L = ranked[first_slots(h).to_string()], ranked[last_slots(h).to_string()]
    assert abs(F.mean_terminal - L.mean_terminal) <= 3 * combined_se(F, L)


def test_streams_do_not_depend_on_schedule():
    cfg = make_cfg()
    a = _draw_streams(cfg, 3, False, None)
    b = _draw_streams(cfg.with_schedule(last_slots(cfg.horizon)), 3, False, None)
    for x, y in zip(a, b):
        assert (x is None and y is None) or np.array_equal(x, y)


def test_conditioned_hub_selects_hub_exactly_once():
    cfg = make_cfg(M=15, T=15, graph="hub_spoke")
    for i in range(200):
        _, chosen, *_ = _draw_streams(cfg, i, True, None)
        assert np.count_nonzero(chosen == 0) == 1
    _, chosen, *_ = _draw_streams(cfg, 0, True, 9)
    assert chosen[8] == 0


def test_conditioned_hub_slot_is_uniform():
    cfg = make_cfg(M=8, T=8, graph="hub_spoke")
    slots = [int(np.flatnonzero(_draw_streams(cfg, i, True, None)[1] == 0)[0]) for i in range(8000)]
    counts = np.bincount(slots, minlength=8)
    expected = 1000
    assert np.all(np.abs(counts - expected) < 4 * np.sqrt(expected * (1 - 1 / 8)))


def test_conditioned_single_slot_horizon_picks_hub():
    cfg = make_cfg(M=10, T=1, b=0.0, graph="hub_spoke")
    _, chosen, *_ = _draw_streams(cfg, 0, True, None)
    assert chosen.tolist() == [0]
    run_conditioned_hub_trial(cfg, 0)


def test_conditioned_requires_hub_spoke():
    with pytest.raises(ValueError, match="hub-and-spoke"):
        run_conditioned_hub_trial(make_cfg(graph="complete"), 0)


def test_hub_influence_protects_hub_opinion():
    # hub starts Yes and is influenced exactly when selected: it can never flip
    M = T = 40
    h = Horizon(T, 0.25)
    g = generate(GraphSpec("hub_spoke", M))
    cfg = TrialConfig(
        DynamicsParams(0.9, 0.3, 0.0, 0.75, M), GraphNeighborhood(g), h,
        InfluenceSchedule.of(range(11, 21)), RandomInitial(0.5, pinned=((0, 1),)), 300, 2,
    )
    covering = estimate_conditioned(cfg, hub_slot=15)
    missing = estimate_conditioned(cfg.with_schedule(InfluenceSchedule.of(range(21, 31))), hub_slot=15)
    assert covering.mean_terminal > missing.mean_terminal


@pytest.mark.parametrize(
    "mode",
    [
        GraphNeighborhood(generate(GraphSpec("barabasi_albert", 6, m_attach=2, seed=1))),
        RandomSample(KDistribution(((1, 0.5), (3, 0.5)))),
    ],
    ids=["graph", "random"],
)
def test_first_step_law_matches_exact(mode):
    s = OpinionVector.from_bits([1, 0, 1, 1, 0, 0])
    prm = DynamicsParams(0.6, 0.8, 0.1, 0.9, 6)
    h = Horizon(1, 0.0)
    cfg = TrialConfig(prm, mode, h, InfluenceSchedule(frozenset()), s, 40_000, 5)
    deltas = np.rint((simulate(cfg, range(cfg.n_trials))[:, 1] - 0.5) * 6).astype(int)
    exact = one_step_delta_distribution(s, mode, False, prm)
    for x in (-1, 1):
        freq = np.mean(deltas == x)
        assert abs(freq - exact[x]) < 4 * np.sqrt(exact[x] * (1 - exact[x]) / cfg.n_trials)


@pytest.mark.parametrize("setting", ["random", "hub_spoke"])
def test_monte_carlo_agrees_with_exact_chain(setting):
    M, T = 4, 6
    h = Horizon(T, 1 / 3)
    prm = DynamicsParams(0.2, 0.8, 0.0, 0.9, M)
    if setting == "random":
        mode = RandomSample(KDistribution(((1, 0.5), (2, 0.5))))
    else:
        mode = GraphNeighborhood(generate(GraphSpec("hub_spoke", M)))
    sched = InfluenceSchedule.of([2, 5])
    cfg = TrialConfig(prm, mode, h, sched, RandomInitial(0.5), 100_000, 11)
    est = estimate(cfg)
    exact = expected_terminal(StateDistribution.uniform_with_yes(M, 2), mode, prm, h, sched)
    assert abs(est.mean_terminal - exact) < 4 * est.std_error
