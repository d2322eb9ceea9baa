import math

import numpy as np
import pytest

from bdgraph.graphs import Graph, build_complete, build_cycle, build_path, build_star
from bdgraph.model import ModelParams, jump_probabilities
from bdgraph.simulate import (
    ProxySettings,
    StopRule,
    Trajectory,
    ctmc_step,
    detect_event_B,
    detect_pair_event,
    dtmc_step,
    explosion_proxy,
    replicate,
    run,
)
from bdgraph.stats import chi_square_pvalue, four_sigma_category_check


def rng_from(seed):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def sample_step_counts(g, params, state, n_samples, seed):
    """Empirical move counts from repeated dtmc_step calls at a fixed state."""
    n = g.vertex_count
    counts = np.zeros(2 * n)
    rng = rng_from(seed)
    state = np.asarray(state, dtype=np.int64)
    for _ in range(n_samples):
        _, ev = dtmc_step(g, params, state, rng)
        counts[(0 if ev.direction > 0 else n) + ev.vertex] += 1
    return counts


# --- one-step laws -------------------------------------------------------------

def test_dtmc_step_two_vertex_weights():
    g = build_path(2)
    params = ModelParams(math.log(2.0), 0.0)
    counts = sample_step_counts(g, params, [1, 0], 40_000, seed=2)
    probs = jump_probabilities(g, params, [1, 0])
    assert probs == pytest.approx([0.5, 0.25, 0.25, 0.0])
    assert four_sigma_category_check(counts, probs)


def test_dtmc_step_zero_state_uniform_births():
    g = build_star(3)
    counts = sample_step_counts(g, ModelParams(1.0, -2.0), [0] * 4, 20_000, seed=3)
    assert counts[4:].sum() == 0  # no deaths from zero
    assert four_sigma_category_check(counts[:4], np.full(4, 0.25))


def test_dtmc_step_chi_square_million():
    # One-step exactness at a random 5-vertex state, 1e6 draws.
    g = build_cycle(5)
    params = ModelParams(0.4, -0.3)
    state = [2, 0, 1, 3, 1]
    counts = sample_step_counts(g, params, state, 1_000_000, seed=7)
    probs = jump_probabilities(g, params, state)
    assert chi_square_pvalue(counts, probs) > 0.001
    assert four_sigma_category_check(counts, probs)


def test_log_domain_sampler_invariance_extreme_state():
    # Max potential 500: the shifted sampler must agree with the shifted
    # exact law, with no overflow or NaN anywhere.
    g = build_path(2)
    params = ModelParams(1.0, 0.0)
    state = [500, 3]
    probs = jump_probabilities(g, params, state)
    assert np.isfinite(probs).all()
    counts = sample_step_counts(g, params, state, 20_000, seed=11)
    assert four_sigma_category_check(counts, probs)


def test_ctmc_step_holding_times():
    # Single vertex at 0: total rate 1, mean holding time 1.
    g0 = Graph(1, ((),))
    params = ModelParams(2.5, 0.0)
    rng = rng_from(4)
    times = np.array([ctmc_step(g0, params, [0], rng)[1].time for _ in range(100_000)])
    assert times.mean() == pytest.approx(1.0, abs=3.0 / math.sqrt(100_000) * 1.0 + 0.01)
    # Two-vertex example: R = 4, mean holding 0.25.
    g = build_path(2)
    params = ModelParams(math.log(2.0), 0.0)
    rng = rng_from(5)
    times = np.array([ctmc_step(g, params, [1, 0], rng)[1].time for _ in range(100_000)])
    se = 0.25 / math.sqrt(100_000)
    assert abs(times.mean() - 0.25) < 3 * se + 1e-3


# --- run ------------------------------------------------------------------------

def test_run_zero_steps():
    g = build_path(2)
    traj, summary = run(g, ModelParams(-1.0, 0.0), [2, 1], StopRule(max_steps=0), seed=0)
    assert len(traj) == 0
    assert summary.step_count == 0
    assert summary.final_configuration == (2, 1)


def test_run_deterministic():
    g = build_cycle(4)
    p = ModelParams(0.2, 0.1)
    out1 = run(g, p, [0] * 4, StopRule(max_steps=4000), seed=9)
    out2 = run(g, p, [0] * 4, StopRule(max_steps=4000), seed=9)
    assert np.array_equal(out1[0].vertices, out2[0].vertices)
    assert np.array_equal(out1[0].directions, out2[0].directions)
    assert out1[1] == out2[1]


def test_run_matches_stepwise_stream():
    g = build_star(2)
    p = ModelParams(-0.5, 0.3)
    traj, _ = run(g, p, [1, 0, 2], StopRule(max_steps=500), seed=21)
    rng = rng_from(21)
    state = np.array([1, 0, 2], dtype=np.int64)
    for i in range(500):
        state, ev = dtmc_step(g, p, state, rng)
        assert ev.vertex == traj.vertices[i]
        assert ev.direction == traj.directions[i]
    assert tuple(state) == tuple(traj.final_configuration)


def test_ctmc_run_matches_stepwise_stream():
    g = build_path(2)
    p = ModelParams(-1.0, 0.2)
    traj, _ = run(g, p, [0, 0], StopRule(max_steps=300), seed=33, chain="ctmc")
    rng = rng_from(33)
    state = np.array([0, 0], dtype=np.int64)
    t = 0.0
    for i in range(300):
        state, ev = ctmc_step(g, p, state, rng)
        t += ev.time
        assert ev.vertex == traj.vertices[i]
        assert t == pytest.approx(traj.times[i], rel=1e-12)


def test_conservation_and_no_death_from_zero():
    g = build_cycle(5)
    p = ModelParams(0.1, 0.05)
    traj, summary = run(g, p, [1, 0, 0, 2, 0], StopRule(max_steps=20_000), seed=13)
    inc = np.asarray(summary.increments)
    dec = np.asarray(summary.decrements)
    assert np.array_equal(
        inc - dec, traj.final_configuration - traj.initial
    )
    # every death leaves a non-negative spin behind
    states_before = traj.spins_at_steps(np.arange(len(traj)))
    deaths = traj.directions < 0
    assert (states_before[deaths, traj.vertices[deaths]] >= 1).all()


def test_ctmc_times_strictly_increasing():
    g = build_path(2)
    traj, _ = run(g, ModelParams(-1.0, 0.2), [0, 0], StopRule(max_steps=50_000), seed=17, chain="ctmc")
    assert (np.diff(traj.times) > 0).all()
    assert traj.times[0] > 0


def test_single_vertex_occupancy_matches_exact():
    from bdgraph.exact import truncated_stationary

    g0 = Graph(1, ((),))
    p = ModelParams(-1.0, 0.0)
    traj, _ = run(g0, p, [0], StopRule(max_steps=1_000_000), seed=29, chain="ctmc")
    occ = traj.time_weighted_occupancy()
    dist = truncated_stationary(g0, p, 20)
    assert abs(occ.get((0,), 0.0) - dist.prob([0])) < 0.01


def test_max_total_spin_and_time_stops():
    g = build_star(3)
    p = ModelParams(1.0, 0.5)
    _, summary = run(g, p, [0] * 4, StopRule(max_steps=10_000, max_total_spin=50), seed=1)
    assert summary.stop_reason == "max_total_spin"
    assert sum(summary.final_configuration) >= 50
    _, summary = run(
        g, ModelParams(-1.0, 0.1), [0] * 4, StopRule(max_steps=10_000, max_time=5.0), seed=1, chain="ctmc"
    )
    assert summary.stop_reason == "max_time"
    assert summary.simulated_time == pytest.approx(5.0)


def test_proxy_stop_rule_requires_ctmc():
    g = build_path(2)
    with pytest.raises(ValueError):
        run(g, ModelParams(1.0, 0.0), [0, 0], StopRule(max_steps=10, explosion_proxy=ProxySettings()), seed=0)


def test_summary_only_mode_flagged():
    g = build_path(2)
    p = ModelParams(-1.0, 0.2)
    traj, summary = run(
        g, p, [0, 0], StopRule(max_steps=5000), seed=3, trajectory_budget=1000
    )
    assert traj is None
    assert summary.summary_only
    assert summary.step_count == 5000
    # aggregates still exact
    _, full = run(g, p, [0, 0], StopRule(max_steps=5000), seed=3)
    assert summary.increments == full.increments
    assert summary.decrements == full.decrements
    assert summary.final_configuration == full.final_configuration


# --- detectors -----------------------------------------------------------------

def synthetic_trajectory(g, vertices, directions, chain="dtmc"):
    vertices = np.asarray(vertices, dtype=np.int32)
    directions = np.asarray(directions, dtype=np.int8)
    return Trajectory(
        graph=g,
        chain=chain,
        initial=np.zeros(g.vertex_count, dtype=np.int64),
        vertices=vertices,
        directions=directions,
        times=None,
        log_total_rates=None,
        final_time=None,
    )


def test_detect_event_b_synthetic():
    g = build_star(3)
    # vertex 2 takes over from step 3 onward
    traj = synthetic_trajectory(g, [0, 1, 3, 2, 2, 2, 2, 2], [1] * 8)
    assert detect_event_B(traj, window=4) == (3, 2)
    # a death inside the window spoils it
    traj = synthetic_trajectory(g, [2] * 8, [1, 1, 1, 1, 1, -1, 1, 1])
    assert detect_event_B(traj, window=4) is None
    with pytest.raises(ValueError):
        detect_event_B(traj, window=9)


def test_detect_event_b_whole_run_single_vertex():
    g = build_star(3)
    traj = synthetic_trajectory(g, [1] * 6, [1] * 6)
    assert detect_event_B(traj, window=3) == (0, 1)


def test_detect_pair_event_synthetic():
    g = build_path(2)
    traj = synthetic_trajectory(g, [0, 1] * 5, [1] * 10)
    pe = detect_pair_event(traj, window=10)
    assert (pe.x1, pe.x2) == (0, 1) and pe.adjacent
    assert pe.frac1 == pytest.approx(0.5) and pe.frac2 == pytest.approx(0.5)
    # single vertex only -> None
    traj = synthetic_trajectory(g, [1] * 10, [1] * 10)
    assert detect_pair_event(traj, window=10) is None


def test_detect_pair_event_nonadjacent_anomaly():
    g = build_path(3)  # 0-1-2; vertices 0 and 2 are not adjacent
    traj = synthetic_trajectory(g, [0, 2] * 5, [1] * 10)
    pe = detect_pair_event(traj, window=10)
    assert pe is not None and not pe.adjacent


def test_pair_event_in_run_summary():
    g = build_cycle(4)
    _, summary = run(g, ModelParams(0.5, 1.0), [0] * 4, StopRule(max_steps=30_000), seed=77)
    pe = summary.pair_event
    assert pe is not None and pe.adjacent
    assert 0.4 <= pe.frac1 <= 0.6 and 0.4 <= pe.frac2 <= 0.6


# --- explosion proxy --------------------------------------------------------------

def test_proxy_triggers_fast_single_vertex():
    g0 = Graph(1, ((),))
    p = ModelParams(1.0, 0.0)
    for ss in np.random.SeedSequence(55).spawn(10):
        traj, summary = run(
            g0, p, [0], StopRule(max_steps=10_000, explosion_proxy=ProxySettings()), ss, chain="ctmc"
        )
        assert summary.explosion_flag == "proxy_triggered"
        assert summary.simulated_time < 10.0
        assert explosion_proxy(traj)


def test_proxy_never_triggers_in_ergodic_regime():
    g = build_complete(3)
    traj, summary = run(
        g,
        ModelParams(-1.0, 0.25),
        [0, 0, 0],
        StopRule(max_steps=1_000_000, explosion_proxy=ProxySettings()),
        seed=4,
        chain="ctmc",
    )
    assert summary.explosion_flag == "none"
    assert summary.stop_reason == "max_steps"


def test_proxy_false_on_short_all_zero_run():
    g = build_path(2)
    traj, _ = run(g, ModelParams(-1.0, 0.0), [0, 0], StopRule(max_steps=50), seed=6, chain="ctmc")
    assert explosion_proxy(traj, ProxySettings(depth=100)) is False


# --- replicate ---------------------------------------------------------------------

def test_event_b_detection_frequency_independent_components():
    # beta = 0: independent explosive chains, exactly one takes over.
    g = build_path(2)
    p = ModelParams(2.0, 0.0)
    res = replicate(g, p, [0, 0], StopRule(max_steps=10_000), "dtmc", 50, base_seed=314, window=5_000)
    assert res.aggregate["event_b_frequency"] >= 0.95


def test_summary_only_ctmc_times_match():
    g = build_path(2)
    p = ModelParams(-1.0, 0.2)
    _, chunked = run(
        g, p, [0, 0], StopRule(max_steps=3000), seed=8, chain="ctmc", trajectory_budget=500
    )
    _, full = run(g, p, [0, 0], StopRule(max_steps=3000), seed=8, chain="ctmc")
    assert chunked.summary_only
    assert chunked.simulated_time == pytest.approx(full.simulated_time, rel=1e-12)
    assert chunked.final_configuration == full.final_configuration


def test_replicate_one_equals_single_run():
    g = build_cycle(4)
    p = ModelParams(0.5, 1.0)
    stop = StopRule(max_steps=2000)
    result = replicate(g, p, [0] * 4, stop, "dtmc", 1, base_seed=123)
    single = run(g, p, [0] * 4, stop, np.random.SeedSequence(123).spawn(1)[0], chain="dtmc")[1]
    assert result.summaries[0] == single
    assert result.aggregate["mean_growth_rates"] == pytest.approx(list(single.growth_rates))


def test_replicate_deterministic_and_frequencies():
    g = build_star(3)
    p = ModelParams(1.0, 0.5)
    stop = StopRule(max_steps=5000)
    r1 = replicate(g, p, [0] * 4, stop, "dtmc", 8, base_seed=9)
    r2 = replicate(g, p, [0] * 4, stop, "dtmc", 8, base_seed=9)
    assert r1.aggregate == r2.aggregate
    manual = sum(1 for s in r1.summaries if s.event_b is not None) / 8
    assert r1.aggregate["event_b_frequency"] == manual


def test_replicate_keep_trajectories():
    g = build_path(2)
    res = replicate(
        g, ModelParams(-1.0, 0.1), [0, 0], StopRule(max_steps=100), "dtmc", 3,
        base_seed=1, keep_trajectories=True,
    )
    trajs = res.aggregate["trajectories"]
    assert len(trajs) == 3 and all(len(t) == 100 for t in trajs)


# --- trajectory utilities -------------------------------------------------------------

def test_thinned_indices_and_csv(tmp_path):
    g = build_path(2)
    traj, _ = run(g, ModelParams(-0.5, 0.1), [0, 0], StopRule(max_steps=100), seed=2)
    idx = traj.thinned_indices(thin=10, window=20)
    assert 0 in idx and 99 in idx
    assert set(range(80, 100)).issubset(set(idx))
    out = tmp_path / "t.csv"
    traj.to_csv(out, thin=10)
    lines = out.read_text().splitlines()
    assert lines[0] == "step,time,vertex,direction,total_spin"
    # default detector window is the second half
    assert len(lines) == 1 + len(traj.thinned_indices(thin=10))


def test_summary_json_roundtrip():
    import json

    g = build_path(2)
    _, summary = run(g, ModelParams(-0.5, 0.1), [0, 0], StopRule(max_steps=50), seed=2)
    payload = json.loads(json.dumps(summary.to_json_dict()))
    assert payload["step_count"] == 50
    assert payload["chain"] == "dtmc"
