"""End-to-end coherence: classifier verdicts vs. independent simulation.

For a point in each regime, the prediction made by ``classify`` must show up
in the behaviour of the simulated chain (explosion proxy, takeover
detectors, growth rates, stationary occupancy).
"""
import numpy as np
import pytest

from bdgraph.classify import classify
from bdgraph.exact import truncated_stationary
from bdgraph.graphs import build_complete, build_cycle, build_path, build_star
from bdgraph.model import ModelParams
from bdgraph.simulate import ProxySettings, StopRule, run

PROXY = ProxySettings()


def ctmc(g, params, steps, seed, proxy=True):
    return run(
        g,
        params,
        np.zeros(g.vertex_count, dtype=np.int64),
        StopRule(max_steps=steps, explosion_proxy=PROXY if proxy else None),
        seed,
        chain="ctmc",
    )


@pytest.mark.parametrize(
    "g,params,events",
    [
        (build_complete(3), ModelParams(-1.0, 0.25), 200_000),
        # the 5-vertex star needs more events for the empirical occupancy
        # noise to drop below the tolerance
        (build_star(4), ModelParams(-1.0, 0.3), 800_000),
        (build_cycle(4), ModelParams(-1.0, 0.2), 300_000),
    ],
    ids=["K3", "star4", "C4"],
)
def test_ergodic_points_behave_ergodically(g, params, events):
    report = classify(g, params)
    assert report.regime == "Ergodic"
    traj, summary = ctmc(g, params, events, seed=101)
    assert summary.explosion_flag == "none"
    dist = truncated_stationary(g, params, 12)
    assert dist.boundary_mass < 1e-4
    tv = dist.tv_to_occupancy(traj.time_weighted_occupancy())
    assert tv < 0.05


def test_single_vertex_regime_point():
    g = build_star(3)
    params = ModelParams(1.0, 0.5)
    report = classify(g, params)
    assert report.fine_structure == "SingleVertexExplosion"
    _, summary = ctmc(g, params, 100_000, seed=102)
    assert summary.explosion_flag == "proxy_triggered"
    _, summary = run(g, params, [0] * 4, StopRule(max_steps=50_000), 103, chain="dtmc")
    assert summary.event_b is not None


def test_adjacent_pair_regime_point():
    g = build_cycle(4)
    params = ModelParams(0.5, 1.0)
    report = classify(g, params)
    assert report.fine_structure == "AdjacentPairExplosion"
    _, summary = ctmc(g, params, 100_000, seed=104)
    assert summary.explosion_flag == "proxy_triggered"
    _, summary = run(g, params, [0] * 4, StopRule(max_steps=50_000), 105, chain="dtmc")
    assert summary.pair_event is not None and summary.pair_event.adjacent


@pytest.mark.parametrize(
    "g,params",
    [(build_complete(4), ModelParams(-1.0, 0.5)), (build_star(4), ModelParams(-1.0, 1.0))],
    ids=["K4", "star4"],
)
def test_simultaneous_regime_points(g, params):
    report = classify(g, params)
    assert report.fine_structure == "SimultaneousExplosion"
    assert report.rates is not None
    _, summary = ctmc(g, params, 100_000, seed=106)
    assert summary.explosion_flag == "proxy_triggered"
    _, summary = run(
        g, params, np.zeros(g.vertex_count, dtype=np.int64), StopRule(max_steps=200_000), 107,
        chain="dtmc",
    )
    assert np.abs(np.asarray(summary.growth_rates) - np.asarray(report.rates)).max() < 0.05


def test_transient_star_neither_ergodic_nor_explosive():
    # Critical star: escapes to infinity with bounded potentials, so the
    # proxy must stay silent while deaths keep occurring.
    g = build_star(4)
    params = ModelParams(-1.0, 0.5)
    assert classify(g, params).regime == "Transient"
    _, summary = ctmc(g, params, 200_000, seed=108)
    assert summary.explosion_flag == "none"
    assert summary.death_count_after_burnin > 0
    assert sum(summary.final_configuration) > 0


def test_null_recurrent_two_vertex_point():
    g = build_path(2)
    params = ModelParams(0.0, -1.0)
    assert classify(g, params).regime == "NonErgodic"
    _, summary = run(g, params, [0, 0], StopRule(max_steps=500_000), 109, chain="dtmc")
    # keeps returning to the origin, never explodes
    assert summary.zero_visits > 10
