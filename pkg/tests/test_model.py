import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdgraph.graphs import build_complete, build_cycle, build_path, build_star
from bdgraph.model import (
    ModelParams,
    build_AQ,
    interaction_sum,
    jump_probabilities,
    linear_S,
    log_total_rate,
    log_weight,
    pd_verdict,
    positive_definite,
    potential,
    potentials,
    quadratic_Q,
    spectral_summary,
    star_potential_identity_residual,
)

TOL = 1e-9

GRAPHS = [build_path(2), build_complete(3), build_star(3), build_cycle(5), build_complete(4)]

params_strategy = st.tuples(
    st.floats(min_value=-3, max_value=3, allow_nan=False),
    st.floats(min_value=-3, max_value=3, allow_nan=False),
).map(lambda ab: ModelParams(*ab))


def config_strategy(n):
    return st.lists(st.integers(min_value=0, max_value=30), min_size=n, max_size=n).map(
        lambda xs: np.asarray(xs, dtype=np.int64)
    )


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(math.inf, 0.0)
    with pytest.raises(ValueError):
        ModelParams(0.0, math.nan)
    p = ModelParams(-1, 2)
    assert isinstance(p.alpha, float) and isinstance(p.beta, float)


def test_interaction_sum_examples():
    g = build_path(2)
    assert interaction_sum(g, [3, 1], 0) == 1
    for x in range(3):
        assert interaction_sum(build_complete(3), [0, 0, 0], x) == 0
    star = build_star(3)
    assert interaction_sum(star, [2, 1, 1, 1], 0) == 3


def test_potential_examples():
    g = build_path(2)
    p = ModelParams(-1.0, 2.0)
    assert potential(g, p, [3, 1], 0) == pytest.approx(-1.0)
    assert potential(g, p, [3, 1], 1) == pytest.approx(5.0)
    assert potential(g, p, [0, 0], 0) == 0.0


def test_log_weight_examples():
    g = build_path(2)
    assert log_weight(g, ModelParams(-1.0, 0.5), [2, 1]) == pytest.approx(0.0)
    assert log_weight(g, ModelParams(2.0, -3.0), [0, 0]) == 0.0


def test_quadratic_examples():
    g = build_path(2)
    p = ModelParams(-1.0, 0.5)
    q = quadratic_Q(g, p, [2, 1])
    s = linear_S([2, 1])
    assert q == pytest.approx(3.0)
    assert s == 3
    assert -(q + p.alpha * s) / 2 == pytest.approx(log_weight(g, p, [2, 1]))


@pytest.mark.parametrize("g", GRAPHS, ids=lambda g: f"n{g.vertex_count}e{g.edge_count}")
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_identities_random(g, data):
    p = data.draw(params_strategy)
    xi = data.draw(config_strategy(g.vertex_count))
    x = data.draw(st.integers(min_value=0, max_value=g.vertex_count - 1))
    # detailed balance
    bumped = xi.copy()
    bumped[x] += 1
    assert log_weight(g, p, bumped) - log_weight(g, p, xi) == pytest.approx(
        potential(g, p, xi, x), abs=TOL
    )
    # potential sum
    degs = np.asarray(g.degrees, dtype=float)
    assert potentials(g, p, xi).sum() == pytest.approx(
        float(xi @ (p.alpha + p.beta * degs)), abs=TOL
    )
    # Q representations
    u = potentials(g, p, xi)
    q1 = quadratic_Q(g, p, xi)
    q2 = float(((-p.alpha - p.beta * degs) * xi.astype(float) ** 2).sum()) + p.beta * sum(
        (int(xi[a]) - int(xi[b])) ** 2
        for a in range(g.vertex_count)
        for b in g.adjacency[a]
        if b > a
    )
    q3 = -float((xi * u).sum())
    assert q1 == pytest.approx(q2, abs=TOL)
    assert q1 == pytest.approx(q3, abs=TOL)
    # log W = -(Q + alpha S)/2
    assert log_weight(g, p, xi) == pytest.approx(-(q1 + p.alpha * linear_S(xi)) / 2, abs=TOL)


# --- quadratic form matrix ---------------------------------------------------

def test_AQ_entries():
    a = build_AQ(build_complete(3), ModelParams(-1.0, 0.4))
    assert np.allclose(np.diag(a), 1.0)
    assert a[0, 1] == a[1, 2] == pytest.approx(-0.4)
    b = build_AQ(build_cycle(4), ModelParams(2.0, 0.0))
    assert np.allclose(b, -2.0 * np.eye(4))
    c = build_AQ(build_star(4), ModelParams(-1.0, 0.5))
    assert np.allclose(c[0, 1:], -0.5)
    assert np.allclose(np.diag(c), 1.0)


@pytest.mark.parametrize("g", GRAPHS, ids=lambda g: f"n{g.vertex_count}e{g.edge_count}")
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_AQ_matches_Q(g, data):
    p = data.draw(params_strategy)
    xi = data.draw(config_strategy(g.vertex_count))
    a = build_AQ(g, p)
    val = float(xi.astype(float) @ a @ xi.astype(float))
    assert val == pytest.approx(quadratic_Q(g, p, xi), rel=1e-9, abs=1e-9)


def test_constant_degree_eigenvector():
    for g, nu in ((build_cycle(6), 2), (build_complete(5), 4)):
        p = ModelParams(-1.0, 0.3)
        ones = np.ones(g.vertex_count)
        got = build_AQ(g, p) @ ones
        assert np.allclose(got, (-p.alpha - p.beta * nu) * ones, atol=1e-9)


# --- PD verdicts and closed-form spectra ------------------------------------

def test_pd_examples():
    assert positive_definite(build_AQ(build_complete(3), ModelParams(-1.0, 0.4)))
    m = build_AQ(build_star(4), ModelParams(-1.0, 0.5))
    assert pd_verdict(m) == "boundary"
    assert positive_definite(m) is False
    assert positive_definite(build_AQ(build_cycle(4), ModelParams(-1.0, 0.0)))


def test_pd_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        pd_verdict(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_spectral_closed_forms():
    pairs = spectral_summary(build_complete(3), ModelParams(-1.0, 0.4))
    assert pairs == [(pytest.approx(0.2), 1), (pytest.approx(1.4), 2)]
    pairs = spectral_summary(build_star(4), ModelParams(-1.0, 0.5))
    assert pairs == [(pytest.approx(0.0), 1), (pytest.approx(1.0), 3), (pytest.approx(2.0), 1)]
    assert spectral_summary(build_cycle(5), ModelParams(-1.0, 0.5)) is None


@pytest.mark.parametrize("g", [build_complete(3), build_complete(6), build_star(2), build_star(7)])
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_spectral_matches_eigvalsh(g, data):
    p = data.draw(params_strategy)
    pairs = spectral_summary(g, p)
    assert pairs is not None
    expanded = sorted(ev for ev, mult in pairs for _ in range(mult))
    reference = sorted(np.linalg.eigvalsh(build_AQ(g, p)))
    assert np.allclose(expanded, reference, atol=1e-8)
    # Gershgorin containment
    maxdeg = max(g.degrees)
    lo, hi = -p.alpha - abs(p.beta) * maxdeg, -p.alpha + abs(p.beta) * maxdeg
    assert all(lo - 1e-9 <= ev <= hi + 1e-9 for ev, _ in pairs)
    # Verdict consistency off the boundary band
    min_eig = min(ev for ev, _ in pairs)
    if abs(min_eig) > 1e-9:
        assert positive_definite(build_AQ(g, p)) == (min_eig > 0)


# --- star potential identity --------------------------------------------------

def test_star_identity_examples():
    g = build_star(2)
    p = ModelParams(-1.0, 1.0)
    assert star_potential_identity_residual(g, p, [1, 1, 1]) == pytest.approx(0.0, abs=TOL)
    assert star_potential_identity_residual(g, p, [0, 0, 0]) == 0.0
    rng = np.random.default_rng(5)
    worst = max(
        abs(star_potential_identity_residual(g, p, rng.integers(0, 50, size=3)))
        for _ in range(1000)
    )
    assert worst < TOL


def test_star_identity_domain_errors():
    with pytest.raises(Exception):
        star_potential_identity_residual(build_cycle(4), ModelParams(-1.0, 1.0), [0, 0, 0, 0])
    with pytest.raises(ValueError):
        star_potential_identity_residual(build_star(2), ModelParams(1.0, 1.0), [0, 0, 0])


# --- jump law ------------------------------------------------------------------

def test_jump_probabilities_example():
    g = build_path(2)
    p = ModelParams(math.log(2.0), 0.0)
    probs = jump_probabilities(g, p, [1, 0])
    assert probs == pytest.approx([0.5, 0.25, 0.25, 0.0])
    assert log_total_rate(g, p, [1, 0]) == pytest.approx(math.log(4.0))


def test_jump_probabilities_zero_state_uniform():
    g = build_cycle(5)
    probs = jump_probabilities(g, ModelParams(2.0, -1.0), [0] * 5)
    assert probs[:5] == pytest.approx([0.2] * 5)
    assert probs[5:] == pytest.approx([0.0] * 5)


def test_log_total_rate_examples():
    g1 = build_path(2)
    # single vertex: construct directly
    from bdgraph.graphs import Graph

    g0 = Graph(1, ((),))
    assert log_total_rate(g0, ModelParams(5.0, 0.0), [0]) == pytest.approx(0.0)
    assert log_total_rate(g1, ModelParams(math.log(2.0), 0.0), [1, 0]) == pytest.approx(math.log(4.0))
    # deep in the negative-potential region: still finite, no overflow
    val = log_total_rate(g1, ModelParams(-500.0, 0.0), [3, 0])
    assert math.isfinite(val)
