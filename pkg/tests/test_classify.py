import numpy as np
import pytest

from bdgraph.classify import ExcludedCaseError, RegimeReport, classify, predicted_rates
from bdgraph.graphs import (
    Graph,
    GraphError,
    build_complete,
    build_cycle,
    build_path,
    build_star,
)
from bdgraph.model import ModelParams, build_AQ, positive_definite


def irregular_tree():
    # 5-vertex tree with degrees (3,1,1,2,1): neither a star nor constant degree.
    return Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4)])


def triangular_prism():
    # Constant degree 3, has triangles, not complete.
    return Graph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])


# --- worked examples ---------------------------------------------------------

def test_complete3_ergodic():
    r = classify(build_complete(3), ModelParams(-1.0, 0.4))
    assert r.regime == "Ergodic" and r.theorem == "T3.1"


def test_star4_transient_boundary():
    r = classify(build_star(4), ModelParams(-1.0, 0.5))
    assert r.regime == "Transient" and r.theorem == "T4.2"


def test_cycle4_single_vertex_explosion():
    r = classify(build_cycle(4), ModelParams(1.0, 0.5))
    assert r.regime == "Explosive"
    assert r.fine_structure == "SingleVertexExplosion"


def test_star4_simultaneous_with_rates():
    r = classify(build_star(4), ModelParams(-1.0, 1.0))
    assert r.regime == "Explosive" and r.fine_structure == "SimultaneousExplosion"
    assert r.theorem == "T4.3"
    assert r.rates == pytest.approx((5 / 13, 2 / 13, 2 / 13, 2 / 13, 2 / 13))
    assert sum(r.rates) == pytest.approx(1.0, abs=1e-9)


def test_predicted_rates_examples():
    assert predicted_rates(build_complete(4), ModelParams(-1.0, 0.5)) == pytest.approx((0.25,) * 4)
    assert predicted_rates(build_star(2), ModelParams(-1.0, 1.0)) == pytest.approx((3 / 7, 2 / 7, 2 / 7))
    assert predicted_rates(build_path(2), ModelParams(1.0, 3.0)) == pytest.approx((0.5, 0.5))


def test_excluded_case():
    with pytest.raises(ExcludedCaseError):
        classify(build_complete(3), ModelParams(0.0, 0.0))


# --- beta = 0 dispatch --------------------------------------------------------

def test_beta_zero_dispatch():
    r = classify(build_cycle(5), ModelParams(-0.5, 0.0))
    assert r.regime == "Ergodic" and r.theorem == "IID"
    r = classify(build_cycle(5), ModelParams(0.5, 0.0))
    assert r.regime == "Explosive" and r.fine_structure == "SingleVertexExplosion"


# --- family-specific branches ---------------------------------------------------

def test_constant_degree_branches():
    c4 = build_cycle(4)
    assert classify(c4, ModelParams(-1.0, 0.4)).regime == "Ergodic"
    r = classify(c4, ModelParams(-1.0, 0.5))
    assert r.regime == "Transient" and r.theorem == "T3.2"
    r = classify(c4, ModelParams(-1.0, 0.6))
    assert r.regime == "Explosive" and r.theorem == "T3.3"
    assert r.fine_structure is None
    # 0 < alpha < beta on the triangle-free cycle: adjacent pair
    r = classify(c4, ModelParams(0.5, 1.0))
    assert r.fine_structure == "AdjacentPairExplosion" and r.theorem == "T3.4.ii"


def test_complete_fine_structure():
    k4 = build_complete(4)
    r = classify(k4, ModelParams(-1.0, 0.5))
    assert r.regime == "Explosive" and r.fine_structure == "SimultaneousExplosion"
    assert r.rates == pytest.approx((0.25,) * 4)
    r = classify(k4, ModelParams(0.5, 1.0))
    assert r.fine_structure == "SimultaneousExplosion" and r.rates == pytest.approx((0.25,) * 4)


def test_constant_degree_with_triangles_not_complete():
    g = triangular_prism()
    r = classify(g, ModelParams(0.5, 1.0))
    assert r.regime == "Explosive" and r.fine_structure is None
    assert any("triangles" in w for w in r.warnings)


def test_alpha_equals_beta_uncovered_fine_structure():
    r = classify(build_star(3), ModelParams(1.0, 1.0))
    assert r.regime == "Explosive" and r.fine_structure is None
    r = classify(build_cycle(4), ModelParams(1.0, 1.0))
    assert r.regime == "Explosive" and r.fine_structure is None
    r = classify(irregular_tree(), ModelParams(1.0, 1.0))
    assert r.regime == "NonErgodic"


def test_star_alpha_positive():
    r = classify(build_star(3), ModelParams(1.0, 0.5))
    assert r.fine_structure == "SingleVertexExplosion" and r.theorem == "T4.4.i"
    r = classify(build_star(3), ModelParams(0.5, 1.0))
    assert r.fine_structure == "AdjacentPairExplosion" and r.theorem == "T4.4.ii"


# --- general graphs -------------------------------------------------------------

def test_general_boundary_not_explosive():
    g = irregular_tree()  # max degree 3
    r = classify(g, ModelParams(-0.9, 0.3))
    assert r.regime == "NotExplosive" and r.theorem == "T1.1"
    assert any("recurrence" in w for w in r.warnings)


def test_general_supercritical_unknown():
    r = classify(irregular_tree(), ModelParams(-1.0, 2.0))
    assert r.regime == "Unknown"


def test_general_ergodic_and_t2():
    g = irregular_tree()
    assert classify(g, ModelParams(-1.0, 0.2)).regime == "Ergodic"
    r = classify(g, ModelParams(1.0, 0.5))
    assert r.fine_structure == "SingleVertexExplosion" and r.theorem == "T2"
    r = classify(g, ModelParams(0.5, 1.0))
    assert r.fine_structure == "AdjacentPairExplosion" and r.theorem == "T-no-triangle"
    r = classify(g, ModelParams(0.0, 1.0))
    assert r.regime == "NonErgodic" and r.theorem == "T1.2"


def test_two_vertex_null_recurrence_warning():
    r = classify(build_path(2), ModelParams(0.0, -1.0))
    assert r.regime == "NonErgodic"
    assert any("null recurrence" in w for w in r.warnings)


# --- disconnected graphs ----------------------------------------------------------

def test_disconnected_graphs():
    g = Graph.from_edges(4, [(0, 1), (2, 3)], allow_disconnected=True)
    r = classify(g, ModelParams(1.0, 0.5))
    assert r.regime == "Explosive" and r.theorem == "T2"
    with pytest.raises(GraphError):
        classify(g, ModelParams(-1.0, 0.2))


# --- invariants --------------------------------------------------------------------

def test_monotone_regime_scan():
    c4 = build_cycle(4)
    regimes = []
    for beta in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]:
        regimes.append(classify(c4, ModelParams(-1.0, beta)).regime)
    assert regimes == ["Ergodic"] * 4 + ["Transient"] + ["Explosive"] * 3


def test_rates_sum_to_one_whenever_present():
    combos = [
        (build_complete(5), ModelParams(-1.0, 0.5)),
        (build_complete(3), ModelParams(0.3, 0.9)),
        (build_star(4), ModelParams(-1.0, 1.0)),
        (build_star(1), ModelParams(-1.0, 1.5)),
        (build_path(2), ModelParams(0.5, 2.0)),
    ]
    for g, p in combos:
        r = classify(g, p)
        assert r.rates is not None
        assert sum(r.rates) == pytest.approx(1.0, abs=1e-9)


def test_label_permutation_invariance():
    rng = np.random.default_rng(11)
    g = build_star(4)
    p = ModelParams(-1.0, 1.0)
    base = classify(g, p)
    perm = list(rng.permutation(5))
    permuted = classify(g.relabel(perm), p)
    assert permuted.regime == base.regime and permuted.fine_structure == base.fine_structure
    for x in range(5):
        assert permuted.rates[perm[x]] == pytest.approx(base.rates[x])


def test_classifier_pd_coherence_beta_positive():
    # On constant-degree and star graphs with beta > 0, ergodicity per the
    # classifier must coincide with positive definiteness of the quadratic
    # form (boundary cases excluded).
    graphs = [build_cycle(4), build_complete(4), build_star(3), build_star(5)]
    for g in graphs:
        for alpha in np.linspace(-2.0, -0.1, 6):
            for beta in np.linspace(0.05, 1.5, 7):
                p = ModelParams(float(alpha), float(beta))
                r = classify(g, p)
                if r.regime in ("Transient", "NotExplosive"):
                    continue
                pd = positive_definite(build_AQ(g, p))
                assert pd == (r.regime == "Ergodic"), (g.vertex_count, alpha, beta, r.regime)


def test_single_vertex_graph():
    g = Graph(1, ((),))
    assert classify(g, ModelParams(-1.0, 0.7)).regime == "Ergodic"
    r = classify(g, ModelParams(1.0, -0.5))
    assert r.regime == "Explosive" and r.fine_structure == "SingleVertexExplosion"


def test_report_validation():
    with pytest.raises(ValueError):
        RegimeReport(regime="Bogus", theorem="x", inequality="y")
    with pytest.raises(ValueError):
        RegimeReport(regime="Ergodic", theorem="x", inequality="y", fine_structure="SingleVertexExplosion")


def test_json_shape():
    d = classify(build_star(4), ModelParams(-1.0, 1.0)).to_json_dict()
    assert set(d) == {"regime", "fine_structure", "theorem", "inequality", "rates", "warnings"}
    assert isinstance(d["rates"], list) and isinstance(d["warnings"], list)
