"""Reproducible verification suites: identities, drift certificates, limit
laws and oracle comparisons.

Every record carries the tag of the theorem it checks (or a descriptive
identity/plumbing tag), the predicted value, the estimate, and the tolerance
that was applied.  Statistical pass thresholds are calibration choices
layered on asymptotic statements; each record states them explicitly.
Reports are deterministic functions of the suite seed (timestamps excluded).
"""
from __future__ import annotations

import math
import platform
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import kernels
from .classify import classify
from .exact import (
    box_states,
    diagonal_states,
    drift_GQ_batch,
    drift_log_quarterplane,
    drift_S_batch,
    drift_two_step_S_batch,
    enumerate_dtmc,
    linear_drift_one_step,
    linear_drift_two_step,
    log_weight_batch,
    shell_states,
    star_drift_weights,
    truncated_stationary,
)
from .graphs import (
    Graph,
    analyze,
    build_complete,
    build_cycle,
    build_lattice_torus,
    build_path,
    build_star,
)
from .model import (
    ModelParams,
    build_AQ,
    pd_verdict,
    spectral_summary,
)
from .simulate import ProxySettings, StopRule, run
from .stats import tv_distance_dicts, tv_four_sigma_bound

__all__ = ["SuiteRecord", "SuiteReport", "SUITE_NAMES", "DEFAULT_SUITE_SEED", "run_suite"]

SUITE_NAMES = ("identities", "drift", "limits", "oracle")
#: Documented fixed seed used when none is supplied.
DEFAULT_SUITE_SEED = 20240817

_IDENTITY_TOL = 1e-9
_PD_BAND = 1e-9


@dataclass
class SuiteRecord:
    name: str
    theorem: str
    predicted: str
    estimate: str
    tolerance: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "theorem": self.theorem,
            "predicted": self.predicted,
            "estimate": self.estimate,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": self.details,
        }


@dataclass
class SuiteReport:
    suite: str
    seed: int
    quick: bool
    passed: bool
    elapsed_seconds: float
    records: list[SuiteRecord]
    environment: dict
    timestamp: str  # excluded from the determinism contract

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "quick": self.quick,
            "passed": self.passed,
            "elapsed_seconds": self.elapsed_seconds,
            "records": [r.to_json_dict() for r in self.records],
            "environment": self.environment,
            "timestamp": self.timestamp,
        }


def _environment() -> dict:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "machine": platform.machine(),
        "system": platform.system(),
    }


def _finish(suite: str, seed: int, quick: bool, t0: float, records: list[SuiteRecord]) -> SuiteReport:
    return SuiteReport(
        suite=suite,
        seed=seed,
        quick=quick,
        passed=all(r.passed for r in records),
        elapsed_seconds=round(time.time() - t0, 3),
        records=records,
        environment=_environment(),
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


# ---------------------------------------------------------------------------
# identities suite
# ---------------------------------------------------------------------------

def _random_connected_graph(rng: np.random.Generator, n: int) -> Graph:
    edges = set()
    for v in range(1, n):
        edges.add((int(rng.integers(0, v)), v))
    for _ in range(int(rng.integers(0, n))):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges)


def _identity_graph_pool(rng: np.random.Generator) -> list[Graph]:
    pool = [build_complete(n) for n in (2, 3, 4, 6)]
    pool += [build_star(n) for n in (1, 2, 3, 5)]
    pool += [build_cycle(n) for n in (3, 4, 5, 8)]
    pool += [build_path(n) for n in (2, 3, 5)]
    pool += [build_lattice_torus(1, 1), build_lattice_torus(2, 1), build_lattice_torus(1, 2)]
    pool += [_random_connected_graph(rng, int(rng.integers(5, 10))) for _ in range(4)]
    return pool


def _edge_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    us, vs = [], []
    for x in range(g.vertex_count):
        for y in g.adjacency[x]:
            if y > x:
                us.append(x)
                vs.append(y)
    return np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)


def _identity_residuals(
    g: Graph, params: ModelParams, states: np.ndarray, rng: np.random.Generator
) -> dict[str, np.ndarray]:
    a, b = params.alpha, params.beta
    x = states.astype(np.float64)
    deg = np.asarray(g.degrees, dtype=np.float64)
    eu, ev = _edge_arrays(g)
    u = a * x + b * (x @ g.adjacency_matrix)
    logw = log_weight_batch(g, params, states)

    rows = np.arange(states.shape[0])
    at = rng.integers(0, g.vertex_count, size=states.shape[0])
    bumped = states.copy()
    bumped[rows, at] += 1
    detailed_balance = log_weight_batch(g, params, bumped) - logw - u[rows, at]

    potential_sum = u.sum(axis=1) - x @ (a + b * deg)

    cross = (x[:, eu] * x[:, ev]).sum(axis=1) if eu.size else np.zeros(states.shape[0])
    sqdiff = ((x[:, eu] - x[:, ev]) ** 2).sum(axis=1) if eu.size else np.zeros(states.shape[0])
    q1 = -a * (x**2).sum(axis=1) - 2.0 * b * cross
    q2 = ((-a - b * deg) * x**2).sum(axis=1) + b * sqdiff
    q3 = -(x * u).sum(axis=1)
    log_weight_identity = logw + 0.5 * (q1 + a * x.sum(axis=1))

    return {
        "detailed-balance": detailed_balance,
        "potential-sum-identity": potential_sum,
        "Q-representations": np.maximum(np.abs(q1 - q2), np.maximum(np.abs(q1 - q3), np.abs(q2 - q3))),
        "log-weight-identity": log_weight_identity,
    }


def _star_identity_residuals(
    g: Graph, params: ModelParams, states: np.ndarray
) -> np.ndarray:
    rep = analyze(g)
    n = rep.star_leaf_count
    assert n is not None and params.alpha < 0
    center = max(range(g.vertex_count), key=lambda v: g.degrees[v])
    a, b = params.alpha, params.beta
    x = states.astype(np.float64)
    u = a * x + b * (x @ g.adjacency_matrix)
    abs_a = -a
    lhs = (n * b + abs_a) * u[:, center] + (b + abs_a) * (u.sum(axis=1) - u[:, center])
    rhs = (n * b**2 - a**2) * x.sum(axis=1)
    return lhs - rhs


def _suite_identities(seed: int, quick: bool) -> list[SuiteRecord]:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 1])))
    per_graph_params = 4 if quick else 8
    per_pair_configs = 40 if quick else 80
    pool = _identity_graph_pool(rng)
    maxima = {
        "detailed-balance": 0.0,
        "potential-sum-identity": 0.0,
        "Q-representations": 0.0,
        "log-weight-identity": 0.0,
    }
    counts = dict.fromkeys(maxima, 0)
    star_max, star_count = 0.0, 0
    for g in pool:
        is_star = analyze(g).star_leaf_count is not None
        for _ in range(per_graph_params):
            params = ModelParams(
                float(rng.uniform(-3.0, 3.0)), float(rng.uniform(-3.0, 3.0))
            )
            states = rng.integers(0, 31, size=(per_pair_configs, g.vertex_count)).astype(np.int64)
            for key, res in _identity_residuals(g, params, states, rng).items():
                maxima[key] = max(maxima[key], float(np.abs(res).max()))
                counts[key] += states.shape[0]
            if is_star:
                # Stars are a minority of the pool; widen their draw count so the
                # star identity sees as many samples as the generic ones.
                sparams = ModelParams(float(rng.uniform(-3.0, -0.1)), float(rng.uniform(-3.0, 3.0)))
                star_states = rng.integers(0, 31, size=(4 * per_pair_configs, g.vertex_count)).astype(np.int64)
                res = _star_identity_residuals(g, sparams, star_states)
                star_max = max(star_max, float(np.abs(res).max()))
                star_count += star_states.shape[0]
    records = []
    for key, worst in maxima.items():
        records.append(
            SuiteRecord(
                name=f"identity:{key}",
                theorem=key,
                predicted="residual 0",
                estimate=f"max |residual| = {worst:.3g}",
                tolerance=f"< {_IDENTITY_TOL:g} over {counts[key]} draws",
                passed=worst < _IDENTITY_TOL and counts[key] >= (2000 if quick else 10000),
                details={"max_abs_residual": worst, "draws": counts[key]},
            )
        )
    records.append(
        SuiteRecord(
            name="identity:star-potential-identity",
            theorem="star-potential-identity",
            predicted="residual 0",
            estimate=f"max |residual| = {star_max:.3g}",
            tolerance=f"< {_IDENTITY_TOL:g} over {star_count} draws",
            passed=star_max < _IDENTITY_TOL and star_count >= (2000 if quick else 10000),
            details={"max_abs_residual": star_max, "draws": star_count},
        )
    )
    records.extend(_spectral_records(quick))
    return records


def _spectral_records(quick: bool) -> list[SuiteRecord]:
    grid = np.linspace(-2.0, 2.0, 20)
    families = [("complete", build_complete, (3, 5, 8)), ("star", build_star, (2, 4, 9))]
    if quick:
        families = [("complete", build_complete, (3,)), ("star", build_star, (4,))]
    disagreements = 0
    boundary_band = 0
    gershgorin_violations = 0
    checked = 0
    for _, builder, sizes in families:
        for size in sizes:
            g = builder(size)
            maxdeg = analyze(g).max_degree
            for alpha in grid:
                for beta in grid:
                    if alpha == 0 and beta == 0:
                        continue
                    params = ModelParams(float(alpha), float(beta))
                    pairs = spectral_summary(g, params)
                    assert pairs is not None
                    assert sum(m for _, m in pairs) == g.vertex_count
                    eigs = [ev for ev, _ in pairs]
                    lo = -alpha - abs(beta) * maxdeg
                    hi = -alpha + abs(beta) * maxdeg
                    if any(ev < lo - 1e-9 or ev > hi + 1e-9 for ev in eigs):
                        gershgorin_violations += 1
                    min_eig = min(eigs)
                    verdict = pd_verdict(build_AQ(g, params))
                    checked += 1
                    if abs(min_eig) <= _PD_BAND:
                        boundary_band += 1
                        continue
                    expected = "positive-definite" if min_eig > 0 else "not-positive-definite"
                    if verdict != expected:
                        disagreements += 1
    return [
        SuiteRecord(
            name="spectral:closed-forms-vs-factorization",
            theorem="spectral-closed-forms",
            predicted="0 disagreements outside the boundary band",
            estimate=f"{disagreements} disagreements ({boundary_band} in band, {checked} grid points)",
            tolerance=f"boundary band |min eig| <= {_PD_BAND:g}",
            passed=disagreements == 0,
            details={
                "disagreements": disagreements,
                "boundary_band": boundary_band,
                "grid_points": checked,
            },
        ),
        SuiteRecord(
            name="spectral:gershgorin-containment",
            theorem="gershgorin-bound",
            predicted="all closed-form eigenvalues in [-a-|b|*maxdeg, -a+|b|*maxdeg]",
            estimate=f"{gershgorin_violations} violations",
            tolerance="exact containment (1e-9 slack)",
            passed=gershgorin_violations == 0,
            details={"violations": gershgorin_violations},
        ),
    ]


# ---------------------------------------------------------------------------
# drift suite
# ---------------------------------------------------------------------------

def _suite_drift(seed: int, quick: bool) -> list[SuiteRecord]:
    records = []

    g = build_complete(3)
    s_hi = 48 if quick else 80
    states = shell_states(3, 40, s_hi)
    vals = drift_GQ_batch(g, ModelParams(-1.0, 0.25), states)
    worst = float(vals.max())
    arg = states[int(np.argmax(vals))]
    records.append(
        SuiteRecord(
            name="drift:GQ-shell",
            theorem="foster-drift-Q (T1.1)",
            predicted="G Q <= -0.1 on the shell",
            estimate=f"max G Q = {worst:.4g} over {states.shape[0]} states (S in [40,{s_hi}])",
            tolerance="<= -0.1, exhaustive",
            passed=worst <= -0.1,
            details={"max_drift": worst, "argmax_state": [int(v) for v in arg], "states": int(states.shape[0])},
        )
    )

    c4 = build_cycle(4)
    k_hi = 68 if quick else 100
    diag = diagonal_states(4, 60, k_hi)
    vals = drift_S_batch(c4, ModelParams(-1.0, 0.6), diag)
    low = float(vals.min())
    records.append(
        SuiteRecord(
            name="drift:S-diagonal",
            theorem="S-drift (T3.3)",
            predicted="one-step S drift >= 0.1 on diagonal states",
            estimate=f"min drift = {low:.6g} (k in [60,{k_hi}])",
            tolerance=">= 0.1, exhaustive",
            passed=low >= 0.1,
            details={"min_drift": low},
        )
    )

    s2_hi = 52 if quick else 60
    shell = shell_states(4, 50, s2_hi)
    vals = drift_two_step_S_batch(c4, ModelParams(-1.0, 0.5), shell)
    eps = float(vals.min())
    records.append(
        SuiteRecord(
            name="drift:two-step-S-shell",
            theorem="two-step-S-drift (T3.2)",
            predicted="uniformly positive two-step S drift on the critical shell",
            estimate=f"attained epsilon = {eps:.6g} over {shell.shape[0]} states (S in [50,{s2_hi}])",
            tolerance="> 0, exhaustive",
            passed=eps > 0.0,
            details={"epsilon": eps, "states": int(shell.shape[0])},
        )
    )

    star = build_star(2)
    sparams = ModelParams(-math.sqrt(2.0), 1.0)
    w = star_drift_weights(star)
    hi = 8 if quick else 20
    box = box_states(3, 0, hi)
    one = np.array([linear_drift_one_step(star, sparams, b, w) for b in box])
    two = np.array([linear_drift_two_step(star, sparams, b, w) for b in box])
    one_min, two_min = float(one.min()), float(two.min())
    records.append(
        SuiteRecord(
            name="drift:star-f-one-step",
            theorem="star-f-drift (T4.2)",
            predicted="submartingale: one-step drift >= 0 on the box",
            estimate=f"min one-step drift = {one_min:.6g} over {box.shape[0]} states (box 0..{hi})",
            tolerance=">= 0, exhaustive",
            passed=one_min >= 0.0,
            details={"min_one_step": one_min},
        )
    )
    records.append(
        SuiteRecord(
            name="drift:star-f-two-step",
            theorem="star-f-drift (T4.2)",
            predicted="two-step drift >= epsilon > 0 on the box",
            estimate=f"attained epsilon = {two_min:.6g}",
            tolerance="> 0, exhaustive",
            passed=two_min > 0.0,
            details={"epsilon": two_min},
        )
    )

    qp = ModelParams(0.0, -1.0)
    top = 120 if quick else 1000
    worst_qp = -math.inf
    worst_state = (0, 0)
    for s in range(20, top + 1):
        for x in range(0, s + 1):
            v = drift_log_quarterplane(qp, x, s - x)
            if v > worst_qp:
                worst_qp = v
                worst_state = (x, s - x)
    records.append(
        SuiteRecord(
            name="drift:log-quarterplane",
            theorem="log-drift-null-recurrence",
            predicted="G log(x+y+1) <= 0 for 20 <= x+y <= " + str(top),
            estimate=f"max drift = {worst_qp:.6g} at {worst_state}",
            tolerance="<= 0, exhaustive",
            passed=worst_qp <= 0.0,
            details={"max_drift": worst_qp, "argmax_state": list(worst_state)},
        )
    )
    return records


# ---------------------------------------------------------------------------
# limits suite
# ---------------------------------------------------------------------------

def _difference_counts(traj, start: int, stop: int, stride: int) -> dict[tuple[int, ...], int]:
    steps = np.arange(start, stop, stride, dtype=np.int64) + 1
    spins = traj.spins_at_steps(steps)
    diffs = spins[:, :-1] - spins[:, -1:]
    out: dict[tuple[int, ...], int] = {}
    for row in diffs:
        key = tuple(int(v) for v in row)
        out[key] = out.get(key, 0) + 1
    return out


def _suite_limits(seed: int, quick: bool) -> list[SuiteRecord]:
    records = []
    root = np.random.SeedSequence([seed, 2])
    (ss_b, ss_proxy, ss_pair, ss_mf, ss_star, ss_null, ss_erg) = root.spawn(7)

    # Single-vertex takeover (event B) on a star, alpha > max(0, beta).
    n_seeds = 25 if quick else 200
    steps = 20_000 if quick else 100_000
    window = steps // 2
    thr = 0.80 if quick else 0.95
    g = build_star(3)
    params = ModelParams(1.0, 0.5)
    hits = 0
    for ss in ss_b.spawn(n_seeds):
        traj, summary = run(g, params, [0] * 4, StopRule(max_steps=steps), ss, chain="dtmc", window=window)
        if summary.event_b is not None:
            hits += 1
    freq = hits / n_seeds
    records.append(
        SuiteRecord(
            name="limits:single-vertex-takeover",
            theorem="T2",
            predicted="P(single-vertex event) -> 1",
            estimate=f"detected in {hits}/{n_seeds} runs (freq {freq:.3f})",
            tolerance=f">= {thr} ({steps} steps, window {window})",
            passed=freq >= thr,
            details={"frequency": freq, "seeds": n_seeds, "steps": steps, "window": window},
        )
    )

    # CTMC explosion proxy in the same regime.
    thr_proxy = 0.80 if quick else 0.99
    hits = 0
    for ss in ss_proxy.spawn(n_seeds):
        traj, summary = run(
            g,
            params,
            [0] * 4,
            StopRule(max_steps=steps, explosion_proxy=ProxySettings()),
            ss,
            chain="ctmc",
        )
        if summary.explosion_flag == "proxy_triggered":
            hits += 1
    freq = hits / n_seeds
    records.append(
        SuiteRecord(
            name="limits:explosion-proxy",
            theorem="T2",
            predicted="explosion proxy triggers (no deaths + summable inverse rates + large spin)",
            estimate=f"triggered in {hits}/{n_seeds} runs (freq {freq:.3f})",
            tolerance=f">= {thr_proxy} (depth 100, eps 1e-6, min spin 200)",
            passed=freq >= thr_proxy,
            details={"frequency": freq, "seeds": n_seeds},
        )
    )

    # Adjacent-pair takeover on the 4-cycle, 0 < alpha < beta, triangle-free.
    n_seeds_pair = 20 if quick else 100
    steps_pair = 20_000 if quick else 100_000
    thr_pair = 0.80 if quick else 0.95
    c4 = build_cycle(4)
    params_pair = ModelParams(0.5, 1.0)
    hits = 0
    for ss in ss_pair.spawn(n_seeds_pair):
        traj, summary = run(c4, params_pair, [0] * 4, StopRule(max_steps=steps_pair), ss, chain="dtmc")
        pe = summary.pair_event
        if pe is not None and 0.45 <= pe.frac1 <= 0.55 and 0.45 <= pe.frac2 <= 0.55:
            hits += 1
    freq = hits / n_seeds_pair
    records.append(
        SuiteRecord(
            name="limits:adjacent-pair-takeover",
            theorem="T-no-triangle",
            predicted="an adjacent pair receives all late events, fractions 1/2 each",
            estimate=f"detected in {hits}/{n_seeds_pair} runs (freq {freq:.3f})",
            tolerance=f">= {thr_pair} with fractions in [0.45, 0.55] ({steps_pair} steps)",
            passed=freq >= thr_pair,
            details={"frequency": freq, "seeds": n_seeds_pair, "steps": steps_pair},
        )
    )

    # Mean-field growth rates and difference-process stabilization on K4.
    n_seeds_mf = 8 if quick else 50
    steps_mf = 100_000 if quick else 1_000_000
    rate_tol = 0.04 if quick else 0.02
    tv_tol = 0.15 if quick else 0.05
    k4 = build_complete(4)
    params_mf = ModelParams(-1.0, 0.5)
    predicted = classify(k4, params_mf).rates
    assert predicted is not None
    worst_dev = 0.0
    acc_half: dict[tuple[int, ...], int] = {}
    acc_full: dict[tuple[int, ...], int] = {}
    # Keep the pooled sample count high enough that sampling noise sits well
    # below the TV tolerance, in quick mode too.
    stride = 10 if quick else 100
    for ss in ss_mf.spawn(n_seeds_mf):
        traj, summary = run(k4, params_mf, [0] * 4, StopRule(max_steps=steps_mf), ss, chain="dtmc")
        dev = float(np.abs(np.asarray(summary.growth_rates) - 0.25).max())
        worst_dev = max(worst_dev, dev)
        for counts, acc in (
            (_difference_counts(traj, steps_mf // 4, steps_mf // 2, stride), acc_half),
            (_difference_counts(traj, steps_mf // 2, steps_mf, stride), acc_full),
        ):
            for k, v in counts.items():
                acc[k] = acc.get(k, 0) + v
    records.append(
        SuiteRecord(
            name="limits:mean-field-rates",
            theorem="T3.1.1",
            predicted="every growth rate = 1/4",
            estimate=f"max |rate - 1/4| = {worst_dev:.4f} over {n_seeds_mf} runs",
            tolerance=f"within {rate_tol} per run ({steps_mf} steps)",
            passed=worst_dev <= rate_tol,
            details={"max_deviation": worst_dev, "seeds": n_seeds_mf, "steps": steps_mf},
        )
    )
    n1, n2 = sum(acc_half.values()), sum(acc_full.values())
    law1 = {k: v / n1 for k, v in acc_half.items()}
    law2 = {k: v / n2 for k, v in acc_full.items()}
    tv = tv_distance_dicts(law1, law2)
    records.append(
        SuiteRecord(
            name="limits:mean-field-difference-stabilization",
            theorem="T3.1.3",
            predicted="difference-process law stabilizes (convergence in distribution)",
            estimate=f"TV(law at t/2, law at t) = {tv:.4f} ({len(law2)} atoms)",
            tolerance=f"< {tv_tol} (pooled windows, stride {stride}; evidence, not proof)",
            passed=tv < tv_tol,
            details={"tv": tv, "atoms": len(law2), "samples": [n1, n2]},
        )
    )

    # Star growth rates, alpha < 0 < alpha + beta*sqrt(n).
    n_seeds_star = 8 if quick else 50
    steps_star = 100_000 if quick else 1_000_000
    star4 = build_star(4)
    params_star = ModelParams(-1.0, 1.0)
    report = classify(star4, params_star)
    assert report.rates is not None
    center_pred = report.rates[0]
    leaf_pred = report.rates[1]
    worst_center = 0.0
    worst_leaf = 0.0
    center_rates = []
    for ss in ss_star.spawn(n_seeds_star):
        traj, summary = run(star4, params_star, [0] * 5, StopRule(max_steps=steps_star), ss, chain="dtmc")
        rates = np.asarray(summary.growth_rates)
        center_rates.append(float(rates[0]))
        worst_center = max(worst_center, abs(float(rates[0]) - center_pred))
        worst_leaf = max(worst_leaf, float(np.abs(rates[1:] - leaf_pred).max()))
    records.append(
        SuiteRecord(
            name="limits:star-rates",
            theorem="T4.3",
            predicted=f"center 5/13 = {center_pred:.6f}, leaves 2/13 = {leaf_pred:.6f}",
            estimate=f"max |center dev| = {worst_center:.4f}, max |leaf dev| = {worst_leaf:.4f}",
            tolerance=f"within {rate_tol} per run ({steps_star} steps, {n_seeds_star} seeds)",
            passed=worst_center <= rate_tol and worst_leaf <= rate_tol,
            details={
                "center_predicted": center_pred,
                "leaf_predicted": leaf_pred,
                "max_center_deviation": worst_center,
                "max_leaf_deviation": worst_leaf,
            },
        )
    )
    # The non-normalizing denominator variant must fail by a wide margin
    # (10x the full-scale rate tolerance; the gap is a fixed quantity, so the
    # margin does not widen in quick mode).
    alt_center = (4 * 1.0 + 1.0) / ((4 + 1) * 1.0 + 2 * 1.0)  # (n*beta+|a|)/((n+1)*beta+2|a|)
    mean_center = float(np.mean(center_rates))
    gap = abs(mean_center - alt_center)
    records.append(
        SuiteRecord(
            name="limits:star-rates-reject-alternative",
            theorem="T4.3",
            predicted=f"alternative denominator prediction {alt_center:.4f} is wrong",
            estimate=f"mean center rate {mean_center:.4f}, gap {gap:.4f}",
            tolerance="gap > 0.2 (10x the full-scale rate tolerance)",
            passed=gap > 0.2,
            details={"alternative_prediction": alt_center, "mean_center_rate": mean_center},
        )
    )

    # Null-recurrence evidence on the two-vertex graph, alpha=0, beta=-1.
    steps_null = 1_000_000 if quick else 10_000_000
    after = steps_null // 10
    g2 = build_path(2)
    traj, summary = run(
        g2, ModelParams(0.0, -1.0), [0, 0], StopRule(max_steps=steps_null), ss_null, chain="dtmc"
    )
    zs = np.asarray(summary.zero_visit_steps)
    late_returns = int(np.sum(zs >= after))
    mean_return = float(np.diff(zs).mean()) if zs.size > 1 else math.inf
    records.append(
        SuiteRecord(
            name="limits:null-recurrence-return",
            theorem="null-recurrence-2vertex",
            predicted="the chain returns to (0,0) after a long burn-in (recurrence)",
            estimate=f"{late_returns} returns after step {after} ({summary.zero_visits} total)",
            tolerance=">= 1 return",
            passed=late_returns >= 1,
            details={"late_returns": late_returns, "total_returns": summary.zero_visits},
        )
    )
    # Report-only comparison against the ergodic chain's return times.
    traj, erg_summary = run(
        g2, ModelParams(-1.0, 0.2), [0, 0], StopRule(max_steps=min(steps_null, 1_000_000)), ss_erg, chain="dtmc"
    )
    zs_erg = np.asarray(erg_summary.zero_visit_steps)
    erg_return = float(np.diff(zs_erg).mean()) if zs_erg.size > 1 else math.inf
    ratio = mean_return / erg_return if erg_return > 0 else math.inf
    records.append(
        SuiteRecord(
            name="limits:null-recurrence-return-time-ratio",
            theorem="null-recurrence-2vertex",
            predicted="mean return time far exceeds the ergodic chain's (non-positive recurrence)",
            estimate=f"mean return {mean_return:.1f} vs ergodic {erg_return:.2f} (ratio {ratio:.1f})",
            tolerance="report-only (ratio > 10 expected); non-gating",
            passed=True,
            details={"mean_return": mean_return, "ergodic_mean_return": erg_return, "ratio": ratio,
                     "exceeds_10x": bool(ratio > 10)},
        )
    )
    return records


# ---------------------------------------------------------------------------
# oracle suite
# ---------------------------------------------------------------------------

def _suite_oracle(seed: int, quick: bool) -> list[SuiteRecord]:
    records = []
    root = np.random.SeedSequence([seed, 3])
    ss_stat, ss_kstep = root.spawn(2)

    # Time-weighted CTMC occupancy against the truncated stationary law.
    events = 200_000 if quick else 1_000_000
    tv_tol = 0.04 if quick else 0.02
    g2 = build_path(2)
    params = ModelParams(-1.0, 0.2)
    traj, summary = run(g2, params, [0, 0], StopRule(max_steps=events), ss_stat, chain="ctmc")
    occupancy = traj.time_weighted_occupancy()
    dist = truncated_stationary(g2, params, 25)
    tv = dist.tv_to_occupancy(occupancy)
    records.append(
        SuiteRecord(
            name="oracle:stationary-occupancy-tv",
            theorem="stationary-law (T1.1)",
            predicted="time-weighted occupancy matches the truncated stationary law",
            estimate=f"TV = {tv:.4f} ({events} events, cap 25)",
            tolerance=f"< {tv_tol}",
            passed=tv < tv_tol,
            details={"tv": tv, "events": events, "cap": 25},
        )
    )
    records.append(
        SuiteRecord(
            name="oracle:truncation-boundary-mass",
            theorem="stationary-law (T1.1)",
            predicted="negligible boundary-layer mass at the cap",
            estimate=f"boundary mass = {dist.boundary_mass:.3g}",
            tolerance="< 1e-4 (oracle validity threshold)",
            passed=dist.boundary_mass < 1e-4,
            details={"boundary_mass": dist.boundary_mass},
        )
    )

    # Exact k-step enumeration vs the sampled empirical law.
    n_samples = 100_000 if quick else 1_000_000
    tv_abs = 0.03 if quick else 0.01
    g3 = build_path(3)
    params9 = ModelParams(0.3, 0.2)
    exact_law = enumerate_dtmc(g3, params9, [0, 0, 0], 5)
    mass_err = abs(sum(exact_law.values()) - 1.0)
    indptr, indices = g3.csr
    rng = np.random.Generator(np.random.PCG64(ss_kstep))
    out = np.empty((n_samples, 3), dtype=np.int64)
    uniforms = rng.random(5 * n_samples)
    kernels.batch_final_states_kernel(
        indptr, indices, params9.alpha, params9.beta, np.zeros(3, dtype=np.int64), 5, uniforms, out
    )
    vals, counts = np.unique(out, axis=0, return_counts=True)
    empirical = {tuple(int(v) for v in vals[i]): counts[i] / n_samples for i in range(vals.shape[0])}
    tv = tv_distance_dicts(exact_law, empirical)
    bound = tv_four_sigma_bound(np.asarray(list(exact_law.values())), n_samples)
    records.append(
        SuiteRecord(
            name="oracle:k-step-enumeration-tv",
            theorem="k-step-enumeration (plumbing)",
            predicted="empirical 5-step law matches exact enumeration",
            estimate=f"TV = {tv:.5f} over {len(exact_law)} states (4-sigma bound {bound:.5f})",
            tolerance=f"< {tv_abs} and < 4-sigma multinomial bound; exact mass error {mass_err:.2g} < 1e-12",
            passed=tv < tv_abs and tv < bound and mass_err < 1e-12,
            details={"tv": tv, "bound": bound, "samples": n_samples, "exact_mass_error": mass_err},
        )
    )
    return records


def run_suite(name: str, seed: int = DEFAULT_SUITE_SEED, quick: bool = False) -> SuiteReport:
    """Run one named verification suite with a fixed seed."""
    if name not in SUITE_NAMES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITE_NAMES}")
    t0 = time.time()
    if name == "identities":
        records = _suite_identities(seed, quick)
    elif name == "drift":
        records = _suite_drift(seed, quick)
    elif name == "limits":
        records = _suite_limits(seed, quick)
    else:
        records = _suite_oracle(seed, quick)
    return _finish(name, seed, quick, t0, records)
