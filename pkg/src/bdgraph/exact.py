"""Small-instance exact oracles: truncated stationary law, k-step enumeration,
and closed-form drift evaluators for every Lyapunov computation used in the
verification suites.

Everything here is an independent reference path: the simulators never call
into this module, so Monte Carlo results can be checked against it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, GraphError, analyze
from .model import ModelParams, as_config, jump_probabilities, potentials

__all__ = [
    "TruncatedDistribution",
    "truncated_stationary",
    "enumerate_dtmc",
    "log_weight_batch",
    "distribution_to_csv",
    "drift_GQ",
    "drift_GQ_batch",
    "drift_S",
    "drift_S_batch",
    "linear_drift_one_step",
    "linear_drift_two_step",
    "drift_two_step_S",
    "drift_two_step_S_batch",
    "drift_star_f",
    "star_drift_weights",
    "drift_log_quarterplane",
    "shell_states",
    "box_states",
    "diagonal_states",
    "suggested_shell_start_S",
    "suggested_shell_start_GQ",
]

_STATE_BUDGET = 10_000_000
_EXP_FLUSH = 700.0
_REGIME_TOL = 1e-12


@dataclass
class TruncatedDistribution:
    """Stationary law of the spin-capped chain (births suppressed at the cap).

    Probabilities are proportional to exp(log W) over {0..cap}^n, normalized
    by log-sum-exp; exactly stationary for the capped chain and a proxy for
    the uncapped one when ``boundary_mass`` (total mass of states with any
    spin at the cap) is small.
    """

    graph: Graph
    params: ModelParams
    cap: int
    probs: np.ndarray
    log_z: float
    boundary_mass: float

    def encode(self, state) -> int:
        state = np.asarray(state, dtype=np.int64)
        base = self.cap + 1
        idx = 0
        for i in range(self.graph.vertex_count - 1, -1, -1):
            v = int(state[i])
            if not 0 <= v <= self.cap:
                raise ValueError(f"state coordinate {v} outside 0..{self.cap}")
            idx = idx * base + v
        return idx

    def decode(self, idx: int) -> tuple[int, ...]:
        base = self.cap + 1
        out = []
        for _ in range(self.graph.vertex_count):
            out.append(idx % base)
            idx //= base
        return tuple(out)

    def prob(self, state) -> float:
        return float(self.probs[self.encode(state)])

    def log_prob(self, state) -> float:
        from .model import log_weight

        return log_weight(self.graph, self.params, state) - self.log_z

    def in_support(self, state) -> bool:
        arr = np.asarray(state)
        return bool((arr >= 0).all() and (arr <= self.cap).all())

    def tv_to_occupancy(self, occupancy: dict) -> float:
        """Total variation to an empirical occupancy measure.

        States outside the cap contribute their full empirical mass.
        """
        diff = 0.0
        covered = 0.0
        for state, q in occupancy.items():
            if self.in_support(state):
                p = self.prob(state)
                covered += p
                diff += abs(p - q)
            else:
                diff += q
        diff += 1.0 - covered
        return 0.5 * diff

    def to_csv(self, path, min_prob: float = 0.0) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            n = self.graph.vertex_count
            writer.writerow([f"x{i}" for i in range(n)] + ["probability"])
            for idx in range(self.probs.shape[0]):
                p = float(self.probs[idx])
                if p >= min_prob:
                    writer.writerow(list(self.decode(idx)) + [repr(p)])


def log_weight_batch(g: Graph, params: ModelParams, states: np.ndarray) -> np.ndarray:
    """Vectorized log W over rows of ``states``."""
    return _log_weight_block(g, params, np.asarray(states, dtype=np.int64))


def distribution_to_csv(law: dict, path) -> None:
    """Write a state-tuple -> probability mapping as CSV, states sorted."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        first = next(iter(law), None)
        n = len(first) if first is not None else 0
        writer.writerow([f"x{i}" for i in range(n)] + ["probability"])
        for state in sorted(law):
            writer.writerow(list(state) + [repr(law[state])])


def _decode_block(idx: np.ndarray, n: int, base: int) -> np.ndarray:
    coords = np.empty((idx.shape[0], n), dtype=np.int64)
    rem = idx.copy()
    for i in range(n):
        coords[:, i] = rem % base
        rem //= base
    return coords


def _log_weight_block(g: Graph, params: ModelParams, coords: np.ndarray) -> np.ndarray:
    x = coords.astype(np.float64)
    own = 0.5 * np.sum(x * (x - 1.0), axis=1)
    cross = np.zeros(coords.shape[0])
    for u in range(g.vertex_count):
        for v in g.adjacency[u]:
            if v > u:
                cross += x[:, u] * x[:, v]
    return params.alpha * own + params.beta * cross


def truncated_stationary(g: Graph, params: ModelParams, cap: int) -> TruncatedDistribution:
    """Exact stationary distribution of the spin-capped chain on {0..cap}^n."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    n = g.vertex_count
    base = cap + 1
    total = base**n
    if total > _STATE_BUDGET:
        raise ValueError(
            f"truncated state space has {total} states, exceeding the budget "
            f"{_STATE_BUDGET}; required budget: {total}"
        )
    logw = np.empty(total, dtype=np.float64)
    chunk = 1 << 20
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        logw[idx] = _log_weight_block(g, params, _decode_block(idx, n, base))
    m = float(logw.max())
    z = float(np.exp(logw - m).sum())
    log_z = m + math.log(z)
    probs = np.exp(logw - log_z)
    boundary = 0.0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        coords = _decode_block(idx, n, base)
        mask = (coords == cap).any(axis=1)
        boundary += float(probs[idx[mask]].sum())
    dist = TruncatedDistribution(
        graph=g, params=params, cap=cap, probs=probs, log_z=log_z, boundary_mass=boundary
    )
    assert abs(float(probs.sum()) - 1.0) < 1e-12
    return dist


def enumerate_dtmc(g: Graph, params: ModelParams, initial, k: int) -> dict[tuple[int, ...], float]:
    """Exact k-step distribution of the embedded chain by tree expansion.

    Per-node jump probabilities are normalized exactly; duplicate states are
    merged at every level.  Guarded to k <= 8 and at most 4 vertices.
    """
    n = g.vertex_count
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > 8 or n > 4:
        raise ValueError(f"enumeration budget exceeded: need k <= 8 and <= 4 vertices, got k={k}, n={n}")
    state0 = tuple(int(v) for v in as_config(initial, n))
    current: dict[tuple[int, ...], float] = {state0: 1.0}
    for _ in range(k):
        nxt: dict[tuple[int, ...], float] = {}
        for state, p in current.items():
            jp = jump_probabilities(g, params, np.asarray(state, dtype=np.int64))
            for move in range(2 * n):
                pm = float(jp[move])
                if pm == 0.0:
                    continue
                x = move % n
                d = 1 if move < n else -1
                ns = list(state)
                ns[x] += d
                key = tuple(ns)
                nxt[key] = nxt.get(key, 0.0) + p * pm
        current = nxt
    return current


# ---------------------------------------------------------------------------
# Drift evaluators
# ---------------------------------------------------------------------------

def drift_GQ(g: Graph, params: ModelParams, xi) -> float:
    """Generator applied to the quadratic form Q at ``xi``.

    Closed form: sum (-alpha - 2U) e^U over vertices plus sum (-alpha + 2U)
    over positive spins.  Potentials above 700 would overflow the birth term;
    the returned value is then +/-inf (sign of the dominant term), flagging
    unbounded drift instead of overflowing.
    """
    xi = as_config(xi, g.vertex_count)
    u = potentials(g, params, xi)
    a = params.alpha
    if (u > _EXP_FLUSH).any():
        top = float(u.max())
        return math.inf if (-a - 2.0 * top) > 0 else -math.inf
    births = float(np.sum((-a - 2.0 * u) * np.exp(u)))
    deaths = float(np.sum((-a + 2.0 * u)[xi > 0]))
    return births + deaths


_ROW_CHUNK = 1 << 19


def _in_row_chunks(fn, states: np.ndarray) -> np.ndarray:
    """Apply a row-batch evaluator in bounded-memory chunks."""
    m = states.shape[0]
    if m <= _ROW_CHUNK:
        return fn(states)
    return np.concatenate([fn(states[i : i + _ROW_CHUNK]) for i in range(0, m, _ROW_CHUNK)])


def drift_GQ_batch(g: Graph, params: ModelParams, states: np.ndarray) -> np.ndarray:
    """Vectorized ``drift_GQ`` over rows of ``states``."""
    return _in_row_chunks(lambda block: _drift_GQ_block(g, params, block), np.asarray(states))


def _drift_GQ_block(g: Graph, params: ModelParams, states: np.ndarray) -> np.ndarray:
    x = np.asarray(states, dtype=np.float64)
    a, b = params.alpha, params.beta
    u = a * x + b * (x @ g.adjacency_matrix)
    overflow = (u > _EXP_FLUSH).any(axis=1)
    u_safe = np.where(u > _EXP_FLUSH, 0.0, u)
    births = np.sum((-a - 2.0 * u_safe) * np.exp(u_safe), axis=1)
    deaths = np.sum(np.where(x > 0, -a + 2.0 * u, 0.0), axis=1)
    out = births + deaths
    if overflow.any():
        tops = u.max(axis=1)
        out[overflow] = np.where((-a - 2.0 * tops[overflow]) > 0, math.inf, -math.inf)
    return out


def linear_drift_one_step(g: Graph, params: ModelParams, zeta, weights) -> float:
    """One-step expected change of the linear statistic <weights, zeta> (DTMC)."""
    zeta = as_config(zeta, g.vertex_count)
    w = np.asarray(weights, dtype=np.float64)
    u = potentials(g, params, zeta)
    pos = zeta > 0
    npos = int(pos.sum())
    m = float(u.max())
    if npos:
        m = max(m, 0.0)
    e = np.exp(u - m)
    death_w = math.exp(-m) if npos else 0.0
    num = float(e @ w) - death_w * float(w[pos].sum())
    den = float(e.sum()) + npos * death_w
    return num / den


def drift_S(g: Graph, params: ModelParams, zeta) -> float:
    """One-step expected change of the total spin for the embedded chain.

    Equals (sum e^U - #positive) / (sum e^U + #positive), always in [-1, 1].
    """
    return linear_drift_one_step(g, params, zeta, np.ones(g.vertex_count))


def drift_S_batch(g: Graph, params: ModelParams, states: np.ndarray) -> np.ndarray:
    return _linear_one_step_batch(g, params, np.asarray(states, dtype=np.int64), np.ones(g.vertex_count))


def _linear_one_step_batch(g: Graph, params: ModelParams, states: np.ndarray, w: np.ndarray) -> np.ndarray:
    return _in_row_chunks(lambda block: _linear_one_step_block(g, params, block, w), states)


def _linear_one_step_block(g: Graph, params: ModelParams, states: np.ndarray, w: np.ndarray) -> np.ndarray:
    x = states.astype(np.float64)
    u = params.alpha * x + params.beta * (x @ g.adjacency_matrix)
    pos = states > 0
    npos = pos.sum(axis=1)
    m = u.max(axis=1)
    m = np.where(npos > 0, np.maximum(m, 0.0), m)
    e = np.exp(u - m[:, None])
    death_w = np.exp(-m)
    num = e @ w - death_w * (pos @ w)
    den = e.sum(axis=1) + npos * death_w
    return num / den


def linear_drift_two_step(g: Graph, params: ModelParams, zeta, weights) -> float:
    """Exact two-step expected change of <weights, zeta> by one-level expansion."""
    zeta = as_config(zeta, g.vertex_count)
    w = np.asarray(weights, dtype=np.float64)
    n = g.vertex_count
    jp = jump_probabilities(g, params, zeta)
    total = 0.0
    for move in range(2 * n):
        pm = float(jp[move])
        if pm == 0.0:
            continue
        x = move % n
        d = 1 if move < n else -1
        ns = zeta.copy()
        ns[x] += d
        total += pm * (d * float(w[x]) + linear_drift_one_step(g, params, ns, w))
    return total


def drift_two_step_S(g: Graph, params: ModelParams, zeta) -> float:
    """Expected change of S over k(zeta) steps at the critical line alpha+beta*nu=0.

    k(zeta) = 2 exactly when all potentials vanish (then the one-step drift is
    not informative), else 1.  Requires a constant-degree graph at the boundary.
    """
    rep = analyze(g)
    if rep.constant_degree is None:
        raise GraphError("two-step S drift requires a constant-degree graph")
    crit = params.alpha + params.beta * rep.constant_degree
    if abs(crit) > _REGIME_TOL * max(1.0, abs(params.alpha)):
        raise ValueError(f"two-step S drift requires alpha + beta*nu = 0, got {crit}")
    zeta = as_config(zeta, g.vertex_count)
    u = potentials(g, params, zeta)
    if np.any(np.abs(u) > 1e-12):
        return drift_S(g, params, zeta)
    return linear_drift_two_step(g, params, zeta, np.ones(g.vertex_count))


def drift_two_step_S_batch(g: Graph, params: ModelParams, states: np.ndarray) -> np.ndarray:
    """Vectorized ``drift_two_step_S`` over rows (same regime checks)."""
    rep = analyze(g)
    if rep.constant_degree is None:
        raise GraphError("two-step S drift requires a constant-degree graph")
    crit = params.alpha + params.beta * rep.constant_degree
    if abs(crit) > _REGIME_TOL * max(1.0, abs(params.alpha)):
        raise ValueError(f"two-step S drift requires alpha + beta*nu = 0, got {crit}")
    states = np.asarray(states, dtype=np.int64)
    x = states.astype(np.float64)
    u = params.alpha * x + params.beta * (x @ g.adjacency_matrix)
    out = drift_S_batch(g, params, states)
    flat = np.nonzero(np.all(np.abs(u) <= 1e-12, axis=1))[0]
    ones = np.ones(g.vertex_count)
    for i in flat:
        out[i] = linear_drift_two_step(g, params, states[i], ones)
    return out


def star_drift_weights(g: Graph) -> np.ndarray:
    """Weights of the star Lyapunov functional: sqrt(n) on the center, 1 on leaves."""
    rep = analyze(g)
    if rep.star_leaf_count is None:
        raise GraphError("star drift requires a star graph")
    n = rep.star_leaf_count
    center = max(range(g.vertex_count), key=lambda v: g.degrees[v])
    w = np.ones(g.vertex_count)
    w[center] = math.sqrt(n)
    return w


def drift_star_f(g: Graph, params: ModelParams, zeta, two_step: bool = False) -> float:
    """Drift of f(zeta) = sum of leaf spins + sqrt(n) * center spin on a star
    at the critical line alpha + beta*sqrt(n) = 0 with alpha < 0."""
    rep = analyze(g)
    if rep.star_leaf_count is None:
        raise GraphError("star drift requires a star graph")
    if not params.alpha < 0:
        raise ValueError("star drift requires alpha < 0")
    crit = params.alpha + params.beta * math.sqrt(rep.star_leaf_count)
    if abs(crit) > _REGIME_TOL * max(1.0, abs(params.alpha)):
        raise ValueError(f"star drift requires alpha + beta*sqrt(n) = 0, got {crit}")
    w = star_drift_weights(g)
    if two_step:
        return linear_drift_two_step(g, params, zeta, w)
    return linear_drift_one_step(g, params, zeta, w)


def drift_log_quarterplane(params: ModelParams, x: int, y: int) -> float:
    """Generator of the CTMC applied to log(x+y+1) on the two-vertex graph.

    Defined for the null-recurrence check alpha = 0, beta < 0.
    """
    if params.alpha != 0.0:
        raise ValueError("quarter-plane log drift requires alpha = 0")
    if not params.beta < 0.0:
        raise ValueError("quarter-plane log drift requires beta < 0")
    if x < 0 or y < 0:
        raise ValueError("coordinates must be non-negative")
    c = x + y
    up = math.log(c + 2) - math.log(c + 1)
    births = up * (math.exp(params.beta * y) + math.exp(params.beta * x))
    deaths = (1 if x > 0 else 0) + (1 if y > 0 else 0)
    total = births
    if deaths:
        total += (math.log(c) - math.log(c + 1)) * deaths
    return total


# ---------------------------------------------------------------------------
# State enumeration helpers for exhaustive shell scans
# ---------------------------------------------------------------------------

def shell_states(n_vertices: int, s_min: int, s_max: int) -> np.ndarray:
    """All non-negative integer vectors with total spin in [s_min, s_max]."""
    if n_vertices < 1 or s_min < 0 or s_max < s_min:
        raise ValueError("invalid shell bounds")
    blocks = []
    for s in range(s_min, s_max + 1):
        blocks.append(_compositions(n_vertices, s))
    return np.concatenate(blocks, axis=0)


def _compositions(n: int, s: int) -> np.ndarray:
    if n == 1:
        return np.array([[s]], dtype=np.int64)
    grids = np.meshgrid(*([np.arange(s + 1)] * (n - 1)), indexing="ij")
    head = np.stack([gr.ravel() for gr in grids], axis=1)
    rest = s - head.sum(axis=1)
    keep = rest >= 0
    return np.column_stack([head[keep], rest[keep]]).astype(np.int64)


def box_states(n_vertices: int, lo: int, hi: int) -> np.ndarray:
    """All states with every coordinate in [lo, hi]."""
    grids = np.meshgrid(*([np.arange(lo, hi + 1)] * n_vertices), indexing="ij")
    return np.stack([gr.ravel() for gr in grids], axis=1).astype(np.int64)


def diagonal_states(n_vertices: int, k_min: int, k_max: int) -> np.ndarray:
    """Constant configurations zeta = (k, ..., k) for k in [k_min, k_max]."""
    ks = np.arange(k_min, k_max + 1, dtype=np.int64)
    return np.repeat(ks[:, None], n_vertices, axis=1)


def suggested_shell_start_S(g: Graph, params: ModelParams, eps: float = 0.1) -> int:
    """Shell start for the S-drift certificate, doubled for safety margin.

    Derived from the drift bound: S > 2*n*eps / ((1-eps) * (alpha + beta*nu)).
    """
    rep = analyze(g)
    nu = rep.constant_degree if rep.constant_degree is not None else rep.max_degree
    crit = params.alpha + params.beta * nu
    if crit <= 0:
        raise ValueError("S-drift certificate applies only when alpha + beta*nu > 0")
    c1 = 2.0 * g.vertex_count * eps / ((1.0 - eps) * crit)
    return 2 * math.ceil(c1)


def suggested_shell_start_GQ(g: Graph, params: ModelParams, eps: float = 0.1) -> int:
    """Shell start for the Q-drift certificate, doubled for safety margin.

    Derived from bounding the generator of Q by
    2n*exp((-alpha-2)/2) - alpha*n + 2*C*(alpha + beta*max_degree) < -eps.
    """
    rep = analyze(g)
    crit = params.alpha + params.beta * rep.max_degree
    if crit >= 0:
        raise ValueError("Q-drift certificate applies only when alpha + beta*max_degree < 0")
    n = g.vertex_count
    bound = 2.0 * n * math.exp((-params.alpha - 2.0) / 2.0) - params.alpha * n + eps
    return 2 * math.ceil(bound / (-2.0 * crit))
