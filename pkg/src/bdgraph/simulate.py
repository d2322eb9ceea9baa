"""Exact stochastic simulation of the chains plus the limit-event detectors.

The embedded chain (DTMC) and the continuous-time chain (CTMC) make the same
jumps; the CTMC adds exponential holding times at the total jump rate.  Runs
are event-driven (rates are unbounded, so uniformization is not an option)
and bit-reproducible from a seed.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .graphs import Graph
from .kernels import STOP_NAMES
from .model import ModelParams, as_config

__all__ = [
    "EventRecord",
    "StopRule",
    "ProxySettings",
    "Trajectory",
    "RunSummary",
    "PairEvent",
    "ReplicateResult",
    "dtmc_step",
    "ctmc_step",
    "run",
    "detect_event_B",
    "detect_pair_event",
    "explosion_proxy",
    "replicate",
]

#: Runs longer than this switch to chunked summary-only mode.
TRAJECTORY_BUDGET = 2**26
_ZERO_VISIT_CAP = 2**20


@dataclass(frozen=True)
class EventRecord:
    """A single recorded jump: vertex and direction, cumulative time for CTMC."""

    step_index: int
    vertex: int
    direction: int
    time: float | None = None
    log_total_rate: float | None = None


@dataclass(frozen=True)
class ProxySettings:
    """Explosion-proxy trigger: no deaths for `depth` events, summably small
    inverse rates over those events, and a large total spin.  Evidence only,
    never proof."""

    depth: int = 100
    eps_tail: float = 1e-6
    min_total_spin: int = 200


@dataclass(frozen=True)
class StopRule:
    """When to stop a run; max_steps always applies, the rest are optional."""

    max_steps: int
    max_time: float | None = None
    max_total_spin: int | None = None
    explosion_proxy: ProxySettings | None = None

    def __post_init__(self) -> None:
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        if self.max_time is not None and self.max_time <= 0:
            raise ValueError("max_time must be positive")
        if self.max_total_spin is not None and self.max_total_spin <= 0:
            raise ValueError("max_total_spin must be positive")


@dataclass(frozen=True)
class PairEvent:
    """All window events at two distinct vertices, with birth fractions."""

    x1: int
    x2: int
    frac1: float
    frac2: float
    adjacent: bool


@dataclass
class Trajectory:
    """Recorded jump sequence of one run (times and rates only for CTMC)."""

    graph: Graph
    chain: str
    initial: np.ndarray
    vertices: np.ndarray
    directions: np.ndarray
    times: np.ndarray | None
    log_total_rates: np.ndarray | None
    final_time: float | None

    def __len__(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def final_configuration(self) -> np.ndarray:
        out = self.initial.copy()
        np.add.at(out, self.vertices, self.directions.astype(np.int64))
        return out

    def total_spins(self) -> np.ndarray:
        """Total spin after each event."""
        return int(self.initial.sum()) + np.cumsum(self.directions.astype(np.int64))

    def spins_at_steps(self, steps: np.ndarray) -> np.ndarray:
        """Configurations after the given (1-based) event counts; 0 = initial state."""
        steps = np.asarray(steps, dtype=np.int64)
        if (steps < 0).any() or (steps > len(self)).any():
            raise ValueError("steps out of range")
        n = self.graph.vertex_count
        out = np.empty((steps.shape[0], n), dtype=np.int64)
        for x in range(n):
            contrib = np.where(self.vertices == x, self.directions.astype(np.int64), 0).cumsum()
            vals = np.concatenate([[0], contrib])
            out[:, x] = self.initial[x] + vals[steps]
        return out

    def time_weighted_occupancy(self) -> dict[tuple[int, ...], float]:
        """Fraction of simulated time spent in each visited configuration."""
        if self.times is None or self.final_time is None:
            raise ValueError("time weighting requires a CTMC trajectory")
        m = len(self)
        if m == 0:
            return {tuple(int(v) for v in self.initial): 1.0}
        states = self.spins_at_steps(np.arange(0, m + 1))
        bounds = np.concatenate([[0.0], self.times, [self.final_time]])
        durations = np.diff(bounds)
        total = float(durations.sum())
        if total <= 0.0:
            raise ValueError("trajectory has zero simulated time")
        uniq, inverse = np.unique(states, axis=0, return_inverse=True)
        weights = np.bincount(inverse, weights=durations, minlength=uniq.shape[0])
        return {
            tuple(int(v) for v in uniq[i]): float(weights[i]) / total
            for i in range(uniq.shape[0])
        }

    def thinned_indices(self, thin: int, window: int | None = None) -> np.ndarray:
        """Every thin-th event plus every event in the detector window (the tail)."""
        m = len(self)
        if thin < 1:
            raise ValueError("thin must be >= 1")
        keep = np.zeros(m, dtype=bool)
        keep[::thin] = True
        if window is None:
            window = m // 2
        if window > 0:
            keep[m - window :] = True
        return np.nonzero(keep)[0]

    def to_csv(self, path: str | Path, thin: int = 1) -> None:
        """Write step,time,vertex,direction,total_spin rows (DTMC time = step)."""
        idx = self.thinned_indices(thin) if thin > 1 else np.arange(len(self))
        totals = self.total_spins()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "time", "vertex", "direction", "total_spin"])
            for i in idx:
                t = float(self.times[i]) if self.times is not None else float(i)
                writer.writerow(
                    [int(i), repr(t), int(self.vertices[i]), int(self.directions[i]), int(totals[i])]
                )


@dataclass
class RunSummary:
    """Aggregate facts of one run, including detector outcomes."""

    chain: str
    step_count: int
    simulated_time: float | None
    initial_configuration: tuple[int, ...]
    final_configuration: tuple[int, ...]
    increments: tuple[int, ...]
    decrements: tuple[int, ...]
    death_count_after_burnin: int
    stop_reason: str
    explosion_flag: str
    window: int
    event_b: tuple[int, int] | None
    pair_event: PairEvent | None
    pair_anomaly: bool
    zero_visits: int
    zero_visit_steps: tuple[int, ...]
    growth_rates: tuple[float, ...]
    summary_only: bool = False

    def to_json_dict(self) -> dict:
        d = {
            "chain": self.chain,
            "step_count": self.step_count,
            "simulated_time": self.simulated_time,
            "initial_configuration": list(self.initial_configuration),
            "final_configuration": list(self.final_configuration),
            "increments": list(self.increments),
            "decrements": list(self.decrements),
            "death_count_after_burnin": self.death_count_after_burnin,
            "stop_reason": self.stop_reason,
            "explosion_flag": self.explosion_flag,
            "window": self.window,
            "event_b": None if self.event_b is None else {"tau": self.event_b[0], "vertex": self.event_b[1]},
            "pair_event": None
            if self.pair_event is None
            else {
                "x1": self.pair_event.x1,
                "x2": self.pair_event.x2,
                "frac1": self.pair_event.frac1,
                "frac2": self.pair_event.frac2,
                "adjacent": self.pair_event.adjacent,
            },
            "pair_anomaly": self.pair_anomaly,
            "zero_visits": self.zero_visits,
            "growth_rates": list(self.growth_rates),
            "summary_only": self.summary_only,
        }
        return d


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def dtmc_step(g: Graph, params: ModelParams, zeta, rng: np.random.Generator):
    """One embedded-chain jump from ``zeta``; returns (new config, EventRecord).

    Moves are weighted exp(U(x)) for births and 1 for positive-spin deaths,
    sampled in the log domain (shift by the max log-weight, exponentiate
    residuals, inverse-CDF draw).
    """
    spins = as_config(zeta, g.vertex_count)
    indptr, indices = g.csr
    phi = kernels.compute_phi(indptr, indices, spins)
    u = rng.random()
    v, d, _ = kernels.step_kernel(indptr, indices, params.alpha, params.beta, spins, phi, u)
    return spins, EventRecord(step_index=0, vertex=int(v), direction=int(d))


def ctmc_step(g: Graph, params: ModelParams, xi, rng: np.random.Generator):
    """One continuous-time jump; the holding time is Exponential(total rate).

    Consumes two uniforms, holding time first, matching ``run``'s stream.
    """
    spins = as_config(xi, g.vertex_count)
    indptr, indices = g.csr
    phi = kernels.compute_phi(indptr, indices, spins)
    u_hold = rng.random()
    u_jump = rng.random()
    v, d, lograte = kernels.step_kernel(indptr, indices, params.alpha, params.beta, spins, phi, u_jump)
    if lograte > kernels.HOLDING_FLUSH_LOG_RATE:
        dt = 0.0
    else:
        dt = -math.log(1.0 - u_hold) * math.exp(-lograte)
    return spins, EventRecord(
        step_index=0, vertex=int(v), direction=int(d), time=dt, log_total_rate=float(lograte)
    )


def detect_event_B(trajectory: Trajectory, window: int) -> tuple[int, int] | None:
    """Single-vertex takeover proxy: the final ``window`` events are all births
    at one vertex.  Returns the earliest step from which that holds, with the
    vertex; None otherwise."""
    m = len(trajectory)
    if window > m:
        raise ValueError("window exceeds trajectory length")
    if window <= 0:
        return None
    v = trajectory.vertices
    d = trajectory.directions
    tail_v = v[m - window :]
    tail_d = d[m - window :]
    if (tail_d < 0).any() or (tail_v != tail_v[0]).any():
        return None
    x = int(tail_v[0])
    bad = np.nonzero((v != x) | (d < 0))[0]
    tau = int(bad[-1]) + 1 if bad.size else 0
    return tau, x


def detect_pair_event(trajectory: Trajectory, window: int) -> PairEvent | None:
    """Adjacent-pair takeover proxy: all ``window`` tail events occur at exactly
    two distinct vertices.  A non-adjacent pair is reported with
    ``adjacent=False`` (an anomaly, not a match); a single vertex is None."""
    m = len(trajectory)
    if window > m:
        raise ValueError("window exceeds trajectory length")
    if window <= 0:
        return None
    tail_v = trajectory.vertices[m - window :]
    tail_d = trajectory.directions[m - window :]
    present = np.unique(tail_v)
    if present.size != 2:
        return None
    x1, x2 = int(present[0]), int(present[1])
    frac1 = float(np.sum((tail_v == x1) & (tail_d > 0))) / window
    frac2 = float(np.sum((tail_v == x2) & (tail_d > 0))) / window
    adjacent = x2 in trajectory.graph.neighbor_sets[x1]
    return PairEvent(x1=x1, x2=x2, frac1=frac1, frac2=frac2, adjacent=adjacent)


def explosion_proxy(
    trajectory: Trajectory, settings: ProxySettings = ProxySettings()
) -> bool:
    """Post-hoc explosion proxy on a CTMC trajectory's final events.

    True when the last ``depth`` events contain no death, their inverse total
    rates sum below ``eps_tail``, and the final total spin is large.  Proxy
    evidence only; explosion itself is not observable in finite runs.
    """
    if trajectory.log_total_rates is None:
        raise ValueError("explosion proxy requires a CTMC trajectory")
    m = len(trajectory)
    if m < settings.depth:
        return False
    tail_d = trajectory.directions[m - settings.depth :]
    if (tail_d < 0).any():
        return False
    inv = np.exp(-trajectory.log_total_rates[m - settings.depth :])
    if float(inv.sum()) >= settings.eps_tail:
        return False
    return int(trajectory.final_configuration.sum()) >= settings.min_total_spin


def _summarize(
    g: Graph,
    chain: str,
    initial: np.ndarray,
    trajectory: Trajectory | None,
    steps: int,
    final_time: float | None,
    stop_code: int,
    n_zero: int,
    zero_steps: np.ndarray,
    increments: np.ndarray,
    decrements: np.ndarray,
    deaths_after_burnin: int,
    final_spins: np.ndarray,
    window: int,
    summary_only: bool,
) -> RunSummary:
    event_b = None
    pair = None
    anomaly = False
    if trajectory is not None and steps > 0 and window > 0:
        event_b = detect_event_B(trajectory, window)
        pe = detect_pair_event(trajectory, window)
        if pe is not None and pe.adjacent:
            pair = pe
        elif pe is not None:
            anomaly = True
    rates = tuple(
        (float(final_spins[x]) - float(initial[x])) / steps if steps else 0.0
        for x in range(g.vertex_count)
    )
    return RunSummary(
        chain=chain,
        step_count=steps,
        simulated_time=final_time,
        initial_configuration=tuple(int(v) for v in initial),
        final_configuration=tuple(int(v) for v in final_spins),
        increments=tuple(int(v) for v in increments),
        decrements=tuple(int(v) for v in decrements),
        death_count_after_burnin=deaths_after_burnin,
        stop_reason=STOP_NAMES[stop_code],
        explosion_flag="proxy_triggered" if stop_code == kernels.STOP_PROXY else "none",
        window=window,
        event_b=event_b,
        pair_event=pair,
        pair_anomaly=anomaly,
        zero_visits=n_zero,
        zero_visit_steps=tuple(int(s) for s in zero_steps),
        growth_rates=rates,
        summary_only=summary_only,
    )


def run(
    g: Graph,
    params: ModelParams,
    initial,
    stop: StopRule,
    seed,
    chain: str = "dtmc",
    window: int | None = None,
    trajectory_budget: int = TRAJECTORY_BUDGET,
) -> tuple[Trajectory | None, RunSummary]:
    """Simulate one run; deterministic given ``seed``.

    ``window`` is the detector window (default: second half of the recorded
    events; the first half is burn-in).  Runs whose ``max_steps`` exceeds
    ``trajectory_budget`` keep no trajectory and return a flagged
    summary-only result computed over chunks.
    """
    if chain not in ("dtmc", "ctmc"):
        raise ValueError("chain must be 'dtmc' or 'ctmc'")
    is_ctmc = chain == "ctmc"
    if stop.explosion_proxy is not None and not is_ctmc:
        raise ValueError("the explosion proxy stop rule applies to CTMC runs only")
    if not g.is_connected:
        raise ValueError("simulation requires a connected graph")
    spins = as_config(initial, g.vertex_count)
    initial_arr = spins.copy()
    indptr, indices = g.csr
    phi = kernels.compute_phi(indptr, indices, spins)
    rng = _as_generator(seed)

    proxy = stop.explosion_proxy
    proxy_enabled = proxy is not None
    ring = np.zeros(proxy.depth if proxy_enabled else 1, dtype=np.float64)
    proxy_eps = proxy.eps_tail if proxy_enabled else 0.0
    proxy_min = proxy.min_total_spin if proxy_enabled else 0

    summary_only = stop.max_steps > trajectory_budget
    chunk = min(stop.max_steps, trajectory_budget)
    max_time = stop.max_time if stop.max_time is not None else 0.0
    max_spin = stop.max_total_spin if stop.max_total_spin is not None else 0

    increments = np.zeros(g.vertex_count, dtype=np.int64)
    decrements = np.zeros(g.vertex_count, dtype=np.int64)
    deaths_after_burnin = 0
    burnin = stop.max_steps // 2
    total_steps = 0
    t = 0.0
    stop_code = kernels.STOP_STEPS
    n_zero_total = 0
    zero_kept: list[int] = []
    trajectory: Trajectory | None = None

    while True:
        cap = min(chunk, stop.max_steps - total_steps)
        ev_vertex = np.empty(cap, dtype=np.int32)
        ev_dir = np.empty(cap, dtype=np.int8)
        ev_time = np.empty(cap if is_ctmc else 0, dtype=np.float64)
        ev_lograte = np.empty(cap if is_ctmc else 0, dtype=np.float64)
        zero_buf = np.empty(min(cap, _ZERO_VISIT_CAP), dtype=np.int64)
        uniforms = rng.random(2 * cap if is_ctmc else cap)
        steps, t_chunk, stop_code, n_zero = kernels.run_kernel(
            indptr,
            indices,
            params.alpha,
            params.beta,
            spins,
            phi,
            uniforms,
            is_ctmc,
            max_time - t if max_time > 0.0 else 0.0,
            max_spin,
            proxy_enabled,
            proxy_eps,
            proxy_min,
            ev_vertex,
            ev_dir,
            ev_time,
            ev_lograte,
            ring,
            zero_buf,
        )
        # NB: proxy ring state does not persist across chunks; only the
        # chunked summary-only path is affected and it is flagged as such.
        kept = min(n_zero, zero_buf.shape[0])
        zero_kept.extend(int(zero_buf[i]) + total_steps for i in range(kept))
        n_zero_total += n_zero
        births_mask = ev_dir[:steps] > 0
        increments += np.bincount(ev_vertex[:steps][births_mask], minlength=g.vertex_count)
        decrements += np.bincount(ev_vertex[:steps][~births_mask], minlength=g.vertex_count)
        death_pos = np.nonzero(~births_mask)[0] + total_steps
        deaths_after_burnin += int(np.sum(death_pos >= burnin))
        if is_ctmc:
            ev_time[:steps] += t
            t += t_chunk
        total_steps += steps
        if not summary_only:
            trajectory = Trajectory(
                graph=g,
                chain=chain,
                initial=initial_arr,
                vertices=ev_vertex[:steps],
                directions=ev_dir[:steps],
                times=ev_time[:steps] if is_ctmc else None,
                log_total_rates=ev_lograte[:steps] if is_ctmc else None,
                final_time=t if is_ctmc else None,
            )
            break
        if stop_code != kernels.STOP_STEPS or total_steps >= stop.max_steps:
            break

    if trajectory is not None:
        # Exact burn-in: first half of the realized trajectory.
        actual_burnin = total_steps // 2
        deaths_after_burnin = int(np.sum(trajectory.directions[actual_burnin:] < 0))
        if window is None:
            window = total_steps - actual_burnin
        window = min(window, total_steps)
    else:
        window = 0

    summary = _summarize(
        g,
        chain,
        initial_arr,
        trajectory,
        total_steps,
        t if is_ctmc else None,
        stop_code,
        n_zero_total,
        np.asarray(zero_kept[:_ZERO_VISIT_CAP], dtype=np.int64),
        increments,
        decrements,
        deaths_after_burnin,
        spins,
        window,
        summary_only,
    )
    return trajectory, summary


@dataclass
class ReplicateResult:
    """Per-replica summaries plus order-independent aggregate statistics."""

    n_replicas: int
    base_seed: int
    summaries: list[RunSummary] = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)


def _wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def replicate(
    g: Graph,
    params: ModelParams,
    initial,
    stop: StopRule,
    chain: str,
    n_replicas: int,
    base_seed: int,
    window: int | None = None,
    keep_trajectories: bool = False,
) -> ReplicateResult:
    """Run independent replicas on spawned seed streams and aggregate.

    Aggregation (frequencies with Wilson CIs, mean growth rates) is a pure
    function of the per-replica summaries, so it is independent of any
    execution order.
    """
    if n_replicas < 1:
        raise ValueError("n_replicas must be >= 1")
    seeds = np.random.SeedSequence(base_seed).spawn(n_replicas)
    result = ReplicateResult(n_replicas=n_replicas, base_seed=base_seed)
    trajectories = []
    for ss in seeds:
        traj, summary = run(g, params, initial, stop, ss, chain=chain, window=window)
        result.summaries.append(summary)
        if keep_trajectories:
            trajectories.append(traj)
    n = n_replicas
    eventb = sum(1 for s in result.summaries if s.event_b is not None)
    pair = sum(1 for s in result.summaries if s.pair_event is not None)
    proxy = sum(1 for s in result.summaries if s.explosion_flag == "proxy_triggered")
    rates = np.array([s.growth_rates for s in result.summaries])
    result.aggregate = {
        "event_b_frequency": eventb / n,
        "event_b_ci": _wilson_interval(eventb, n),
        "pair_event_frequency": pair / n,
        "pair_event_ci": _wilson_interval(pair, n),
        "proxy_frequency": proxy / n,
        "proxy_ci": _wilson_interval(proxy, n),
        "mean_growth_rates": rates.mean(axis=0).tolist(),
        "min_growth_rates": rates.min(axis=0).tolist(),
        "max_growth_rates": rates.max(axis=0).tolist(),
        "mean_deaths_after_burnin": float(
            np.mean([s.death_count_after_burnin for s in result.summaries])
        ),
    }
    if keep_trajectories:
        result.aggregate["trajectories"] = trajectories
    return result
