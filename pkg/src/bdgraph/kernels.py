"""Jitted inner loops shared by every simulator entry point.

All sampling is log-domain: the move with the largest log-weight sets the
shift, residuals are exponentiated and selected by inverse CDF.  The kernels
consume pre-generated uniforms so that runs are bit-reproducible from a seed
and identical whether driven step-by-step or in bulk.

The total jump rate is always >= 1 (an all-zero configuration has unit birth
weight everywhere, and otherwise at least one death weight contributes 1), so
log rates are non-negative and holding times are finite.
"""
from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


STOP_STEPS = 0
STOP_TIME = 1
STOP_SPIN_CAP = 2
STOP_PROXY = 3
STOP_SPIN_OVERFLOW = 4

STOP_NAMES = {
    STOP_STEPS: "max_steps",
    STOP_TIME: "max_time",
    STOP_SPIN_CAP: "max_total_spin",
    STOP_PROXY: "explosion_proxy",
    STOP_SPIN_OVERFLOW: "spin_overflow_guard",
}

#: Total-spin ceiling; 64-bit storage with a wide margin.
SPIN_OVERFLOW_GUARD = 2**62
#: Holding times are flushed to zero above this log total rate.
HOLDING_FLUSH_LOG_RATE = 700.0


@njit(cache=True)
def compute_phi(indptr, indices, spins):
    """Per-vertex neighbour spin sums (exact integer bookkeeping)."""
    n = spins.shape[0]
    phi = np.zeros(n, np.int64)
    for x in range(n):
        s = 0
        for k in range(indptr[x], indptr[x + 1]):
            s += spins[indices[k]]
        phi[x] = s
    return phi


@njit(cache=True)
def _sample_jump(alpha, beta, spins, phi, u, w):
    """Log-domain categorical draw over the 2n moves.

    Returns (vertex, direction, log_total_rate).  ``w`` is an n-slot float64
    scratch buffer.
    """
    n = spins.shape[0]
    m = alpha * spins[0] + beta * phi[0]
    npos = 0
    for x in range(n):
        ux = alpha * spins[x] + beta * phi[x]
        w[x] = ux
        if ux > m:
            m = ux
        if spins[x] > 0:
            npos += 1
    if npos > 0 and m < 0.0:
        m = 0.0
    total = 0.0
    for x in range(n):
        wx = math.exp(w[x] - m)
        w[x] = wx
        total += wx
    death_w = 0.0
    if npos > 0:
        death_w = math.exp(-m)
        total += npos * death_w
    lograte = m + math.log(total)
    r = u * total
    acc = 0.0
    for x in range(n):
        acc += w[x]
        if r < acc:
            return x, 1, lograte
    for x in range(n):
        if spins[x] > 0:
            acc += death_w
            if r < acc:
                return x, -1, lograte
    # Rounding pushed r to the top of the CDF; take the last positive-weight move.
    for x in range(n - 1, -1, -1):
        if spins[x] > 0:
            return x, -1, lograte
    return n - 1, 1, lograte


@njit(cache=True)
def _apply_move(indptr, indices, spins, phi, v, d):
    spins[v] += d
    for k in range(indptr[v], indptr[v + 1]):
        phi[indices[k]] += d


@njit(cache=True)
def step_kernel(indptr, indices, alpha, beta, spins, phi, u):
    """One embedded-chain jump, applied in place. Returns (vertex, dir, log rate)."""
    w = np.empty(spins.shape[0], np.float64)
    v, d, lograte = _sample_jump(alpha, beta, spins, phi, u, w)
    if d < 0 and spins[v] <= 0:
        raise RuntimeError("death sampled from a zero spin")
    _apply_move(indptr, indices, spins, phi, v, d)
    return v, d, lograte


@njit(cache=True)
def run_kernel(
    indptr,
    indices,
    alpha,
    beta,
    spins,
    phi,
    uniforms,
    is_ctmc,
    max_time,
    max_total_spin,
    proxy_enabled,
    proxy_eps,
    proxy_min_spin,
    ev_vertex,
    ev_dir,
    ev_time,
    ev_lograte,
    inv_ring,
    zero_steps,
):
    """Simulate up to ``ev_vertex.shape[0]`` events, recording them in place.

    Returns (steps, final_time, stop_code, zero_visit_count).  CTMC runs
    consume two uniforms per step (holding time first), DTMC runs one.
    State arrays ``spins``/``phi`` are advanced in place.
    """
    n = spins.shape[0]
    max_steps = ev_vertex.shape[0]
    w = np.empty(n, np.float64)
    total_spin = 0
    for x in range(n):
        total_spin += spins[x]
    t = 0.0
    steps = 0
    stop = STOP_STEPS
    ring_len = inv_ring.shape[0]
    ring_pos = 0
    ring_filled = 0
    ring_sum = 0.0
    steps_since_death = 0
    n_zero = 0
    uidx = 0
    while steps < max_steps:
        if is_ctmc:
            u_hold = uniforms[uidx]
            u_jump = uniforms[uidx + 1]
            uidx += 2
        else:
            u_hold = 0.0
            u_jump = uniforms[uidx]
            uidx += 1
        v, d, lograte = _sample_jump(alpha, beta, spins, phi, u_jump, w)
        if d < 0 and spins[v] <= 0:
            raise RuntimeError("death sampled from a zero spin")
        if is_ctmc:
            if lograte > HOLDING_FLUSH_LOG_RATE:
                dt = 0.0
            else:
                dt = -math.log(1.0 - u_hold) * math.exp(-lograte)
            if max_time > 0.0 and t + dt > max_time:
                t = max_time
                stop = STOP_TIME
                break
            t += dt
        _apply_move(indptr, indices, spins, phi, v, d)
        total_spin += d
        ev_vertex[steps] = v
        ev_dir[steps] = d
        if is_ctmc:
            ev_time[steps] = t
            ev_lograte[steps] = lograte
        steps += 1
        if total_spin == 0:
            if n_zero < zero_steps.shape[0]:
                zero_steps[n_zero] = steps - 1
            n_zero += 1
        if proxy_enabled:
            if d < 0:
                steps_since_death = 0
            else:
                steps_since_death += 1
            inv = math.exp(-lograte)
            if ring_filled == ring_len:
                ring_sum -= inv_ring[ring_pos]
            else:
                ring_filled += 1
            inv_ring[ring_pos] = inv
            ring_sum += inv
            ring_pos += 1
            if ring_pos == ring_len:
                ring_pos = 0
            if (
                steps_since_death >= ring_len
                and ring_filled == ring_len
                and ring_sum < proxy_eps
                and total_spin >= proxy_min_spin
            ):
                # The incremental sum can be polluted by cancellation; confirm
                # against the exact ring contents before triggering.
                exact = 0.0
                for k in range(ring_len):
                    exact += inv_ring[k]
                ring_sum = exact
                if exact < proxy_eps:
                    stop = STOP_PROXY
                    break
        if total_spin >= SPIN_OVERFLOW_GUARD:
            stop = STOP_SPIN_OVERFLOW
            break
        if max_total_spin > 0 and total_spin >= max_total_spin:
            stop = STOP_SPIN_CAP
            break
    return steps, t, stop, n_zero


@njit(cache=True)
def batch_final_states_kernel(indptr, indices, alpha, beta, init_spins, k_steps, uniforms, out):
    """Run ``out.shape[0]`` independent DTMC replicas for ``k_steps`` jumps each.

    Same per-step code path as ``run_kernel``; used for empirical k-step laws.
    """
    n = init_spins.shape[0]
    reps = out.shape[0]
    spins = np.empty(n, np.int64)
    w = np.empty(n, np.float64)
    uidx = 0
    for r in range(reps):
        for x in range(n):
            spins[x] = init_spins[x]
        phi = compute_phi(indptr, indices, spins)
        for _ in range(k_steps):
            v, d, lograte = _sample_jump(alpha, beta, spins, phi, uniforms[uidx], w)
            uidx += 1
            _apply_move(indptr, indices, spins, phi, v, d)
        for x in range(n):
            out[r, x] = spins[x]
