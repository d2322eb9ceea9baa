"""Closed-form quantities of the interacting birth-and-death process.

State is a vector of non-negative integer spins, one per vertex.  A spin at
``x`` jumps up at rate ``exp(U(x))`` where the potential is

    U(x, xi) = alpha * xi_x + beta * sum of neighbour spins,

and every positive spin jumps down at rate 1.  The chain is reversible with
invariant weight ``W``; everything here stays in the log domain because
potentials grow linearly along trajectories and the weights overflow any
fixed-width float long before the interesting regimes show themselves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, GraphError, analyze

__all__ = [
    "ModelParams",
    "as_config",
    "interaction_sum",
    "potential",
    "potentials",
    "log_weight",
    "quadratic_Q",
    "linear_S",
    "build_AQ",
    "ldlt_positive_pivots",
    "pd_verdict",
    "positive_definite",
    "spectral_summary",
    "star_potential_identity_residual",
    "jump_log_weights",
    "jump_probabilities",
    "log_total_rate",
]

#: Minimal-eigenvalue band treated as "boundary" rather than PD / not PD.
PD_BOUNDARY_BAND = 1e-9
#: LDL^T pivots at or below this are factorization failures.
PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """The interaction pair (alpha, beta); both must be finite reals."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("alpha and beta must be finite")


def as_config(xi, n: int) -> np.ndarray:
    """Validate and convert a spin vector: length n, integer, non-negative."""
    arr = np.asarray(xi)
    if arr.shape != (n,):
        raise ValueError(f"configuration must have length {n}, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(arr)
        if not np.array_equal(rounded, arr):
            raise ValueError("configuration entries must be integers")
        arr = rounded
    if (arr < 0).any():
        raise ValueError("configuration entries must be non-negative")
    return arr.astype(np.int64)


def interaction_sum(g: Graph, xi, x: int) -> int:
    """Sum of neighbour spins at vertex x."""
    xi = as_config(xi, g.vertex_count)
    if not 0 <= x < g.vertex_count:
        raise ValueError(f"vertex {x} out of range")
    return int(sum(xi[y] for y in g.adjacency[x]))


def potential(g: Graph, params: ModelParams, xi, x: int) -> float:
    """U(x, xi) = alpha*xi_x + beta * (neighbour spin sum). Never exponentiated here."""
    xi = as_config(xi, g.vertex_count)
    if not 0 <= x < g.vertex_count:
        raise ValueError(f"vertex {x} out of range")
    return params.alpha * int(xi[x]) + params.beta * sum(int(xi[y]) for y in g.adjacency[x])


def potentials(g: Graph, params: ModelParams, xi) -> np.ndarray:
    """All vertex potentials at once: alpha*xi + beta*(A @ xi)."""
    xi = as_config(xi, g.vertex_count)
    phi = g.adjacency_matrix @ xi.astype(np.float64)
    return params.alpha * xi.astype(np.float64) + params.beta * phi


def log_weight(g: Graph, params: ModelParams, xi) -> float:
    """log W(xi) = alpha * sum xi(xi-1)/2 + beta * sum over edges of xi_x*xi_y."""
    xi = as_config(xi, g.vertex_count)
    own = int(np.sum(xi * (xi - 1))) // 2
    cross = 0
    for x in range(g.vertex_count):
        for y in g.adjacency[x]:
            if y > x:
                cross += int(xi[x]) * int(xi[y])
    return params.alpha * own + params.beta * cross


def quadratic_Q(g: Graph, params: ModelParams, xi) -> float:
    """Quadratic part: Q(xi) = -alpha*sum xi^2 - 2*beta*sum over edges xi_x*xi_y.

    Satisfies log W = -(Q + alpha*S)/2.
    """
    xi = as_config(xi, g.vertex_count)
    own = int(np.sum(xi * xi))
    cross = 0
    for x in range(g.vertex_count):
        for y in g.adjacency[x]:
            if y > x:
                cross += int(xi[x]) * int(xi[y])
    return -params.alpha * own - 2.0 * params.beta * cross


def linear_S(xi) -> int:
    """Total spin S(xi)."""
    arr = np.asarray(xi)
    return int(arr.sum())


def build_AQ(g: Graph, params: ModelParams) -> np.ndarray:
    """Symmetric matrix of the quadratic form: a_xx = -alpha, a_xy = -beta on edges."""
    a = -params.beta * g.adjacency_matrix
    np.fill_diagonal(a, -params.alpha)
    return a


def ldlt_positive_pivots(m: np.ndarray, pivot_tol: float = PIVOT_TOL) -> bool:
    """Attempt a symmetric LDL^T factorization; True iff every pivot exceeds pivot_tol."""
    n = m.shape[0]
    a = np.array(m, dtype=np.float64, copy=True)
    for k in range(n):
        pivot = a[k, k]
        if not pivot > pivot_tol:
            return False
        if k + 1 < n:
            col = a[k + 1 :, k] / pivot
            a[k + 1 :, k + 1 :] -= np.outer(col, a[k + 1 :, k])
    return True


def _require_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not np.array_equal(m, m.T):
        raise ValueError("matrix must be symmetric")
    return m


def pd_verdict(m: np.ndarray, band: float = PD_BOUNDARY_BAND) -> str:
    """Tri-state PD decision by factorization with shifted probes.

    Returns "positive-definite", "not-positive-definite", or "boundary" when
    the minimal eigenvalue lies within ``band`` of zero.  The transient regime
    sits exactly on that boundary, so it must not be settled by rounding.
    """
    m = _require_symmetric(m)
    eye = np.eye(m.shape[0])
    if ldlt_positive_pivots(m - band * eye):
        return "positive-definite"
    if not ldlt_positive_pivots(m + band * eye):
        return "not-positive-definite"
    return "boundary"


def positive_definite(m: np.ndarray) -> bool:
    """True iff the factorization verdict is strictly positive-definite."""
    return pd_verdict(m) == "positive-definite"


def spectral_summary(g: Graph, params: ModelParams) -> list[tuple[float, int]] | None:
    """Closed-form eigenvalue/multiplicity pairs of the quadratic-form matrix.

    Available for complete graphs ({beta-alpha with multiplicity n-1,
    -alpha-(n-1)beta simple}) and stars ({-alpha with multiplicity n-1,
    -alpha +/- beta*sqrt(n) simple each); None otherwise.
    """
    report = analyze(g)
    alpha, beta = params.alpha, params.beta
    if report.is_complete:
        n = g.vertex_count
        pairs = [(beta - alpha, n - 1), (-alpha - (n - 1) * beta, 1)]
    elif report.star_leaf_count is not None:
        n = report.star_leaf_count
        root = beta * math.sqrt(n)
        pairs = [(-alpha, n - 1), (-alpha - root, 1), (-alpha + root, 1)]
    else:
        return None
    merged: dict[float, int] = {}
    for ev, mult in pairs:
        if mult > 0:
            merged[ev] = merged.get(ev, 0) + mult
    return sorted(merged.items())


def star_potential_identity_residual(g: Graph, params: ModelParams, xi) -> float:
    """LHS - RHS of the star potential identity; zero for every configuration.

    On a star with n leaves and alpha < 0:
        (n*beta + |alpha|) * U(center) + (beta + |alpha|) * sum of leaf potentials
            = (n*beta^2 - alpha^2) * S.
    """
    report = analyze(g)
    if report.star_leaf_count is None:
        raise GraphError("star potential identity requires a star graph")
    if not params.alpha < 0:
        raise ValueError("star potential identity requires alpha < 0")
    n = report.star_leaf_count
    center = next(x for x in range(g.vertex_count) if g.degrees[x] == max(g.degrees))
    xi = as_config(xi, g.vertex_count)
    u = potentials(g, params, xi)
    abs_a = -params.alpha
    lhs = (n * params.beta + abs_a) * u[center] + (params.beta + abs_a) * (u.sum() - u[center])
    rhs = (n * params.beta**2 - params.alpha**2) * linear_S(xi)
    return float(lhs - rhs)


def jump_log_weights(g: Graph, params: ModelParams, xi) -> tuple[np.ndarray, np.ndarray]:
    """Log-weights of the 2n moves: births exp(U(x)), deaths 1 if xi_x > 0.

    Returns (birth log-weights, death mask); a masked-out death has weight 0.
    """
    xi = as_config(xi, g.vertex_count)
    return potentials(g, params, xi), xi > 0


def jump_probabilities(g: Graph, params: ModelParams, xi) -> np.ndarray:
    """Exact one-jump distribution, entries 0..n-1 births then n..2n-1 deaths.

    Shift-invariant softmax over the move log-weights; the reference for the
    sampled one-step law.
    """
    u, alive = jump_log_weights(g, params, xi)
    n = g.vertex_count
    logs = np.concatenate([u, np.zeros(n)])
    mask = np.concatenate([np.ones(n, dtype=bool), alive])
    shift = logs[mask].max()
    w = np.zeros(2 * n)
    w[mask] = np.exp(logs[mask] - shift)
    return w / w.sum()


def log_total_rate(g: Graph, params: ModelParams, xi) -> float:
    """log of the total jump rate: log(sum exp(U(x)) + #positive spins), stable."""
    u, alive = jump_log_weights(g, params, xi)
    npos = int(alive.sum())
    shift = float(u.max())
    if npos:
        shift = max(shift, 0.0)
    total = float(np.exp(u - shift).sum())
    if npos:
        total += npos * math.exp(-shift)
    return shift + math.log(total)
