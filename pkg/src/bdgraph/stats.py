"""Statistical helpers: total variation, goodness-of-fit, multinomial bounds."""
from __future__ import annotations

import math

import numpy as np
from scipy import stats as sps

__all__ = [
    "tv_distance_dicts",
    "tv_distance_arrays",
    "chi_square_pvalue",
    "four_sigma_category_check",
    "tv_four_sigma_bound",
    "empirical_distribution",
]


def tv_distance_arrays(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance between two probability vectors on the same support."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError("distributions must share a support")
    return 0.5 * float(np.abs(p - q).sum())


def tv_distance_dicts(p: dict, q: dict) -> float:
    """Total variation distance between two distributions given as dicts."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def empirical_distribution(samples) -> dict:
    """Normalized counts of hashable samples."""
    counts: dict = {}
    for s in samples:
        counts[s] = counts.get(s, 0) + 1
    total = sum(counts.values())
    return {k: v / total for k, v in counts.items()}


def chi_square_pvalue(counts: np.ndarray, probs: np.ndarray) -> float:
    """Chi-squared goodness-of-fit p-value of observed counts against probs.

    Categories with expected count below 5 are pooled into one bucket.
    """
    counts = np.asarray(counts, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    n = counts.sum()
    expected = probs * n
    big = expected >= 5.0
    obs = list(counts[big])
    exp = list(expected[big])
    if (~big).any():
        obs.append(float(counts[~big].sum()))
        exp.append(float(expected[~big].sum()))
    obs_arr = np.asarray(obs)
    exp_arr = np.asarray(exp)
    if len(obs_arr) < 2:
        return 1.0
    stat = float(np.sum((obs_arr - exp_arr) ** 2 / np.where(exp_arr > 0, exp_arr, 1.0)))
    dof = len(obs_arr) - 1
    return float(sps.chi2.sf(stat, dof))


def four_sigma_category_check(counts: np.ndarray, probs: np.ndarray) -> bool:
    """Per-category multinomial check: |count - Np| <= 4*sqrt(Np(1-p)) + 4.

    The +4 slack keeps near-zero-probability categories from tripping on a
    handful of counts.
    """
    counts = np.asarray(counts, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    n = counts.sum()
    sd = np.sqrt(n * probs * (1.0 - probs))
    return bool(np.all(np.abs(counts - n * probs) <= 4.0 * sd + 4.0))


def tv_four_sigma_bound(probs: np.ndarray, n_samples: int) -> float:
    """4-sigma bound on the TV distance between an n-sample empirical law and its source.

    Mean bound: TV has expectation at most (1/2) * sum sqrt(p(1-p)/N).
    Concentration: changing one sample moves TV by at most 1/N, so TV is
    sub-Gaussian with sigma <= 1/(2*sqrt(N)); four sigmas are added.
    """
    probs = np.asarray(probs, dtype=np.float64)
    mean_bound = 0.5 * float(np.sqrt(probs * (1.0 - probs) / n_samples).sum())
    return mean_bound + 4.0 * 0.5 / math.sqrt(n_samples)
