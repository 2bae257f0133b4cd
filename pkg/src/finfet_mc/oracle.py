"""
Monte-Carlo cross-checks for the analytic detection and occupancy formulas.

Samples are drawn from the model's own distributional assumptions (Gaussian
output current per symbol, Binomial receptor occupancy). Work is split into
fixed-size chunks, each with its own child seed, so results do not depend on
the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .link import SymbolStats

__all__ = ["TrialConfig", "PRNG_NAME", "simulate_sep", "simulate_binding"]

PRNG_NAME = "PCG64"
CHUNK = 1 << 18


@dataclass(frozen=True)
class TrialConfig:
    n_trials: int = 1_000_000
    seed: int = 0
    workers: int = 1


def _chunks(cfg: TrialConfig) -> List[Tuple[int, np.random.SeedSequence]]:
    n_chunks = max(1, math.ceil(cfg.n_trials / CHUNK))
    seeds = np.random.SeedSequence(cfg.seed).spawn(n_chunks)
    sizes = [CHUNK] * (n_chunks - 1) + [cfg.n_trials - CHUNK * (n_chunks - 1)]
    return list(zip(sizes, seeds))


def _map(fn, work, workers: int):
    if workers <= 1:
        return [fn(w) for w in work]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, work))


def simulate_sep(stats: SymbolStats, trials: TrialConfig = TrialConfig()) -> Tuple[float, float]:
    """Empirical symbol error rate and its binomial standard error."""
    mu = np.asarray(stats.mu)
    sd = np.sqrt(np.asarray(stats.sigma2))
    thr = np.asarray(stats.thresholds)

    def run(item):
        n, ss = item
        rng = np.random.Generator(np.random.PCG64(ss))
        sym = rng.integers(0, stats.M, size=n)
        current = rng.normal(mu[sym], sd[sym])
        decided = np.searchsorted(thr, current, side="right")
        return int(np.count_nonzero(decided != sym))

    errors = sum(_map(run, _chunks(trials), trials.workers))
    p = errors / trials.n_trials
    return p, math.sqrt(p * (1.0 - p) / trials.n_trials)


def simulate_binding(N_R: int, P_on: float, trials: TrialConfig = TrialConfig()) -> Tuple[float, float]:
    """Sample mean and (unbiased) variance of Binomial(N_R, P_on) occupancy."""
    if not 0.0 <= P_on <= 1.0:
        raise ValueError("P_on must lie in [0, 1]")

    def run(item):
        n, ss = item
        rng = np.random.Generator(np.random.PCG64(ss))
        x = rng.binomial(N_R, P_on, size=n).astype(float)
        m = x.mean()
        return n, m, float(np.square(x - m).sum())

    # pairwise merge of (count, mean, sum of squared deviations)
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in _map(run, _chunks(trials), trials.workers):
        total = n + nb
        delta = mb - mean
        m2 += m2b + delta * delta * n * nb / total
        mean += delta * nb / total
        n = total
    return mean, (m2 / (n - 1) if n > 1 else 0.0)
