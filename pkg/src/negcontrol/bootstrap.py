"""Seeded nonparametric bootstrap.

Each replicate ``b`` draws its resampling counts from a generator keyed on
``(seed, b)``, so the replicate values do not depend on how many worker
threads evaluate them or in which order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .errors import AnalysisError

log = logging.getLogger(__name__)

DEFAULT_B = 500


def replicate_counts(n: int, seed: int, b: int) -> np.ndarray:
    """Multinomial(n, 1/n) resampling counts for replicate ``b``."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(b,)))
    return np.bincount(rng.integers(0, n, n), minlength=n).astype(np.float64)


@dataclass(frozen=True)
class BootstrapResult:
    replicates: np.ndarray
    n_failed: int

    @property
    def se(self) -> float:
        ok = self.replicates[np.isfinite(self.replicates)]
        return float(np.std(ok, ddof=1)) if ok.size > 1 else float("nan")

    def percentile_ci(self, level: float = 0.95):
        ok = self.replicates[np.isfinite(self.replicates)]
        a = (1.0 - level) / 2.0
        return float(np.quantile(ok, a)), float(np.quantile(ok, 1.0 - a))


def bootstrap(
    stat: Callable[[np.ndarray], float],
    n: int,
    n_boot: int = DEFAULT_B,
    seed: int = 0,
    workers: int = 1,
    max_fail_frac: float = 0.1,
) -> BootstrapResult:
    """Evaluate ``stat(counts)`` on ``n_boot`` resamples of ``n`` rows.

    ``stat`` receives frequency weights (resampling counts). Replicates that
    raise :class:`AnalysisError` are recorded as NaN; if more than
    ``max_fail_frac`` of them fail the last error is re-raised.
    """
    if n_boot < 2:
        raise ValueError("n_boot must be at least 2")

    def one(b):
        try:
            return float(stat(replicate_counts(n, seed, b))), None
        except AnalysisError as exc:
            return float("nan"), exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(n_boot)))
    else:
        results = [one(b) for b in range(n_boot)]
    reps = np.array([r[0] for r in results])
    errors = [r[1] for r in results if r[1] is not None]
    if len(errors) > max_fail_frac * n_boot:
        raise errors[-1]
    if errors:
        log.warning("%d of %d bootstrap replicates failed", len(errors), n_boot)
    return BootstrapResult(reps, len(errors))


def normal_interval(estimate: float, se: float, level: float = 0.95):
    z = stats.norm.ppf(0.5 + level / 2.0)
    return estimate - z * se, estimate + z * se


def expand(counts: np.ndarray) -> np.ndarray:
    """Row indices realising integer resampling counts."""
    return np.repeat(np.arange(counts.shape[0]), counts.astype(np.int64))
