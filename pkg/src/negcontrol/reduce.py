"""Bias reduction: future-exposure adjustment and NCO-standardised ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bootstrap import normal_interval
from .errors import InputError, SeriesTooShort
from .model import EstimateReport, Method
from .regression import normal_p_value, ols_fit


@dataclass(frozen=True)
class TimeSeriesDataset:
    t: np.ndarray
    a: np.ndarray
    y: np.ndarray
    x: Optional[np.ndarray] = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64)
        a = np.asarray(self.a, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if not (t.shape == a.shape == y.shape) or t.ndim != 1:
            raise InputError("t, a and y must be 1-D vectors of equal length")
        if t.size > 1 and not np.all(np.diff(t) == 1.0):
            raise InputError("time index must increase in unit steps with no gaps")
        x = self.x
        if x is not None:
            x = np.asarray(x, dtype=np.float64)
            x = x[:, None] if x.ndim == 1 else x
            if x.shape[0] != t.size:
                raise InputError("covariates must have one row per time point")
        for name, v in (("t", t), ("a", a), ("y", y), ("x", x)):
            object.__setattr__(self, name, v)

    def __len__(self):
        return self.t.shape[0]


def reduce_future_exposure(
    ts: TimeSeriesDataset,
    lead: bool = True,
    lag: bool = False,
    robust: bool = False,
    ci_level: float = 0.95,
) -> EstimateReport:
    """Regress ``Y_t`` on ``A_t``, covariates and the next exposure ``A_{t+1}``.

    Adding the future exposure (a negative control exposure) soaks up part of
    the confounding when it shares the confounder's sign with ``A_t``;
    ``lag=True`` also adds ``A_{t-1}``. Rows without the required lead/lag
    are dropped. The naive fit without lead/lag, on the same rows, is
    reported under ``diagnostics["naive"]``.
    """
    T = len(ts)
    lo = 1 if lag else 0
    hi = T - 1 if lead else T
    rows = np.arange(lo, hi)
    p = 0 if ts.x is None else ts.x.shape[1]
    k = 2 + p + int(lead) + int(lag)
    if rows.size <= k + 2:
        raise SeriesTooShort(f"{rows.size} usable rows for {k} regressors")

    base = [np.ones(rows.size), ts.a[rows]]
    names = ["const", "A_t"]
    if p:
        base += [ts.x[rows, j] for j in range(p)]
        names += [f"X{j + 1}_t" for j in range(p)]
    extra, extra_names = [], []
    if lead:
        extra.append(ts.a[rows + 1])
        extra_names.append("A_t+1")
    if lag:
        extra.append(ts.a[rows - 1])
        extra_names.append("A_t-1")

    y = ts.y[rows]
    naive = ols_fit(np.column_stack(base), y, robust=robust, names=names)
    fit = ols_fit(np.column_stack(base + extra), y, robust=robust, names=names + extra_names)
    est, se = fit["A_t"], fit.se_of("A_t")
    lo_ci, hi_ci = normal_interval(est, se, ci_level)
    diagnostics = {
        "naive": {"estimate": naive["A_t"], "se": naive.se_of("A_t")},
        "coefficients": dict(zip(fit.names, fit.coef.tolist())),
        "n_used": int(rows.size),
        "lead": lead,
        "lag": lag,
        "note": (
            "bias-reduced, not bias-free: reduction requires the future exposure to carry "
            "confounder information of the same sign as the current exposure and positive "
            "exposure autocorrelation; these conditions are not checked"
        ),
    }
    return EstimateReport(
        Method.reduce_future,
        est,
        se,
        ci_level,
        lo_ci,
        hi_ci,
        normal_p_value(est / se) if se > 0 else None,
        diagnostics,
    )


@dataclass(frozen=True)
class SmrStratum:
    observed_y: float
    expected_y: float
    observed_w: float
    expected_w: float

    def __post_init__(self):
        for name in ("observed_y", "expected_y", "observed_w", "expected_w"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be a positive finite number, got {v}")

    @property
    def crude(self) -> float:
        return self.observed_y / self.expected_y

    @property
    def nco_ratio(self) -> float:
        return self.observed_w / self.expected_w

    @classmethod
    def from_dict(cls, d) -> "SmrStratum":
        return cls(
            float(d["observed_y"]), float(d["expected_y"]), float(d["observed_w"]), float(d["expected_w"])
        )


def smr_adjust(strata: Sequence[SmrStratum]) -> np.ndarray:
    """Per-stratum ratio of the primary SMR to the negative-control SMR."""
    if not strata:
        raise InputError("at least one stratum is required")
    return np.array([s.crude / s.nco_ratio for s in strata])


def smr_bootstrap(strata: Sequence[SmrStratum], n_boot: int = 500, seed: int = 0) -> np.ndarray:
    """Parametric (Poisson) bootstrap standard errors of the adjusted ratios, one per stratum."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(21,))))
    oy = np.array([s.observed_y for s in strata])
    ow = np.array([s.observed_w for s in strata])
    ey = np.array([s.expected_y for s in strata])
    ew = np.array([s.expected_w for s in strata])
    by = np.maximum(rng.poisson(oy, size=(n_boot, oy.size)), 0.5)
    bw = np.maximum(rng.poisson(ow, size=(n_boot, ow.size)), 0.5)
    reps = (by / ey) / (bw / ew)
    return reps.std(axis=0, ddof=1)


def smr_report(strata: Sequence[SmrStratum], n_boot: int = 500, seed: int = 0) -> dict:
    adjusted = smr_adjust(strata)
    se = smr_bootstrap(strata, n_boot, seed)
    return {
        "method": Method.smr.value,
        "strata": [
            {"crude": s.crude, "nco_ratio": s.nco_ratio, "adjusted": float(a), "se": float(e)}
            for s, a, e in zip(strata, adjusted, se)
        ],
        "seed_used": seed,
    }
