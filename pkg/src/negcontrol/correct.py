"""Bias-correcting estimators that use negative controls.

Notation: ``delta_AY`` and ``delta_ZY`` are the slopes of ``A`` and ``Z`` in
``Y ~ 1 + A + Z + X``; ``delta_AW`` and ``delta_ZW`` the same slopes in
``W ~ 1 + A + Z + X``. Under the linear structural model the treatment
effect is ``delta_AY - delta_AW * delta_ZY / delta_ZW``.

Point estimates use QR-based least squares. Bootstrap replicates of the
linear estimators are computed from resampling-weighted cross-product
matrices of the stacked data columns, which avoids refactorising the full
design for every replicate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg as sla
from scipy import stats

from .bootstrap import DEFAULT_B, bootstrap, expand, normal_interval
from .detect import WEAK_PROXY_FLOOR, WEAK_PROXY_WARN, proxy_strength
from .errors import (
    DegenerateCalibration,
    EmptyInversionSet,
    MissingRole,
    PositivityViolation,
    RankDeficient,
    SingularMomentJacobian,
    StageTwoSingular,
    WeakProxy,
    WeakProxyWarning,
)
from .model import Dataset, EstimateReport, Method, design_matrix
from .regression import contrast, gram_solve, normal_p_value, ols_fit, selector, weighted_gram

DEGENERATE_T = 0.5


def _require(data: Dataset, *roles: str) -> None:
    for role in roles:
        if getattr(data.roles, role) is None:
            raise MissingRole(f"this estimator needs a {role!r} column")


def _names(data: Dataset, *middle) -> list:
    return ["const", *middle, *data.roles.covariates]


def _analytic_report(method, est, se, ci_level, diagnostics, seed=None) -> EstimateReport:
    lo, hi = normal_interval(est, se, ci_level)
    p = normal_p_value(est / se) if se > 0 else None
    return EstimateReport(method, est, se, ci_level, lo, hi, p, diagnostics, seed)


def _bootstrap_report(method, est, boot, ci_level, diagnostics, seed, n_boot) -> EstimateReport:
    se = boot.se
    lo, hi = normal_interval(est, se, ci_level)
    p = normal_p_value(est / se) if se > 0 else None
    diagnostics = dict(diagnostics)
    diagnostics["bootstrap"] = {
        "replicates": n_boot,
        "failed": boot.n_failed,
        "percentile_ci": list(boot.percentile_ci(ci_level)),
    }
    return EstimateReport(method, est, se, ci_level, lo, hi, p, diagnostics, seed)


def _check_proxy(data: Dataset, hard_floor: Optional[float], exc=WeakProxy) -> dict:
    strength = proxy_strength(data, warn=False)
    weak = strength < WEAK_PROXY_WARN
    if hard_floor is not None and strength < hard_floor:
        raise exc(f"proxy strength {strength:.3g} is below the hard floor {hard_floor}")
    if weak:
        warnings.warn(
            f"weak proxy: |t| of the NCE in the NCO model is {strength:.3g} (< {WEAK_PROXY_WARN})",
            WeakProxyWarning,
            stacklevel=3,
        )
    return {"proxy_strength": strength, "weak_proxy": weak}


# -- single-control differences ----------------------------------------------


def estimate_naive(data: Dataset, robust: bool = False, ci_level: float = 0.95) -> EstimateReport:
    """Treatment coefficient of ``Y ~ 1 + A + X``, ignoring unmeasured confounding."""
    r = data.roles
    fit = ols_fit(design_matrix(data.A, data.X), data.Y, robust, _names(data, r.treatment))
    diag = {"n": data.n_rows, "coefficients": dict(zip(fit.names, fit.coef.tolist()))}
    return _analytic_report(Method.naive, fit[r.treatment], fit.se_of(r.treatment), ci_level, diag)


def estimate_nco_diff(data: Dataset, robust: bool = False, ci_level: float = 0.95) -> EstimateReport:
    """Treatment slope on ``Y`` minus treatment slope on the NCO ``W``.

    Unbiased when ``U`` shifts ``Y`` and ``W`` by the same additive amount
    (additive outcome equi-confounding). Both regressions share the design,
    so the difference equals the slope of ``Y - W`` on the same design and
    that fit supplies the standard error.
    """
    _require(data, "nco")
    r = data.roles
    X = design_matrix(data.A, data.X)
    names = _names(data, r.treatment)
    fy = ols_fit(X, data.Y, robust, names)
    fw = ols_fit(X, data.W, robust, names)
    fd = ols_fit(X, data.Y - data.W, robust, names)
    est = fy[r.treatment] - fw[r.treatment]
    diag = {
        "slope_A_on_Y": fy[r.treatment],
        "slope_A_on_W": fw[r.treatment],
        "assumption": "additive outcome equi-confounding: U-Y and U-W loadings are equal",
    }
    return _analytic_report(Method.nco_diff, est, fd.se_of(r.treatment), ci_level, diag)


def estimate_nce_diff(data: Dataset, robust: bool = False, ci_level: float = 0.95) -> EstimateReport:
    """Slope of ``A`` minus slope of the NCE ``Z`` in ``Y ~ 1 + A + Z + X``.

    Unbiased when ``A`` and ``Z`` load equally on ``U`` (additive treatment
    equi-confounding).
    """
    _require(data, "nce")
    r = data.roles
    fit = ols_fit(design_matrix(data.A, data.Z, data.X), data.Y, robust, _names(data, r.treatment, r.nce))
    c = np.zeros(fit.k)
    c[fit.index(r.treatment)] = 1.0
    c[fit.index(r.nce)] = -1.0
    est, se = contrast(fit, c)
    diag = {
        "delta_AY": fit[r.treatment],
        "delta_ZY": fit[r.nce],
        "assumption": "additive treatment equi-confounding: U-A and U-Z loadings are equal",
    }
    return _analytic_report(Method.nce_diff, est, se, ci_level, diag)


# -- double negative control -------------------------------------------------


class _Stack:
    """Column stack ``[1, A, Z, X..., W, Y]`` with index bookkeeping for the cross-product path."""

    def __init__(self, data: Dataset):
        self.p = data.X.shape[1]
        self.D = np.column_stack([np.ones(data.n_rows), data.A, data.Z, data.X, data.W, data.Y])
        self.width = self.D.shape[1]
        self.cov_idx = list(range(3, 3 + self.p))
        self.iW = 3 + self.p
        self.iY = 4 + self.p
        self.base = selector(self.width, 0, 1, 2, *self.cov_idx)  # [1, A, Z, X]

    def e(self, i):
        v = np.zeros(self.width)
        v[i] = 1.0
        return v

    def gram(self, counts):
        return weighted_gram(self.D, counts)


def _double_nc_from_gram(st: _Stack, M: np.ndarray) -> float:
    gy = gram_solve(M, st.base, st.e(st.iY))
    gw = gram_solve(M, st.base, st.e(st.iW))
    return gy[1] - gw[1] * gy[2] / gw[2]


def _tsls_from_gram(st: _Stack, M: np.ndarray) -> float:
    gamma = gram_solve(M, st.base, st.e(st.iW))
    w_hat = st.base @ gamma
    T = np.column_stack([st.e(0), st.e(1), w_hat, *[st.e(i) for i in st.cov_idx]])
    return gram_solve(M, T, st.e(st.iY))[1]


def _delta_fits(data: Dataset):
    r = data.roles
    X = design_matrix(data.A, data.Z, data.X)
    names = _names(data, r.treatment, r.nce)
    return ols_fit(X, data.Y, names=names), ols_fit(X, data.W, names=names)


def estimate_double_nc(
    data: Dataset,
    n_boot: int = DEFAULT_B,
    seed: int = 0,
    ci_level: float = 0.95,
    workers: int = 1,
    hard_floor: Optional[float] = WEAK_PROXY_FLOOR,
) -> EstimateReport:
    """Closed-form double negative control estimate ``delta_AY - delta_AW*delta_ZY/delta_ZW``.

    The NCO slope on ``A`` measures the confounding bias up to the scale
    ``beta_YU / beta_WU``; the ratio of the NCE slopes on ``Y`` and ``W``
    recovers that scale. Standard error from a seeded nonparametric bootstrap.

    Raises
    ------
    WeakProxy
        If the proxy strength (|t| of ``delta_ZW``) is below ``hard_floor``.
    """
    _require(data, "nce", "nco")
    proxy = _check_proxy(data, hard_floor)
    fy, fw = _delta_fits(data)
    r = data.roles
    d = {
        "delta_AY": fy[r.treatment],
        "delta_ZY": fy[r.nce],
        "delta_AW": fw[r.treatment],
        "delta_ZW": fw[r.nce],
    }
    est = d["delta_AY"] - d["delta_AW"] * d["delta_ZY"] / d["delta_ZW"]
    st = _Stack(data)
    boot = bootstrap(lambda c: _double_nc_from_gram(st, st.gram(c)), data.n_rows, n_boot, seed, workers)
    diag = {**d, "bias_estimate": d["delta_AY"] - est, **proxy}
    return _bootstrap_report(Method.double_nc, est, boot, ci_level, diag, seed, n_boot)


def estimate_tsls(
    data: Dataset,
    n_boot: int = DEFAULT_B,
    seed: int = 0,
    ci_level: float = 0.95,
    workers: int = 1,
    hard_floor: Optional[float] = WEAK_PROXY_FLOOR,
) -> EstimateReport:
    """Two-stage least squares with the NCE as instrument for the NCO.

    Stage I regresses ``W`` on ``(1, A, Z, X)`` and keeps the fitted values
    as a proxy of ``U``; stage II regresses ``Y`` on ``(1, A, W_hat, X)``.
    The stage-II treatment slope is the estimate. Its naive stage-II
    standard error ignores the first stage and is kept only as a diagnostic;
    the reported standard error is bootstrapped.
    """
    _require(data, "nce", "nco")
    proxy = _check_proxy(data, hard_floor, exc=StageTwoSingular)
    r = data.roles
    stage1 = ols_fit(design_matrix(data.A, data.Z, data.X), data.W, names=_names(data, r.treatment, r.nce))
    w_hat = stage1.predict(design_matrix(data.A, data.Z, data.X))
    try:
        stage2 = ols_fit(design_matrix(data.A, w_hat, data.X), data.Y, names=_names(data, r.treatment, "W_hat"))
    except RankDeficient as exc:
        raise StageTwoSingular(f"stage II design is singular ({exc}); the NCE does not move the NCO") from exc
    est = stage2[r.treatment]
    st = _Stack(data)
    boot = bootstrap(lambda c: _tsls_from_gram(st, st.gram(c)), data.n_rows, n_boot, seed, workers)
    diag = {
        "stage1": dict(zip(stage1.names, stage1.coef.tolist())),
        "stage2": dict(zip(stage2.names, stage2.coef.tolist())),
        "stage2_naive_se": stage2.se_of(r.treatment),
        **proxy,
    }
    return _bootstrap_report(Method.tsls, est, boot, ci_level, diag, seed, n_boot)


# -- GMM with a linear confounding bridge -------------------------------------


@dataclass(frozen=True)
class BridgeParams:
    """Linear confounding bridge ``h(W, A) = theta0 + thetaA*A + thetaW*W`` (+ covariate terms)."""

    theta0: float
    thetaA: float
    thetaW: float
    thetaX: tuple = ()

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.theta0, self.thetaA, self.thetaW, *self.thetaX)):
            raise ValueError("bridge parameters must be finite")

    def h(self, W, A, X=None):
        out = self.theta0 + self.thetaA * np.asarray(A) + self.thetaW * np.asarray(W)
        if self.thetaX:
            out = out + np.asarray(X) @ np.asarray(self.thetaX)
        return out

    def ate(self, W, X=None) -> float:
        """``E[h(W, 1)] - E[h(W, 0)]`` over the sample (equals ``thetaA`` for this linear form)."""
        W = np.asarray(W)
        return float(np.mean(self.h(W, np.ones_like(W), X)) - np.mean(self.h(W, np.zeros_like(W), X)))

    def to_dict(self) -> dict:
        return {"theta0": self.theta0, "thetaA": self.thetaA, "thetaW": self.thetaW, "thetaX": list(self.thetaX)}


MOMENT_LIBRARY: dict = {
    "1": lambda A, Z: np.ones_like(A),
    "A": lambda A, Z: A,
    "Z": lambda A, Z: Z,
    "AZ": lambda A, Z: A * Z,
    "Z2": lambda A, Z: Z**2,
    "Z3": lambda A, Z: Z**3,
    "AZ2": lambda A, Z: A * Z**2,
}


def parse_moments(spec: str) -> list:
    """Comma list of names from :data:`MOMENT_LIBRARY`, e.g. ``"1,A,Z,Z2"``."""
    names = [s.strip() for s in spec.split(",") if s.strip()]
    unknown = [s for s in names if s not in MOMENT_LIBRARY]
    if unknown:
        raise ValueError(f"unknown moment functions {unknown}; choose from {sorted(MOMENT_LIBRARY)}")
    return [MOMENT_LIBRARY[s] for s in names]


SINGULAR_TOL = 1e-12


def _gmm_core(E: np.ndarray, m: int, k: int, counts: Optional[np.ndarray] = None):
    """Linear GMM on the stack ``E = [G (m cols), R (k cols), y]``.

    Solves ``mean[G' (y - R theta)] = 0``. Just-identified systems are solved
    directly; over-identified ones use two-step GMM starting from the identity
    weight. Returns ``(theta, J)`` with ``J = nan`` when just identified.
    """
    M = weighted_gram(E, counts)
    n_eff = float(E.shape[0] if counts is None else counts.sum())
    Q = M[:m, m : m + k] / n_eff
    g = M[:m, m + k] / n_eff
    sv = np.linalg.svd(Q, compute_uv=False)
    if sv[-1] <= SINGULAR_TOL * sv[0]:
        raise SingularMomentJacobian(f"moment Jacobian is singular (condition {sv[0] / max(sv[-1], 1e-300):.3g})")
    if m == k:
        return np.linalg.solve(Q, g), float("nan")
    theta1 = np.linalg.lstsq(Q, g, rcond=None)[0]
    u = E[:, m + k] - E[:, m : m + k] @ theta1
    w2 = u**2 if counts is None else counts * u**2
    S = weighted_gram(E[:, :m], w2) / n_eff
    L = sla.cholesky(S, lower=True)
    Qt = sla.solve_triangular(L, Q, lower=True)
    gt = sla.solve_triangular(L, g, lower=True)
    theta = np.linalg.lstsq(Qt, gt, rcond=None)[0]
    resid = gt - Qt @ theta
    return theta, float(n_eff * resid @ resid)


def estimate_gmm(
    data: Dataset,
    moments: Optional[Sequence[Callable]] = None,
    n_boot: int = DEFAULT_B,
    seed: int = 0,
    ci_level: float = 0.95,
    workers: int = 1,
):
    """Fit the linear confounding bridge by GMM and return ``(BridgeParams, EstimateReport)``.

    Parameters
    ----------
    moments : sequence of callables ``f(A, Z) -> array``, optional
        Instrument functions ``g(A, Z)``; default ``(1, A, Z)``. Covariates are
        appended to both the instruments and the bridge. At least three are
        needed; more than three gives an over-identified two-step fit and a
        Hansen J statistic in the diagnostics.

    The ATE is ``thetaA``, which for the linear bridge equals
    ``E[h(W, 1)] - E[h(W, 0)]``.
    """
    _require(data, "nce", "nco")
    moments = list(moments) if moments is not None else [MOMENT_LIBRARY[s] for s in ("1", "A", "Z")]
    if len(moments) < 3:
        raise ValueError("at least three moment functions are required")
    proxy = _check_proxy(data, hard_floor=None)
    A, Z, X = data.A, data.Z, data.X
    G = np.column_stack([np.asarray(f(A, Z), dtype=np.float64) * np.ones_like(A) for f in moments] + [X])
    R = np.column_stack([np.ones_like(A), A, data.W, X])
    E = np.column_stack([G, R, data.Y])
    m, k = G.shape[1], R.shape[1]
    theta, J = _gmm_core(E, m, k)
    bridge = BridgeParams(float(theta[0]), float(theta[1]), float(theta[2]), tuple(float(v) for v in theta[3:]))
    boot = bootstrap(lambda c: _gmm_core(E, m, k, c)[0][1], data.n_rows, n_boot, seed, workers)
    diag = {
        "bridge": bridge.to_dict(),
        "ate_via_bridge": bridge.ate(data.W, X if X.shape[1] else None),
        "n_moments": m,
        "overidentified": m > k,
        **proxy,
    }
    if m > k:
        diag["hansen_j"] = J
        diag["hansen_j_p"] = float(stats.chi2.sf(J, m - k))
    report = _bootstrap_report(Method.gmm, bridge.thetaA, boot, ci_level, diag, seed, n_boot)
    return bridge, report


# -- generalized difference-in-differences ------------------------------------


def quantile_map(w_new: np.ndarray, w_ref: np.ndarray, y_ref: np.ndarray) -> np.ndarray:
    """Map ``w_new`` through ``F_Y^-1(F_W(.))`` built from a reference sample.

    ``F_W`` is the right-continuous empirical CDF of ``w_ref``. A level
    ``k/n`` of the ECDF is a flat stretch of the inverse of ``F_Y`` between
    the ``k``-th and ``(k+1)``-th order statistics of ``y_ref``; the midpoint
    of that stretch is returned. Levels 0 and 1 map to the extreme order
    statistics.
    """
    ws = np.sort(w_ref)
    ys = np.sort(y_ref)
    n = ys.shape[0]
    k = np.searchsorted(ws, w_new, side="right")
    lo = ys[np.clip(k - 1, 0, n - 1)]
    hi = ys[np.clip(k, 0, n - 1)]
    return 0.5 * (lo + hi)


def _gdid_core(A, Y, W, strata, positivity_tol):
    treated = A == 1
    mapped = np.empty(int(treated.sum()))
    outside = 0
    pos = 0
    for s in np.unique(strata[treated]):
        t_mask = treated & (strata == s)
        c_mask = (~treated) & (strata == s)
        if c_mask.sum() < 2:
            raise PositivityViolation(f"stratum {s!r} has treated units but fewer than two controls")
        w_ctrl = W[c_mask]
        w_tr = W[t_mask]
        outside += int(np.sum((w_tr < w_ctrl.min()) | (w_tr > w_ctrl.max())))
        mapped[pos : pos + w_tr.size] = quantile_map(w_tr, w_ctrl, Y[c_mask])
        pos += w_tr.size
    frac = outside / max(mapped.size, 1)
    if frac > positivity_tol:
        raise PositivityViolation(
            f"{frac:.1%} of treated NCO values fall outside the control support (tolerance {positivity_tol:.1%})"
        )
    y_tr = np.concatenate([Y[treated & (strata == s)] for s in np.unique(strata[treated])])
    return float(np.mean(y_tr) - np.mean(mapped)), frac


def _strata(data: Dataset) -> np.ndarray:
    X = data.X
    if X.shape[1] == 0:
        return np.zeros(data.n_rows, dtype=np.int64)
    _, codes = np.unique(X, axis=0, return_inverse=True)
    return codes.reshape(-1)


def estimate_gdid(
    data: Dataset,
    n_boot: int = DEFAULT_B,
    seed: int = 0,
    ci_level: float = 0.95,
    workers: int = 1,
    positivity_tol: float = 0.01,
) -> EstimateReport:
    """Average effect on the treated by quantile-mapping the NCO onto the outcome scale.

    For each treated unit the NCO value is pushed through the control-group
    map ``F^-1_{Y|A=0}(F_{W|A=0}(W))``, which predicts its untreated outcome
    when ``Y(0)`` and ``W`` are monotone functions of the same confounder.
    Covariates, if any, must be discrete: the map is built within each
    covariate stratum.

    Raises
    ------
    PositivityViolation
        If more than ``positivity_tol`` of treated NCO values lie outside the
        control NCO range, or a stratum lacks controls.
    """
    _require(data, "nco")
    A, Y, W = data.A, data.Y, data.W
    if not np.all((A == 0) | (A == 1)):
        raise ValueError("estimate_gdid needs a binary 0/1 treatment")
    strata = _strata(data)
    est, frac = _gdid_core(A, Y, W, strata, positivity_tol)

    def stat(counts):
        # Support is judged on the observed sample; resamples only thin the tails.
        idx = expand(counts)
        return _gdid_core(A[idx], Y[idx], W[idx], strata[idx], 1.0)[0]

    boot = bootstrap(stat, data.n_rows, n_boot, seed, workers)
    diag = {
        "estimand": "ATT",
        "treated": int(A.sum()),
        "controls": int(data.n_rows - A.sum()),
        "strata": int(np.unique(strata).size),
        "share_outside_support": frac,
    }
    return _bootstrap_report(Method.gdid, est, boot, ci_level, diag, seed, n_boot)


# -- outcome calibration ------------------------------------------------------


def estimate_ocal(
    data: Dataset,
    psi_grid: Optional[Sequence[float]] = None,
    n_boot: int = DEFAULT_B,
    seed: int = 0,
    ci_level: float = 0.95,
    workers: int = 1,
) -> EstimateReport:
    """Outcome calibration under rank preservation ``Y = Y(0) + psi*A``.

    The point estimate comes from ``W ~ 1 + A + Y + X``: ``psi = -b_A / b_Y``.
    The confidence set collects every grid value ``psi`` for which the
    treatment coefficient of ``W ~ 1 + A + (Y - psi*A) + X`` has a Wald
    interval containing zero. The default grid is 201 points spanning the
    point estimate plus or minus 10 bootstrap standard errors.

    Raises
    ------
    DegenerateCalibration
        The NCO carries no outcome signal (``|t|`` of ``b_Y`` below 0.5).
    EmptyInversionSet
        No grid value is accepted; widen the grid.
    """
    _require(data, "nco")
    r = data.roles
    fit = ols_fit(design_matrix(data.A, data.Y, data.X), data.W, names=_names(data, r.treatment, r.outcome))
    b_y, se_y = fit[r.outcome], fit.se_of(r.outcome)
    scale = np.std(data.W) / max(np.std(data.Y), 1e-300)
    if abs(b_y) <= 1e-10 * scale or (se_y > 0 and abs(b_y) / se_y < DEGENERATE_T):
        raise DegenerateCalibration(f"NCO carries no outcome signal (outcome slope {b_y:.3g}, se {se_y:.3g})")
    est = -fit[r.treatment] / b_y

    p = data.X.shape[1]
    D = np.column_stack([np.ones(data.n_rows), data.A, data.Y, data.X, data.W])
    sel = selector(D.shape[1], *range(3 + p))
    e_w = np.zeros(D.shape[1])
    e_w[-1] = 1.0

    def stat(counts):
        b = gram_solve(weighted_gram(D, counts), sel, e_w)
        return -b[1] / b[2]

    boot = bootstrap(stat, data.n_rows, n_boot, seed, workers)
    se = boot.se
    if psi_grid is None:
        psi_grid = np.linspace(est - 10 * se, est + 10 * se, 201)
    grid = np.asarray(psi_grid, dtype=np.float64)
    z = stats.norm.ppf(0.5 + ci_level / 2.0)
    accepted = np.zeros(grid.size, dtype=bool)
    for i, psi in enumerate(grid):
        f = ols_fit(design_matrix(data.A, data.Y - psi * data.A, data.X), data.W)
        accepted[i] = abs(f.coef[1]) <= z * f.se[1]
    if not accepted.any():
        raise EmptyInversionSet(f"no value in the grid [{grid.min():.4g}, {grid.max():.4g}] is accepted")
    kept = grid[accepted]
    idx = np.flatnonzero(accepted)
    diag = {
        "slope_A": fit[r.treatment],
        "slope_Y": b_y,
        "grid": {"low": float(grid.min()), "high": float(grid.max()), "points": int(grid.size)},
        "accepted_contiguous": bool(idx[-1] - idx[0] + 1 == idx.size),
        "truncated_by_grid": bool(accepted[0] or accepted[-1]),
        "bootstrap": {
            "replicates": n_boot,
            "failed": boot.n_failed,
            "percentile_ci": list(boot.percentile_ci(ci_level)),
        },
        "interval": "test inversion over the grid",
    }
    return EstimateReport(
        Method.ocal,
        est,
        se,
        ci_level,
        float(kept.min()),
        float(kept.max()),
        normal_p_value(est / se) if se > 0 else None,
        diag,
        seed,
    )


# -- hazard ratios ----------------------------------------------------------------


def combine_hazard_ratios(beta_y: float, beta_w: float) -> float:
    """Hazard ratio ``exp(beta_y - beta_w)`` from log hazard ratios of the outcome and the NCO."""
    if not (math.isfinite(beta_y) and math.isfinite(beta_w)):
        raise ValueError("log hazard ratios must be finite")
    return math.exp(beta_y - beta_w)


def hazard_report(beta_y: float, beta_w: float) -> EstimateReport:
    hr = combine_hazard_ratios(beta_y, beta_w)
    return EstimateReport(
        Method.hazard_combine,
        hr,
        None,
        0.95,
        math.nan,
        math.nan,
        None,
        {"log_hr_outcome": beta_y, "log_hr_nco": beta_w, "scale": "hazard ratio"},
    )


ESTIMATORS = {
    "naive": estimate_naive,
    "nco-diff": estimate_nco_diff,
    "nce-diff": estimate_nce_diff,
    "double-nc": estimate_double_nc,
    "tsls": estimate_tsls,
    "gmm": estimate_gmm,
    "gdid": estimate_gdid,
    "ocal": estimate_ocal,
}
