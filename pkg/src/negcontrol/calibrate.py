"""Empirical null calibration of p-values from negative-control estimates.

Each negative control ``i`` yields an estimate ``beta_i`` with standard
error ``tau_i`` of a true effect that is zero; what it measures is
systematic error ``theta_i ~ N(mu, sigma^2)``. Integrating ``theta_i`` out
gives ``beta_i ~ N(mu, sigma^2 + tau_i^2)``. A new estimate is then judged
against that null rather than against ``N(0, tau^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize, stats

from .errors import NonFiniteInput, NotConverged, TooFewControls

GRAD_TOL = 1e-8
_GRID = 64


@dataclass(frozen=True)
class NullDistribution:
    mu: float
    sigma: float
    n_controls: int
    loglik: float
    converged: bool

    def to_dict(self) -> dict:
        return dict(mu=self.mu, sigma=self.sigma, n_controls=self.n_controls, loglik=self.loglik, converged=self.converged)


def _profile(sigma2, beta, tau2):
    """Profile ``mu``, log-likelihood and d loglik / d sigma^2 at a given ``sigma^2``."""
    v = sigma2 + tau2
    w = 1.0 / v
    mu = float(np.sum(w * beta) / np.sum(w))
    r2 = (beta - mu) ** 2
    ll = float(-0.5 * np.sum(np.log(2.0 * np.pi * v) + r2 * w))
    grad = float(0.5 * np.sum(r2 * w * w - w))
    return mu, ll, grad


def fit_null(controls: Sequence) -> NullDistribution:
    """Maximum-likelihood ``(mu, sigma)`` of the systematic-error distribution.

    Parameters
    ----------
    controls : sequence of ``(beta_i, tau_i)`` pairs, or an ``(n, 2)`` array

    ``mu`` is profiled out in closed form (precision-weighted mean). ``sigma``
    is searched on a log scale inside ``[0, 10 * sd(beta)]``: a coarse grid
    picks the best bracket, then the analytic score is solved by Brent's
    method. A maximum on ``sigma = 0`` is accepted when the score there is
    non-positive.
    """
    arr = np.asarray(controls, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("controls must be (beta, tau) pairs")
    if arr.shape[0] < 2:
        raise TooFewControls(f"need at least two negative controls, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("control estimates and standard errors must be finite")
    beta, tau = arr[:, 0], arr[:, 1]
    if np.any(tau < 0):
        raise ValueError("standard errors must be non-negative")
    tau2 = tau**2
    n = beta.size
    sd = float(np.std(beta, ddof=1))
    hi = 10.0 * sd
    if hi == 0.0:
        mu = float(np.mean(beta))
        # Controls with tau = 0 sit exactly on the point mass and contribute log(1).
        pos = tau2 > 0
        ll = _profile(0.0, beta[pos], tau2[pos])[1] if pos.any() else 0.0
        return NullDistribution(mu, 0.0, n, ll, True)

    floor = 1e-9 * hi
    log_grid = np.linspace(math.log(floor), math.log(hi), _GRID)
    lls = [_profile(math.exp(2 * s), beta, tau2)[1] for s in log_grid]
    j = int(np.argmax(lls))
    if np.all(tau2 > 0):
        mu0, ll0, g0 = _profile(0.0, beta, tau2)
        if g0 <= 0 and ll0 >= lls[j] - 1e-12 * abs(ll0):
            # Maximum on the boundary: the controls are homogeneous.
            return NullDistribution(mu0, 0.0, n, ll0, True)

    def score(log_s):
        # d loglik / d log(sigma) = 2 sigma^2 * d loglik / d sigma^2
        s2 = math.exp(2 * log_s)
        return 2.0 * s2 * _profile(s2, beta, tau2)[2]

    a, b = log_grid[max(j - 1, 0)], log_grid[min(j + 1, _GRID - 1)]
    if score(a) > 0 > score(b):
        root = optimize.brentq(score, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
        sigma = math.exp(root)
        mu, ll, _ = _profile(sigma**2, beta, tau2)
        return NullDistribution(mu, sigma, n, ll, abs(score(root)) <= GRAD_TOL * n)
    sigma = math.exp(log_grid[j])
    mu, ll, _ = _profile(sigma**2, beta, tau2)
    return NullDistribution(mu, sigma, n, ll, False)


def calibrated_pvalue(beta: float, tau: float, null: NullDistribution, two_sided: bool = True) -> float:
    """p-value of ``beta`` (standard error ``tau``) under ``N(mu, sigma^2 + tau^2)``.

    One-sided p-values test for a positive effect (upper tail).
    """
    if not null.converged:
        raise NotConverged("the null distribution fit did not converge")
    if tau < 0:
        raise ValueError("tau must be non-negative")
    scale = math.sqrt(null.sigma**2 + tau**2)
    if scale == 0.0:
        return 1.0 if beta == null.mu else 0.0
    z = (beta - null.mu) / scale
    if two_sided:
        return float(min(1.0, 2.0 * stats.norm.sf(abs(z))))
    return float(stats.norm.sf(z))


def uncalibrated_pvalue(beta: float, tau: float, two_sided: bool = True) -> float:
    z = beta / tau
    return float(2.0 * stats.norm.sf(abs(z))) if two_sided else float(stats.norm.sf(z))
