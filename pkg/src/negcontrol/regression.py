"""Ordinary least squares, Wald tests and cross-product helpers.

Fits go through a column-pivoted QR decomposition so that collinear
regressors are detected (and named) instead of silently dropped. Wald
p-values use the standard normal reference distribution, which assumes the
sample is large enough for the asymptotic approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla
from scipy import stats

from .errors import InsufficientRows, RankDeficient, ZeroVariance

RANK_TOL = 1e-10


@dataclass(frozen=True)
class RegressionFit:
    coef: np.ndarray
    cov: np.ndarray
    n: int
    k: int
    sigma2_hat: float
    robust: bool
    names: tuple = ()
    resid: Optional[np.ndarray] = None

    @property
    def se(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.cov), 0.0, None))

    def index(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        return self.names.index(name)

    def __getitem__(self, name) -> float:
        return float(self.coef[self.index(name)])

    def se_of(self, name) -> float:
        return float(self.se[self.index(name)])

    def predict(self, design: np.ndarray) -> np.ndarray:
        return np.asarray(design, dtype=np.float64) @ self.coef


def ols_fit(
    design: np.ndarray,
    response: np.ndarray,
    robust: bool = False,
    names: Optional[Sequence[str]] = None,
) -> RegressionFit:
    """Least-squares fit of ``response`` on the columns of ``design``.

    Parameters
    ----------
    design : (n, k) array
        Regressors, intercept included by the caller (first column by convention).
    response : (n,) array
    robust : bool
        Use the HC1 sandwich covariance instead of ``sigma2 * (X'X)^-1``.
    names : sequence of str, optional
        Column labels, used in error messages and for lookup on the fit.

    Raises
    ------
    InsufficientRows
        If ``n <= k``.
    RankDeficient
        If a column is (numerically) a linear combination of the others.
    """
    X = np.asarray(design, dtype=np.float64)
    y = np.asarray(response, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: design {X.shape}, response {y.shape}")
    n, k = X.shape
    names = tuple(names) if names is not None else tuple(f"x{j}" for j in range(k))
    if n <= k:
        raise InsufficientRows(f"need more rows than regressors (n={n}, k={k})")

    # Scale columns so the rank test does not depend on units.
    scale = np.sqrt(np.einsum("ij,ij->j", X, X))
    zero = np.flatnonzero(scale == 0.0)
    if zero.size:
        raise RankDeficient(names[zero[0]])
    Q, R, piv = sla.qr(X / scale, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    bad = np.flatnonzero(diag <= RANK_TOL * diag[0])
    if bad.size:
        raise RankDeficient(names[piv[bad[0]]])

    beta_p = sla.solve_triangular(R, Q.T @ y)
    coef = np.empty(k)
    coef[piv] = beta_p / scale[piv]
    resid = y - X @ coef
    dof = n - k
    sigma2 = float(resid @ resid) / dof

    # (X'X)^-1 = P R^-1 R^-T P' / scale^2 ; R is k x k so the triangular inverse is cheap.
    Rinv = sla.solve_triangular(R, np.eye(k))
    bread_p = Rinv @ Rinv.T
    bread = np.empty((k, k))
    bread[np.ix_(piv, piv)] = bread_p
    bread /= np.outer(scale, scale)
    if robust:
        meat = (X * (resid**2)[:, None]).T @ X
        cov = bread @ meat @ bread * (n / dof)
    else:
        cov = sigma2 * bread
    cov = 0.5 * (cov + cov.T)
    return RegressionFit(coef, cov, n, k, sigma2, robust, names, resid)


def wald_test(fit: RegressionFit, coef_index, null_value: float = 0.0):
    """Two-sided Wald test of one coefficient. Returns ``(statistic, p_value)``."""
    i = fit.index(coef_index)
    if not 0 <= i < fit.k:
        raise IndexError(f"coefficient index {i} out of range for k={fit.k}")
    var = fit.cov[i, i]
    if not var > 0:
        raise ZeroVariance(f"coefficient {fit.names[i]!r} has zero estimated variance")
    stat = (fit.coef[i] - null_value) / np.sqrt(var)
    return float(stat), float(2.0 * stats.norm.sf(abs(stat)))


def contrast(fit: RegressionFit, weights: Sequence[float]):
    """Estimate and standard error of ``weights @ coef``."""
    c = np.asarray(weights, dtype=np.float64)
    est = float(c @ fit.coef)
    var = float(c @ fit.cov @ c)
    return est, float(np.sqrt(max(var, 0.0)))


def normal_p_value(stat: float) -> float:
    return float(2.0 * stats.norm.sf(abs(stat)))


# -- cross-product path used by the bootstrap --------------------------------


def weighted_gram(D: np.ndarray, weights: Optional[np.ndarray] = None, chunk: int = 1 << 14) -> np.ndarray:
    """``D' diag(w) D`` accumulated in cache-sized row blocks."""
    n, p = D.shape
    M = np.zeros((p, p))
    for s in range(0, n, chunk):
        d = D[s : s + chunk]
        if weights is None:
            M += d.T @ d
        else:
            M += (d * weights[s : s + chunk, None]).T @ d
    return M


def gram_solve(M: np.ndarray, x_cols: np.ndarray, y_col: np.ndarray) -> np.ndarray:
    """OLS coefficients from a cross-product matrix.

    ``x_cols`` is a ``(p, k)`` matrix mapping the stacked columns to the
    regressors, ``y_col`` a length-``p`` vector picking out the response; both
    allow regressors that are linear combinations of stacked columns.
    """
    XtX = x_cols.T @ M @ x_cols
    Xty = x_cols.T @ M @ y_col
    try:
        c, low = sla.cho_factor(XtX, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise RankDeficient("<resample>", f"weighted cross-product matrix is singular: {exc}") from exc
    return sla.cho_solve((c, low), Xty, check_finite=False)


def selector(p: int, *indices: int) -> np.ndarray:
    """``(p, len(indices))`` 0/1 matrix picking the given stacked columns."""
    S = np.zeros((p, len(indices)))
    for j, i in enumerate(indices):
        S[i, j] = 1.0
    return S
