"""Seeded data generation with known ground truth.

Random draws come from counter-based Philox streams keyed on
``(seed, variable tag, row block)``. Rows are produced in fixed blocks of
:data:`BLOCK_ROWS`, so a dataset is bit-identical whatever the number of
worker threads used to fill it.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy import stats

from .dag import NODES, DagSpec, topological_order, validate_dag
from .errors import MalformedSpec, MissingEdgeWeight
from .model import ColumnRoles, Dataset, SemParams
from .reduce import SmrStratum, TimeSeriesDataset

BLOCK_ROWS = 1 << 16

_TAGS = {"A": 1, "Z": 2, "U": 3, "W": 4, "Y": 5, "X": 6}


class Mode(str, enum.Enum):
    reduced_form = "reduced_form"
    causal_order = "causal_order"


@dataclass(frozen=True)
class SimConfig:
    params: SemParams = field(default_factory=SemParams)
    n: int = 1000
    seed: int = 0
    mode: Mode = Mode.reduced_form
    az_corr: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.n < 10:
            raise ValueError(f"n must be at least 10, got {self.n}")
        if not -1.0 < self.az_corr < 1.0:
            raise ValueError(f"az_corr must lie in (-1, 1), got {self.az_corr}")
        if self.mode is Mode.causal_order and self.params.n_covariates:
            raise ValueError("causal_order mode does not support covariate loadings")

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "n": self.n,
            "seed": self.seed,
            "mode": self.mode.value,
            "az_corr": self.az_corr,
        }

    @classmethod
    def from_dict(cls, d) -> "SimConfig":
        d = dict(d)
        d["params"] = SemParams.from_dict(d.get("params", {}))
        return cls(**d)


def _block_rng(seed: int, tag: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(tag, block))))


def standard_normals(seed: int, tag: int, n: int, width: int = 1, workers: int = 1) -> np.ndarray:
    """``(n, width)`` standard normals from the ``(seed, tag)`` stream (1-D when ``width == 1``)."""
    starts = range(0, n, BLOCK_ROWS)

    def fill(start):
        rows = min(BLOCK_ROWS, n - start)
        return _block_rng(seed, tag, start // BLOCK_ROWS).standard_normal((rows, width))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fill, starts))
    else:
        parts = [fill(s) for s in starts]
    out = np.concatenate(parts, axis=0) if parts else np.empty((0, width))
    return out[:, 0] if width == 1 else out


def simulate_reduced_form(config: SimConfig, workers: int = 1) -> Dataset:
    """Draw ``(A, Z, X)`` then ``U``, ``W`` and ``Y`` so the three linear models hold exactly.

    The returned dataset has columns ``A, Z, U, W, Y[, X1..Xp]``; ``U`` is
    not bound to any role and is kept only for oracle checks.
    """
    if config.mode is not Mode.reduced_form:
        raise ValueError("simulate_reduced_form requires mode='reduced_form'")
    p, n, s = config.params, config.n, config.seed
    rho = config.az_corr

    latent_a = standard_normals(s, _TAGS["A"], n, workers=workers)
    A = (latent_a > stats.norm.ppf(1.0 - p.treat_prev)).astype(np.float64)
    e_z = standard_normals(s, _TAGS["Z"], n, workers=workers)
    Z = p.z_mean + p.z_sd * (rho * latent_a + math.sqrt(1.0 - rho**2) * e_z)

    U = p.beta_U0 + p.beta_UA * A + p.beta_UZ * Z
    W = np.full(n, p.beta_W0)
    Y = p.beta_Y0 + p.beta_YA * A
    cols = {}
    if p.n_covariates:
        X = standard_normals(s, _TAGS["X"], n, width=p.n_covariates, workers=workers)
        X = X.reshape(n, p.n_covariates)
        U = U + X @ np.asarray(p.beta_UX)
        W = W + X @ np.asarray(p.beta_WX)
        Y = Y + X @ np.asarray(p.beta_YX)
        cols = {f"X{j + 1}": X[:, j] for j in range(p.n_covariates)}
    U = U + p.sigma_U * standard_normals(s, _TAGS["U"], n, workers=workers)
    W = W + p.beta_WU * U + p.sigma_W * standard_normals(s, _TAGS["W"], n, workers=workers)
    Y = Y + p.beta_YU * U + p.sigma_Y * standard_normals(s, _TAGS["Y"], n, workers=workers)

    columns = {"A": A, "Z": Z, "U": U, "W": W, "Y": Y, **cols}
    roles = ColumnRoles("A", "Y", nce="Z", nco="W", covariates=tuple(cols))
    return Dataset(columns, roles)


def _edge_key(key) -> tuple:
    if isinstance(key, str):
        for sep in ("->", ",", " "):
            if sep in key:
                a, b = key.split(sep, 1)
                return a.strip(), b.strip()
        raise MalformedSpec(f"cannot parse edge key {key!r}")
    return tuple(key)


def simulate_from_dag(
    spec: DagSpec,
    coeffs: Mapping,
    n: int,
    seed: int,
    *,
    treat_prev: float = 0.5,
    noise_sd: Optional[Mapping[str, float]] = None,
    intercepts: Optional[Mapping[str, float]] = None,
    allow_invalid: bool = False,
    workers: int = 1,
) -> Dataset:
    """Linear-Gaussian data generated in topological order of ``spec``.

    Each node equals its intercept plus the weighted sum of its parents plus
    independent normal noise. ``A`` is binarised by thresholding its linear
    index at the ``1 - treat_prev`` sample quantile.

    Parameters
    ----------
    coeffs : mapping
        Edge weights keyed by ``("U", "A")`` tuples or ``"U->A"`` strings.
    allow_invalid : bool
        Generate from graphs that fail :func:`validate_dag` (to study
        behaviour under violated assumptions).
    """
    violations = validate_dag(spec)
    if violations and not allow_invalid:
        raise MalformedSpec(f"design violates negative-control requirements: {[v.value for v in violations]}")
    weights = {_edge_key(k): float(v) for k, v in coeffs.items()}
    for edge in spec.edges:
        if edge not in weights:
            raise MissingEdgeWeight(f"no weight supplied for edge {edge[0]}->{edge[1]}")
    stray = set(weights) - set(spec.edges)
    if stray:
        raise MalformedSpec(f"weights given for edges not in the graph: {sorted(stray)}")
    noise_sd = dict(noise_sd or {})
    intercepts = dict(intercepts or {})

    values = {}
    for node in topological_order(spec):
        v = intercepts.get(node, 0.0) + noise_sd.get(node, 1.0) * standard_normals(
            seed, 100 + NODES.index(node), n, workers=workers
        )
        for parent in spec.parents(node):
            v = v + weights[(parent, node)] * values[parent]
        if node == "A":
            v = (v > np.quantile(v, 1.0 - treat_prev)).astype(np.float64)
        values[node] = v

    order = [v for v in ("A", "Z", "IV", "U", "W", "Y", "X") if v in values]
    columns = {k: values[k] for k in order}
    roles = ColumnRoles(
        "A",
        "Y",
        nce="Z" if "Z" in values else None,
        nco="W" if "W" in values else None,
        covariates=("X",) if "X" in values else (),
    )
    return Dataset(columns, roles)


def causal_order_dag(params: SemParams):
    """The U-first graph (U -> A, Z, W, Y and A -> Y) with weights taken from ``params``."""
    spec = DagSpec.from_edges([("U", "A"), ("U", "Z"), ("U", "W"), ("U", "Y"), ("A", "Y")])
    coeffs = {
        ("U", "A"): params.beta_UA,
        ("U", "Z"): params.beta_UZ,
        ("U", "W"): params.beta_WU,
        ("U", "Y"): params.beta_YU,
        ("A", "Y"): params.beta_YA,
    }
    noise = {"U": params.sigma_U, "W": params.sigma_W, "Y": params.sigma_Y, "Z": params.z_sd, "A": 1.0}
    intercepts = {"U": params.beta_U0, "W": params.beta_W0, "Y": params.beta_Y0, "Z": params.z_mean}
    return spec, coeffs, noise, intercepts


def simulate(config: SimConfig, workers: int = 1) -> Dataset:
    if config.mode is Mode.reduced_form:
        return simulate_reduced_form(config, workers=workers)
    spec, coeffs, noise, intercepts = causal_order_dag(config.params)
    return simulate_from_dag(
        spec,
        coeffs,
        config.n,
        config.seed,
        treat_prev=config.params.treat_prev,
        noise_sd=noise,
        intercepts=intercepts,
        workers=workers,
    )


# -- scenario generators for the non-linear estimators ----------------------


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(tag,))))


def _logistic_treatment(rng, U, strength):
    return (rng.random(U.shape[0]) < 1.0 / (1.0 + np.exp(-strength * U))).astype(np.float64)


def simulate_pre_post(n: int, seed: int, att: float = 1.0, trend: float = 0.5, confounding: float = 1.0) -> Dataset:
    """Two-period panel where ``W`` is the pre-period outcome.

    ``W = U + e1`` and ``Y(0) = U + trend + e2`` share the confounder with the
    same additive loading, so ``Y(0)`` given ``A`` is ``W`` given ``A``
    shifted by ``trend``. The treatment effect on the treated is ``att``.
    """
    rng = _rng(seed, 11)
    U = rng.standard_normal(n)
    A = _logistic_treatment(rng, U, confounding)
    W = U + rng.standard_normal(n)
    Y0 = U + trend + rng.standard_normal(n)
    Y = Y0 + att * A
    return Dataset({"A": A, "U": U, "W": W, "Y": Y}, ColumnRoles("A", "Y", nco="W"))


def simulate_monotone(n: int, seed: int, shift: float = 1.0, confounding: float = 1.0) -> Dataset:
    """``Y(0)`` and ``W`` are distinct strictly increasing functions of ``U``; ``Y = Y(0) + shift*A``."""
    rng = _rng(seed, 12)
    U = rng.standard_normal(n)
    A = _logistic_treatment(rng, U, confounding)
    Y0 = np.exp(0.5 * U) + U
    W = U**3 + 2.0 * U
    Y = Y0 + shift * A
    return Dataset({"A": A, "U": U, "W": W, "Y": Y}, ColumnRoles("A", "Y", nco="W"))


def simulate_rank_preserving(
    n: int, seed: int, psi: float = 1.5, w_loading: float = 0.8, confounding: float = 1.0
) -> Dataset:
    """Rank-preserving design ``Y = Y(0) + psi*A`` with ``W`` depending on ``U`` only through ``Y(0)``."""
    rng = _rng(seed, 13)
    U = rng.standard_normal(n)
    A = _logistic_treatment(rng, U, confounding)
    Y0 = U + rng.standard_normal(n)
    W = w_loading * Y0 + rng.standard_normal(n)
    Y = Y0 + psi * A
    return Dataset({"A": A, "U": U, "W": W, "Y": Y}, ColumnRoles("A", "Y", nco="W"))


def simulate_time_series(
    n: int,
    seed: int,
    effect: float = 1.0,
    u_loading: float = 1.0,
    u_ar: float = 0.8,
    a_ar: float = 0.5,
    a_on_u: float = 1.0,
    burn_in: int = 200,
) -> tuple:
    """Exposure series confounded by an autocorrelated ``U``.

    ``U_t = u_ar*U_{t-1} + e``, ``A_t = a_ar*A_{t-1} + a_on_u*U_t + e`` and
    ``Y_t = effect*A_t + u_loading*U_t + e``. ``Y_t`` does not depend on
    ``A_{t+1}`` given ``(A_t, U_t)``, and with ``u_ar > 0`` the future exposure
    carries information on ``U_t`` of the same sign as ``A_t`` does. With
    ``u_ar = 0`` the future exposure is independent of ``U_t`` given ``A_t``.

    Returns ``(series, U)``.
    """
    rng = _rng(seed, 14)
    total = n + burn_in
    eu, ea, ey = rng.standard_normal((3, total))
    U = np.empty(total)
    A = np.empty(total)
    u = a = 0.0
    for t in range(total):
        u = u_ar * u + eu[t]
        a = a_ar * a + a_on_u * u + ea[t]
        U[t] = u
        A[t] = a
    Y = effect * A + u_loading * U + ey
    sl = slice(burn_in, None)
    ts = TimeSeriesDataset(t=np.arange(n, dtype=np.float64), a=A[sl], y=Y[sl])
    return ts, U[sl]


def simulate_smr(
    n_strata: int,
    seed: int,
    true_ratio: float = 1.3,
    bias: float = 0.4,
    expected_y: float = 200.0,
    expected_w: float = 400.0,
) -> list:
    """Stratified counts where both outcomes share a multiplicative bias ``exp(bias)``."""
    rng = _rng(seed, 15)
    out = []
    for _ in range(n_strata):
        ey = expected_y * rng.uniform(0.5, 1.5)
        ew = expected_w * rng.uniform(0.5, 1.5)
        oy = max(rng.poisson(ey * true_ratio * math.exp(bias)), 1)
        ow = max(rng.poisson(ew * math.exp(bias)), 1)
        out.append(SmrStratum(float(oy), ey, float(ow), ew))
    return out
