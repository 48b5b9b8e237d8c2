"""Shared domain types and the linear structural model.

The structural model links a binary treatment ``A``, outcome ``Y``, negative
control outcome ``W`` and negative control exposure ``Z`` through a single
unmeasured confounder ``U``::

    E[Y | A, U] = beta_Y0 + beta_YA*A + beta_YU*U
    E[W | U]    = beta_W0 + beta_WU*U
    E[U | A, Z] = beta_U0 + beta_UA*A + beta_UZ*Z

Substituting the conditional mean of ``U`` gives the observable regressions
of ``Y`` and ``W`` on ``(A, Z)``; their slopes are :class:`ReducedFormCoeffs`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from .errors import MalformedSpec, MissingRole, NonFiniteInput


@dataclass(frozen=True)
class SemParams:
    """Coefficients and noise scales of the linear structural model."""

    beta_Y0: float = 0.0
    beta_YA: float = 2.0
    beta_YU: float = 1.5
    beta_W0: float = 0.0
    beta_WU: float = 2.0
    beta_U0: float = 0.0
    beta_UA: float = 1.0
    beta_UZ: float = 0.8
    sigma_U: float = 1.0
    sigma_W: float = 1.0
    sigma_Y: float = 1.0
    treat_prev: float = 0.5
    z_mean: float = 0.0
    z_sd: float = 1.0
    beta_YX: tuple = ()
    beta_WX: tuple = ()
    beta_UX: tuple = ()

    def __post_init__(self):
        for name in ("sigma_U", "sigma_W", "sigma_Y", "z_sd"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.treat_prev < 1.0:
            raise ValueError(f"treat_prev must lie in (0, 1), got {self.treat_prev}")
        for name in ("beta_YX", "beta_WX", "beta_UX"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        dims = {len(self.beta_YX), len(self.beta_WX), len(self.beta_UX)}
        if len(dims) > 1:
            raise ValueError("covariate loading vectors must share one dimension")

    @property
    def n_covariates(self) -> int:
        return len(self.beta_YX)

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SemParams":
        return cls(**{k: (tuple(v) if isinstance(v, list) else v) for k, v in d.items()})


@dataclass(frozen=True)
class ReducedFormCoeffs:
    """Slopes of A and Z in the observable regressions of Y and of W."""

    delta_AY: float
    delta_ZY: float
    delta_AW: float
    delta_ZW: float

    @property
    def identified_effect(self) -> float:
        """Treatment effect recovered from the four slopes (needs ``delta_ZW != 0``)."""
        return self.delta_AY - self.delta_AW * self.delta_ZY / self.delta_ZW


def reduced_form_from_sem(params: SemParams) -> ReducedFormCoeffs:
    """Population slopes implied by substituting ``E[U | A, Z]`` into the Y and W models.

    Examples
    --------
    >>> rf = reduced_form_from_sem(SemParams(beta_YA=2, beta_YU=1.5, beta_UA=1,
    ...                                      beta_UZ=0.8, beta_WU=2))
    >>> rf.delta_AY, rf.delta_ZW
    (3.5, 1.6)
    """
    p = params
    return ReducedFormCoeffs(
        delta_AY=p.beta_YA + p.beta_YU * p.beta_UA,
        delta_ZY=p.beta_YU * p.beta_UZ,
        delta_AW=p.beta_WU * p.beta_UA,
        delta_ZW=p.beta_WU * p.beta_UZ,
    )


@dataclass(frozen=True)
class ColumnRoles:
    treatment: str = "A"
    outcome: str = "Y"
    nce: Optional[str] = None
    nco: Optional[str] = None
    covariates: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "covariates", tuple(self.covariates))
        names = self.names()
        if len(set(names)) != len(names):
            raise MalformedSpec(f"column roles must be pairwise distinct, got {names}")

    def names(self) -> list:
        out = [self.treatment, self.outcome]
        out += [c for c in (self.nce, self.nco) if c is not None]
        out += list(self.covariates)
        return out

    def to_dict(self) -> dict:
        return {
            "treatment": self.treatment,
            "outcome": self.outcome,
            "nce": self.nce,
            "nco": self.nco,
            "covariates": list(self.covariates),
        }


@dataclass(frozen=True)
class Dataset:
    """Rectangular numeric data with columns bound to analysis roles.

    Columns not referenced by ``roles`` (e.g. the simulator's latent ``U``)
    are carried along but never used by estimators.
    """

    columns: Mapping[str, np.ndarray]
    roles: ColumnRoles = field(default_factory=ColumnRoles)

    def __post_init__(self):
        cols = {}
        lengths = set()
        for name, values in self.columns.items():
            arr = np.array(values, dtype=np.float64)
            if arr.ndim != 1:
                raise MalformedSpec(f"column {name!r} must be one-dimensional")
            if not np.all(np.isfinite(arr)):
                raise NonFiniteInput(f"column {name!r} contains NaN or inf")
            arr.setflags(write=False)
            cols[name] = arr
            lengths.add(arr.shape[0])
        if len(lengths) > 1:
            raise MalformedSpec(f"columns have unequal lengths {sorted(lengths)}")
        for name in self.roles.names():
            if name not in cols:
                raise MissingRole(f"role column {name!r} is not present in the data")
        object.__setattr__(self, "columns", cols)

    @property
    def n_rows(self) -> int:
        return next(iter(self.columns.values())).shape[0] if self.columns else 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    @property
    def A(self) -> np.ndarray:
        return self.columns[self.roles.treatment]

    @property
    def Y(self) -> np.ndarray:
        return self.columns[self.roles.outcome]

    @property
    def Z(self) -> np.ndarray:
        if self.roles.nce is None:
            raise MissingRole("no negative control exposure (nce) role assigned")
        return self.columns[self.roles.nce]

    @property
    def W(self) -> np.ndarray:
        if self.roles.nco is None:
            raise MissingRole("no negative control outcome (nco) role assigned")
        return self.columns[self.roles.nco]

    @property
    def X(self) -> np.ndarray:
        """Covariates as an ``(n, p)`` matrix (``p`` may be 0)."""
        if not self.roles.covariates:
            return np.empty((self.n_rows, 0))
        return np.column_stack([self.columns[c] for c in self.roles.covariates])

    def with_roles(self, **changes) -> "Dataset":
        roles = ColumnRoles(**{**self.roles.to_dict(), **changes})
        return Dataset(self.columns, roles)

    def take(self, idx: np.ndarray) -> "Dataset":
        return Dataset({k: v[idx] for k, v in self.columns.items()}, self.roles)

    def with_column(self, name: str, values) -> "Dataset":
        return Dataset({**self.columns, name: values}, self.roles)


class Method(str, enum.Enum):
    naive = "naive"
    nco_diff = "nco_diff"
    nce_diff = "nce_diff"
    double_nc = "double_nc"
    tsls = "tsls"
    gmm = "gmm"
    gdid = "gdid"
    ocal = "ocal"
    smr = "smr"
    hazard_combine = "hazard_combine"
    reduce_future = "reduce_future"


@dataclass
class EstimateReport:
    method: Method
    estimate: float
    se: Optional[float] = None
    ci_level: float = 0.95
    ci_low: float = math.nan
    ci_high: float = math.nan
    p_value: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)
    seed_used: Optional[int] = None

    def __post_init__(self):
        self.method = Method(self.method)
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must lie in (0, 1)")
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value {self.p_value} outside [0, 1]")
        lo, hi, est = self.ci_low, self.ci_high, self.estimate
        if all(v is not None and math.isfinite(v) for v in (lo, hi, est)):
            slack = 1e-9 * max(1.0, abs(est))
            if not lo - slack <= est <= hi + slack:
                raise ValueError(f"interval [{lo}, {hi}] does not contain the estimate {est}")

    def covers(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "estimate": _jsonable(self.estimate),
            "se": _jsonable(self.se),
            "ci_level": self.ci_level,
            "ci_low": _jsonable(self.ci_low),
            "ci_high": _jsonable(self.ci_high),
            "p_value": _jsonable(self.p_value),
            "diagnostics": _jsonable(self.diagnostics),
            "seed_used": self.seed_used,
        }


def _jsonable(value):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, enum.Enum):
        return value.value
    return value


def design_matrix(*blocks: Sequence) -> np.ndarray:
    """Column-stack an intercept with the given 1-D or 2-D blocks."""
    parts = []
    n = None
    for b in blocks:
        arr = np.asarray(b, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        n = arr.shape[0]
        parts.append(arr)
    return np.column_stack([np.ones(n)] + parts)
