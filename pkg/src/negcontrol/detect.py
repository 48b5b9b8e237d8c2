"""Bias detection with negative controls.

An association between the NCE and the outcome (given the treatment), or
between the treatment and the NCO, can only arise through unmeasured
confounding when the controls are valid. Both tests are ordinary Wald tests
on a linear regression.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import MissingRole, WeakProxyWarning
from .model import Dataset, design_matrix
from .regression import ols_fit, wald_test

DEFAULT_ALPHA = 0.05
WEAK_PROXY_WARN = 2.0
WEAK_PROXY_FLOOR = 0.5


class Verdict(str, enum.Enum):
    no_evidence_of_bias = "no_evidence_of_bias"
    bias_detected = "bias_detected"
    inconclusive = "inconclusive"


@dataclass(frozen=True)
class TestRecord:
    __test__ = False

    estimate: float
    se: float
    statistic: float
    p_value: float

    def rejects(self, alpha: float) -> bool:
        return self.p_value < alpha

    def to_dict(self) -> dict:
        return dict(estimate=self.estimate, se=self.se, statistic=self.statistic, p_value=self.p_value)


@dataclass(frozen=True)
class DetectionReport:
    nce_test: Optional[TestRecord]
    nco_test: Optional[TestRecord]
    alpha: float
    verdict: Verdict
    proxy_strength: Optional[float] = None
    notes: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "nce_test": self.nce_test.to_dict() if self.nce_test else None,
            "nco_test": self.nco_test.to_dict() if self.nco_test else None,
            "alpha": self.alpha,
            "verdict": self.verdict.value,
            "proxy_strength": self.proxy_strength,
            "notes": list(self.notes),
        }


def _names(data: Dataset, *middle):
    return ["const", *middle, *data.roles.covariates]


def _record(fit, name) -> TestRecord:
    stat, p = wald_test(fit, name)
    return TestRecord(fit[name], fit.se_of(name), stat, p)


def detect_nce(data: Dataset, alpha: float = DEFAULT_ALPHA, robust: bool = False) -> TestRecord:
    """Wald test of the NCE coefficient in ``Y ~ 1 + A + Z + X``.

    Adjusting for ``A`` is required: without it a ``Z - A -> Y`` path makes
    ``Z`` and ``Y`` associated even when nothing is confounded.
    """
    if data.roles.nce is None:
        raise MissingRole("detect_nce needs an nce column")
    r = data.roles
    fit = ols_fit(design_matrix(data.A, data.Z, data.X), data.Y, robust, _names(data, r.treatment, r.nce))
    return _record(fit, r.nce)


def detect_nco(
    data: Dataset, alpha: float = DEFAULT_ALPHA, robust: bool = False, adjust_nce: bool = False
) -> TestRecord:
    """Wald test of the treatment coefficient in ``W ~ 1 + A + X`` (``+ Z`` with ``adjust_nce``)."""
    if data.roles.nco is None:
        raise MissingRole("detect_nco needs an nco column")
    r = data.roles
    if adjust_nce:
        design = design_matrix(data.A, data.Z, data.X)
        names = _names(data, r.treatment, r.nce)
    else:
        design = design_matrix(data.A, data.X)
        names = _names(data, r.treatment)
    fit = ols_fit(design, data.W, robust, names)
    return _record(fit, r.treatment)


def proxy_strength(data: Dataset, robust: bool = False, warn: bool = True) -> float:
    """``|t|`` statistic of the NCE coefficient in ``W ~ 1 + A + Z + X``.

    Values below 2 mean the NCE barely moves the NCO, which makes the
    double-negative-control correction unstable; a :class:`WeakProxyWarning`
    is emitted in that case.
    """
    if data.roles.nce is None or data.roles.nco is None:
        raise MissingRole("proxy_strength needs both nce and nco columns")
    r = data.roles
    fit = ols_fit(design_matrix(data.A, data.Z, data.X), data.W, robust, _names(data, r.treatment, r.nce))
    se = fit.se_of(r.nce)
    value = abs(fit[r.nce]) / se if se > 0 else (np.inf if fit[r.nce] != 0 else 0.0)
    if warn and value < WEAK_PROXY_WARN:
        warnings.warn(
            f"weak proxy: |t| of the NCE in the NCO model is {value:.3g} (< {WEAK_PROXY_WARN})",
            WeakProxyWarning,
            stacklevel=2,
        )
    return float(value)


def verdict_from(p_values, alpha: float) -> Verdict:
    """Aggregate component p-values: any rejection means bias detected."""
    ps = [p for p in p_values if p is not None]
    if not ps:
        return Verdict.inconclusive
    return Verdict.bias_detected if any(p < alpha for p in ps) else Verdict.no_evidence_of_bias


def detect(data: Dataset, alpha: float = DEFAULT_ALPHA, robust: bool = False, adjust_nce: bool = False) -> DetectionReport:
    """Run every detection test the available roles allow and combine them."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    nce = detect_nce(data, alpha, robust) if data.roles.nce else None
    nco = detect_nco(data, alpha, robust, adjust_nce and data.roles.nce is not None) if data.roles.nco else None
    strength = None
    notes = []
    if nce is not None and nco is not None:
        strength = proxy_strength(data, robust, warn=False)
        notes.append("both tests run at level alpha without multiplicity correction")
        if strength < WEAK_PROXY_WARN:
            notes.append(f"weak proxy (strength {strength:.3g} < {WEAK_PROXY_WARN})")
    if nce is not None:
        notes.append(
            "a null NCE association given the treatment is also evidence against residual "
            "confounding when Z is U-comparable but might affect Y directly"
        )
    verdict = verdict_from([t.p_value if t else None for t in (nce, nco)], alpha)
    return DetectionReport(nce, nco, alpha, verdict, strength, tuple(notes))
