"""Negative-control tools for detecting, correcting and reducing unmeasured confounding."""

__version__ = "0.1.0"

from .errors import AnalysisError, InputError, NegativeControlError, WeakProxyWarning
from .model import ColumnRoles, Dataset, EstimateReport, Method, SemParams, reduced_form_from_sem
from .dag import DagSpec, Violation, is_valid_design, validate_dag
from .simulate import SimConfig, simulate_from_dag
from .detect import detect_nce, detect_nco, proxy_strength
from .correct import (
    estimate_double_nc,
    estimate_gdid,
    estimate_gmm,
    estimate_naive,
    estimate_nce_diff,
    estimate_nco_diff,
    estimate_ocal,
    estimate_tsls,
)
from .reduce import reduce_future_exposure, smr_adjust
from .calibrate import calibrated_pvalue, fit_null

__all__ = [name for name in dir() if not name.startswith("_")]
