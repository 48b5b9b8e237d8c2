"""Command-line front end.

Subcommands: ``simulate``, ``detect``, ``estimate``, ``reduce``,
``calibrate`` and ``validate-dag``. Every analysis subcommand writes one JSON
report (to ``--output`` or stdout) that embeds the run configuration, the
input digest and package versions. Exit status is 0 on success, 1 on
input/configuration errors and 2 when the analysis itself fails.
"""

from __future__ import annotations

import argparse
import csv
import io as io_
import json
import logging
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import correct, detect as detect_mod, io
from .bootstrap import DEFAULT_B
from .calibrate import calibrated_pvalue, fit_null, uncalibrated_pvalue
from .dag import DESCRIPTIONS, DagSpec, validate_dag
from .errors import AnalysisError, InputError
from .model import ColumnRoles, EstimateReport, SemParams
from .reduce import SmrStratum, TimeSeriesDataset, reduce_future_exposure, smr_report
from .simulate import Mode, SimConfig, simulate, simulate_from_dag

log = logging.getLogger("negcontrol")

METHODS = ("naive", "nco-diff", "nce-diff", "double-nc", "tsls", "gmm", "gdid", "ocal", "hazard-combine")
BOOTSTRAP_METHODS = {"double-nc", "tsls", "gmm", "gdid", "ocal"}


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    treatment: str = "A"
    outcome: str = "Y"
    nce: Optional[str] = None
    nco: Optional[str] = None
    covariates: list = field(default_factory=list)
    method: Optional[str] = None
    alpha: float = 0.05
    bootstrap: int = DEFAULT_B
    seed: int = 0
    output: Optional[str] = None
    format: str = "json"
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.format not in ("json", "csv-summary"):
            raise InputError(f"unknown format {self.format!r}")
        if self.method in BOOTSTRAP_METHODS and self.bootstrap < 50:
            raise InputError(f"--bootstrap must be at least 50, got {self.bootstrap}")
        if not 0.0 < self.alpha < 1.0:
            raise InputError("--alpha must lie in (0, 1)")

    def roles(self) -> ColumnRoles:
        return ColumnRoles(self.treatment, self.outcome, self.nce, self.nco, tuple(self.covariates))

    def to_dict(self) -> dict:
        return asdict(self)


def _covariates(text):
    if text is None or text == "":
        return []
    if isinstance(text, list):
        return text
    return [c.strip() for c in text.split(",") if c.strip()]


def _common(p: argparse.ArgumentParser, roles=True):
    p.add_argument("--input")
    if roles:
        p.add_argument("--treatment", default="A")
        p.add_argument("--outcome", default="Y")
        p.add_argument("--nce")
        p.add_argument("--nco")
        p.add_argument("--covariates", default="")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--bootstrap", type=int, default=DEFAULT_B)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.add_argument("--format", default="json", choices=("json", "csv-summary"))
    p.add_argument("--config", help="JSON file whose keys override the command-line flags")
    p.add_argument("--workers", type=int, default=1, help="worker threads (results do not depend on it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="negcontrol", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a dataset with known treatment effect")
    _common(p, roles=False)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--mode", default="reduced_form", choices=[m.value for m in Mode])
    p.add_argument("--az-corr", type=float, default=0.0)
    p.add_argument("--params", help="JSON file with structural parameters")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--dag", help="JSON DAG document; simulate from the graph instead")
    p.add_argument("--weights", help="JSON object of edge weights for --dag, keys like 'U->A'")
    p.add_argument("--allow-invalid", action="store_true")
    p.add_argument("--include-hidden", action="store_true", help="also export the latent U column")

    p = sub.add_parser("detect", help="test for residual confounding")
    _common(p)
    p.add_argument("--adjust-nce", action="store_true", help="also adjust the NCO test for the NCE")
    p.add_argument("--robust", action="store_true")

    p = sub.add_parser("estimate", help="bias-corrected treatment effect")
    _common(p)
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--moments", help="gmm instrument functions, e.g. 1,A,Z,Z2")
    p.add_argument("--psi-grid", help="ocal grid as LOW:HIGH:POINTS")
    p.add_argument("--beta-y", type=float, help="log hazard ratio for the outcome (hazard-combine)")
    p.add_argument("--beta-w", type=float, help="log hazard ratio for the NCO (hazard-combine)")
    p.add_argument("--ci-level", type=float, default=0.95)

    p = sub.add_parser("reduce", help="bias reduction (future exposure or SMR)")
    _common(p)
    p.add_argument("--mode", default="future", choices=("future", "smr"))
    p.add_argument("--smr", help="JSON array of strata for --mode smr")
    p.add_argument("--no-lead", action="store_true")
    p.add_argument("--lag", action="store_true")

    p = sub.add_parser("calibrate", help="empirically calibrated p-value")
    _common(p, roles=False)
    p.add_argument("--controls", required=True, help="CSV with columns beta,se")
    p.add_argument("--estimate", type=float, required=True)
    p.add_argument("--se", type=float, required=True)
    p.add_argument("--one-sided", action="store_true")

    p = sub.add_parser("validate-dag", help="check a negative-control design graph")
    _common(p, roles=False)
    p.add_argument("--dag", required=True)
    return parser


_CONFIG_FIELDS = {f for f in RunConfig.__dataclass_fields__} - {"command", "extra"}
_EXEC_ONLY = {"workers", "verbose", "config"}


def make_config(args: argparse.Namespace) -> tuple:
    ns = vars(args).copy()
    if ns.get("config"):
        path = ns["config"]
        if not os.path.isfile(path):
            raise InputError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            try:
                overrides = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"config file {path} is not valid JSON: {exc}") from exc
        for k, v in overrides.items():
            ns[k.replace("-", "_")] = v
    workers = int(ns.get("workers") or 1)
    base = {k: ns[k] for k in _CONFIG_FIELDS if k in ns}
    if "covariates" in base:
        base["covariates"] = _covariates(base["covariates"])
    extra = {k: v for k, v in ns.items() if k not in _CONFIG_FIELDS and k not in _EXEC_ONLY and k != "command"}
    cfg = RunConfig(command=ns["command"], extra=extra, **base)
    cfg.validate()
    return cfg, workers


def _emit(cfg: RunConfig, report: dict, summary: Optional[dict] = None) -> None:
    if cfg.format == "csv-summary" and summary is not None:
        buf = io_.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(summary))
        writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in summary.values()])
        text = buf.getvalue()
    else:
        text = io.dumps(report)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(cfg: RunConfig):
    if not cfg.input:
        raise InputError("--input is required")
    frame, dropped = io.read_table(cfg.input, cfg.roles().names())
    if dropped:
        log.warning("dropped %d row(s) with missing role values", dropped)
    from .model import Dataset

    return Dataset(frame, cfg.roles()), dropped, io.file_digest(cfg.input)


def _summary(rep: EstimateReport) -> dict:
    d = rep.to_dict()
    return {k: d[k] for k in ("method", "estimate", "se", "ci_low", "ci_high", "p_value")}


# -- subcommands -----------------------------------------------------------------


def run_simulate(cfg: RunConfig, workers: int) -> None:
    x = cfg.extra
    params = {}
    if x.get("params"):
        with open(x["params"], encoding="utf-8") as fh:
            params.update(json.load(fh))
    for item in x.get("param") or []:
        key, _, value = item.partition("=")
        params[key.strip()] = json.loads(value)
    if not cfg.output:
        raise InputError("simulate needs --output (CSV path)")
    if x.get("dag"):
        with open(x["dag"], encoding="utf-8") as fh:
            spec = DagSpec.from_json(fh.read())
        weights = {}
        if x.get("weights"):
            with open(x["weights"], encoding="utf-8") as fh:
                weights = json.load(fh)
        data = simulate_from_dag(
            spec, weights, int(x["n"]), cfg.seed, allow_invalid=bool(x.get("allow_invalid")), workers=workers
        )
        sidecar = {"dag": json.loads(spec.to_json()), "weights": weights, "n": int(x["n"]), "seed": cfg.seed}
        sidecar["true_effect"] = weights.get("A->Y")
    else:
        sim = SimConfig(SemParams.from_dict(params), int(x["n"]), cfg.seed, x["mode"], float(x["az_corr"]))
        data = simulate(sim, workers=workers)
        sidecar = {"config": sim.to_dict(), "true_effect": sim.params.beta_YA}
    cols = [c for c in data.columns if x.get("include_hidden") or c != "U"]
    io.write_dataset_csv(data, cfg.output, cols)
    sidecar.update({"columns": cols, "roles": data.roles.to_dict(), "csv_sha256": io.file_digest(cfg.output)})
    side_path = os.path.splitext(cfg.output)[0] + ".json"
    with open(side_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(io.dumps(sidecar))


def run_detect(cfg: RunConfig, workers: int) -> None:
    data, dropped, digest = _load(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = detect_mod.detect(data, cfg.alpha, bool(cfg.extra.get("robust")), bool(cfg.extra.get("adjust_nce")))
    result = {**rep.to_dict(), "rows_dropped": dropped, "n": data.n_rows}
    summary = {
        "verdict": rep.verdict.value,
        "nce_p": rep.nce_test.p_value if rep.nce_test else None,
        "nco_p": rep.nco_test.p_value if rep.nco_test else None,
    }
    _emit(cfg, io.envelope("detect", cfg.to_dict(), result, digest), summary)


def _psi_grid(text):
    if not text:
        return None
    lo, hi, k = text.split(":")
    return np.linspace(float(lo), float(hi), int(k))


def run_estimate(cfg: RunConfig, workers: int) -> None:
    x = cfg.extra
    level = float(x.get("ci_level") or 0.95)
    if cfg.method == "hazard-combine":
        if x.get("beta_y") is None or x.get("beta_w") is None:
            raise InputError("hazard-combine needs --beta-y and --beta-w")
        rep = correct.hazard_report(float(x["beta_y"]), float(x["beta_w"]))
        _emit(cfg, io.envelope("estimate", cfg.to_dict(), rep.to_dict()), _summary(rep))
        return
    data, dropped, digest = _load(cfg)
    boot = dict(n_boot=cfg.bootstrap, seed=cfg.seed, ci_level=level, workers=workers)
    m = cfg.method
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if m in ("naive", "nco-diff", "nce-diff"):
            rep = correct.ESTIMATORS[m](data, ci_level=level)
        elif m == "gmm":
            moments = correct.parse_moments(x["moments"]) if x.get("moments") else None
            _, rep = correct.estimate_gmm(data, moments, **boot)
        elif m == "ocal":
            rep = correct.estimate_ocal(data, _psi_grid(x.get("psi_grid")), **boot)
        else:
            rep = correct.ESTIMATORS[m](data, **boot)
    result = rep.to_dict()
    result["rows_dropped"] = dropped
    result["n"] = data.n_rows
    result["warnings"] = sorted({str(w.message) for w in caught})
    _emit(cfg, io.envelope("estimate", cfg.to_dict(), result, digest), _summary(rep))


def run_reduce(cfg: RunConfig, workers: int) -> None:
    x = cfg.extra
    if x.get("mode") == "smr":
        if not x.get("smr"):
            raise InputError("--mode smr needs --smr strata.json")
        path = x["smr"]
        if not os.path.isfile(path):
            raise InputError(f"SMR file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            strata = [SmrStratum.from_dict(d) for d in json.load(fh)]
        result = smr_report(strata, cfg.bootstrap, cfg.seed)
        _emit(cfg, io.envelope("reduce", cfg.to_dict(), result, io.file_digest(path)))
        return
    if not cfg.input:
        raise InputError("--input is required")
    cols = ["t", cfg.treatment, cfg.outcome, *cfg.covariates]
    frame, dropped = io.read_table(cfg.input, cols)
    if dropped:
        raise InputError("time-series input must not have missing values (gaps are not imputed)")
    X = np.column_stack([frame[c] for c in cfg.covariates]) if cfg.covariates else None
    ts = TimeSeriesDataset(frame["t"], frame[cfg.treatment], frame[cfg.outcome], X)
    rep = reduce_future_exposure(ts, lead=not x.get("no_lead"), lag=bool(x.get("lag")))
    _emit(cfg, io.envelope("reduce", cfg.to_dict(), rep.to_dict(), io.file_digest(cfg.input)), _summary(rep))


def run_calibrate(cfg: RunConfig, workers: int) -> None:
    x = cfg.extra
    frame, dropped = io.read_table(x["controls"], ["beta", "se"])
    null = fit_null(np.column_stack([frame["beta"], frame["se"]]))
    two = not x.get("one_sided")
    beta, se = float(x["estimate"]), float(x["se"])
    result = {
        "mu": null.mu,
        "sigma": null.sigma,
        "n_controls": null.n_controls,
        "converged": null.converged,
        "loglik": null.loglik,
        "p_uncalibrated": uncalibrated_pvalue(beta, se, two),
        "p_calibrated": calibrated_pvalue(beta, se, null, two),
        "two_sided": two,
        "ci_note": "confidence interval is not calibrated; the uncalibrated interval is echoed",
        "ci_uncalibrated": [beta - 1.959963984540054 * se, beta + 1.959963984540054 * se],
    }
    summary = {k: result[k] for k in ("mu", "sigma", "p_uncalibrated", "p_calibrated")}
    _emit(cfg, io.envelope("calibrate", cfg.to_dict(), result, io.file_digest(x["controls"])), summary)


def run_validate_dag(cfg: RunConfig, workers: int) -> None:
    path = cfg.extra["dag"]
    if not os.path.isfile(path):
        raise InputError(f"DAG file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        spec = DagSpec.from_json(fh.read())
    found = validate_dag(spec)
    result = {
        "valid": not found,
        "violations": [{"code": v.value, "description": DESCRIPTIONS[v]} for v in found],
    }
    _emit(cfg, io.envelope("validate-dag", cfg.to_dict(), result, io.file_digest(path)), {"valid": not found})


COMMANDS = {
    "simulate": run_simulate,
    "detect": run_detect,
    "estimate": run_estimate,
    "reduce": run_reduce,
    "calibrate": run_calibrate,
    "validate-dag": run_validate_dag,
}


def run_pipeline(cfg: RunConfig, workers: int = 1) -> int:
    """Run one configured subcommand; returns the process exit status."""
    try:
        COMMANDS[cfg.command](cfg, workers)
    except AnalysisError as exc:
        log.error("analysis failed: %s", exc)
        return 2
    except (InputError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return 1
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg, workers = make_config(args)
    except (InputError, ValueError, TypeError) as exc:
        log.error("%s", exc)
        return 1
    return run_pipeline(cfg, workers)


if __name__ == "__main__":
    sys.exit(main())
