import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from negcontrol import correct
from negcontrol.correct import (
    MOMENT_LIBRARY,
    combine_hazard_ratios,
    estimate_double_nc,
    estimate_gdid,
    estimate_gmm,
    estimate_naive,
    estimate_nce_diff,
    estimate_nco_diff,
    estimate_ocal,
    estimate_tsls,
    parse_moments,
    quantile_map,
)
from negcontrol.detect import proxy_strength
from negcontrol.errors import (
    DegenerateCalibration,
    EmptyInversionSet,
    PositivityViolation,
    RankDeficient,
    SingularMomentJacobian,
    StageTwoSingular,
    WeakProxy,
    WeakProxyWarning,
)
from negcontrol.model import ColumnRoles, Dataset
from negcontrol.simulate import simulate_monotone, simulate_pre_post, simulate_rank_preserving

from conftest import sim, within_se

B = 200


@pytest.fixture(scope="module")
def large():
    return sim(100_000, 21)


# -- naive and single-control differences -------------------------------------


def test_naive_unconfounded():
    r = estimate_naive(sim(20_000, 1, beta_YU=0.0))
    assert within_se(r.estimate, 2.0, r.se)


def test_naive_derived_bias(large):
    r = estimate_naive(large)
    assert within_se(r.estimate, 3.5, r.se)


def test_naive_constant_treatment():
    d = sim(100, 1).with_column("A", np.ones(100))
    with pytest.raises(RankDeficient):
        estimate_naive(d)


def test_nco_diff_equal_loadings(large):
    d = sim(100_000, 22, beta_WU=1.5)
    r = estimate_nco_diff(d)
    assert within_se(r.estimate, 2.0, r.se)
    r = estimate_nco_diff(large)
    assert within_se(r.estimate, 1.5, r.se)


def test_nco_diff_no_confounding():
    r = estimate_nco_diff(sim(50_000, 3, beta_UA=0.0, beta_WU=5.0))
    assert within_se(r.estimate, 2.0, r.se)


def test_nco_diff_se_is_difference_regression():
    d = sim(500, 4)
    r = estimate_nco_diff(d)
    fit = correct.ols_fit(np.column_stack([np.ones(500), d.A]), d.Y - d.W)
    assert r.estimate == pytest.approx(fit.coef[1], rel=1e-10)
    assert r.se == pytest.approx(fit.se[1], rel=1e-12)


def test_nce_diff_equal_loadings(large):
    r = estimate_nce_diff(sim(100_000, 23, beta_UA=0.8, beta_UZ=0.8))
    assert within_se(r.estimate, 2.0, r.se)
    r = estimate_nce_diff(large)
    assert within_se(r.estimate, 2.3, r.se)


def test_nce_diff_no_outcome_confounding():
    r = estimate_nce_diff(sim(50_000, 5, beta_YU=0.0))
    assert within_se(r.estimate, 2.0, r.se)
    assert within_se(r.diagnostics["delta_ZY"], 0.0, r.se)


# -- double negative control, 2SLS, GMM ----------------------------------------


def test_double_nc_recovers_effect(large):
    r = estimate_double_nc(large, n_boot=B, seed=1)
    assert within_se(r.estimate, 2.0, r.se)
    d = r.diagnostics
    assert r.estimate == pytest.approx(d["delta_AY"] - d["delta_AW"] * d["delta_ZY"] / d["delta_ZW"])
    assert d["bias_estimate"] == pytest.approx(d["delta_AY"] - r.estimate)


def test_double_nc_without_outcome_confounding():
    d = sim(20_000, 6, beta_YU=0.0)
    r = estimate_double_nc(d, n_boot=B)
    naive = estimate_naive(d)
    assert abs(r.estimate - naive.estimate) < 3 * r.se
    assert within_se(r.estimate, 2.0, r.se)


def test_double_nc_weak_proxy_floor():
    raised = 0
    for s in range(40):
        d = sim(2000, 300 + s, beta_UZ=0.0)
        strength = proxy_strength(d, warn=False)
        if strength < 0.5:
            with pytest.raises(WeakProxy):
                estimate_double_nc(d, n_boot=50)
            with pytest.raises(StageTwoSingular):
                estimate_tsls(d, n_boot=50)
            raised += 1
        elif strength < 2.0:
            with pytest.warns(WeakProxyWarning):
                estimate_double_nc(d, n_boot=50)
    assert raised > 0


def test_double_nc_exact_zero_proxy():
    # Z orthogonal to W given (1, A): the NCE slope on the NCO is exactly 0.
    A = np.array([0, 0, 0, 0, 1, 1, 1, 1.0] * 5)
    Z = np.array([1, -1, 1, -1, 1, -1, 1, -1.0] * 5)
    W = np.array([1, 1, 2, 2, 3, 3, 5, 5.0] * 5) + np.repeat(np.arange(5.0), 8)
    Y = W + A
    d = Dataset({"A": A, "Z": Z, "W": W, "Y": Y}, ColumnRoles(nce="Z", nco="W"))
    with pytest.raises(WeakProxy):
        estimate_double_nc(d, n_boot=50)
    with pytest.raises(StageTwoSingular):
        estimate_tsls(d, n_boot=50)


@pytest.mark.parametrize("seed", range(20))
def test_tsls_equals_double_nc(seed):
    d = sim(1000, seed, beta_YX=(0.5,), beta_WX=(-1.0,), beta_UX=(0.3,)) if seed % 2 else sim(1000, seed)
    a = estimate_double_nc(d, n_boot=50).estimate
    b = estimate_tsls(d, n_boot=50).estimate
    assert abs(a - b) <= 1e-8 * (1 + abs(a))
    _, g = estimate_gmm(d, parse_moments("1,A,Z"), n_boot=50)
    assert abs(g.estimate - b) <= 1e-6


def test_tsls_noiseless_exact():
    d = sim(500, 7, beta_YU=0.0, sigma_Y=1e-12)
    r = estimate_tsls(d, n_boot=50)
    assert r.estimate == pytest.approx(2.0, abs=1e-9)


def test_gmm_bridge_parameters(large):
    bridge, r = estimate_gmm(large, n_boot=B)
    assert within_se(r.estimate, 2.0, r.se)
    assert bridge.thetaW == pytest.approx(1.5 / 2.0, abs=0.02)
    assert bridge.ate(large.W) == pytest.approx(bridge.thetaA)


def test_gmm_exact_bridge():
    rng = np.random.default_rng(0)
    n = 300
    A = rng.binomial(1, 0.5, n).astype(float)
    Z = rng.normal(size=n)
    W = Z + A + rng.normal(size=n)
    Y = 0.3 + 1.7 * A - 0.6 * W
    d = Dataset({"A": A, "Z": Z, "W": W, "Y": Y}, ColumnRoles(nce="Z", nco="W"))
    for moments in (None, parse_moments("1,A,Z,Z2,AZ")):
        bridge, _ = estimate_gmm(d, moments, n_boot=50)
        assert (bridge.theta0, bridge.thetaA, bridge.thetaW) == pytest.approx((0.3, 1.7, -0.6), abs=1e-9)


def test_gmm_overidentified_reports_hansen_j():
    _, r = estimate_gmm(sim(5000, 8), parse_moments("1,A,Z,Z2,AZ"), n_boot=B)
    assert r.diagnostics["overidentified"]
    assert 0.0 <= r.diagnostics["hansen_j_p"] <= 1.0
    assert within_se(r.estimate, 2.0, r.se)


def test_gmm_errors():
    d = sim(500, 9)
    with pytest.raises(SingularMomentJacobian):
        estimate_gmm(d, [MOMENT_LIBRARY["1"], MOMENT_LIBRARY["A"], MOMENT_LIBRARY["A"]], n_boot=50)
    with pytest.raises(ValueError):
        estimate_gmm(d, parse_moments("1,A"), n_boot=50)
    with pytest.raises(ValueError):
        parse_moments("1,A,Q")


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 1000), st.floats(0.1, 20.0), st.sampled_from([-1.0, 1.0]))
def test_scale_equivariance(seed, c, sign):
    c = sign * c
    d = sim(600, seed)
    dy = d.with_column("Y", c * d.Y)
    dw = d.with_column("W", c * d.W)
    for f in (estimate_naive, estimate_nce_diff):
        assert f(dy).estimate == pytest.approx(c * f(d).estimate, rel=1e-9, abs=1e-12)
    for f in (estimate_double_nc, estimate_tsls, lambda x, **k: estimate_gmm(x, **k)[1]):
        base = f(d, n_boot=50).estimate
        assert f(dy, n_boot=50).estimate == pytest.approx(c * base, rel=1e-8)
        assert f(dw, n_boot=50).estimate == pytest.approx(base, rel=1e-8)
    slope_y = estimate_nco_diff(d).diagnostics["slope_A_on_Y"]
    assert estimate_nco_diff(dy).diagnostics["slope_A_on_Y"] == pytest.approx(c * slope_y, rel=1e-9)


def test_consistency_sweep():
    medians = []
    for n in (1_000, 10_000, 100_000, 1_000_000):
        errs = [abs(estimate_double_nc(sim(n, 5000 + s), n_boot=2).estimate - 2.0) for s in range(50)]
        medians.append(np.median(errs))
    assert all(a > b for a, b in zip(medians, medians[1:]))


def test_bootstrap_coverage():
    hits = [estimate_double_nc(sim(5000, 7000 + s), seed=s).covers(2.0) for s in range(200)]
    assert 0.90 <= np.mean(hits) <= 0.99


def test_bootstrap_independent_of_workers():
    d = sim(3000, 10)
    a = estimate_double_nc(d, n_boot=100, seed=3, workers=1)
    b = estimate_double_nc(d, n_boot=100, seed=3, workers=4)
    assert a.to_dict() == b.to_dict()


# -- generalized difference-in-differences --------------------------------------


def quantile_map_oracle(w_new, w_ref, y_ref):
    ys = sorted(y_ref)
    n = len(ys)
    out = []
    for w in w_new:
        k = sum(1 for v in w_ref if v <= w)
        lo = ys[max(k - 1, 0)]
        hi = ys[min(k, n - 1)]
        out.append((lo + hi) / 2)
    return np.array(out)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(-5, 5), min_size=1, max_size=12),
    st.lists(st.floats(-10, 10), min_size=1, max_size=12),
    st.lists(st.integers(-7, 7), min_size=1, max_size=6),
)
def test_quantile_map_against_oracle(w_ref, y_ref, w_new):
    w_ref = np.array(w_ref, dtype=float)
    y_ref = np.resize(np.array(y_ref), w_ref.size)
    w_new = np.array(w_new, dtype=float)
    np.testing.assert_allclose(quantile_map(w_new, w_ref, y_ref), quantile_map_oracle(w_new, w_ref, y_ref))


def test_quantile_map_monotone():
    rng = np.random.default_rng(1)
    w, y = rng.normal(size=100), rng.normal(size=100)
    grid = np.linspace(-4, 4, 200)
    assert np.all(np.diff(quantile_map(grid, w, y)) >= 0)


def test_gdid_matches_did():
    d = simulate_pre_post(5000, 2)
    r = estimate_gdid(d, n_boot=B)
    A, Y, W = d.A, d.Y, d.W
    did = (Y[A == 1].mean() - Y[A == 0].mean()) - (W[A == 1].mean() - W[A == 0].mean())
    assert within_se(r.estimate, did, r.se)


def test_gdid_null_effect():
    d = simulate_pre_post(5000, 3, att=0.0, trend=0.0, confounding=0.0)
    r = estimate_gdid(d, n_boot=B)
    assert within_se(r.estimate, 0.0, r.se)


def test_gdid_monotone_shift():
    d = simulate_monotone(5000, 4, shift=1.0)
    r = estimate_gdid(d, n_boot=B)
    assert within_se(r.estimate, 1.0, r.se)


def test_gdid_positivity():
    A = np.r_[np.zeros(50), np.ones(50)]
    W = np.r_[np.linspace(0, 1, 50), np.linspace(5, 6, 50)]
    d = Dataset({"A": A, "W": W, "Y": W + A}, ColumnRoles(nco="W"))
    with pytest.raises(PositivityViolation):
        estimate_gdid(d, n_boot=50)


def test_gdid_stratified_by_discrete_covariate():
    d = simulate_pre_post(4000, 5)
    x = (np.arange(4000) % 2).astype(float)
    d2 = d.with_column("X", x).with_column("Y", d.Y + 3 * x).with_column("W", d.W + 3 * x)
    r = estimate_gdid(d2.with_roles(covariates=("X",)), n_boot=B)
    assert r.diagnostics["strata"] == 2
    assert within_se(r.estimate, 1.0, r.se, k=4)


# -- outcome calibration -------------------------------------------------------


def test_ocal_recovery():
    d = simulate_rank_preserving(100_000, 6, psi=1.5)
    r = estimate_ocal(d, n_boot=B)
    assert within_se(r.estimate, 1.5, r.se)
    assert r.covers(1.5)
    assert r.diagnostics["accepted_contiguous"]
    assert not r.diagnostics["truncated_by_grid"]


def test_ocal_zero_effect():
    r = estimate_ocal(simulate_rank_preserving(20_000, 7, psi=0.0), n_boot=B)
    assert within_se(r.estimate, 0.0, r.se)


def test_ocal_degenerate():
    rng = np.random.default_rng(2)
    n = 2000
    A = rng.binomial(1, 0.5, n).astype(float)
    Y = A + rng.normal(size=n)
    # W is a function of A alone, so its slope on Y vanishes exactly.
    d = Dataset({"A": A, "Y": Y, "W": 2.0 * A - 1.0}, ColumnRoles(nco="W"))
    with pytest.raises(DegenerateCalibration):
        estimate_ocal(d, n_boot=50)


def test_ocal_empty_inversion():
    d = simulate_rank_preserving(5000, 8)
    with pytest.raises(EmptyInversionSet):
        estimate_ocal(d, psi_grid=np.linspace(50, 60, 11), n_boot=50)


# -- hazard ratios ----------------------------------------------------------------


def test_hazard_combination():
    assert combine_hazard_ratios(0.4, 0.4) == 1.0
    assert combine_hazard_ratios(math.log(2), math.log(1.25)) == pytest.approx(1.6, rel=1e-14)
    assert combine_hazard_ratios(0.7, 0.0) == pytest.approx(math.exp(0.7))
    with pytest.raises(ValueError):
        combine_hazard_ratios(float("inf"), 0.0)
    assert correct.hazard_report(0.2, 0.1).to_dict()["estimate"] == pytest.approx(math.exp(0.1))
