import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from negcontrol.errors import InsufficientRows, RankDeficient, ZeroVariance
from negcontrol.model import SemParams
from negcontrol.regression import gram_solve, ols_fit, selector, wald_test, weighted_gram
from negcontrol.simulate import SimConfig, simulate


def random_design(seed, n=50, k=4):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.normal(size=(n, k - 1))])
    y = X @ rng.normal(size=k) + rng.normal(size=n)
    return X, y


def test_exact_fit():
    x = np.arange(10.0)
    fit = ols_fit(np.column_stack([np.ones(10), x]), 2 * x)
    np.testing.assert_allclose(fit.coef, [0.0, 2.0], atol=1e-12)
    assert fit.sigma2_hat == pytest.approx(0.0, abs=1e-25)


def test_three_collinear_points():
    fit = ols_fit(np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]]), np.array([1.0, 3.0, 5.0]))
    np.testing.assert_allclose(fit.coef, [1.0, 2.0], atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_matches_normal_equations(seed):
    X, y = random_design(seed)
    oracle = np.linalg.solve(X.T @ X, X.T @ y)
    fit = ols_fit(X, y)
    np.testing.assert_allclose(fit.coef, oracle, rtol=1e-10, atol=1e-12)
    resid = y - X @ oracle
    s2 = resid @ resid / (X.shape[0] - X.shape[1])
    np.testing.assert_allclose(fit.cov, s2 * np.linalg.inv(X.T @ X), rtol=1e-9, atol=1e-14)


def test_hc1_against_explicit_sandwich():
    X, y = random_design(7, n=80)
    fit = ols_fit(X, y, robust=True)
    b = np.linalg.inv(X.T @ X)
    e = y - X @ fit.coef
    oracle = b @ (X.T * e**2) @ X @ b * 80 / (80 - 4)
    np.testing.assert_allclose(fit.cov, oracle, rtol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_fit_invariants(seed, robust):
    X, y = random_design(seed, n=40, k=3)
    fit = ols_fit(X, y, robust=robust)
    scale = np.abs(X).max() * np.abs(y).max() * X.shape[0]
    assert np.max(np.abs(X.T @ fit.resid)) <= 1e-8 * scale
    np.testing.assert_allclose(fit.cov, fit.cov.T, atol=1e-10)
    assert np.all(np.diag(fit.cov) >= 0)
    assert fit.n > fit.k


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(-50, 50).filter(lambda c: abs(c) > 1e-3), st.floats(-100, 100))
def test_affine_equivariance(seed, c, shift):
    X, y = random_design(seed, n=40, k=3)
    base = ols_fit(X, y)
    scaled = ols_fit(X, c * y)
    np.testing.assert_allclose(scaled.coef, c * base.coef, rtol=1e-8, atol=1e-10)
    np.testing.assert_allclose(scaled.se, abs(c) * base.se, rtol=1e-8, atol=1e-10)
    X2 = X.copy()
    X2[:, 1] += shift
    moved = ols_fit(X2, y)
    np.testing.assert_allclose(moved.coef[1:], base.coef[1:], rtol=1e-7, atol=1e-9)
    assert moved.coef[0] == pytest.approx(base.coef[0] - shift * base.coef[1], rel=1e-7, abs=1e-7)


def test_classical_and_robust_agree_homoskedastic():
    rng = np.random.default_rng(3)
    n = 100_000
    X = np.column_stack([np.ones(n), rng.normal(size=n), rng.binomial(1, 0.4, n)])
    y = X @ [1.0, -0.5, 2.0] + rng.normal(size=n)
    a, b = ols_fit(X, y).se, ols_fit(X, y, robust=True).se
    assert np.all(np.abs(a / b - 1) < 0.10)


def test_rank_deficiency_names_column():
    x = np.arange(6.0)
    X = np.column_stack([np.ones(6), x, 2 * x])
    with pytest.raises(RankDeficient) as info:
        ols_fit(X, x, names=["const", "A", "Z"])
    assert info.value.column in {"A", "Z"}
    with pytest.raises(RankDeficient) as info:
        ols_fit(np.column_stack([np.ones(6), np.zeros(6)]), x, names=["const", "Z"])
    assert info.value.column == "Z"


def test_too_few_rows():
    with pytest.raises(InsufficientRows):
        ols_fit(np.ones((2, 2)) + np.eye(2), np.ones(2))


def test_wald_trivial_values():
    X, y = random_design(1)
    fit = ols_fit(X, y)
    i = 1
    stat, p = wald_test(fit, i, null_value=fit.coef[i])
    assert stat == 0.0 and p == 1.0
    from dataclasses import replace

    unit = replace(fit, coef=np.r_[0.0, 1.96, 0.0, 0.0], cov=np.eye(4))
    assert wald_test(unit, 1)[1] == pytest.approx(0.05, abs=1e-3)
    with pytest.raises(ZeroVariance):
        wald_test(replace(fit, cov=np.zeros((4, 4))), 1)


def test_wald_uniform_under_null():
    ps = []
    for seed in range(500):
        d = simulate(SimConfig(SemParams(beta_YU=0.0), 1000, seed))
        fit = ols_fit(np.column_stack([np.ones(d.n_rows), d.A, d.Z]), d.Y)
        ps.append(wald_test(fit, 2)[1])
    assert stats.kstest(ps, "uniform").pvalue > 0.01


def test_gram_path_matches_qr():
    X, y = random_design(5, n=200)
    D = np.column_stack([X, y])
    counts = np.random.default_rng(0).multinomial(200, np.full(200, 1 / 200)).astype(float)
    M = weighted_gram(D, counts, chunk=37)
    b = gram_solve(M, selector(5, 0, 1, 2, 3), np.eye(5)[4])
    idx = np.repeat(np.arange(200), counts.astype(int))
    np.testing.assert_allclose(b, ols_fit(X[idx], y[idx]).coef, rtol=1e-9)


def test_gram_singular_is_rank_deficient():
    D = np.column_stack([np.ones(5), np.zeros(5), np.arange(5.0)])
    with pytest.raises(RankDeficient):
        gram_solve(weighted_gram(D), selector(3, 0, 1), np.eye(3)[2])
