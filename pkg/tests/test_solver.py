from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lassodist import (
    ConfigError,
    ConvergenceError,
    DataError,
    build_problem,
    lambda_grid,
    lambda_max,
    solve_lasso,
    solve_lasso_gram,
    subgradient_of,
)

from oracles import enumerate_lasso, soft_threshold


def test_identity_gram_soft_thresholds():
    beta, res = solve_lasso_gram(np.eye(2), np.array([2.0, 0.3]), np.ones(2), 0.5)
    np.testing.assert_allclose(beta, [1.5, 0.0], atol=1e-12)
    assert res <= 1e-8


def test_subgradient_of_recovers_known_values(identity_spec):
    y = np.array([2.0, 0.3]) @ np.linalg.inv(identity_spec.X.T / identity_spec.n)
    fit = solve_lasso(identity_spec, y)
    np.testing.assert_allclose(fit.beta_hat, [1.5, 0.0], atol=1e-10)
    np.testing.assert_allclose(fit.subgrad, [1.0, 0.6], atol=1e-10)
    s = subgradient_of(identity_spec, y, fit.beta_hat)
    np.testing.assert_allclose(s, [1.0, 0.6], atol=1e-10)


def test_perturbed_solution_rejected(identity_spec):
    y = np.array([2.0, 0.3]) @ np.linalg.inv(identity_spec.X.T / identity_spec.n)
    fit = solve_lasso(identity_spec, y)
    with pytest.raises(DataError):
        subgradient_of(identity_spec, y, fit.beta_hat + np.array([0.3, 0.0]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_matches_enumeration_oracle(seed, p):
    gen = np.random.default_rng(seed)
    n = p + int(gen.integers(1, 5))
    X = gen.standard_normal((n, p))
    weights = gen.uniform(0.5, 1.5, p)
    lam = float(gen.uniform(0.1, 0.8))
    spec = build_problem(X, weights, lam)
    y = gen.standard_normal(n)
    fit = solve_lasso(spec, y)
    xty = X.T @ y / n
    beta_ref, s_ref = enumerate_lasso(spec.gram, xty, weights, lam)
    np.testing.assert_allclose(fit.beta_hat, beta_ref, atol=1e-7)
    np.testing.assert_allclose(fit.subgrad, s_ref, atol=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kkt_residual_below_tolerance_wide(seed):
    gen = np.random.default_rng(seed)
    n, p = 5, 9
    X = gen.standard_normal((n, p))
    spec = build_problem(X, 1.0, float(gen.uniform(0.1, 0.6)))
    y = gen.standard_normal(n)
    fit = solve_lasso(spec, y)
    assert fit.kkt_residual <= 1e-8
    assert np.all(np.abs(fit.subgrad) <= 1.0 + 1e-12)
    on = fit.beta_hat != 0
    np.testing.assert_array_equal(fit.subgrad[on], np.sign(fit.beta_hat[on]))


def test_orthonormal_solution_is_soft_threshold():
    gen = np.random.default_rng(3)
    z = gen.standard_normal(6)
    beta, _ = solve_lasso_gram(np.eye(6), z, np.ones(6), 0.35)
    np.testing.assert_allclose(beta, soft_threshold(z, 0.35), atol=1e-10)


def test_lambda_max_zero_response(small_spec):
    assert lambda_max(small_spec, np.zeros(small_spec.n)) == 0.0


def test_solution_vanishes_at_lambda_max(small_spec):
    gen = np.random.default_rng(8)
    y = gen.standard_normal(small_spec.n)
    lmax = lambda_max(small_spec, y)
    spec_hi = build_problem(small_spec.X, small_spec.weights, lmax * 1.000001)
    fit = solve_lasso(spec_hi, y)
    np.testing.assert_array_equal(fit.beta_hat, np.zeros(small_spec.p))
    spec_lo = build_problem(small_spec.X, small_spec.weights, lmax * 0.95)
    assert np.any(solve_lasso(spec_lo, y).beta_hat != 0)


def test_lambda_grid_spans_requested_range(small_spec):
    gen = np.random.default_rng(4)
    y = gen.standard_normal(small_spec.n)
    grid = lambda_grid(small_spec, y, num=20, min_frac=0.05)
    assert grid.shape == (20,)
    assert grid[0] == pytest.approx(lambda_max(small_spec, y))
    assert grid[-1] == pytest.approx(0.05 * grid[0])
    assert np.all(np.diff(grid) < 0)


def test_lambda_grid_rejects_zero_top(small_spec):
    from lassodist import NumericalError

    with pytest.raises(NumericalError):
        lambda_grid(small_spec, np.zeros(small_spec.n), num=5)


def test_convergence_error_carries_iterate(small_spec):
    gen = np.random.default_rng(12)
    y = gen.standard_normal(small_spec.n) * 5
    with pytest.raises(ConvergenceError) as exc_info:
        solve_lasso(small_spec, y, kkt_tol=1e-16, max_iter=1)
    err = exc_info.value
    assert err.beta.shape == (small_spec.p,)
    assert err.residual > 1e-16


def test_bad_grid_size_rejected(small_spec):
    with pytest.raises(ConfigError):
        lambda_grid(small_spec, np.ones(small_spec.n), num=0)
