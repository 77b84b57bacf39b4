"""Euler integration of the Laguerre and Jacobi particle systems."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betaintertwine import DomainError, IntegrationFailure, ModelParams
from betaintertwine.diffusion import (DiffusionState, SimConfig, _check_finite, check_exact_moment,
                                      check_norm_process, coupled_bias, interaction_sums,
                                      norm_process_mean, simulate, step_jacobi, step_laguerre)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_interaction_sum_identity(n, seed):
    rng = np.random.default_rng(seed)
    X = np.sort(rng.uniform(0.0, 1.0, (5, n)), axis=1)
    for family in ("laguerre", "jacobi"):
        S = interaction_sums(X, family).sum(axis=1)
        if family == "laguerre":
            assert np.allclose(S, n * (n - 1), atol=1e-8)
        else:
            # w(x) = x (1 - x): pair sums give 2 (1 - x_i - x_j)
            expected = sum(2 * (1 - X[:, i] - X[:, j]) for i in range(n) for j in range(i + 1, n))
            assert np.allclose(S, expected, atol=1e-8)


def test_config_and_state_validation():
    with pytest.raises(DomainError):
        SimConfig(dt=0.0)
    with pytest.raises(DomainError):
        SimConfig(paths=0)
    params = ModelParams(n=2, theta=1.0, d=3.0)
    with pytest.raises(DomainError):
        DiffusionState(np.array([0.5, 1.0, 2.0]), 0.0, "laguerre", params)
    with pytest.raises(DomainError):
        DiffusionState(np.array([0.1, 0.5]), 0.0, "jacobi", params)
    with pytest.raises(DomainError):
        DiffusionState(np.array([0.1, 0.5]), 0.0, "hermite", params)
    with pytest.raises(DomainError):
        DiffusionState(np.array([1.0, 0.5]), 0.0, "laguerre", params)
    with pytest.raises(DomainError):
        DiffusionState(np.array([-0.1, 0.5]), 0.0, "laguerre", params)
    with pytest.raises(DomainError):
        DiffusionState(np.array([0.1, 0.5]), -1.0, "laguerre", params)
    jp = ModelParams(n=2, theta=1.0, a=2.0, b=2.0)
    with pytest.raises(DomainError):
        DiffusionState(np.array([[0.1, 0.5], [0.2, 1.1]]), 0.0, "jacobi", jp)


@pytest.mark.parametrize("family", ["laguerre", "jacobi"])
def test_steps_preserve_order_and_range(family):
    if family == "laguerre":
        params = ModelParams(n=3, theta=0.5, d=2.0)
        x0, step = np.array([0.0, 0.001, 0.002]), step_laguerre
    else:
        params = ModelParams(n=3, theta=0.5, a=1.0, b=1.0)
        x0, step = np.array([0.0, 0.5, 1.0]), step_jacobi
    state = DiffusionState(np.tile(x0, (500, 1)), 0.0, family, params)
    rng = np.random.default_rng(0)
    for _ in range(50):
        state = step(state, 0.01, rng)
        X = state.coords
        assert np.all(np.diff(X, axis=1) >= 0)
        assert np.all(X >= 0)
        if family == "jacobi":
            assert np.all(X <= 1)
    assert state.time == pytest.approx(0.5)
    assert state.substeps >= 50


def test_step_checks_family():
    params = ModelParams(n=1, theta=1.0, d=3.0)
    with pytest.raises(DomainError):
        step_jacobi(DiffusionState(np.array([0.5]), 0.0, "laguerre", params), 0.1)


def test_simulate_is_seed_deterministic_and_worker_independent(monkeypatch):
    params = ModelParams(n=2, theta=1.0, d=3.0)
    cfg = SimConfig(paths=5000, seed=11)
    a = simulate("laguerre", [0.5, 1.5], params, 0.1, cfg)
    b = simulate("laguerre", [0.5, 1.5], params, 0.1, cfg)
    monkeypatch.setenv("BETAINTERTWINE_WORKERS", "2")
    c = simulate("laguerre", [0.5, 1.5], params, 0.1, cfg)
    assert a.shape == (5000, 2)
    assert np.array_equal(a, b) and np.array_equal(a, c)


def test_simulate_edge_cases():
    params = ModelParams(n=2, theta=1.0, a=2.0, b=2.0)
    X = simulate("jacobi", [0.2, 0.7], params, 0.0, SimConfig(paths=3))
    assert np.array_equal(X, np.array([[0.2, 0.7]] * 3))
    starts = np.array([[0.1, 0.2], [0.3, 0.9]])
    assert simulate("jacobi", starts, params, 0.05).shape == (2, 2)
    with pytest.raises(DomainError):
        simulate("laguerre", [0.2, 0.7], params, 1.0)
    with pytest.raises(DomainError):
        simulate("jacobi", [0.2, 1.7], params, 1.0)


def test_non_finite_state_reports_path():
    X = np.array([[0.1, 0.2], [np.nan, 0.3]])
    with pytest.raises(IntegrationFailure) as info:
        _check_finite(X, offset=100, time=0.25)
    assert info.value.path_index == 101
    assert info.value.diagnostics["time"] == 0.25


def test_norm_mean_formula():
    params = ModelParams(n=3, theta=0.5, d=2.0)
    assert norm_process_mean(params, np.array([0.3, 1.0, 2.0]), 1.0) == pytest.approx(3.3 + 1.0 * (3 + 6))


def test_norm_process_small_budget():
    params = ModelParams(n=2, theta=1.0, d=3.0)
    c = check_norm_process(params, [0.5, 1.5], 0.5, SimConfig(paths=4000, seed=3))
    assert c.passed, c


def test_norm_process_needs_laguerre():
    with pytest.raises(DomainError):
        check_norm_process(ModelParams(n=1, theta=1.0, a=2.0, b=2.0), [0.5], 0.5)


def test_jacobi_one_particle_moment():
    params = ModelParams(n=1, theta=1.0, a=2.0, b=2.0)
    c = check_exact_moment("jacobi", [0.1], (1,), params, 0.3, SimConfig(paths=4000, seed=4))
    assert c.passed, c


def test_coupled_bias_requires_grid_time():
    params = ModelParams(n=1, theta=1.0, d=3.0)
    with pytest.raises(DomainError):
        coupled_bias("laguerre", [0.5], (1,), params, 0.25, 0.1, paths=10)


def test_coupled_bias_first_moment_laguerre_is_unbiased():
    # E sum X is linear in time, so Euler reproduces it for every step size
    params = ModelParams(n=2, theta=1.0, d=3.0)
    r = coupled_bias("laguerre", [1.0, 2.0], (1,), params, 0.4, 0.1, paths=4000, seed=5,
                     config=SimConfig(gap_safety=None))
    assert abs(r.bias_coarse) < 4 * r.se_coarse
    assert abs(r.bias_fine) < 4 * r.se_fine
