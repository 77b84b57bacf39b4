"""Beta-Jacobi ensemble: density, MCMC, the lowered-ensemble identity and stationarity."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from betaintertwine import DomainError, NumericalFailure
from betaintertwine.comparison import clustered_mean_se
from betaintertwine.diffusion import SimConfig
from betaintertwine.ensemble import (EnsembleSpec, _gauss_jacobi_unit, beta_moment, check_corollary, check_sde_stationarity,
                                     ensemble_log_density_unnormalized, ensemble_mcmc,
                                     ensemble_moment_1d, lowered_kernel_moment, symmetrize,
                                     symmetrize_and_moment)


def test_spec_validation_and_regimes():
    with pytest.raises(DomainError):
        EnsembleSpec(2, 2.0, 2.0, 0.5)
    with pytest.raises(DomainError):
        EnsembleSpec(2, 0.0, 2.0, 1.0)
    assert EnsembleSpec(2, 2.0, 2.0, 1.0).regime == "corollary"
    assert EnsembleSpec(2, 0.8, 2.0, 2.0).regime == "density"
    assert EnsembleSpec(2, 0.3, 2.0, 2.0).regime == "integrable"
    assert EnsembleSpec(1, 3.0, 2.5, 2.0).lowered() == EnsembleSpec(2, 2.0, 1.5, 2.0)


def test_density_off_chamber():
    spec = EnsembleSpec(2, 2.0, 2.0, 2.0)
    assert ensemble_log_density_unnormalized([0.6, 0.3], spec) == -math.inf
    assert ensemble_log_density_unnormalized([0.3, 1.2], spec) == -math.inf
    # a = b = beta = 2: x (1 - x) y (1 - y) (y - x)^2
    x, y = 0.3, 0.6
    expected = math.log(x * (1 - x) * y * (1 - y) * (y - x) ** 2)
    assert ensemble_log_density_unnormalized([x, y], spec) == pytest.approx(expected)


@pytest.mark.parametrize("a, b, beta", [(2, 2, 2), (3, 2.5, 2), (1.5, 4, 1), (0.7, 2, 3)])
def test_one_particle_quadrature_is_beta(a, b, beta):
    spec = EnsembleSpec(1, a, b, beta)
    for k in range(1, 5):
        got = ensemble_moment_1d(spec, lambda Y, k=k: Y[:, 0] ** k, 40)
        assert got == pytest.approx(beta_moment(k, beta * a / 2, beta * b / 2), rel=1e-12)


def test_one_particle_mcmc_draws_are_exact_beta():
    spec = EnsembleSpec(1, 3.0, 2.0, 1.0)
    draws = ensemble_mcmc(spec, 20_000, rng=0).samples[:, 0]
    assert stats.kstest(draws, stats.beta(1.5, 1.0).cdf).pvalue > 1e-3


def _two_particle_moment(spec, fn):
    def dens(y, x):
        return math.exp(ensemble_log_density_unnormalized([x, y], spec))

    mass = integrate.dblquad(dens, 0, 1, lambda x: x, 1)[0]
    num = integrate.dblquad(lambda y, x: dens(y, x) * fn(x, y), 0, 1, lambda x: x, 1)[0]
    return num / mass


def test_mcmc_matches_two_particle_quadrature():
    spec = EnsembleSpec(2, 2.0, 3.0, 2.0)
    target = _two_particle_moment(spec, lambda x, y: x + y)
    s = ensemble_mcmc(spec, 40_000, rng=1)
    assert s.acceptance_ok
    assert np.all(np.diff(s.samples, axis=1) > 0)
    mean, se = clustered_mean_se(s.samples.sum(axis=1), s.chain_id)
    assert abs(mean - target) < 4 * se


def test_mcmc_reflection_symmetry_when_a_equals_b():
    spec = EnsembleSpec(3, 2.5, 2.5, 1.0)
    s = ensemble_mcmc(spec, 30_000, rng=2)
    mean, se = clustered_mean_se(s.samples.sum(axis=1), s.chain_id)
    assert abs(mean - 1.5) < 4 * se


def test_nested_rule_against_triple_integral():
    # x ~ two-particle ensemble, y ~ kernel at theta = 1: density 1 / (x2 - x1) on [x1, x2]
    upper = EnsembleSpec(2, 1.5, 2.0, 2.0)

    def joint(y, x2, x1):
        return math.exp(ensemble_log_density_unnormalized([x1, x2], upper)) / (x2 - x1)

    lims = (lambda x1: x1, lambda x1: 1, lambda x2, x1: x1, lambda x2, x1: x2)
    mass = integrate.tplquad(joint, 0, 1, *lims)[0]
    first = integrate.tplquad(lambda y, x2, x1: y * joint(y, x2, x1), 0, 1, *lims)[0]
    assert lowered_kernel_moment(upper, lambda Y: Y[:, 0], 30) == pytest.approx(first / mass, abs=1e-7)
    with pytest.raises(DomainError):
        lowered_kernel_moment(EnsembleSpec(3, 2.0, 2.0, 2.0), lambda Y: Y[:, 0], 10)


def test_corollary_quadrature_example():
    spec = EnsembleSpec(1, 2.0, 2.0, 2.0)
    res = check_corollary(spec, [lambda Y: Y[:, 0], lambda Y: Y[:, 0] ** 2])
    assert [c.passed for c in res] == [True, True]
    assert res[0].target == pytest.approx(0.5)
    assert res[1].target == pytest.approx(0.3)
    assert res[1].estimate == pytest.approx(0.3, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.0, 6.0, exclude_min=True), st.floats(1.0, 6.0, exclude_min=True), st.floats(1.0, 5.0))
def test_corollary_quadrature_holds_in_regime(a, b, beta):
    res = check_corollary(EnsembleSpec(1, a, b, beta), [(1,), (2,), (3,), (4,)])
    assert all(c.passed for c in res), res


def test_corollary_quadrature_at_the_regime_edge():
    a = np.nextafter(1.0, 2.0)
    res = check_corollary(EnsembleSpec(1, a, a, np.nextafter(1.0, 2.0)), [(1,), (2,), (3,), (4,)])
    assert all(abs(c.estimate - c.target) < 1e-12 for c in res), res


@pytest.mark.parametrize("power", [-1.0, math.nan])
def test_degenerate_rule_raises_instead_of_answering(power):
    # x^-1 is not integrable at 0; there is no rule to return
    with pytest.raises(NumericalFailure):
        _gauss_jacobi_unit(8, power, 1.0)


@pytest.mark.parametrize("a, b, beta", [(1.01, 1.01, 1.0), (3.0, 1.21875, 1.0), (1.3, 2.2, 2.5)])
def test_nested_rule_is_spectral_near_the_regime_edge(a, b, beta):
    # exponents close to -1 are absorbed into the weights, so few nodes suffice
    spec = EnsembleSpec(1, a, b, beta)
    for k in range(1, 5):
        got = lowered_kernel_moment(spec.lowered(), lambda Y, k=k: Y[:, 0] ** k, 24)
        assert got == pytest.approx(beta_moment(k, spec.theta * a, spec.theta * b), abs=1e-10)


def test_corollary_control_and_regime():
    spec = EnsembleSpec(1, 2.0, 2.0, 2.0)
    shifted = check_corollary(spec, [(1,), (2,)], shift={"a": 0.5})
    assert not any(c.passed for c in shifted)
    with pytest.raises(DomainError):
        check_corollary(EnsembleSpec(1, 0.9, 2.0, 2.0), [(1,)])
    with pytest.raises(DomainError):
        check_corollary(EnsembleSpec(2, 2.0, 2.0, 2.0), [(1,)], mode="quadrature")


def test_corollary_mc_small_budget():
    res = check_corollary(EnsembleSpec(2, 2.5, 1.5, 1.0), [(1,), (2,)], mode="mc", samples=20_000, rng=3)
    assert all(c.passed for c in res), res


def test_stationarity_small_budget():
    spec = EnsembleSpec(1, 2.0, 2.0, 2.0)
    res = check_sde_stationarity(spec, [0.1, 0.5], SimConfig(paths=5000, seed=4), rng=4)
    assert len(res) == 4 and all(c.passed for c in res), res


def test_symmetrize_mapping_and_callable_agree():
    q = {(2, 0): 1.0, (1, 1): 3.0}
    exact = symmetrize(q, 2)
    z = np.array([[1.0, 2.0], [0.3, 0.5]])
    # (z1^2 + z2^2) / 2 + 3 z1 z2
    expected = (z ** 2).sum(axis=1) / 2 + 3 * z.prod(axis=1)
    assert np.allclose(exact(z), expected)
    sym = symmetrize(lambda Z: Z[:, 0] ** 2 + 3 * Z[:, 0] * Z[:, 1], 2)
    assert np.allclose(sym(z), expected)
    assert symmetrize_and_moment(z, q) == pytest.approx(expected.mean())
    with pytest.raises(DomainError):
        symmetrize({(1,): 1.0}, 2)
    with pytest.raises(DomainError):
        symmetrize(lambda Z: Z[:, 0], 7)
