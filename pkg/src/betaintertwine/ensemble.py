"""The beta-Jacobi ensemble: density, MCMC sampler and moment checks.

The ensemble on the ordered chamber of ``[0, 1]^n`` has unnormalized density

    prod_i x_i^(beta a / 2 - 1) (1 - x_i)^(beta b / 2 - 1) * prod_{i<j} (x_j - x_i)^beta.

Its normalizing constant is never needed: every check compares normalized
sample means or ratios of quadrature sums.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from itertools import permutations
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln

from ._validation import DomainError, NumericalFailure, SamplerError, check_chamber
from .comparison import Comparison, compare_exact, compare_mc, compare_two_samples
from .diffusion import SimConfig, simulate
from .dixon_anderson import da_dirichlet_sample_rows
from .jack.jack import jack_expand
from .jack.partitions import Partition, as_partition, distinct_permutations_count
from .jack.polynomials import SymmetricPoly
from .operators import ModelParams, perturbed


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters ``(n, a, b, beta)`` of the beta-Jacobi ensemble.

    Only integrability is enforced (``a, b > 0``, ``beta >= 1``);
    :attr:`regime` tells whether the parameters also lie where the
    intertwining and stationarity statements apply.
    """

    n: int
    a: float
    b: float
    beta: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if not self.beta >= 1:
            raise DomainError(f"beta must be >= 1, got {self.beta}")
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"density needs a, b > 0, got a={self.a}, b={self.b}")

    @property
    def theta(self) -> float:
        return self.beta / 2

    @property
    def exponents(self) -> tuple[float, float]:
        """Powers of ``x`` and ``1 - x`` in the one-particle weight."""
        return self.theta * self.a - 1, self.theta * self.b - 1

    @property
    def regime(self) -> str:
        if self.a > 1 and self.b > 1:
            return "corollary"
        if self.a > 1 / self.beta and self.b > 1 / self.beta:
            return "density"
        return "integrable"

    def lowered(self) -> "EnsembleSpec":
        """Ensemble of ``n + 1`` particles with ``(a - 1, b - 1)``."""
        return EnsembleSpec(self.n + 1, self.a - 1, self.b - 1, self.beta)

    def model_params(self) -> ModelParams:
        return ModelParams(n=self.n, theta=self.theta, a=self.a, b=self.b)


def ensemble_log_density_unnormalized(x, spec: EnsembleSpec):
    """Log of the unnormalized density; ``-inf`` off the open ordered chamber.

    ``x`` may be a single point or an array of points of shape ``(..., n)``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != spec.n:
        raise DomainError(f"expected {spec.n} coordinates, got {x.shape[-1]}")
    ea, eb = spec.exponents
    inside = np.all((x > 0) & (x < 1), axis=-1)
    gaps = x[..., :, None] - x[..., None, :]
    iu = np.triu_indices(spec.n, 1)
    upper = -gaps[..., iu[0], iu[1]]
    inside &= np.all(upper > 0, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (ea * np.log(x) + eb * np.log1p(-x)).sum(axis=-1)
        val = val + spec.beta * np.log(np.where(upper > 0, upper, 1.0)).sum(axis=-1)
    out = np.where(inside, val, -np.inf)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MCMCSample:
    """Draws with the chain each came from and the post-adaptation acceptance rate."""

    samples: np.ndarray
    chain_id: np.ndarray
    acceptance: float
    acceptance_ok: bool


def _coordinate_log_density(X, i, xi, spec):
    """Terms of the log-density that involve coordinate ``i`` set to ``xi``."""
    ea, eb = spec.exponents
    others = np.delete(X, i, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = ea * np.log(xi) + eb * np.log1p(-xi)
        if others.shape[1]:
            val = val + spec.beta * np.log(np.abs(np.prod(xi[:, None] - others, axis=1)))
    return val


def ensemble_mcmc(spec: EnsembleSpec, size: int, rng=None, *, chains: int | None = None,
                  burn_in: int = 1000, thin: int = 5, adapt_every: int = 25,
                  target_acceptance: float = 0.3) -> MCMCSample:
    """Metropolis-within-Gibbs draws from the ensemble.

    All ``chains`` run as one array. A sweep moves each coordinate in turn
    by a Gaussian step; moves that leave ``(x_{i-1}, x_{i+1})`` are
    rejected, which keeps the chain in the ordered chamber. Step sizes
    (one per chain and coordinate) adapt toward ``target_acceptance``
    during burn-in and are frozen afterwards. For ``n = 1`` the law is
    Beta(beta a / 2, beta b / 2) and exact draws are returned.
    """
    rng = np.random.default_rng(rng)
    if size < 1:
        raise DomainError("size must be >= 1")
    if spec.n == 1:
        ea, eb = spec.exponents
        draws = rng.beta(ea + 1, eb + 1, size=(size, 1))
        return MCMCSample(draws, np.arange(size), 1.0, True)
    chains = chains or min(size, 1000)
    per_chain = -(-size // chains)
    n = spec.n
    # start from evenly spread points, then jitter within the cells
    X = (np.arange(n) + rng.uniform(0.25, 0.75, size=(chains, n))) / n
    log_scale = np.full((chains, n), math.log(0.5 / n))
    accepted = np.zeros((chains, n))
    lo_edge = np.zeros(chains)
    hi_edge = np.ones(chains)

    def sweep():
        for i in range(n):
            lo = X[:, i - 1] if i > 0 else lo_edge
            hi = X[:, i + 1] if i < n - 1 else hi_edge
            prop = X[:, i] + np.exp(log_scale[:, i]) * rng.standard_normal(chains)
            inside = (prop > lo) & (prop < hi)
            safe = np.where(inside, prop, X[:, i])
            delta = _coordinate_log_density(X, i, safe, spec) - _coordinate_log_density(X, i, X[:, i], spec)
            accept = inside & (np.log(rng.random(chains)) < delta)
            X[:, i] = np.where(accept, prop, X[:, i])
            accepted[:, i] += accept

    for k in range(burn_in):
        sweep()
        if (k + 1) % adapt_every == 0:
            log_scale += 2.0 * (accepted / adapt_every - target_acceptance)
            accepted[:] = 0
    accepted[:] = 0
    out = np.empty((per_chain, chains, n))
    for k in range(per_chain):
        for _ in range(thin):
            sweep()
        out[k] = X
    rate = float(accepted.sum() / (per_chain * thin * chains * n))
    ok = 0.1 <= rate <= 0.6
    if not ok:
        warnings.warn(f"MCMC acceptance rate {rate:.3f} outside [0.1, 0.6]", RuntimeWarning,
                      stacklevel=2)
    draws = out.transpose(1, 0, 2).reshape(-1, n)[:size]
    if not np.all(np.isfinite(ensemble_log_density_unnormalized(draws, spec))):
        raise SamplerError("MCMC produced a point outside the open chamber")
    chain_id = np.repeat(np.arange(chains), per_chain)[:size]
    return MCMCSample(draws, chain_id, rate, ok)


# test polynomials ----------------------------------------------------------

def _as_function(p, n: int, theta) -> tuple[str, Callable]:
    """Resolve a test polynomial: a partition (Jack polynomial), a
    :class:`SymmetricPoly`, or a callable on arrays of shape ``(N, n)``."""
    if isinstance(p, SymmetricPoly):
        if p.nvars != n:
            raise DomainError(f"polynomial in {p.nvars} variables, expected {n}")
        return repr(p), p
    if callable(p):
        return getattr(p, "__name__", "callable"), p
    lam = as_partition(p)
    return f"J{tuple(lam)}", jack_expand(lam, n, theta)


def beta_moment(k: int, alpha: float, beta_: float) -> float:
    """``E[Y^k]`` for ``Y ~ Beta(alpha, beta_)``."""
    out = 1.0
    for j in range(k):
        out *= (alpha + j) / (alpha + beta_ + j)
    return out


def _gauss_jacobi_unit(m, x_power, one_minus_power):
    """Nodes/weights on ``[0, 1]`` for weight ``x^p (1 - x)^q`` (unnormalized).

    Golub-Welsch on the Jacobi recurrence. scipy's ``roots_jacobi`` loses
    accuracy for exponents near -1 and fails outright for equal exponents
    near -1/2; the tridiagonal eigenproblem stays at rounding level there.
    A rule with non-finite or negative weights raises
    :class:`NumericalFailure`.
    """
    p, q = float(x_power), float(one_minus_power)
    k = np.arange(m, dtype=float)
    s = 2 * k + p + q
    with np.errstate(all="ignore"):
        diag = (p * p - q * q) / (s * (s + 2))
        k1, s1 = k[1:], s[1:]
        off2 = 4 * k1 * (k1 + p) * (k1 + q) * (k1 + p + q) / (s1 ** 2 * (s1 + 1) * (s1 - 1))
    # first entries written out to avoid 0/0 when p + q is near 0 or -1
    diag[0] = (p - q) / (p + q + 2)
    if m > 1:
        off2[0] = 4 * (1 + p) * (1 + q) / ((2 + p + q) ** 2 * (3 + p + q))
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off2)) and np.all(off2 > 0)):
        raise NumericalFailure(f"Gauss-Jacobi rule collapsed for exponents ({p}, {q})")
    t, V = eigh_tridiagonal(diag, np.sqrt(off2))
    w = np.exp(betaln(p + 1, q + 1)) * V[0] ** 2
    if not (np.all(np.isfinite(w)) and np.all(w > 0)):
        raise NumericalFailure(f"Gauss-Jacobi rule collapsed for exponents ({p}, {q})")
    return np.clip(0.5 * (1 + t), 0.0, 1.0), w


def lowered_kernel_moment(upper: EnsembleSpec, fn, m: int):
    """``E[p(y)]`` for ``x`` from the two-particle ensemble ``upper``, then ``y ~ lam(x, .)``.

    For one particle the kernel draw is ``y = x_1 + (x_2 - x_1) s`` with
    ``s ~ Beta(theta, theta)``, integrated by a Gauss-Jacobi rule in ``s``.
    The ordered triangle of ``x`` is split so that every singular factor of
    ``x_1^p x_2^p (1 - x_1)^q (1 - x_2)^q (x_2 - x_1)^beta`` becomes a
    Jacobi weight in a single variable:

    * ``x_2 < 1/2``: ``x_2 = r / 2``, ``x_1 = x_2 u``;
    * ``x_1 > 1/2``: the mirror image at ``(1, 1)``;
    * ``x_1 < 1/2 < x_2``: a product rule.

    The leftover factors are smooth (polynomial for integer ``beta``), so
    the rule converges spectrally even when ``p`` or ``q`` is close to -1.
    """
    if upper.n != 2:
        raise DomainError("the nested rule integrates a two-particle ensemble")
    th, beta = upper.theta, upper.beta
    p, q = upper.exponents
    s, ws = _gauss_jacobi_unit(m, th - 1, th - 1)
    pieces = []

    # corner (0, 0)
    r, wr = _gauss_jacobi_unit(m, 2 * p + beta + 1, 0)
    u, wu = _gauss_jacobi_unit(m, p, beta)
    X2 = np.broadcast_to((r / 2)[:, None], (m, m))
    X1 = X2 * u[None, :]
    W = 0.5 ** (2 * p + beta + 2) * wr[:, None] * wu[None, :] * ((1 - X1) * (1 - X2)) ** q
    pieces.append((X1, X2, W))

    # corner (1, 1): 1 - x_1 = r / 2, 1 - x_2 = (1 - x_1) v
    r, wr = _gauss_jacobi_unit(m, 2 * q + beta + 1, 0)
    v, wv = _gauss_jacobi_unit(m, q, beta)
    far = np.broadcast_to((r / 2)[:, None], (m, m))
    X1, X2 = 1 - far, 1 - far * v[None, :]
    W = 0.5 ** (2 * q + beta + 2) * wr[:, None] * wv[None, :] * (X1 * X2) ** p
    pieces.append((X1, X2, W))

    # x_1 < 1/2 < x_2
    g, wg = _gauss_jacobi_unit(m, p, 0)
    h, wh = _gauss_jacobi_unit(m, q, 0)
    X1 = np.broadcast_to((g / 2)[:, None], (m, m))
    X2 = np.broadcast_to((1 - h / 2)[None, :], (m, m))
    W = 0.5 ** (p + q + 2) * wg[:, None] * wh[None, :] * (1 - X1) ** q * X2 ** p * (X2 - X1) ** beta
    pieces.append((X1, X2, W))

    num = den = 0.0
    for X1, X2, W in pieces:
        Y = X1[..., None] + (X2 - X1)[..., None] * s
        vals = np.asarray(fn(Y.reshape(-1, 1)), dtype=float).reshape(Y.shape)
        num += float(np.einsum("ij,k,ijk->", W, ws, vals))
        den += float(W.sum() * ws.sum())
    return num / den


def ensemble_moment_1d(spec: EnsembleSpec, fn, m: int):
    y, w = _gauss_jacobi_unit(m, *spec.exponents)
    return float(w @ np.asarray(fn(y[:, None]), dtype=float)) / float(w.sum())


def check_corollary(spec_n: EnsembleSpec, test_polys: Sequence, mode: str = "quadrature", *,
                    samples: int = 100_000, tol: float = 1e-6, nodes: int = 48,
                    nse: float = 3.0, shift: dict | None = None, rng=None) -> list[Comparison]:
    """Compare the lowered ensemble pushed through the kernel with ``spec_n``.

    Left side: ``x`` from the ``(n + 1)``-particle ensemble with parameters
    ``(a - 1, b - 1)``, then ``y`` from the Dixon-Anderson kernel at ``x``.
    Right side: the ``n``-particle ensemble with ``(a, b)``. For each test
    polynomial ``p`` the two values of ``E[p(y)]`` are compared.

    ``mode="quadrature"`` (``n = 1`` only) uses nested Gauss-Jacobi rules at
    ``nodes`` points per axis and absolute tolerance ``tol``.
    ``mode="mc"`` uses independent MCMC runs for both sides and exact kernel
    draws, comparing within ``nse`` combined standard errors.

    ``shift`` adds offsets to ``a``/``b`` of the ``(n + 1)``-particle side
    only; the identity then fails (falsification control).
    """
    if spec_n.regime != "corollary":
        raise DomainError(f"the identity is checked for a, b > 1; got a={spec_n.a}, b={spec_n.b}")
    n = spec_n.n
    fns = [_as_function(p, n, spec_n.theta) for p in test_polys]
    upper = spec_n.lowered()
    if shift:
        upper = replace(upper, **{k: getattr(upper, k) + v for k, v in shift.items()})
    out = []
    if mode == "quadrature":
        if n != 1:
            raise DomainError("quadrature mode needs n = 1")
        for name, fn in fns:
            left = lowered_kernel_moment(upper, fn, nodes)
            right = ensemble_moment_1d(spec_n, fn, nodes)
            out.append(compare_exact(f"corollary[{name}]", left, right, tol, mode=mode,
                                     nodes=nodes))
        return out
    if mode != "mc":
        raise DomainError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(rng)
    left = ensemble_mcmc(upper, samples, rng)
    Y = da_dirichlet_sample_rows(left.samples, spec_n.theta, rng)
    right = ensemble_mcmc(spec_n, samples, rng)
    for name, fn in fns:
        out.append(compare_two_samples(
            f"corollary[{name}]", fn(Y), fn(right.samples), nse,
            cluster_a=left.chain_id, cluster_b=right.chain_id, mode=mode, samples=samples,
            acceptance=[left.acceptance, right.acceptance]))
    return out


def check_sde_stationarity(spec: EnsembleSpec, times, config: SimConfig | None = None,
                           test_polys: Sequence = ((1,), (2,)), nse: float = 3.0,
                           shift: dict | None = None, rng=None) -> list[Comparison]:
    """Start the Jacobi diffusion from ensemble draws and test that moments stay put.

    For each time ``t`` the mean of ``p(X(t))`` is compared with the mean of
    ``p(X(0))`` over the same paths; the standard error is that of the
    paired differences, clustered by MCMC chain. ``shift`` perturbs the
    diffusion's ``a``/``b`` only (falsification control).
    """
    config = config or SimConfig()
    times = np.atleast_1d(np.asarray(times, dtype=float))
    rng = np.random.default_rng(rng)
    start = ensemble_mcmc(spec, config.paths, rng)
    params = perturbed(spec.model_params(), shift)
    fns = [_as_function(p, spec.n, spec.theta) for p in test_polys]
    out = []
    for k, t in enumerate(times):
        X = simulate("jacobi", start.samples, params, float(t), replace(config, seed=config.seed + k))
        for name, fn in fns:
            v0 = np.asarray(fn(start.samples), dtype=float)
            vt = np.asarray(fn(X), dtype=float)
            c = compare_mc(f"stationarity[{name}, t={t:g}]", vt - v0, 0.0, nse, start.chain_id,
                           t=float(t), start_mean=float(v0.mean()))
            out.append(replace(c, estimate=float(vt.mean()), target=float(v0.mean())))
    return out


def symmetrize(q, n: int):
    """Symmetrization ``(1/n!) sum_sigma q(z_sigma)`` of ``q``.

    ``q`` is either a mapping ``{exponent tuple: coefficient}``, which is
    turned into monomial symmetric functions exactly, or a callable on
    arrays of shape ``(N, n)``, which is averaged over all ``n!``
    coordinate permutations (allowed for ``n <= 6``).
    """
    if isinstance(q, SymmetricPoly):
        return q
    if isinstance(q, Mapping):
        terms: dict[Partition, float] = {}
        for e, c in q.items():
            e = tuple(int(v) for v in e)
            if len(e) != n or min(e, default=0) < 0:
                raise DomainError(f"exponent {e} does not fit {n} variables")
            mu = Partition(sorted(e, reverse=True))
            terms[mu] = terms.get(mu, 0) + c / distinct_permutations_count(mu, n)
        return SymmetricPoly(n, terms)
    if not callable(q):
        raise DomainError("q must be a mapping of exponents or a callable")
    if n > 6:
        raise DomainError("callable q needs n <= 6; pass an exponent mapping instead")
    perms = list(permutations(range(n)))

    def sym(Z):
        Z = np.asarray(Z, dtype=float)
        return sum(np.asarray(q(Z[..., list(s)]), dtype=float) for s in perms) / len(perms)

    return sym


def symmetrize_and_moment(samples, q) -> float:
    """Sample mean of the symmetrization of ``q`` over rows of ``samples``."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    p = symmetrize(q, samples.shape[1])
    return float(np.mean(p(samples)))
