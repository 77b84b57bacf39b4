"""Dixon-Anderson kernel: density, quadrature, samplers, eigenrelation check.

For ``x`` in ``W^{n+1}`` the kernel is a probability density on the
interlacing set ``x_1 <= y_1 <= x_2 <= ... <= y_n <= x_{n+1}``:

    lam(x, y) = Gamma((n+1) theta) / Gamma(theta)^(n+1)
                * prod_{i<j} (x_j - x_i)^(1 - 2 theta)
                * prod_{i<j} (y_j - y_i)
                * prod_{i,j} |y_i - x_j|^(theta - 1)

The interlacing set is the box ``prod_i [x_i, x_{i+1}]``, so every
coordinate carries two edge singularities ``|y_i - x_i|^(theta-1)`` and
``|y_i - x_{i+1}|^(theta-1)``, which Gauss-Jacobi rules absorb exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from ._validation import DomainError, SamplerError, check_chamber, check_interlacing
from .comparison import clustered_mean_se
from .jack.jack import jack_expand, kernel_eigenvalue


@dataclass(frozen=True)
class InterlacingPair:
    """A point ``x`` of ``W^{n+1}`` with ``y`` interlacing it."""

    x: np.ndarray
    y: np.ndarray
    domain: Literal["laguerre", "jacobi"] = "laguerre"

    def __post_init__(self):
        interval = (0.0, math.inf) if self.domain == "laguerre" else (0.0, 1.0)
        if self.domain not in ("laguerre", "jacobi"):
            raise DomainError(f"unknown domain {self.domain!r}")
        x = check_chamber(self.x, interval=interval, name="x")
        y = check_chamber(self.y, interval=interval, name="y")
        check_interlacing(x, y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.size


def _log_prefactor(x, theta):
    n1 = x.size
    s = math.lgamma(theta * n1) - n1 * math.lgamma(theta)
    dx = x[None, :] - x[:, None]
    iu = np.triu_indices(n1, 1)
    return s + (1 - 2 * theta) * float(np.sum(np.log(dx[iu])))


def da_log_density(pair: InterlacingPair, theta: float) -> float:
    """Log of the kernel density at ``pair``.

    Returns ``+inf`` when ``y`` touches ``x`` and ``theta < 1`` (integrable
    blow-up), ``-inf`` where the density vanishes.
    """
    if not theta > 0:
        raise DomainError("theta must be positive")
    x, y = pair.x, pair.y
    if np.any(np.diff(x) <= 0):
        raise DomainError("x must be strictly ordered")
    gaps = np.abs(y[:, None] - x[None, :])
    if np.any(gaps == 0):
        if theta < 1:
            return math.inf
        if theta > 1:
            return -math.inf
    dy = y[None, :] - y[:, None]
    iu = np.triu_indices(y.size, 1)
    vdm = dy[iu]
    if np.any(vdm == 0):
        return -math.inf
    out = _log_prefactor(x, theta) + float(np.sum(np.log(vdm)))
    if theta != 1:
        out += (theta - 1) * float(np.sum(np.log(gaps)))
    return out


def _tensor_rule(x, theta, m):
    """Nodes ``(N, n)`` and weights ``(N,)`` integrating ``lam(x, .) f`` over the box."""
    n = x.size - 1
    u, w = roots_jacobi(m, theta - 1, theta - 1)
    axes, wts = [], []
    for i in range(n):
        lo, hi = x[i], x[i + 1]
        h = hi - lo
        axes.append(lo + 0.5 * h * (1 + u))
        wts.append(w * (0.5 * h) ** (2 * theta - 1))
    grids = np.meshgrid(*axes, indexing="ij")
    Y = np.stack([g.ravel() for g in grids], axis=-1)
    W = np.ones(Y.shape[0])
    wgrids = np.meshgrid(*wts, indexing="ij")
    for g in wgrids:
        W = W * g.ravel()
    # smooth remainder: Vandermonde(y) and non-adjacent |y_i - x_j|^(theta-1)
    for i in range(n):
        for k in range(i + 1, n):
            W = W * (Y[:, k] - Y[:, i])
        if theta != 1:
            for j in range(n + 1):
                if j not in (i, i + 1):
                    W = W * np.abs(Y[:, i] - x[j]) ** (theta - 1)
    W = W * math.exp(_log_prefactor(x, theta))
    return Y, W


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    nodes_per_axis: int
    converged: bool

    def __float__(self):
        return self.value


def da_integrate(x, f: Callable, theta: float, tol: float = 1e-10, *,
                 max_nodes: int = 96, full_output: bool = False):
    """``(Lambda f)(x)``: integrate ``f`` against the kernel at ``x``.

    ``f`` maps an array of shape ``(N, n)`` to ``N`` values. Tensor
    Gauss-Jacobi rules are refined (16, 24, 32, ... nodes per axis) until two
    successive estimates agree within ``tol``; the error estimate is that
    difference. If ``tol`` is not reached a warning reports the achieved
    error (``full_output=True`` returns a :class:`QuadratureResult`).
    """
    x = check_chamber(x, strict=True)
    n = x.size - 1
    if n < 1:
        raise DomainError("x needs at least two coordinates")
    if n > 3:
        raise DomainError("tensor quadrature is limited to n <= 3")
    if not theta > 0:
        raise DomainError("theta must be positive")
    prev = None
    m = 16
    err = math.inf
    while m <= max_nodes:
        Y, W = _tensor_rule(x, theta, m)
        val = float(np.dot(W, np.asarray(f(Y), dtype=float)))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol * max(1.0, abs(val)):
                res = QuadratureResult(val, err, m, True)
                return res if full_output else val
        prev = val
        m += 8
    res = QuadratureResult(prev, err, m - 8, False)
    if not full_output:
        warnings.warn(f"kernel quadrature reached error {err:.2e} > tol {tol:.1e}",
                      RuntimeWarning, stacklevel=2)
        return prev
    return res


# samplers ------------------------------------------------------------------

def _panel_rule(panels, q):
    u, w = roots_legendre(q)
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = 1.0 / panels
    nodes = (edges[:-1, None] + 0.5 * h * (1 + u[None, :]))
    return edges, nodes, 0.5 * h * w


class DixonAndersonGibbs:
    """Vectorized Gibbs sampler for ``lam(x, .)``.

    Each coordinate ``y_i`` is redrawn from its exact conditional on
    ``[x_i, x_{i+1}]`` by inverting the conditional CDF. The CDF is built
    with composite Gauss-Legendre quadrature in the variable ``v`` where
    ``y = x_i + (x_{i+1} - x_i) sin^2(pi v / 2)``; this removes the edge
    singularities (the transformed density is bounded for ``theta >= 1/2``).
    The root of ``CDF(v) = U`` is found by safeguarded Newton iterations.

    Independent chains are advanced together; ``sample`` returns draws from
    ``chains`` chains after ``burn_in`` sweeps, taking every ``thin``-th sweep.
    """

    def __init__(self, x, theta, *, burn_in=50, thin=5, panels=64, panel_order=3,
                 xtol=1e-10, rng=None):
        self.x = check_chamber(x, strict=True)
        if self.x.size < 2:
            raise DomainError("x needs at least two coordinates")
        if not theta >= 0.5:
            raise DomainError("the sampler needs theta >= 1/2")
        self.theta = float(theta)
        self.n = self.x.size - 1
        self.burn_in = int(burn_in)
        self.thin = max(1, int(thin))
        self.xtol = xtol
        self.rng = np.random.default_rng(rng)
        self._edges, self._nodes, self._w = _panel_rule(panels, panel_order)
        self._gl_u, self._gl_w = roots_legendre(panel_order)
        nodes = self._nodes.ravel()
        self._static = [tuple(a[None, :] for a in self._static_log_density(i, nodes))
                        for i in range(self.n)]

    def _static_log_density(self, i, v):
        """Part of the transformed conditional that depends on ``x`` only."""
        x, th = self.x, self.theta
        y = x[i] + (x[i + 1] - x[i]) * np.sin(0.5 * np.pi * v) ** 2
        if th == 0.5:
            out = np.zeros(np.shape(v))
        else:
            with np.errstate(divide="ignore"):
                out = (2 * th - 1) * np.log(np.abs(np.sin(np.pi * v)))
        if th != 1:
            others = [j for j in range(self.n + 1) if j not in (i, i + 1)]
            if others:
                with np.errstate(divide="ignore"):
                    out = out + (th - 1) * np.log(np.abs(np.prod(y[..., None] - x[others], axis=-1)))
        return y, out

    def _log_density_v(self, i, v, Y, static=None):
        """Log of the transformed conditional of ``y_i`` at ``v`` (up to a constant).

        ``v`` has shape ``(chains, k)``; ``Y`` is the current state ``(chains, n)``.
        """
        y, out = static if static is not None else self._static_log_density(i, v)
        if self.n > 1:
            others = np.delete(Y, i, axis=1)
            with np.errstate(divide="ignore"):
                out = out + np.log(np.abs(np.prod(y[..., None] - others[:, None, :], axis=-1)))
        # one particle: nothing depends on Y, spread the cached row over the chains
        return np.broadcast_to(out, (Y.shape[0], out.shape[-1]))

    def _update(self, i, Y):
        chains = Y.shape[0]
        logg = self._log_density_v(i, None, Y, static=self._static[i])
        shift = logg.max(axis=1, keepdims=True)
        g = np.exp(logg - shift).reshape(chains, *self._nodes.shape)
        panel_int = (g * self._w[None, None, :]).sum(axis=2)
        cum = np.concatenate([np.zeros((chains, 1)), np.cumsum(panel_int, axis=1)], axis=1)
        total = cum[:, -1]
        if not np.all(np.isfinite(total)) or np.any(total <= 0):
            raise SamplerError("conditional density could not be integrated")
        target = self.rng.random(chains) * total
        p = np.clip((cum[:, 1:-1] <= target[:, None]).sum(axis=1), 0, len(self._edges) - 2)
        rows = np.arange(chains)
        a = self._edges[p]
        bnd = self._edges[p + 1]
        resid = target - cum[rows, p]
        lo, hi = a.copy(), bnd.copy()
        frac = np.clip(resid / np.maximum(panel_int[rows, p], 1e-300), 0.0, 1.0)
        v = a + frac * (bnd - a)
        scale = total
        for _ in range(60):
            half = 0.5 * (v - a)
            pts = a[:, None] + half[:, None] * (1 + self._gl_u[None, :])
            gv = np.exp(self._log_density_v(i, pts, Y) - shift)
            F = (gv * self._gl_w[None, :]).sum(axis=1) * half - resid
            dens = np.exp(self._log_density_v(i, v[:, None], Y)[:, 0] - shift[:, 0])
            lo = np.where(F < 0, v, lo)
            hi = np.where(F >= 0, v, hi)
            done = (np.abs(F) <= self.xtol * scale) | (hi - lo <= self.xtol)
            if np.all(done):
                break
            with np.errstate(divide="ignore", invalid="ignore"):
                step = v - F / dens
            bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
            v = np.where(done, v, np.where(bad, 0.5 * (lo + hi), step))
        y = self.x[i] + (self.x[i + 1] - self.x[i]) * np.sin(0.5 * np.pi * v) ** 2
        Y[:, i] = np.clip(y, self.x[i], self.x[i + 1])

    def initial_state(self, chains):
        u = self.rng.beta(self.theta, self.theta, size=(chains, self.n))
        return self.x[:-1] + (self.x[1:] - self.x[:-1]) * u

    def sweep(self, Y):
        for i in range(self.n):
            self._update(i, Y)
        return Y

    def sample(self, size, chains=None):
        """Return ``(size, n)`` draws and the chain id of each draw."""
        if chains is None:
            chains = min(size, 2000)
        per_chain = -(-size // chains)
        Y = self.initial_state(chains)
        for _ in range(self.burn_in):
            self.sweep(Y)
        out = np.empty((per_chain, chains, self.n))
        for k in range(per_chain):
            for _ in range(self.thin):
                self.sweep(Y)
            out[k] = Y
        draws = out.transpose(1, 0, 2).reshape(-1, self.n)[:size]
        chain_id = np.repeat(np.arange(chains), per_chain)[:size]
        check_interlacing_rows(self.x, draws)
        return draws, chain_id


def check_interlacing_rows(x, Y):
    if np.any(Y < x[:-1]) or np.any(Y > x[1:]):
        raise SamplerError("sample violates interlacing")


def da_gibbs_sample(x, theta, sweeps=50, rng=None):
    """One approximate draw from ``lam(x, .)`` after ``sweeps`` Gibbs sweeps."""
    s = DixonAndersonGibbs(x, theta, burn_in=sweeps, thin=1, rng=rng)
    Y = s.initial_state(1)
    for _ in range(sweeps):
        s.sweep(Y)
    check_interlacing_rows(s.x, Y)
    return Y[0]


def _dirichlet_roots(X, w):
    """Root of ``sum_j w_j / (t - x_j)`` in every gap, by bisection."""
    lo = X[:, :-1].copy()
    hi = X[:, 1:].copy()
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        val = (w[:, None, :] / (mid[:, :, None] - X[:, None, :])).sum(axis=2)
        pos = val > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return 0.5 * (lo + hi)


def da_dirichlet_sample(x, theta, size, rng=None):
    """Exact draws via Dirichlet weights.

    With ``w ~ Dirichlet(theta, ..., theta)`` the zeros of
    ``sum_j w_j / (t - x_j)`` (one in each gap of ``x``) have law ``lam(x, .)``.
    """
    x = check_chamber(x, strict=True)
    rng = np.random.default_rng(rng)
    w = rng.dirichlet(np.full(x.size, float(theta)), size=size)
    return _dirichlet_roots(np.broadcast_to(x, (size, x.size)), w)


def da_dirichlet_sample_rows(X, theta, rng=None):
    """One exact draw from ``lam(x, .)`` for every row ``x`` of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] < 2:
        raise DomainError("X must have shape (rows, n + 1) with n >= 1")
    if np.any(np.diff(X, axis=1) <= 0):
        raise DomainError("every row of X must be strictly increasing")
    rng = np.random.default_rng(rng)
    w = rng.dirichlet(np.full(X.shape[1], float(theta)), size=X.shape[0])
    return _dirichlet_roots(X, w)


# eigenrelation --------------------------------------------------------------

@dataclass(frozen=True)
class EigenrelationResult:
    error: float
    stderr: float | None
    relative: bool
    estimate: float
    target: float


def check_kernel_eigenrelation(lam, x, theta, mode: str = "quadrature", *, tol=1e-10,
                               samples=100_000, sampler="gibbs", shift: float = 0.0,
                               rng=None) -> EigenrelationResult:
    """Compare ``(Lambda J_lam)(x)`` with ``c(lam, n, theta) J_lam(x)``.

    The error is relative to ``|c J_lam(x)|`` unless that vanishes. In ``mc``
    mode the standard error (same scaling) is attached. ``shift`` is added
    to the kernel's ``theta`` only (falsification control).
    """
    x = check_chamber(x, strict=True)
    n = x.size - 1
    poly = jack_expand(lam, n, theta)
    target = kernel_eigenvalue(lam, n, theta) * float(jack_expand(lam, n + 1, theta)(x))
    relative = abs(target) > 1e-300
    scale = abs(target) if relative else 1.0
    kernel_theta = theta + shift
    if mode == "quadrature":
        est = da_integrate(x, poly, kernel_theta, tol=tol)
        return EigenrelationResult(abs(est - target) / scale, None, relative, est, target)
    if mode != "mc":
        raise DomainError(f"unknown mode {mode!r}")
    if sampler == "gibbs":
        Y, cid = DixonAndersonGibbs(x, kernel_theta, rng=rng).sample(samples)
    elif sampler == "dirichlet":
        Y, cid = da_dirichlet_sample(x, kernel_theta, samples, rng=rng), None
    else:
        raise DomainError(f"unknown sampler {sampler!r}")
    est, se = clustered_mean_se(poly(Y), cid)
    return EigenrelationResult(abs(est - target) / scale, se / scale, relative, est, target)


def write_sample_dump(path, x, Y, theta, seed):
    """CSV dump: a ``#`` header naming ``n``, ``theta`` and the seed, then rows ``x..., y...``."""
    x = np.asarray(x, dtype=float)
    n = Y.shape[1]
    cols = [f"x{j + 1}" for j in range(n + 1)] + [f"y{i + 1}" for i in range(n)]
    with open(path, "w") as fh:
        fh.write(f"# n={n} theta={theta!r} seed={seed}\n")
        fh.write(",".join(cols) + "\n")
        xs = ",".join(repr(float(v)) for v in x)
        for row in Y:
            fh.write(xs + "," + ",".join(repr(float(v)) for v in row) + "\n")
