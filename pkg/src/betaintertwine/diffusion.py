"""Euler-Maruyama simulation of beta-Laguerre and beta-Jacobi particle systems.

Laguerre::

    dX_i = 2 sqrt(X_i) dB_i + beta (d/2 + sum_{j!=i} 2 X_i / (X_i - X_j)) dt

Jacobi::

    dX_i = 2 sqrt(X_i (1 - X_i)) dB_i
           + beta (a - (a + b) X_i + sum_{j!=i} 2 X_i (1 - X_i) / (X_i - X_j)) dt

The scheme is full-truncation Euler (square roots of the positive part)
with per-path adaptive substeps when particles come close to each other
and a sort after every step. Endpoints are clamped to the state space
when they are returned.
All paths are advanced together as one array.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import DomainError, IntegrationFailure, check_chamber
from .comparison import Comparison, compare_mc
from .jack.jack import jack_expand
from .jack.partitions import as_partition
from .operators import ModelParams, exact_moment, perturbed

WORKERS_ENV = "BETAINTERTWINE_WORKERS"
CHUNK = 2048
UNDERRESOLVED = 1.0


@dataclass(frozen=True)
class SimConfig:
    """Integrator settings.

    Parameters
    ----------
    dt : float
        Base step.
    gap_safety : float or None
        Substeps are shortened to ``(g / gap_safety)**2`` where ``g`` is the
        smallest gap between neighbouring particles. ``None`` gives fixed
        steps.
    paths : int
        Number of Monte Carlo paths.
    seed : int
        Root seed; path chunks get independent spawned streams.
    scheme : str
        Tag recorded in reports.
    max_refine : int
        Substeps are never shorter than ``dt / max_refine``.
    """

    dt: float = 1e-2
    gap_safety: float | None = 4.0
    paths: int = 10_000
    seed: int = 0
    scheme: str = "euler-full-truncation"
    max_refine: int = 1024

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if self.paths < 1:
            raise DomainError("paths must be >= 1")
        if self.gap_safety is not None and not self.gap_safety > 0:
            raise DomainError("gap_safety must be positive or None")
        if self.max_refine < 1:
            raise DomainError("max_refine must be >= 1")


@dataclass
class DiffusionState:
    """Particle positions of one or many paths.

    ``coords`` has shape ``(n,)`` or ``(paths, n)``.
    """

    coords: np.ndarray
    time: float
    family: str
    params: ModelParams
    substeps: int = field(default=0, compare=False)

    def __post_init__(self):
        self.coords = np.array(self.coords, dtype=float)
        if self.coords.shape[-1] != self.params.n:
            raise DomainError(f"state has {self.coords.shape[-1]} coordinates, expected {self.params.n}")
        if self.family not in ("laguerre", "jacobi"):
            raise DomainError(f"unknown family {self.family!r}")
        if self.family != self.params.family():
            raise DomainError(f"params describe {self.params.family()}, not {self.family}")
        if not self.time >= 0:
            raise DomainError(f"time must be >= 0, got {self.time}")
        X = self.coords
        lo, hi = _family_interval(self.family)
        if np.any(np.diff(X, axis=-1) < 0) or np.any(X < lo) or np.any(X > hi):
            raise DomainError(f"{self.family} state must be ordered and lie in [{lo}, {hi}]")


def _family_interval(family):
    return (0.0, np.inf) if family == "laguerre" else (0.0, 1.0)


def interaction_sums(X, family="laguerre"):
    """``sum_{j != i} 2 w(X_i) / (X_i - X_j)`` for every ``i``.

    ``w(x) = x`` (Laguerre) or ``x (1 - x)`` (Jacobi). Coincident pairs
    contribute nothing; their sum over ``i`` is then still the constant
    ``n (n - 1)`` minus the missing pairs.
    """
    X = np.asarray(X, dtype=float)
    w = X if family == "laguerre" else X * (1.0 - X)
    diff = X[..., :, None] - X[..., None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = 2.0 * w[..., :, None] / diff
    terms = np.where(diff != 0, terms, 0.0)
    return terms.sum(axis=-1)


def _interaction_increment(X, h, family, beta):
    """Repulsion displacement over a step ``h``, damped pair by pair.

    Each pair term ``2 beta w_i h / (X_i - X_j)`` splits into a common part
    ``beta h (w_i - w_j) / (X_i - X_j)``, which moves both particles alike
    and carries the drift of the norm, and a separating part
    ``beta h (w_i + w_j) / (X_i - X_j)``. The gap then obeys ``D' = c / D``
    with ``c = 2 beta (w_i + w_j)``, solved by ``sqrt(D**2 + 2 c h)``. When a
    pair is under-resolved (``2 c h / D**2 > UNDERRESOLVED``) the separating
    part is scaled by the ratio of this exact gap increment to the Euler
    one, ``2 / (1 + sqrt(1 + 2 c h / D**2))``. This bounds the jump of a
    near-colliding pair by ``O(sqrt(c h))`` instead of ``O(h / D)`` and
    leaves resolved pairs as plain Euler.
    """
    w = np.maximum(X if family == "laguerre" else X * (1.0 - X), 0.0)
    diff = X[..., :, None] - X[..., None, :]
    wsum = w[..., :, None] + w[..., None, :]
    wdiff = w[..., :, None] - w[..., None, :]
    hh = h[:, None, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = 4.0 * beta * wsum * hh / diff ** 2
        damp = np.where(ratio > UNDERRESOLVED, 2.0 / (1.0 + np.sqrt(1.0 + ratio)), 1.0)
        terms = beta * hh * (wdiff + wsum * damp) / diff
    terms = np.where(diff != 0, terms, 0.0)
    return terms.sum(axis=-1)


def _smooth_drift(X, family, params):
    if family == "laguerre":
        return np.full_like(X, 0.5 * params.beta * params.d)
    return params.beta * (params.a - (params.a + params.b) * X)


def _diffusion(X, family):
    if family == "laguerre":
        return 2.0 * np.sqrt(np.maximum(X, 0.0))
    return 2.0 * np.sqrt(np.maximum(X * (1.0 - X), 0.0))


def _min_gap(X):
    # boundaries are left to full truncation: refining near
    # them costs far more than the bias it removes
    return np.diff(X, axis=-1).min(axis=-1, initial=np.inf)


def _project(X):
    # sort only: coordinates may leave the state space by O(sqrt(h)) inside
    # the integrator (full truncation keeps their coefficients valid); clamping
    # every step would bias means upwards near a boundary
    return np.sort(X, axis=-1)


def _clamp(X, family):
    lo, hi = _family_interval(family)
    return np.clip(X, lo, hi)


def _euler(X, h, dW, family, params):
    step = (_smooth_drift(X, family, params) * h[:, None]
            + _interaction_increment(X, h, family, params.beta)
            + _diffusion(X, family) * dW)
    return _project(X + step)


def _substep_size(X, remaining, family, config):
    h = np.full(X.shape[0], config.dt)
    if config.gap_safety is not None:
        g = _min_gap(X)
        h = np.clip((g / config.gap_safety) ** 2, config.dt / config.max_refine, config.dt)
    return np.minimum(h, remaining)


def _check_finite(X, offset=0, time=None, rows=None):
    bad = ~np.all(np.isfinite(X), axis=-1)
    if np.any(bad):
        idx = int(np.flatnonzero(bad)[0])
        where = idx if rows is None else int(rows[idx])
        raise IntegrationFailure(
            "non-finite coordinates during integration", path_index=offset + where,
            diagnostics={"time": time, "state": X[idx].tolist()})


def _advance(X, family, params, horizon, config, rng, offset=0, increment=None):
    """Integrate every row of ``X`` over ``horizon``; returns ``(X, substeps)``.

    If ``increment`` (the Brownian increment over the whole horizon) is
    given, substep increments are drawn from the Brownian bridge that ends
    there, so several integrators can share one driving path.
    """
    X = np.array(X, dtype=float)
    remaining = np.full(X.shape[0], float(horizon))
    left = None if increment is None else np.array(increment, dtype=float)
    count = 0
    eps = 1e-12 * max(1.0, horizon)
    while True:
        active = np.flatnonzero(remaining > eps)
        if active.size == 0:
            break
        Xa = X[active]
        r = remaining[active]
        h = _substep_size(Xa, r, family, config)
        Z = rng.standard_normal(Xa.shape)
        if left is None:
            dW = Z * np.sqrt(h)[:, None]
        else:
            frac = (h / r)[:, None]
            dW = frac * left[active] + Z * np.sqrt(np.maximum(h * (r - h) / r, 0.0))[:, None]
            left[active] -= dW
        Xa = _euler(Xa, h, dW, family, params)
        _check_finite(Xa, offset, horizon - float(r.max()), rows=active)
        X[active] = Xa
        remaining[active] -= h
        count += 1
    return X, count


def _step(state, dt, rng, config):
    X = np.atleast_2d(state.coords)
    cfg = config or SimConfig(dt=dt)
    cfg = replace(cfg, dt=dt)
    X, k = _advance(X, state.family, state.params, dt, cfg, np.random.default_rng(rng))
    X = _clamp(X, state.family)
    coords = X if state.coords.ndim == 2 else X[0]
    return DiffusionState(coords, state.time + dt, state.family, state.params, state.substeps + k)


def step_laguerre(state: DiffusionState, dt: float, rng=None, config: SimConfig | None = None) -> DiffusionState:
    """Advance a Laguerre state by ``dt`` (possibly in several substeps)."""
    if state.family != "laguerre":
        raise DomainError("step_laguerre needs a Laguerre state")
    return _step(state, dt, rng, config)


def step_jacobi(state: DiffusionState, dt: float, rng=None, config: SimConfig | None = None) -> DiffusionState:
    """Advance a Jacobi state by ``dt`` (possibly in several substeps)."""
    if state.family != "jacobi":
        raise DomainError("step_jacobi needs a Jacobi state")
    return _step(state, dt, rng, config)


def _chunk_seeds(seed, paths):
    root = np.random.SeedSequence(seed)
    nchunks = -(-paths // CHUNK)
    return root.spawn(nchunks)


def _run_chunk(args):
    family, x0, params, t, config, seq, start, size = args
    rng = np.random.default_rng(seq)
    if x0.ndim == 2:
        X = x0[start:start + size].copy()
    else:
        X = np.broadcast_to(x0, (size, x0.size)).copy()
    steps = int(np.ceil(t / config.dt - 1e-9))
    for k in range(steps):
        h = min(config.dt, t - k * config.dt)
        X, _ = _advance(X, family, params, h, config, rng, offset=start)
    return _clamp(X, family)


def worker_count():
    """Worker processes from the environment (default 1)."""
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def simulate(family: str, x0, params: ModelParams, t: float, config: SimConfig | None = None) -> np.ndarray:
    """Endpoints ``X(t)`` of ``config.paths`` independent paths from ``x0``.

    ``x0`` may also be an array of shape ``(paths, n)`` of starting points,
    one per path (``config.paths`` is then ignored). Paths are split into
    fixed-size chunks, each with its own spawned random stream, so results
    depend on the seed only (not on the number of workers).
    """
    config = config or SimConfig()
    if family != params.family():
        raise DomainError(f"params describe {params.family()}, not {family}")
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim == 2:
        for row in x0:
            check_chamber(row, interval=_family_interval(family), name="x0")
        config = replace(config, paths=x0.shape[0])
    else:
        x0 = check_chamber(x0, interval=_family_interval(family), name="x0")
    if x0.shape[-1] != params.n:
        raise DomainError(f"x0 has {x0.shape[-1]} coordinates, params.n={params.n}")
    if t < 0:
        raise DomainError("t must be nonnegative")
    if t == 0:
        return np.broadcast_to(x0, (config.paths, params.n)).copy()
    seqs = _chunk_seeds(config.seed, config.paths)
    jobs = []
    for k, seq in enumerate(seqs):
        start = k * CHUNK
        size = min(CHUNK, config.paths - start)
        jobs.append((family, x0, params, float(t), config, seq, start, size))
    workers = min(worker_count(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    return np.concatenate(parts, axis=0)


def norm_process_mean(params: ModelParams, x0, t: float) -> float:
    """``E ||X(t)||_1`` for the Laguerre system, a squared Bessel process."""
    dim = params.beta * (params.d * params.n / 2 + params.n * (params.n - 1))
    return float(np.sum(x0) + dim * t)


def check_norm_process(params: ModelParams, x0, t: float, config: SimConfig | None = None,
                       nse: float = 3.0, shift: dict | None = None) -> Comparison:
    """Compare the Monte Carlo mean of ``sum_i X_i(t)`` with its linear growth law.

    ``shift`` perturbs the simulated parameters only (falsification control).
    """
    if params.family() != "laguerre":
        raise DomainError("the norm process check is for the Laguerre family")
    X = simulate("laguerre", x0, perturbed(params, shift), t, config)
    norms = X.sum(axis=1)
    target = norm_process_mean(params, np.asarray(x0, dtype=float), t)
    return compare_mc("norm-process", norms, target, nse, n=params.n, beta=params.beta,
                      d=params.d, t=t, variance=float(norms.var(ddof=1)))


def jack_moment_samples(X, lam, theta):
    """``J_lam`` evaluated at every row of ``X``."""
    n = X.shape[-1]
    return jack_expand(as_partition(lam), n, theta)(X)


def check_exact_moment(family, x0, lam, params: ModelParams, t: float,
                       config: SimConfig | None = None, nse: float = 3.0,
                       shift: dict | None = None) -> Comparison:
    """Monte Carlo ``E J_lam(X(t))`` against the matrix-exponential value.

    ``shift`` perturbs the simulated parameters only (falsification control).
    """
    X = simulate(family, x0, perturbed(params, shift), t, config)
    vals = jack_moment_samples(X, lam, params.theta)
    target = exact_moment(x0, lam, params, t)
    return compare_mc("exact-moment", vals, target, nse, family=family,
                      lam=list(as_partition(lam)), t=t, dt=(config or SimConfig()).dt)


@dataclass(frozen=True)
class BiasReport:
    """Bias of the scheme at two step sizes with shared Brownian increments."""

    dt: float
    bias_coarse: float
    bias_fine: float
    se_coarse: float
    se_fine: float
    se_difference: float
    target: float

    @property
    def shrinks(self) -> bool:
        return abs(self.bias_fine) < abs(self.bias_coarse)


def coupled_bias(family, x0, lam, params: ModelParams, t: float, dt: float,
                 paths: int = 100_000, seed: int = 0, config: SimConfig | None = None) -> BiasReport:
    """Scheme bias at ``dt`` and ``dt / 2`` with the two runs driven by the same noise.

    Both runs see the same Brownian increments over every ``dt / 2``
    interval (the coarse run uses their sums); adaptive substeps inside an
    interval are filled in by Brownian-bridge sampling. The two estimates
    are then strongly correlated, so their difference is resolved much
    more sharply than either bias alone.
    """
    x0 = check_chamber(x0, interval=_family_interval(family), name="x0")
    steps = int(round(t / dt))
    if steps < 1 or abs(steps * dt - t) > 1e-9 * max(1.0, t):
        raise DomainError("t must be a positive multiple of dt")
    base = config or SimConfig()
    coarse_cfg = replace(base, dt=dt)
    fine_cfg = replace(base, dt=dt / 2)
    target = exact_moment(x0, lam, params, t)
    J = jack_expand(as_partition(lam), params.n, params.theta)
    coarse, fine = [], []
    for k, seq in enumerate(_chunk_seeds(seed, paths)):
        size = min(CHUNK, paths - k * CHUNK)
        offset = k * CHUNK
        noise_rng, bridge_c, bridge_f = (np.random.default_rng(s) for s in seq.spawn(3))
        Xc = np.broadcast_to(x0, (size, x0.size)).copy()
        Xf = Xc.copy()
        for _ in range(steps):
            d1 = noise_rng.standard_normal(Xf.shape) * np.sqrt(dt / 2)
            d2 = noise_rng.standard_normal(Xf.shape) * np.sqrt(dt / 2)
            Xf, _ = _advance(Xf, family, params, dt / 2, fine_cfg, bridge_f, offset, d1)
            Xf, _ = _advance(Xf, family, params, dt / 2, fine_cfg, bridge_f, offset, d2)
            Xc, _ = _advance(Xc, family, params, dt, coarse_cfg, bridge_c, offset, d1 + d2)
        coarse.append(J(_clamp(Xc, family)))
        fine.append(J(_clamp(Xf, family)))
    c = np.concatenate(coarse)
    f = np.concatenate(fine)
    root = np.sqrt(c.size)
    return BiasReport(dt=dt, bias_coarse=float(c.mean() - target), bias_fine=float(f.mean() - target),
                      se_coarse=float(c.std(ddof=1) / root), se_fine=float(f.std(ddof=1) / root),
                      se_difference=float((c - f).std(ddof=1) / root), target=float(target))
