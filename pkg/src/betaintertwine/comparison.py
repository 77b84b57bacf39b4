"""Estimate-versus-target records shared by the statistical and deterministic checks."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np


@dataclass(frozen=True)
class Comparison:
    """One estimate compared with a target.

    ``stderr`` is ``None`` for deterministic comparisons, which pass when
    ``|estimate - target| <= tolerance``. Statistical ones pass when the
    difference is within ``tolerance`` standard errors.
    """

    label: str
    estimate: float
    target: float
    stderr: float | None
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    @property
    def error(self) -> float:
        return self.estimate - self.target

    @property
    def z(self) -> float | None:
        if self.stderr is None:
            return None
        if self.stderr == 0:
            return 0.0 if self.error == 0 else math.copysign(math.inf, self.error)
        return self.error / self.stderr

    def to_dict(self) -> dict:
        d = asdict(self)
        d["error"] = self.error
        d["z"] = self.z
        return d


def clustered_mean_se(values, cluster=None):
    """Sample mean and its standard error.

    With ``cluster`` (e.g. MCMC chain ids) the error comes from the spread
    of cluster means, which absorbs within-chain autocorrelation.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()), math.inf
    if cluster is None:
        return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))
    cluster = np.asarray(cluster)
    counts = np.bincount(cluster)
    sums = np.bincount(cluster, weights=values)
    keep = counts > 0
    means = sums[keep] / counts[keep]
    if means.size < 2:
        raise ValueError("need at least two clusters for a standard error")
    return float(values.mean()), float(means.std(ddof=1) / math.sqrt(means.size))


def compare_mc(label, values, target, nse=3.0, cluster=None, **details) -> Comparison:
    """Monte Carlo mean of ``values`` against a known ``target``."""
    est, se = clustered_mean_se(values, cluster)
    ok = abs(est - target) <= (nse * se if se > 0 else 1e-12 * max(1.0, abs(target)))
    return Comparison(label, est, float(target), se, nse, bool(ok), details)


def compare_two_samples(label, a, b, nse=3.0, cluster_a=None, cluster_b=None, **details) -> Comparison:
    """Two independent Monte Carlo estimators of the same quantity."""
    ea, sa = clustered_mean_se(a, cluster_a)
    eb, sb = clustered_mean_se(b, cluster_b)
    se = math.hypot(sa, sb)
    ok = abs(ea - eb) <= nse * se
    return Comparison(label, ea, eb, se, nse, bool(ok), {"stderr_target": sb, **details})


def compare_exact(label, estimate, target, tol, relative=False, **details) -> Comparison:
    """Deterministic comparison at absolute (or relative) tolerance ``tol``."""
    estimate = float(estimate)
    target = float(target)
    scale = max(abs(target), 1e-300) if relative else 1.0
    ok = abs(estimate - target) <= tol * scale
    return Comparison(label, estimate, target, None, float(tol), bool(ok),
                      {"relative": relative, **details})
