"""Jack polynomials ``J_lambda(z; theta)`` normalized by their value at ``1_n``.

``J_lambda`` is the symmetric eigenfunction of

    D = sum_i z_i^2 d_i^2 + 2 theta sum_{i != j} z_i^2 / (z_i - z_j) d_i

that is monomial-triangular in dominance order, with

    J_lambda(1_n) = theta^{-|lambda|} prod_i Gamma((n+1-i) theta + lambda_i)
                                             / Gamma((n+1-i) theta).

Passing ``theta`` as a :class:`fractions.Fraction` switches every routine in
this module to exact rational arithmetic (Gamma ratios with integer shifts
become Pochhammer products).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .._validation import DomainError, NumericalFailure, ResonanceError
from .partitions import (
    Partition,
    as_partition,
    b_stat,
    conjugate,
    distinct_permutations_count,
    dominates,
    lowered,
    partitions_of,
)
from .polynomials import SymmetricPoly, component_on_monomial

RESONANCE_THRESHOLD = 1e-9


def _is_exact(theta) -> bool:
    return isinstance(theta, Fraction)


def eval_eigenvalue(lam: Sequence[int], n: int, theta):
    """Eigenvalue of ``D`` on ``J_lambda`` in ``n`` variables.

    ``2 B(lambda') - 2 theta B(lambda) + 2 theta (n - 1) |lambda|``.
    """
    lam = as_partition(lam)
    if n < len(lam):
        raise DomainError(f"n={n} smaller than partition length {len(lam)}")
    return 2 * b_stat(conjugate(lam)) - 2 * theta * b_stat(lam) + 2 * theta * (n - 1) * lam.weight


def pochhammer(x, k: int):
    """Rising factorial ``x (x+1) ... (x+k-1)``; exact for ``Fraction`` input."""
    out = Fraction(1) if isinstance(x, Fraction) else 1.0
    for m in range(k):
        out *= x + m
    return out


def log_gamma_ratio(x: float, k: float) -> float:
    """``log Gamma(x + k) - log Gamma(x)`` for ``x > 0``, ``x + k > 0``."""
    return math.lgamma(x + k) - math.lgamma(x)


def jack_norm_at_ones(lam: Sequence[int], n: int, theta):
    """``J_lambda(1_n; theta)``; log-gamma in float mode, exact for rationals."""
    lam = as_partition(lam)
    if len(lam) > n:
        return Fraction(0) if _is_exact(theta) else 0.0
    if _is_exact(theta):
        theta = Fraction(theta)
        out = theta ** (-lam.weight)
        for i, p in enumerate(lam, start=1):
            out *= pochhammer((n + 1 - i) * theta, p)
        return out
    theta = float(theta)
    s = -lam.weight * math.log(theta)
    for i, p in enumerate(lam, start=1):
        s += log_gamma_ratio((n + 1 - i) * theta, p)
    return math.exp(s)


def kernel_eigenvalue(lam: Sequence[int], n: int, theta):
    """Eigenvalue ``c(lambda, n, theta)`` of the Dixon-Anderson operator on ``J_lambda``.

    ``Gamma((n+1) theta) / Gamma(theta) * prod_{i<=n} Gamma((n+1-i) theta + lambda_i)
    / Gamma((n+2-i) theta + lambda_i)``; computed in log space for floats.
    """
    lam = as_partition(lam)
    if len(lam) > n:
        raise DomainError(f"partition {tuple(lam)} longer than n={n}")
    if _is_exact(theta):
        theta = Fraction(theta)
        out = Fraction(1)
        for i in range(1, n + 1):
            p = lam.part(i)
            out *= pochhammer((n + 1 - i) * theta, p) / pochhammer((n + 2 - i) * theta, p)
        return out
    theta = float(theta)
    s = math.lgamma((n + 1) * theta) - math.lgamma(theta)
    for i in range(1, n + 1):
        p = lam.part(i)
        s += math.lgamma((n + 1 - i) * theta + p) - math.lgamma((n + 2 - i) * theta + p)
    return math.exp(s)


@lru_cache(maxsize=None)
def _dominated_basis(lam: Partition, n: int) -> tuple[Partition, ...]:
    return tuple(mu for mu in partitions_of(lam.weight, max_length=n) if dominates(lam, mu))


@lru_cache(maxsize=4096)
def _jack_expand_cached(lam: Partition, n: int, theta, threshold: float,
                        exact: bool) -> SymmetricPoly:
    basis = _dominated_basis(lam, n)  # decreasing lex: lam first
    target = eval_eigenvalue(lam, n, theta)
    two_theta = 2 * theta
    rows = {}
    for nu in basis:
        row = {}
        for mu, c in component_on_monomial("S", 2, nu, n):
            row[mu] = row.get(mu, 0) + c
        for mu, c in component_on_monomial("I", 2, nu, n):
            row[mu] = row.get(mu, 0) + two_theta * c
        rows[nu] = row
    coeffs = {lam: Fraction(1) if exact else 1.0}
    for mu in basis[1:]:
        gap = target - rows[mu].get(mu, 0)
        if abs(gap) < threshold:
            raise ResonanceError(
                f"eigenvalue gap {float(gap):.3e} between {tuple(lam)} and {tuple(mu)}")
        acc = 0
        for nu, c_nu in coeffs.items():
            acc += c_nu * rows[nu].get(mu, 0)
        coeffs[mu] = acc / gap
    at_ones = sum(c * distinct_permutations_count(mu, n) for mu, c in coeffs.items())
    scale = jack_norm_at_ones(lam, n, theta) / at_ones
    return SymmetricPoly(n, {mu: c * scale for mu, c in coeffs.items()})


def jack_expand(lam: Sequence[int], n: int, theta, threshold: float = RESONANCE_THRESHOLD) -> SymmetricPoly:
    """Monomial expansion of ``J_lambda(.; theta)`` in ``n`` variables."""
    lam = as_partition(lam)
    if len(lam) > n:
        raise DomainError(f"partition {tuple(lam)} longer than nvars={n}")
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}")
    if not _is_exact(theta):
        theta = float(theta)
    return _jack_expand_cached(lam, n, theta, threshold, _is_exact(theta))


def jack_eval(lam: Sequence[int], z, theta):
    """Numeric value of ``J_lambda(z; theta)``; ``z`` has shape ``(..., n)``."""
    z = np.asarray(z)
    if z.ndim == 0:
        raise DomainError("z must have at least one coordinate")
    return jack_expand(lam, z.shape[-1], theta)(z)


@lru_cache(maxsize=None)
def _binomials_cached(lam: Partition, theta: float, n: int, seed: int) -> tuple:
    rng = np.random.default_rng(seed)
    pairs = lowered(lam)
    out = {i: 0.0 for i in range(1, len(lam) + 1)}
    if not pairs:
        return tuple(sorted(out.items()))
    poly = jack_expand(lam, n, theta)
    norm = jack_norm_at_ones(lam, n, theta)
    lower_polys = [jack_expand(rho, n, theta) for _, rho in pairs]
    lower_norms = [jack_norm_at_ones(rho, n, theta) for _, rho in pairs]
    deg = lam.weight
    npts = deg + 1
    roots = np.exp(2j * np.pi * np.arange(npts) / npts)
    k = len(pairs)
    nsamples = max(3 * k, k + 4)
    for _attempt in range(6):
        z = rng.uniform(-1.0, 1.0, size=(nsamples, n))
        # coefficient of s^(deg-1) in J(1_n + s z) by discrete Fourier extraction
        pts = 1.0 + roots[None, :, None] * z[:, None, :]
        h = poly(pts)
        rhs = (h * roots[None, :] ** (-(deg - 1))).mean(axis=1).real / norm
        A = np.column_stack([p(z) / c for p, c in zip(lower_polys, lower_norms)])
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[-1] <= 0 or sv[0] / sv[-1] > 1e8:
            continue
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        resid = np.max(np.abs(A @ sol - rhs)) / max(1.0, np.max(np.abs(rhs)))
        if resid > 1e-8:
            raise NumericalFailure(
                f"binomial expansion of {tuple(lam)} not consistent (residual {resid:.2e})")
        for (i, _), b in zip(pairs, sol):
            out[i] = float(b)
        return tuple(sorted(out.items()))
    raise NumericalFailure(f"interpolation system for {tuple(lam)} stayed singular")


def _shifted_series(poly: SymmetricPoly, z) -> list:
    """Coefficients in ``s`` of ``poly(1_n + s z)`` for a rational point ``z``."""
    deg = poly.degree
    out = [Fraction(0)] * (deg + 1)
    for alpha, c in poly.expand().items():
        series = [Fraction(1)]
        for zi, a in zip(z, alpha):
            for _ in range(a):
                series = [x + (zi * series[m - 1] if m else 0) for m, x in
                          enumerate(series + [Fraction(0)])]
        for m, x in enumerate(series):
            out[m] += c * x
    return out


def _evaluate_exact(poly: SymmetricPoly, z) -> Fraction:
    total = Fraction(0)
    for alpha, c in poly.expand().items():
        term = c
        for zi, a in zip(z, alpha):
            term *= zi ** a
        total += term
    return total


def _solve_exact(A, b):
    """Gaussian elimination over the rationals; ``None`` when singular."""
    m = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(m):
        piv = next((r for r in range(col, m) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(m):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][m] / M[r][r] for r in range(m)]


@lru_cache(maxsize=None)
def _binomials_exact(lam: Partition, theta: Fraction, n: int, seed: int) -> tuple:
    rng = np.random.default_rng(seed)
    pairs = lowered(lam)
    out = {i: Fraction(0) for i in range(1, len(lam) + 1)}
    if not pairs:
        return tuple(sorted(out.items()))
    poly = jack_expand(lam, n, theta)
    norm = jack_norm_at_ones(lam, n, theta)
    lower = [(jack_expand(rho, n, theta), jack_norm_at_ones(rho, n, theta)) for _, rho in pairs]
    k = len(pairs)
    for _attempt in range(6):
        pts = [[Fraction(int(v), 7) for v in rng.integers(-14, 15, size=n)] for _ in range(k)]
        rhs = [_shifted_series(poly, z)[lam.weight - 1] / norm for z in pts]
        A = [[_evaluate_exact(p, z) / c for p, c in lower] for z in pts]
        sol = _solve_exact(A, rhs)
        if sol is None:
            continue
        for (i, _), v in zip(pairs, sol):
            out[i] = v
        return tuple(sorted(out.items()))
    raise NumericalFailure(f"interpolation system for {tuple(lam)} stayed singular")


def first_order_binomials(lam: Sequence[int], theta, n_aux: int | None = None,
                          seed: int = 0) -> dict:
    """Generalized binomial coefficients ``binom(lambda, lambda_(i))_theta``.

    Obtained from the degree ``|lambda| - 1`` part of
    ``J_lambda(1_n + z) / J_lambda(1_n)`` expanded over ``J_rho / J_rho(1_n)``,
    fitted on evaluations at random points. The coefficients do not depend on
    the auxiliary number of variables ``n_aux`` (default ``len(lam) + 1``).
    Invalid rows ``i`` map to 0. A ``Fraction`` theta gives exact values
    (square rational system at rational points).
    """
    lam = as_partition(lam)
    if not lam:
        raise DomainError("the zero partition has no first-order binomials")
    if n_aux is None:
        n_aux = len(lam) + 1
    if n_aux < len(lam):
        raise DomainError("n_aux must be at least the partition length")
    if _is_exact(theta):
        return dict(_binomials_exact(lam, theta, int(n_aux), int(seed)))
    return dict(_binomials_cached(lam, float(theta), int(n_aux), int(seed)))


@dataclass(frozen=True)
class JackIndex:
    """The triple ``(lambda, n, theta)`` identifying ``J_lambda`` in ``n`` variables."""

    lam: Partition
    nvars: int
    theta: float | Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", as_partition(self.lam))
        if self.nvars < 1 or len(self.lam) > self.nvars:
            raise DomainError(f"invalid nvars={self.nvars} for {tuple(self.lam)}")
        if not self.theta > 0:
            raise DomainError(f"theta must be positive, got {self.theta}")

    def expand(self) -> SymmetricPoly:
        return jack_expand(self.lam, self.nvars, self.theta)

    def norm_at_ones(self):
        return jack_norm_at_ones(self.lam, self.nvars, self.theta)

    def eigenvalue(self):
        return eval_eigenvalue(self.lam, self.nvars, self.theta)

    def __call__(self, z):
        return self.expand()(z)


# golden-file text format --------------------------------------------------

def _fmt_partition(p) -> str:
    return ",".join(map(str, p)) if p else "-"


def _parse_partition(s: str) -> Partition:
    return Partition() if s == "-" else Partition(int(t) for t in s.split(","))


def format_golden_record(lam, n: int, theta: Fraction, poly: SymmetricPoly) -> str:
    """One line: ``lambda=2,1 n=3 theta=1/2 | 2,1:5/2 1,1,1:6``."""
    terms = " ".join(f"{_fmt_partition(mu)}:{Fraction(c)}" for mu, c in poly.terms.items())
    return f"lambda={_fmt_partition(as_partition(lam))} n={n} theta={Fraction(theta)} | {terms}"


def parse_golden(text: str) -> list[tuple[Partition, int, Fraction, SymmetricPoly]]:
    records = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, _, body = line.partition("|")
        fields = dict(tok.split("=", 1) for tok in head.split())
        lam = _parse_partition(fields["lambda"])
        n = int(fields["n"])
        theta = Fraction(fields["theta"])
        terms = {}
        for tok in body.split():
            mu, _, c = tok.rpartition(":")
            terms[_parse_partition(mu)] = Fraction(c)
        records.append((lam, n, theta, SymmetricPoly(n, terms)))
    return records
