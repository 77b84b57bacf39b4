"""Symmetric polynomials in the monomial basis and exact differential operators.

A :class:`SymmetricPoly` stores ``sum_mu coeff(mu) * m_mu(z_1, ..., z_n)``.
Coefficients may be floats, complex numbers or :class:`fractions.Fraction`;
the operator machinery only multiplies them by integers and by ``theta``, so
exact rational arithmetic is preserved when ``theta`` is a ``Fraction``.

The singular sums ``sum_{i != j} z_i^k / (z_i - z_j) d/dz_i`` are applied as
exact divided differences: on a symmetric input the numerator of each
``(i, j)`` pair is antisymmetric and divides ``z_i - z_j`` exactly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from numbers import Number
from typing import Mapping

import numpy as np

from .._validation import DomainError
from .partitions import Partition, as_partition, basis_key


@lru_cache(maxsize=None)
def monomial_exponents(mu: Partition, n: int) -> tuple[tuple[int, ...], ...]:
    """Distinct exponent vectors of ``m_mu`` in ``n`` variables."""
    mu = as_partition(mu)
    if len(mu) > n:
        return ()
    padded = tuple(mu) + (0,) * (n - len(mu))
    return tuple(sorted(set(permutations(padded)), reverse=True))


@lru_cache(maxsize=None)
def _exponent_array(mu: Partition, n: int) -> np.ndarray:
    return np.array(monomial_exponents(mu, n), dtype=float).reshape(-1, n)


def _is_sorted(exps) -> bool:
    return all(exps[k] >= exps[k + 1] for k in range(len(exps) - 1))


def _add(out, exps, c):
    # only dominant (sorted) exponents are kept: the image is symmetric
    if c and _is_sorted(exps):
        key = Partition(exps)
        out[key] = out.get(key, 0) + c


@lru_cache(maxsize=None)
def component_on_monomial(kind: str, k: int, mu: Partition, n: int) -> tuple:
    """Integer-coefficient action of one operator component on ``m_mu``.

    ``kind`` is one of

    * ``"P"``: ``sum_i z_i^k d_i``
    * ``"S"``: ``sum_i z_i^k d_i^2``
    * ``"I"``: ``sum_{i != j} z_i^k / (z_i - z_j) d_i``

    Returns a tuple of ``(nu, coeff)`` pairs, coefficients being ints.
    """
    out: dict[Partition, int] = {}
    for alpha in monomial_exponents(mu, n):
        if kind == "P":
            for i in range(n):
                a = alpha[i]
                if a:
                    e = list(alpha)
                    e[i] += k - 1
                    _add(out, e, a)
        elif kind == "S":
            for i in range(n):
                a = alpha[i]
                if a * (a - 1):
                    e = list(alpha)
                    e[i] += k - 2
                    _add(out, e, a * (a - 1))
        elif kind == "I":
            for i in range(n):
                ai = alpha[i]
                if not ai:
                    continue
                gi = ai + k - 1
                for j in range(i + 1, n):
                    # pair (i, j): numerator Q - swap(Q) with Q = z_i^k d_i p
                    gj = alpha[j]
                    if gi == gj:
                        continue
                    if gi > gj:
                        lo, hi, sign = gj, gi, 1
                    else:
                        lo, hi, sign = gi, gj, -1
                    for m in range(hi - lo):
                        e = list(alpha)
                        e[i] = lo + m
                        e[j] = hi - 1 - m
                        _add(out, e, sign * ai)
        else:
            raise ValueError(f"unknown component kind {kind!r}")
    return tuple((nu, c) for nu, c in sorted(out.items(), key=lambda kv: basis_key(kv[0])) if c)


class SymmetricPoly:
    """Symmetric polynomial in ``nvars`` variables, monomial basis.

    Instances are treated as immutable.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping | None = None):
        if nvars < 1:
            raise DomainError("nvars must be positive")
        self.nvars = int(nvars)
        clean = {}
        for mu, c in (terms or {}).items():
            mu = as_partition(mu)
            if len(mu) > nvars:
                raise DomainError(f"partition {tuple(mu)} longer than nvars={nvars}")
            if c != 0:
                clean[mu] = clean.get(mu, 0) + c
        self._terms = {mu: clean[mu] for mu in sorted(clean, key=basis_key) if clean[mu] != 0}

    @classmethod
    def constant(cls, nvars, value=1):
        return cls(nvars, {Partition(): value})

    @classmethod
    def monomial(cls, nvars, mu, coeff=1):
        return cls(nvars, {as_partition(mu): coeff})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def coefficient(self, mu) -> Number:
        return self._terms.get(as_partition(mu), 0)

    def support(self) -> list[Partition]:
        return list(self._terms)

    @property
    def degree(self) -> int:
        return max((mu.weight for mu in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def _check(self, other):
        if not isinstance(other, SymmetricPoly):
            return NotImplemented
        if other.nvars != self.nvars:
            raise DomainError("polynomials live in different numbers of variables")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        t = dict(self._terms)
        for mu, c in other._terms.items():
            t[mu] = t.get(mu, 0) + c
        return SymmetricPoly(self.nvars, t)

    def __neg__(self):
        return SymmetricPoly(self.nvars, {mu: -c for mu, c in self._terms.items()})

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, SymmetricPoly):
            return NotImplemented
        return SymmetricPoly(self.nvars, {mu: c * scalar for mu, c in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SymmetricPoly(self.nvars, {mu: c / scalar for mu, c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, SymmetricPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, tuple(self._terms.items())))

    def max_abs_diff(self, other) -> float:
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        return max((abs(complex(self.coefficient(k) - other.coefficient(k))) for k in keys),
                   default=0.0)

    def max_abs_coeff(self) -> float:
        return max((abs(complex(c)) for c in self._terms.values()), default=0.0)

    def to_float(self):
        return SymmetricPoly(self.nvars, {mu: float(c) for mu, c in self._terms.items()})

    def __call__(self, z):
        """Evaluate at ``z`` of shape ``(..., nvars)``; complex input allowed."""
        z = np.asarray(z)
        if z.shape[-1] != self.nvars:
            raise DomainError(f"expected {self.nvars} coordinates, got {z.shape[-1]}")
        dtype = complex if np.iscomplexobj(z) else float
        total = np.zeros(z.shape[:-1], dtype=dtype)
        for mu, c in self._terms.items():
            E = _exponent_array(mu, self.nvars)
            vals = np.prod(z[..., None, :] ** E, axis=-1).sum(axis=-1)
            total = total + (complex(c) if dtype is complex else float(c)) * vals
        return total

    def expand(self) -> dict[tuple[int, ...], Number]:
        """Full expansion as ``{exponent vector: coefficient}``."""
        out = {}
        for mu, c in self._terms.items():
            for e in monomial_exponents(mu, self.nvars):
                out[e] = c
        return out

    @classmethod
    def from_expansion(cls, nvars, expansion: Mapping, check=True):
        """Collect a full expansion; raises if it is not symmetric."""
        terms = {}
        for e, c in expansion.items():
            if c != 0 and _is_sorted(e):
                terms[Partition(e)] = c
        poly = cls(nvars, terms)
        if check:
            full = poly.expand()
            for e, c in expansion.items():
                if full.get(tuple(e), 0) != c:
                    raise DomainError("expansion is not symmetric")
        return poly

    def __repr__(self):
        body = " + ".join(f"{c}*m{tuple(mu)}" for mu, c in self._terms.items()) or "0"
        return f"SymmetricPoly(n={self.nvars}: {body})"


def apply_components(poly: SymmetricPoly, weights: Mapping[tuple[str, int], Number]) -> SymmetricPoly:
    """Apply ``sum weight * component`` to ``poly``."""
    out: dict[Partition, Number] = {}
    n = poly.nvars
    for (kind, k), w in weights.items():
        if w == 0:
            continue
        for mu, c in poly.terms.items():
            cw = c * w
            for nu, ic in component_on_monomial(kind, k, mu, n):
                out[nu] = out.get(nu, 0) + cw * ic
    return SymmetricPoly(n, out)


def operator_weights(which: str, theta=1) -> dict[tuple[str, int], Number]:
    """Component decomposition of the named operator.

    ``B1 = sum d_i``, ``B3 = sum z_i d_i``,
    ``B2 = sum z_i d_i^2 + 2 theta sum_{i!=j} z_i/(z_i-z_j) d_i``,
    ``D = sum z_i^2 d_i^2 + 2 theta sum_{i!=j} z_i^2/(z_i-z_j) d_i``,
    ``dyson = sum d_i^2 + 2 theta sum_{i!=j} 1/(z_i-z_j) d_i``.
    """
    two_theta = 2 * theta
    table = {
        "B1": {("P", 0): 1},
        "B3": {("P", 1): 1},
        "B2": {("S", 1): 1, ("I", 1): two_theta},
        "D": {("S", 2): 1, ("I", 2): two_theta},
        "dyson": {("S", 0): 1, ("I", 0): two_theta},
    }
    try:
        return table[which]
    except KeyError:
        raise DomainError(f"unknown operator {which!r}; expected one of {sorted(table)}") from None


def apply_operator(which: str, poly: SymmetricPoly, theta=1) -> SymmetricPoly:
    """Exact action of ``B1``, ``B2``, ``B3``, ``D`` (or ``dyson``) on ``poly``."""
    return apply_components(poly, operator_weights(which, theta))


def apply_linear_combination(poly: SymmetricPoly, combo: Mapping[str, Number], theta) -> SymmetricPoly:
    """Apply ``sum_k combo[k] * op_k`` where keys name operators."""
    weights: dict[tuple[str, int], Number] = {}
    for which, w in combo.items():
        for comp, cw in operator_weights(which, theta).items():
            weights[comp] = weights.get(comp, 0) + w * cw
    return apply_components(poly, weights)


def exact(value):
    """Convert a float/str/int to ``Fraction`` (floats via their decimal repr)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)
