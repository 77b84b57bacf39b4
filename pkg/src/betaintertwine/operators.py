"""Generators and the Dixon-Anderson kernel as matrices on truncated Jack bases.

Matrices use the *row* convention: for an operator ``T``,

    T J_kappa = sum_nu M[kappa, nu] J_nu,

so rows are indexed by the input partition. In this convention generator
matrices are lower triangular in the basis order (lowering a box decreases
the weight), ``f_kappa(t) = sum_nu expm(t M)[kappa, nu] f_nu(0)``, and the
intertwining of the ``(n+1)``- and ``n``-particle generators through the
kernel reads ``K @ G_{n+1} == G_n @ K``. Transposing gives the column form
``G_{n+1}^T K = K G_n^T`` used when matrices act on coefficient vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from ._validation import DomainError, check_chamber
from .jack.jack import (
    eval_eigenvalue,
    first_order_binomials,
    jack_expand,
    jack_norm_at_ones,
    kernel_eigenvalue,
)
from .jack.partitions import Partition, as_partition, contained_in, lowered
from .jack.polynomials import SymmetricPoly, apply_linear_combination, apply_operator, exact

Family = Literal["laguerre", "jacobi"]


@dataclass(frozen=True)
class ModelParams:
    """Parameters ``(n, theta, d)`` or ``(n, theta, a, b)`` plus a time horizon."""

    n: int
    theta: float
    d: float | None = None
    a: float | None = None
    b: float | None = None
    t: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not self.theta >= 0.5:
            raise DomainError(f"need beta = 2 theta >= 1, got theta={self.theta}")
        if self.t < 0:
            raise DomainError("time horizon must be nonnegative")

    @property
    def beta(self) -> float:
        return 2 * self.theta

    @property
    def is_exact(self) -> bool:
        return isinstance(self.theta, Fraction)

    def as_exact(self) -> "ModelParams":
        """Copy with every real parameter converted to a ``Fraction``."""
        conv = {k: exact(getattr(self, k)) for k in ("theta", "d", "a", "b", "t")
                if getattr(self, k) is not None}
        return replace(self, **conv)

    def family(self) -> Family:
        if self.d is not None:
            return "laguerre"
        if self.a is not None and self.b is not None:
            return "jacobi"
        raise DomainError("params carry neither d nor (a, b)")

    def shifted_up(self) -> "ModelParams":
        """Parameters of the ``(n+1)``-particle process in the intertwining."""
        if self.family() == "laguerre":
            return replace(self, n=self.n + 1, d=self.d - 2)
        return replace(self, n=self.n + 1, a=self.a - 1, b=self.b - 1)

    def check_theorem_regime(self):
        if self.family() == "laguerre":
            if not self.d >= 2:
                raise DomainError(f"intertwining needs d >= 2, got d={self.d}")
        elif not (self.a >= 1 and self.b >= 1):
            raise DomainError(f"intertwining needs a, b >= 1, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class PartitionBasis:
    """Partitions ``kappa`` with ``kappa_i <= top_i`` and length ``<= nvars``."""

    top: Partition
    nvars: int
    members: tuple[Partition, ...] = field(init=False)
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        top = as_partition(self.top)
        object.__setattr__(self, "top", top)
        members = tuple(contained_in(top, max_length=self.nvars))
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "index", {k: i for i, k in enumerate(members)})

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True)
class GeneratorMatrix:
    basis: PartitionBasis
    entries: np.ndarray
    kind: str

    def __post_init__(self):
        m = len(self.basis)
        if self.entries.shape != (m, m):
            raise DomainError("matrix shape does not match basis")

    def row_as_poly(self, kappa, nvars: int, theta) -> SymmetricPoly:
        """``sum_nu M[kappa, nu] J_nu`` as a monomial expansion in ``nvars`` variables."""
        r = self.basis.index[as_partition(kappa)]
        out = SymmetricPoly(nvars)
        for c, nu in zip(self.entries[r], self.basis.members):
            if c != 0:
                out = out + jack_expand(nu, nvars, theta) * float(c)
        return out


def _basis_for(top, n) -> PartitionBasis:
    top = as_partition(top)
    if len(top) > n:
        raise DomainError(f"partition {tuple(top)} longer than n={n}")
    return PartitionBasis(top, n)


def _lowering_entries(basis: PartitionBasis, n: int, theta: float, coeff):
    """Fill ``M[kappa, kappa_(i)] = binom * J_kappa(1_n)/J_kappa_(i)(1_n) * coeff(kappa, i)``."""
    exact_mode = isinstance(theta, Fraction)
    M = _zeros(len(basis), exact_mode)
    for r, kappa in enumerate(basis.members):
        if not kappa:
            continue
        binoms = first_order_binomials(kappa, theta)
        top_norm = jack_norm_at_ones(kappa, n, theta)
        for i, rho in lowered(kappa):
            ratio = top_norm / jack_norm_at_ones(rho, n, theta)
            M[r, basis.index[rho]] = binoms[i] * ratio * coeff(kappa, i)
    return M


def _zeros(m, exact_mode):
    if exact_mode:
        M = np.empty((m, m), dtype=object)
        M[...] = Fraction(0)
        return M
    return np.zeros((m, m))


def laguerre_generator_matrix(top, params: ModelParams, basis_nvars: int | None = None) -> GeneratorMatrix:
    """Matrix of ``L = 2 B2 + theta d B1`` in ``params.n`` variables.

    ``basis_nvars`` caps partition lengths (defaults to ``params.n``); it is
    lowered to ``n - 1`` when the matrix serves as the upper level of an
    intertwining check.
    """
    n, theta, d = params.n, params.theta, params.d
    if d is None:
        raise DomainError("Laguerre generator needs d")
    basis = _basis_for(top, basis_nvars or n)

    def coeff(kappa, i):
        return 2 * (kappa[i - 1] - 1 + (n - i) * theta) + theta * d

    return GeneratorMatrix(basis, _lowering_entries(basis, n, theta, coeff), "laguerre")


def jacobi_generator_matrix(top, params: ModelParams, basis_nvars: int | None = None) -> GeneratorMatrix:
    """Matrix of ``A = 2 B2 - 2 D + 2 theta a B1 - 2 theta (a+b) B3``."""
    n, theta, a, b = params.n, params.theta, params.a, params.b
    if a is None or b is None:
        raise DomainError("Jacobi generator needs a and b")
    basis = _basis_for(top, basis_nvars or n)

    def coeff(kappa, i):
        return 2 * (kappa[i - 1] - 1 + (n - i) * theta) + 2 * theta * a

    M = _lowering_entries(basis, n, theta, coeff)
    for r, kappa in enumerate(basis.members):
        M[r, r] = -2 * eval_eigenvalue(kappa, n, theta) - 2 * theta * (a + b) * kappa.weight
    return GeneratorMatrix(basis, M, "jacobi")


def generator_matrix(top, params: ModelParams, basis_nvars: int | None = None) -> GeneratorMatrix:
    if params.family() == "laguerre":
        return laguerre_generator_matrix(top, params, basis_nvars)
    return jacobi_generator_matrix(top, params, basis_nvars)


def generator_combination(params: ModelParams) -> dict[str, float]:
    """The generator written over ``B1, B2, B3, D`` (for symbolic cross-checks)."""
    th = params.theta
    if params.family() == "laguerre":
        return {"B2": 2.0, "B1": th * params.d}
    return {"B2": 2.0, "D": -2.0, "B1": 2 * th * params.a, "B3": -2 * th * (params.a + params.b)}


def apply_generator(poly: SymmetricPoly, params: ModelParams) -> SymmetricPoly:
    """Symbolic action of the Laguerre/Jacobi generator on a symmetric polynomial."""
    if poly.nvars != params.n:
        raise DomainError("polynomial and params disagree on n")
    return apply_linear_combination(poly, generator_combination(params), params.theta)


def kernel_matrix(top, n: int, theta: float) -> GeneratorMatrix:
    """Diagonal matrix of ``c(kappa, n, theta)``, the kernel eigenvalues."""
    basis = _basis_for(top, n)
    M = _zeros(len(basis), isinstance(theta, Fraction))
    for r, k in enumerate(basis.members):
        M[r, r] = kernel_eigenvalue(k, n, theta)
    return GeneratorMatrix(basis, M, "kernel")


# matrix exponential ------------------------------------------------------

_PADE_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1,
               7: 9.504178996162932e-1, 9: 2.097847961257068e0,
               13: 5.371920351148152e0}
_PADE_B = {
    3: (120., 60., 12., 1.),
    5: (30240., 15120., 3360., 420., 30., 1.),
    7: (17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.),
    9: (17643225600., 8821612800., 2075673600., 302702400., 30270240.,
        2162160., 110880., 3960., 90., 1.),
    13: (64764752532480000., 32382376266240000., 7771770303897600.,
         1187353796428800., 129060195264000., 10559470521600.,
         670442572800., 33522128640., 1323241920., 40840800., 960960.,
         16380., 182., 1.),
}


def _pade_uv(A, m):
    b = _PADE_B[m]
    eye = np.eye(A.shape[0])
    A2 = A @ A
    if m < 13:
        pw = [eye, A2]
        while len(pw) < (m + 1) // 2:
            pw.append(pw[-1] @ A2)
        U = A @ sum(b[2 * k + 1] * pw[k] for k in range(len(pw)))
        V = sum(b[2 * k] * pw[k] for k in range(len(pw)))
        return U, V
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * eye)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * eye)
    return U, V


def triangular_expm(A: np.ndarray) -> np.ndarray:
    """``exp(A)`` for lower-triangular ``A``.

    Strictly lower-triangular (nilpotent) input uses the terminating Taylor
    series. Otherwise Pade scaling-and-squaring with triangular solves, the
    diagonal being reset to ``exp(A_ii)`` after every squaring. Object
    arrays of ``Fraction`` are exponentiated exactly (nilpotent input only).
    """
    A = np.asarray(A)
    exact_mode = A.dtype == object
    if not exact_mode:
        A = A.astype(float)
    m = A.shape[0]
    if np.any(np.triu(A, 1) != 0):
        raise DomainError("matrix is not lower triangular")
    if m == 0:
        return A.copy()
    diag = np.diag(A)
    if not np.any(diag != 0):
        out = _zeros(m, exact_mode)
        np.fill_diagonal(out, Fraction(1) if exact_mode else 1.0)
        term = out.copy()
        for k in range(1, m):
            term = term @ A / k
            if not np.any(term):
                break
            out = out + term
        return out
    if exact_mode:
        raise DomainError("exact exponential is only available for nilpotent matrices")
    norm = np.linalg.norm(A, 1)
    s = 0
    for deg in (3, 5, 7, 9):
        if norm <= _PADE_THETA[deg]:
            break
    else:
        deg = 13
        if norm > _PADE_THETA[13]:
            s = int(math.ceil(math.log2(norm / _PADE_THETA[13])))
    As = A / 2 ** s
    U, V = _pade_uv(As, deg)
    X = solve_triangular(V - U, V + U, lower=True)
    idx = np.diag_indices(m)
    X[idx] = np.exp(diag / 2 ** s)
    for k in range(s, 0, -1):
        X = X @ X
        X[idx] = np.exp(diag / 2 ** (k - 1))
    return X


def semigroup_matrix(gen: GeneratorMatrix, t: float) -> GeneratorMatrix:
    """``expm(t M)`` with rows indexed as ``gen``."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    return GeneratorMatrix(gen.basis, triangular_expm(t * gen.entries), f"semigroup[{gen.kind}]")


# intertwining checks ------------------------------------------------------

def perturbed(params: ModelParams, perturb: dict | None) -> ModelParams:
    """Copy of ``params`` with ``perturb`` offsets added to the named fields."""
    if not perturb:
        return params
    return replace(params, **{k: getattr(params, k) + v for k, v in perturb.items()})


def intertwining_matrices(top, params: ModelParams, *, perturb: dict | None = None,
                          enforce_regime: bool = True):
    """Return ``(K, G_lower, G_upper)`` for the check at partition ``top``.

    ``G_lower`` is the ``n``-particle generator at ``params``; ``G_upper`` the
    ``(n+1)``-particle generator at the shifted parameters, restricted to
    partitions of length ``<= n``. ``perturb`` adds offsets to the upper
    level's parameters only (falsification controls).
    """
    if enforce_regime:
        params.check_theorem_regime()
    n = params.n
    lower = generator_matrix(top, params)
    upper = generator_matrix(top, perturbed(params.shifted_up(), perturb), basis_nvars=n)
    K = kernel_matrix(top, n, params.theta)
    return K, lower, upper


def check_generator_intertwining(top, params: ModelParams, *, perturb: dict | None = None,
                                 enforce_regime: bool = True) -> float:
    """Max-norm of ``K G_{n+1} - G_n K`` (zero when the generators intertwine)."""
    K, lower, upper = intertwining_matrices(top, params, perturb=perturb,
                                            enforce_regime=enforce_regime)
    R = K.entries @ upper.entries - lower.entries @ K.entries
    return float(np.max(np.abs(R))) if R.size else 0.0


def resolve_arithmetic(params: ModelParams, arithmetic: str) -> ModelParams:
    """Pick float or exact parameters.

    ``"auto"`` uses exact rationals for the Laguerre family, whose generator
    matrices are nilpotent: their exponential is a terminating series with
    entries that grow far beyond the resolution of doubles for large ``t``.
    """
    if arithmetic not in ("auto", "float", "exact"):
        raise DomainError(f"unknown arithmetic {arithmetic!r}")
    if arithmetic == "exact" or (arithmetic == "auto" and params.family() == "laguerre"):
        return params.as_exact()
    return params


def check_semigroup_intertwining(top, params: ModelParams, t: float, *,
                                 perturb: dict | None = None,
                                 enforce_regime: bool = True,
                                 arithmetic: str = "auto") -> float:
    """Max-norm of ``K expm(t G_{n+1}) - expm(t G_n) K``."""
    params = resolve_arithmetic(params, arithmetic)
    if params.is_exact:
        t = exact(t)
        if perturb:
            perturb = {k: exact(v) for k, v in perturb.items()}
    K, lower, upper = intertwining_matrices(top, params, perturb=perturb,
                                            enforce_regime=enforce_regime)
    E_up = semigroup_matrix(upper, t).entries
    E_lo = semigroup_matrix(lower, t).entries
    R = K.entries @ E_up - E_lo @ K.entries
    return float(np.max(np.abs(R))) if R.size else 0.0


def exact_moment(x, top, params: ModelParams, t: float) -> float:
    """``E_x[J_top(X(t))]`` from the matrix exponential of the generator."""
    x = check_chamber(x)
    if x.size != params.n:
        raise DomainError(f"x has {x.size} coordinates, params.n={params.n}")
    gen = generator_matrix(top, params)
    E = semigroup_matrix(gen, t).entries
    vals = np.array([jack_expand(nu, params.n, params.theta)(x) for nu in gen.basis.members])
    return float(E[gen.basis.index[as_partition(top)]] @ vals)


def exact_moments(x, tops: Sequence, params: ModelParams, t: float) -> dict:
    return {as_partition(top): exact_moment(x, top, params, t) for top in tops}


def check_dyson_commutator(nvars: int, theta, sample_polys: Sequence[SymmetricPoly]) -> float:
    """Max coefficient deviation of ``[B1, B2] p`` from the Dyson generator applied to ``p``."""
    worst = 0.0
    for p in sample_polys:
        if p.nvars != nvars:
            raise DomainError("sample polynomial has the wrong number of variables")
        lhs = (apply_operator("B1", apply_operator("B2", p, theta), theta)
               - apply_operator("B2", apply_operator("B1", p, theta), theta))
        rhs = apply_operator("dyson", p, theta)
        worst = max(worst, lhs.max_abs_diff(rhs))
    return worst


# Gamma-ratio identities behind the coefficient matching ---------------------

def gamma_ratio_factors(lam, i: int, n: int, theta):
    """Three ratio factors and their closed Gamma expressions.

    Returns a list of ``(value, closed_form)`` pairs for

    * ``J_lam(1_n) / J_lam_(i)(1_n)``,
    * ``J_lam_(i)(1_{n+1}) / J_lam(1_{n+1})``,
    * ``c(lam_(i), n) / c(lam, n)``.

    Exact when ``theta`` is a ``Fraction``.
    """
    from fractions import Fraction

    lam = as_partition(lam)
    rho = dict(lowered(lam)).get(i)
    if rho is None:
        raise DomainError(f"lam_({i}) of {tuple(lam)} is not a partition")
    li = lam[i - 1]
    x1 = (n + 1 - i) * theta + li
    x2 = (n + 2 - i) * theta + li
    if isinstance(theta, Fraction):
        g1 = (x1 - 1) / theta          # Gamma(x1)/Gamma(x1-1) / theta
        g2 = theta / (x2 - 1)          # theta Gamma(x2-1)/Gamma(x2)
        g3 = (x2 - 1) / (x1 - 1)       # Gamma(x1-1)Gamma(x2) / (Gamma(x1)Gamma(x2-1))
    else:
        lg = math.lgamma
        g1 = math.exp(lg(x1) - lg(x1 - 1)) / theta
        g2 = theta * math.exp(lg(x2 - 1) - lg(x2))
        g3 = math.exp(lg(x1 - 1) + lg(x2) - lg(x1) - lg(x2 - 1))
    return [
        (jack_norm_at_ones(lam, n, theta) / jack_norm_at_ones(rho, n, theta), g1),
        (jack_norm_at_ones(rho, n + 1, theta) / jack_norm_at_ones(lam, n + 1, theta), g2),
        (kernel_eigenvalue(rho, n, theta) / kernel_eigenvalue(lam, n, theta), g3),
    ]


def gamma_ratio_identity(lam, i: int, n: int, theta):
    """``J_lam(1_n) c(lam_(i)) J_lam_(i)(1_{n+1}) / (J_lam_(i)(1_n) c(lam) J_lam(1_{n+1}))``; equals 1."""
    lam = as_partition(lam)
    rho = dict(lowered(lam)).get(i)
    if rho is None:
        raise DomainError(f"lam_({i}) of {tuple(lam)} is not a partition")
    num = (jack_norm_at_ones(lam, n, theta) * kernel_eigenvalue(rho, n, theta)
           * jack_norm_at_ones(rho, n + 1, theta))
    den = (jack_norm_at_ones(rho, n, theta) * kernel_eigenvalue(lam, n, theta)
           * jack_norm_at_ones(lam, n + 1, theta))
    return num / den


def eval_shift(lam, n: int, theta):
    """``eval(lam, n+1, theta) - eval(lam, n, theta)``; equals ``2 theta |lam|``."""
    return eval_eigenvalue(lam, n + 1, theta) - eval_eigenvalue(lam, n, theta)


# closed-form actions on Jack polynomials ------------------------------------

def closed_form_action(which: str, lam, n: int, theta) -> SymmetricPoly:
    """``B1``, ``B2``, ``B3`` or ``D`` applied to ``J_lam`` via the Jack expansions.

    * ``B1 J = J(1_n) sum_i binom_i J_(i) / J_(i)(1_n)``
    * ``B2 J = J(1_n) sum_i binom_i (lam_i - 1 + (n - i) theta) J_(i) / J_(i)(1_n)``
    * ``B3 J = |lam| J``
    * ``D J = eval(lam, n, theta) J``
    """
    lam = as_partition(lam)
    J = jack_expand(lam, n, theta)
    if which == "B3":
        return J * lam.weight
    if which == "D":
        return J * eval_eigenvalue(lam, n, theta)
    if which not in ("B1", "B2"):
        raise DomainError(f"unknown operator {which!r}")
    out = SymmetricPoly(n)
    if not lam:
        return out
    binoms = first_order_binomials(lam, theta)
    top = jack_norm_at_ones(lam, n, theta)
    for i, rho in lowered(lam):
        c = binoms[i] * top / jack_norm_at_ones(rho, n, theta)
        if which == "B2":
            c = c * (lam[i - 1] - 1 + (n - i) * theta)
        out = out + jack_expand(rho, n, theta) * c
    return out


def operator_action_residual(which: str, lam, n: int, theta) -> float:
    """Max coefficient gap between the symbolic and closed-form action on ``J_lam``."""
    lam = as_partition(lam)
    if len(lam) > n:
        raise DomainError(f"partition {tuple(lam)} longer than n={n}")
    symbolic = apply_operator(which, jack_expand(lam, n, theta), theta)
    return symbolic.max_abs_diff(closed_form_action(which, lam, n, theta))
