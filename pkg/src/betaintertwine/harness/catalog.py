"""Registry of checks: what each one verifies and how to run it on a grid.

Every check id maps to a :class:`CheckInfo` (printed by ``describe``) and
to a task builder producing picklable ``(function, kwargs)`` work items.
Work items return lists of :class:`ReportRecord`.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .. import diffusion, dixon_anderson, ensemble, operators
from ..comparison import Comparison
from ..jack.jack import jack_expand
from ..jack.partitions import lowered, partitions_of, partitions_up_to
from ..jack.polynomials import apply_operator, exact
from ..operators import ModelParams
from .config import RunConfig
from .report import ReportRecord

# offsets used by the falsification controls: 0.1 where the check is
# deterministic, larger where a Monte Carlo check needs the power
DETERMINISTIC_SHIFT = 0.1
STATISTICAL_SHIFT = 0.5


@dataclass(frozen=True)
class CheckInfo:
    suite: str
    summary: str
    formula: str
    tolerance: str
    control: str


CHECKS = {
    "generator.intertwining": CheckInfo(
        "generator",
        "Generators of the n- and (n+1)-particle systems intertwine through the kernel.",
        "K G_{n+1} = G_n K on span{J_kappa : kappa inside top}, with G_{n+1} at (d - 2) or\n"
        "(a - 1, b - 1), K = diag c(kappa, n, theta), and rows indexed by the input J_kappa.",
        "max-norm of the residual < 1e-10 (absolute).",
        "upper-level d or a shifted by +0.1; the residual must exceed the tolerance."),
    "generator.gamma_ratio": CheckInfo(
        "generator",
        "Ratio factors in the coefficient matching reduce to Gamma-function closed forms.",
        "J_lam(1_n)/J_lam(i)(1_n) = Gamma(x1)/(theta Gamma(x1 - 1)),\n"
        "J_lam(i)(1_{n+1})/J_lam(1_{n+1}) = theta Gamma(x2 - 1)/Gamma(x2),\n"
        "c(lam(i), n)/c(lam, n) = Gamma(x1 - 1) Gamma(x2)/(Gamma(x1) Gamma(x2 - 1)),\n"
        "x1 = (n + 1 - i) theta + lam_i, x2 = (n + 2 - i) theta + lam_i; their product is 1.",
        "exact equality with rational theta; relative error < 1e-12 in floating point.",
        "closed forms evaluated at theta + 0.1."),
    "generator.eval_shift": CheckInfo(
        "generator",
        "The D-eigenvalue grows by 2 theta |lam| when one particle is added.",
        "eval(lam, n, theta) = 2 B(lam') - 2 theta B(lam) + 2 theta (n - 1)|lam|;\n"
        "eval(lam, n + 1, theta) - eval(lam, n, theta) = 2 theta |lam|.",
        "exact with rational theta; < 1e-12 in floating point.",
        "right-hand side evaluated at theta + 0.1."),
    "generator.operator_action": CheckInfo(
        "generator",
        "Closed-form actions of B1, B2, B3, D on Jack polynomials match symbolic differentiation.",
        "B1 J = J(1_n) sum_i binom_i J_(i)/J_(i)(1_n);\n"
        "B2 J = J(1_n) sum_i binom_i (lam_i - 1 + (n - i) theta) J_(i)/J_(i)(1_n);\n"
        "B3 J = |lam| J;  D J = eval(lam, n, theta) J.",
        "max coefficient residual < 1e-9 for |lam| <= 4, n <= 4.",
        "closed forms evaluated at theta + 0.1."),
    "generator.dyson": CheckInfo(
        "generator",
        "The Dyson generator is the commutator of B1 and B2.",
        "[B1, B2] p = sum_i d_i^2 p + 2 theta sum_{i != j} (z_i - z_j)^{-1} d_i p for symmetric p.",
        "max coefficient residual < 1e-9 on Jack polynomials with |lam| <= 4, n <= 4.",
        "right-hand side at theta + 0.1."),
    "semigroup.intertwining": CheckInfo(
        "semigroup",
        "Transition semigroups intertwine on the truncated Jack basis.",
        "K expm(t G_{n+1}) = expm(t G_n) K (rows indexed by the input J_kappa).",
        "max-norm < 1e-9; Laguerre exponentials in exact rationals (nilpotent generator).",
        "upper-level d or a shifted by +0.1."),
    "kernel.eigenrelation": CheckInfo(
        "kernel",
        "Jack polynomials are eigenfunctions of the Dixon-Anderson kernel.",
        "int lam(x, y) J_lam(y) dy = c(lam, n, theta) J_lam(x), with\n"
        "c(lam, n, theta) = prod_{i<=n} ((n + 1 - i) theta)_{lam_i} / ((n + 2 - i) theta)_{lam_i}\n"
        "(rising factorials), computed by tensor Gauss-Jacobi quadrature.",
        "relative error < 1e-6 for n <= 3, |lam| <= 4, theta in {0.5, 1, 2}.",
        "kernel taken at theta + 0.1 while the target keeps theta."),
    "kernel.stochasticity": CheckInfo(
        "kernel",
        "The kernel is a probability density on the interlacing set.",
        "int lam(x, y) dy = 1.",
        "absolute error < 1e-6.",
        "not run in control mode (holds for every theta)."),
    "kernel.mc": CheckInfo(
        "kernel",
        "Monte Carlo version of the eigenrelation with the Gibbs sampler.",
        "mean of J_lam(y) over Gibbs draws y ~ lam(x, .) against c(lam, 4, theta) J_lam(x)\n"
        "for (lam, theta) = ((1), 1.5) and ((2), 0.5), x = (0.1, 0.5, 1.2, 2.0, 3.1).",
        "within 3 standard errors (from per-chain means).",
        "kernel sampled at theta + 0.5; only the J_(2) record can fail, since\n"
        "           c((1), n, theta) = n/(n + 1) does not depend on theta."),
    "step2.norm": CheckInfo(
        "sde",
        "The total mass of the Laguerre particle system is a squared Bessel process.",
        "E sum_i X_i(t) = sum_i x_i + beta (d n / 2 + n (n - 1)) t,\n"
        "since sum_{i != j} 2 X_i / (X_i - X_j) = n (n - 1).",
        "Monte Carlo mean within 3 standard errors at the configured path count.",
        "simulated with d + 0.5."),
    "sde.exact_moment": CheckInfo(
        "sde",
        "Simulated Jack moments agree with the matrix-exponential oracle.",
        "E_x J_lam(X(t)) = sum_nu expm(t G)[lam, nu] J_nu(x).",
        "Monte Carlo mean within 3 standard errors.",
        "simulated with d + 0.5 (Laguerre) or a + 0.5 (Jacobi)."),
    "sde.dt_bias": CheckInfo(
        "sde",
        "Scheme bias shrinks when the step is halved.",
        "runs at dt and dt/2 share Brownian increments; bias = MC mean - exact moment.",
        "|bias(dt/2)| < |bias(dt)| (observed = |bias(dt/2)|, bound = |bias(dt)|).",
        "not run in control mode."),
    "corollary.quadrature": CheckInfo(
        "ensemble",
        "Lowered Jacobi ensemble pushed through the kernel matches Beta moments (n = 1).",
        "E[y^k] = prod_{j<k} (theta a + j) / (theta (a + b) + j) for y ~ Beta(beta a/2, beta b/2),\n"
        "left side by nested Gauss-Jacobi quadrature.",
        "absolute error < 1e-6.",
        "upper-level a shifted by +0.1."),
    "corollary.mc": CheckInfo(
        "ensemble",
        "Two-estimator Monte Carlo check of the ensemble identity for n = 2.",
        "mean of p(y) with x ~ ensemble(n + 1, a - 1, b - 1), y ~ lam(x, .), against\n"
        "mean of p under ensemble(n, a, b); independent MCMC runs.",
        "difference within 3 combined standard errors (per-chain means).",
        "upper-level a shifted by +0.5."),
    "ensemble.stationarity": CheckInfo(
        "ensemble",
        "The Jacobi ensemble is stationary for the Jacobi particle system.",
        "E p(X(t)) = E p(X(0)) with X(0) drawn from the ensemble.",
        "paired difference within 3 standard errors (clustered by chain).",
        "diffusion run with a + 0.5."),
}


def describe_check(check_id: str) -> str:
    """Formula and tolerance policy for ``check_id``; ``KeyError`` if unknown."""
    info = CHECKS[check_id]
    return "\n".join([
        f"{check_id}  [suite: {info.suite}]",
        info.summary,
        "",
        "formula:",
        *("  " + line for line in info.formula.splitlines()),
        "",
        f"tolerance: {info.tolerance}",
        f"control:   {info.control}",
    ])


# helpers -----------------------------------------------------------------

def _record(suite, check, inputs, observed, target, tolerance, passed, control,
            stderr=None, **extra):
    return ReportRecord(suite=suite, check=check, inputs=inputs, observed=float(observed),
                        target=float(target), tolerance=float(tolerance), passed=bool(passed),
                        stderr=None if stderr is None else float(stderr), control=control,
                        extra=extra)


def _from_comparison(suite, check, inputs, c: Comparison, control):
    return _record(suite, check, inputs, c.estimate, c.target, c.tolerance, c.passed, control,
                   stderr=c.stderr, **{k: v for k, v in c.details.items() if k != "relative"})


def _family_params(grid):
    out = [("laguerre", {"d": d}) for d in grid.ds]
    out += [("jacobi", {"a": a, "b": b}) for a, b in grid.jacobi]
    return out


def _tops(weight, n):
    return [p for p in partitions_of(weight, max_length=n)] or [()]


# generator / semigroup ------------------------------------------------------

def run_generator_family(family, fparams, theta, n, max_weight, tol, control):
    params = ModelParams(n=n, theta=theta, **fparams)
    perturb = None
    if control:
        perturb = {"d": DETERMINISTIC_SHIFT} if family == "laguerre" else {"a": DETERMINISTIC_SHIFT}
    out = []
    for top in _tops(max_weight, n):
        r = operators.check_generator_intertwining(top, params, perturb=perturb)
        inputs = {"family": family, **fparams, "theta": theta, "n": n, "top": list(top)}
        out.append(_record("generator", "generator.intertwining", inputs, r, 0.0, tol, r < tol, control))
    return out


def run_semigroup_family(family, fparams, theta, n, max_weight, t, tol, control):
    params = ModelParams(n=n, theta=theta, **fparams)
    perturb = None
    if control:
        perturb = {"d": DETERMINISTIC_SHIFT} if family == "laguerre" else {"a": DETERMINISTIC_SHIFT}
    out = []
    for top in _tops(max_weight, n):
        r = operators.check_semigroup_intertwining(top, params, t, perturb=perturb)
        inputs = {"family": family, **fparams, "theta": theta, "n": n, "top": list(top), "t": t}
        out.append(_record("semigroup", "semigroup.intertwining", inputs, r, 0.0, tol, r < tol, control))
    return out


def _identity_theta(theta, rational):
    return exact(theta) if rational else float(theta)


def run_gamma_ratio(theta, n, max_weight, tol, rational, control):
    th = _identity_theta(theta, rational)
    ref = th + _identity_theta(DETERMINISTIC_SHIFT, rational) if control else th
    worst = 0.0
    for lam in partitions_up_to(max_weight, n):
        for i, _ in lowered(lam):
            vals = operators.gamma_ratio_factors(lam, i, n, th)
            closed = operators.gamma_ratio_factors(lam, i, n, ref)
            for (v, _), (_, g) in zip(vals, closed):
                worst = max(worst, abs(float((v - g) / g)))
            worst = max(worst, abs(float(operators.gamma_ratio_identity(lam, i, n, th) - 1)))
    bound = 0.0 if rational else tol
    inputs = {"theta": theta, "n": n, "max_weight": max_weight, "arithmetic": "exact" if rational else "float"}
    return [_record("generator", "generator.gamma_ratio", inputs, worst, 0.0, bound, worst <= bound, control)]


def run_eval_shift(theta, n, max_weight, tol, rational, control):
    th = _identity_theta(theta, rational)
    shift = _identity_theta(DETERMINISTIC_SHIFT, rational) if control else 0
    worst = 0.0
    for lam in partitions_up_to(max_weight, n):
        if not lam:
            continue
        diff = operators.eval_shift(lam, n, th) - 2 * (th + shift) * sum(lam)
        worst = max(worst, abs(float(diff)))
    bound = 0.0 if rational else tol
    inputs = {"theta": theta, "n": n, "max_weight": max_weight, "arithmetic": "exact" if rational else "float"}
    return [_record("generator", "generator.eval_shift", inputs, worst, 0.0, bound, worst <= bound, control)]


def run_operator_action(theta, n, max_weight, tol, control):
    ref = theta + DETERMINISTIC_SHIFT if control else theta
    worst = 0.0
    for lam in partitions_up_to(max_weight, n):
        if not lam:
            continue
        J = jack_expand(lam, n, theta)
        for which in ("B1", "B2", "B3", "D"):
            sym = apply_operator(which, J, theta)
            closed = operators.closed_form_action(which, lam, n, ref)
            worst = max(worst, sym.max_abs_diff(closed))
    inputs = {"theta": theta, "n": n, "max_weight": max_weight}
    return [_record("generator", "generator.operator_action", inputs, worst, 0.0, tol, worst < tol, control)]


def run_dyson(theta, n, max_weight, tol, control):
    ref = theta + DETERMINISTIC_SHIFT if control else theta
    worst = 0.0
    for lam in partitions_up_to(max_weight, n):
        if lam.weight < 2 and control:
            continue  # the Dyson operator annihilates degree <= 1 for every theta
        p = jack_expand(lam, n, theta)
        lhs = (apply_operator("B1", apply_operator("B2", p, theta), theta)
               - apply_operator("B2", apply_operator("B1", p, theta), theta))
        worst = max(worst, lhs.max_abs_diff(apply_operator("dyson", p, ref)))
    inputs = {"theta": theta, "n": n, "max_weight": max_weight}
    return [_record("generator", "generator.dyson", inputs, worst, 0.0, tol, worst < tol, control)]


# kernel -----------------------------------------------------------------------

KERNEL_POINTS = {1: (0.2, 0.9), 2: (0.2, 0.9, 1.7), 3: (0.1, 0.5, 1.2, 2.0)}
KERNEL_MC_POINT = (0.1, 0.5, 1.2, 2.0, 3.1)


def run_kernel_eigenrelation(theta, n, max_weight, tol, control):
    x = KERNEL_POINTS[n]
    shift = DETERMINISTIC_SHIFT if control else 0.0
    out = []
    for lam in partitions_up_to(max_weight, n):
        if control and not lam:
            continue  # constants are fixed by every kernel
        r = dixon_anderson.check_kernel_eigenrelation(lam, x, theta, tol=min(1e-10, tol), shift=shift)
        inputs = {"theta": theta, "n": n, "lam": list(lam), "x": list(x)}
        out.append(_record("kernel", "kernel.eigenrelation", inputs, r.error, 0.0, tol, r.error < tol,
                           control, estimate=r.estimate, target_value=r.target))
    return out


def run_kernel_stochasticity(theta, n, tol, control):
    x = KERNEL_POINTS[n]
    val = dixon_anderson.da_integrate(x, lambda Y: np.ones(Y.shape[0]), theta, tol=min(1e-10, tol))
    inputs = {"theta": theta, "n": n, "x": list(x)}
    return [_record("kernel", "kernel.stochasticity", inputs, val, 1.0, tol, abs(val - 1) < tol, control)]


KERNEL_MC_CASES = (((1,), 1.5), ((2,), 0.5))


def run_kernel_mc(samples, nse, seed, control):
    shift = STATISTICAL_SHIFT if control else 0.0
    out = []
    for k, (lam, theta) in enumerate(KERNEL_MC_CASES):
        r = dixon_anderson.check_kernel_eigenrelation(lam, KERNEL_MC_POINT, theta, mode="mc",
                                                      samples=samples, shift=shift, rng=[seed, k])
        se = r.stderr * abs(r.target)
        inputs = {"theta": theta, "lam": list(lam), "x": list(KERNEL_MC_POINT), "samples": samples}
        out.append(_record("kernel", "kernel.mc", inputs, r.estimate, r.target, nse,
                           abs(r.estimate - r.target) <= nse * se, control, stderr=se))
    return out


# sde ------------------------------------------------------------------------

NORM_STARTS = {1: (0.5,), 2: (0.5, 1.5), 3: (0.3, 1.0, 2.0)}
NORM_PAIRS = ((1.0, 2.0), (2.0, 3.0))   # (beta, d)
MOMENT_CASES = (
    ("laguerre", (0.5, 1.5), {"theta": 0.75, "d": 3.0}, 0.5),
    ("jacobi", (0.3, 0.6), {"theta": 1.0, "a": 2.5, "b": 1.5}, 0.5),
)
BIAS_CASES = (
    ("laguerre", (0.2, 0.8), {"theta": 0.75, "d": 3.0}, 0.5),
    ("jacobi", (0.3, 0.6), {"theta": 1.0, "a": 2.5, "b": 1.5}, 1.0),
)


def run_norm_process(n, beta, d, t, paths, dt, nse, seed, control):
    params = ModelParams(n=n, theta=beta / 2, d=d)
    cfg = diffusion.SimConfig(dt=dt, paths=paths, seed=seed)
    shift = {"d": STATISTICAL_SHIFT} if control else None
    c = diffusion.check_norm_process(params, NORM_STARTS[n], t, cfg, nse, shift=shift)
    inputs = {"n": n, "beta": beta, "d": d, "t": t, "x0": list(NORM_STARTS[n]), "paths": paths, "dt": dt}
    return [_from_comparison("sde", "step2.norm", inputs, c, control)]


def run_exact_moment(family, x0, pkw, t, lam, paths, dt, nse, seed, control):
    params = ModelParams(n=len(x0), **pkw)
    cfg = diffusion.SimConfig(dt=dt, paths=paths, seed=seed)
    shift = None
    if control:
        shift = {"d": STATISTICAL_SHIFT} if family == "laguerre" else {"a": STATISTICAL_SHIFT}
    c = diffusion.check_exact_moment(family, x0, lam, params, t, cfg, nse, shift=shift)
    inputs = {"family": family, **pkw, "x0": list(x0), "t": t, "lam": list(lam), "paths": paths, "dt": dt}
    return [_from_comparison("sde", "sde.exact_moment", inputs, c, control)]


def run_dt_bias(family, x0, pkw, t, lam, paths, dt, seed, control):
    params = ModelParams(n=len(x0), **pkw)
    r = diffusion.coupled_bias(family, x0, lam, params, t, dt, paths=paths, seed=seed,
                               config=diffusion.SimConfig(gap_safety=None))
    inputs = {"family": family, **pkw, "x0": list(x0), "t": t, "lam": list(lam), "paths": paths,
              "dt": dt, "scheme": "fixed-step"}
    return [_record("sde", "sde.dt_bias", inputs, abs(r.bias_fine), 0.0, abs(r.bias_coarse),
                    r.shrinks, control, bias_coarse=r.bias_coarse, bias_fine=r.bias_fine,
                    se_coarse=r.se_coarse, se_fine=r.se_fine, se_difference=r.se_difference)]


# ensemble -------------------------------------------------------------------

COROLLARY_QUADRATURE = ((2.0, 2.0, 2.0), (3.0, 2.5, 2.0), (2.5, 1.5, 1.0), (1.5, 4.0, 3.0))
COROLLARY_MC = (2, 2.5, 1.5, 1.0)
STATIONARITY = (((1, 2.0, 2.0, 2.0), (0.1, 1.0, 5.0)), ((2, 2.0, 2.0, 2.0), (0.1, 1.0)))


def run_corollary_quadrature(a, b, beta, nodes, tol, control):
    spec = ensemble.EnsembleSpec(1, a, b, beta)
    upper = spec.lowered()
    if control:
        upper = ensemble.EnsembleSpec(2, upper.a + DETERMINISTIC_SHIFT, upper.b, beta)
    out = []
    for k in range(1, 5):
        left = ensemble.lowered_kernel_moment(upper, lambda Y, k=k: Y[:, 0] ** k, nodes)
        target = ensemble.beta_moment(k, spec.theta * a, spec.theta * b)
        inputs = {"n": 1, "a": a, "b": b, "beta": beta, "moment": k, "nodes": nodes}
        out.append(_record("ensemble", "corollary.quadrature", inputs, left, target, tol,
                           abs(left - target) < tol, control))
    return out


def run_corollary_mc(samples, nse, seed, control):
    n, a, b, beta = COROLLARY_MC
    spec = ensemble.EnsembleSpec(n, a, b, beta)
    shift = {"a": STATISTICAL_SHIFT} if control else None
    res = ensemble.check_corollary(spec, [(1,), (2,)], mode="mc", samples=samples, nse=nse,
                                   shift=shift, rng=seed)
    inputs = {"n": n, "a": a, "b": b, "beta": beta, "samples": samples}
    return [_from_comparison("ensemble", "corollary.mc", {**inputs, "poly": c.label}, c, control)
            for c in res]


def run_stationarity(spec_args, times, paths, dt, nse, seed, control):
    spec = ensemble.EnsembleSpec(*spec_args)
    cfg = diffusion.SimConfig(dt=dt, paths=paths, seed=seed)
    shift = {"a": STATISTICAL_SHIFT} if control else None
    res = ensemble.check_sde_stationarity(spec, times, cfg, nse=nse, shift=shift, rng=seed)
    n, a, b, beta = spec_args
    return [_from_comparison("ensemble", "ensemble.stationarity",
                             {"n": n, "a": a, "b": b, "beta": beta, "poly": c.label, "paths": paths},
                             c, control) for c in res]


# task assembly ----------------------------------------------------------------

def build_tasks(config: RunConfig):
    """Ordered list of ``(function, kwargs)`` for the configured suites."""
    g, bud, tol = config.grid, config.budget, config.tolerances
    ctl = config.control
    seeds = iter(np.random.SeedSequence(config.seed).generate_state(4096, dtype=np.uint64).tolist())
    tasks = []
    suites = config.suites()
    if "generator" in suites:
        for family, fp in _family_params(g):
            for th in g.thetas:
                for n in g.ns:
                    tasks.append((run_generator_family, dict(family=family, fparams=fp, theta=th, n=n,
                                                             max_weight=g.max_weight, tol=tol.generator,
                                                             control=ctl)))
        for th in g.identity_thetas:
            for n in range(1, g.identity_max_n + 1):
                for rational in (False, True):
                    kw = dict(theta=th, n=n, max_weight=g.identity_max_weight,
                              tol=tol.identities, rational=rational, control=ctl)
                    tasks.append((run_gamma_ratio, kw))
                    tasks.append((run_eval_shift, kw))
        for th in g.identity_thetas:
            for n in range(1, g.operator_max_n + 1):
                kw = dict(theta=th, n=n, max_weight=g.operator_max_weight, tol=tol.operator, control=ctl)
                tasks.append((run_operator_action, kw))
                tasks.append((run_dyson, kw))
    if "semigroup" in suites:
        for family, fp in _family_params(g):
            for th in g.thetas:
                for n in g.ns:
                    for t in g.times:
                        tasks.append((run_semigroup_family, dict(
                            family=family, fparams=fp, theta=th, n=n, max_weight=g.max_weight,
                            t=t, tol=tol.semigroup, control=ctl)))
    if "kernel" in suites:
        for th in g.kernel_thetas:
            for n in range(1, g.kernel_max_n + 1):
                tasks.append((run_kernel_eigenrelation, dict(theta=th, n=n, max_weight=g.kernel_max_weight,
                                                             tol=tol.kernel, control=ctl)))
                if not ctl:
                    tasks.append((run_kernel_stochasticity, dict(theta=th, n=n, tol=tol.kernel, control=ctl)))
        tasks.append((run_kernel_mc, dict(samples=bud.kernel_samples, nse=tol.nse, seed=next(seeds),
                                          control=ctl)))
    if "sde" in suites:
        for n in (1, 2, 3):
            for beta, d in NORM_PAIRS:
                for t in (0.5, 1.0):
                    tasks.append((run_norm_process, dict(n=n, beta=beta, d=d, t=t, paths=bud.paths,
                                                         dt=bud.dt, nse=tol.nse, seed=next(seeds),
                                                         control=ctl)))
        for family, x0, pkw, t in MOMENT_CASES:
            for lam in ((1,), (2,)):
                tasks.append((run_exact_moment, dict(family=family, x0=x0, pkw=pkw, t=t, lam=lam,
                                                     paths=bud.paths, dt=bud.dt, nse=tol.nse,
                                                     seed=next(seeds), control=ctl)))
        if not ctl:
            for family, x0, pkw, t in BIAS_CASES:
                for lam in ((1,), (2,)):
                    tasks.append((run_dt_bias, dict(family=family, x0=x0, pkw=pkw, t=t, lam=lam,
                                                    paths=bud.bias_paths, dt=bud.bias_dt,
                                                    seed=next(seeds), control=ctl)))
    if "ensemble" in suites:
        for a, b, beta in COROLLARY_QUADRATURE:
            tasks.append((run_corollary_quadrature, dict(a=a, b=b, beta=beta, nodes=bud.nodes,
                                                         tol=tol.corollary, control=ctl)))
        tasks.append((run_corollary_mc, dict(samples=bud.samples, nse=tol.nse, seed=next(seeds),
                                             control=ctl)))
        for spec_args, times in STATIONARITY:
            tasks.append((run_stationarity, dict(spec_args=spec_args, times=times, paths=bud.paths,
                                                 dt=bud.dt, nse=tol.nse, seed=next(seeds), control=ctl)))
    return tasks


TASK_CHECKS = {
    run_generator_family: "generator.intertwining",
    run_semigroup_family: "semigroup.intertwining",
    run_gamma_ratio: "generator.gamma_ratio",
    run_eval_shift: "generator.eval_shift",
    run_operator_action: "generator.operator_action",
    run_dyson: "generator.dyson",
    run_kernel_eigenrelation: "kernel.eigenrelation",
    run_kernel_stochasticity: "kernel.stochasticity",
    run_kernel_mc: "kernel.mc",
    run_norm_process: "step2.norm",
    run_exact_moment: "sde.exact_moment",
    run_dt_bias: "sde.dt_bias",
    run_corollary_quadrature: "corollary.quadrature",
    run_corollary_mc: "corollary.mc",
    run_stationarity: "ensemble.stationarity",
}
