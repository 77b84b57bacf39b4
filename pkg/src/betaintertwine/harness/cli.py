"""Command-line entry point: verification suites, samplers and check descriptions.

Exit codes: 0 all checks pass, 2 a check failed, 3 configuration error
(no report written), 4 numerical failure (NaN, collapsed quadrature,
failed integration).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .. import __version__
from .._validation import BetaIntertwineError, NumericalFailure
from ..diffusion import WORKERS_ENV, SimConfig, simulate, worker_count
from ..dixon_anderson import DixonAndersonGibbs, da_dirichlet_sample, write_sample_dump
from ..ensemble import EnsembleSpec, ensemble_mcmc
from ..operators import ModelParams
from .catalog import CHECKS, TASK_CHECKS, build_tasks, describe_check
from .config import SUITES, ConfigError, RunConfig, apply_overrides, load_config
from .report import ReportRecord, summarize, write_report

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3, 4
DEFAULT_REPORT = "report.json"


def _run_task(task):
    func, kwargs = task
    t0 = time.perf_counter()
    try:
        records = func(**kwargs)
        error = None
    except NumericalFailure as exc:
        records, error = [], f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    for r in records:
        r.wall_time = elapsed / max(len(records), 1)
    return records, error, TASK_CHECKS[func], kwargs


def _init_worker():
    # checks inside a pool worker must not start pools of their own
    os.environ[WORKERS_ENV] = "1"


def run_suite(config: RunConfig, out: str | None = None, log=None):
    """Run the configured checks and write the report.

    Returns ``(exit_code, records)``. Tasks run in a process pool when the
    worker count (environment variable ``BETAINTERTWINE_WORKERS``) exceeds
    one; records are assembled in task order, so the report does not
    depend on the pool size.
    """
    config.validate()
    tasks = build_tasks(config)
    workers = min(worker_count(), len(tasks)) if tasks else 1
    if workers > 1:
        with ProcessPoolExecutor(workers, initializer=_init_worker) as ex:
            results = list(ex.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]
    records, numerical = [], False
    for recs, error, check, kwargs in results:
        if error is not None:
            numerical = True
            records.append(ReportRecord(suite=CHECKS[check].suite, check=check, inputs=_plain(kwargs),
                                        observed=math.nan, target=0.0, tolerance=0.0, passed=False,
                                        control=config.control, extra={"error": error}))
            continue
        for r in recs:
            if not (math.isfinite(r.observed) and math.isfinite(r.target)):
                numerical = True
                r.passed = False
            records.append(r)
    summary = summarize(records, config, __version__)
    path = out or config.output or DEFAULT_REPORT
    write_report(path, records, summary)
    if log is not None:
        for line in _summary_lines(records, summary, path):
            print(line, file=log)
    if numerical:
        return EXIT_NUMERICAL, records
    return (EXIT_OK if summary["failed"] == 0 else EXIT_FAIL), records


def _plain(kwargs):
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in kwargs.items()}


def _summary_lines(records, summary, path):
    per_check = {}
    for r in records:
        ok, total = per_check.get(r.check, (0, 0))
        per_check[r.check] = (ok + r.passed, total + 1)
    for check, (ok, total) in per_check.items():
        state = "PASS" if ok == total else "FAIL"
        yield f"{state}  {check:26s} {ok}/{total}"
    yield f"{summary['passed']}/{summary['total']} records passed; report written to {path}"


# argument parsing -----------------------------------------------------------

def _floats(text):
    try:
        return tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="root seed (64-bit unsigned)")
    p.add_argument("--out", default=None, help="output path (JSON report or CSV dump)")


def build_parser():
    parser = argparse.ArgumentParser(prog="betaintertwine",
                                     description="Verification harness for interlacing beta particle systems.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    _common(v)
    v.add_argument("--config", default=None, help="INI file with [run], [grid], [budget], [tolerances]")
    v.add_argument("--paths", type=int, default=None, help="Monte Carlo paths for SDE checks")
    v.add_argument("--grid", action="append", default=[], metavar="KEY=VALUE",
                   help="override, e.g. thetas=0.5,1 or budget.samples=20000 (repeatable)")
    v.add_argument("--control", action="store_true",
                   help="run the falsification controls (shifted parameters; checks should fail)")

    s = sub.add_parser("simulate", help="simulate a particle system and dump endpoints as CSV")
    s.add_argument("--family", choices=("laguerre", "jacobi"), default="laguerre")
    s.add_argument("--x0", type=_floats, required=True, help="ordered starting point, e.g. 0.5,1.5")
    s.add_argument("--beta", type=float, default=2.0)
    s.add_argument("--d", type=float, default=None)
    s.add_argument("--a", type=float, default=None)
    s.add_argument("--b", type=float, default=None)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--dt", type=float, default=1e-2)
    s.add_argument("--paths", type=int, default=10_000)
    _common(s)

    k = sub.add_parser("sample-kernel", help="draw from the Dixon-Anderson kernel at x")
    k.add_argument("--x", type=_floats, required=True, help="strictly increasing x_1 < ... < x_{n+1}")
    k.add_argument("--beta", type=float, default=2.0)
    k.add_argument("--size", type=int, default=10_000)
    k.add_argument("--sampler", choices=("gibbs", "dirichlet"), default="gibbs")
    _common(k)

    e = sub.add_parser("sample-ensemble", help="MCMC draws from the Jacobi ensemble")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--a", type=float, required=True)
    e.add_argument("--b", type=float, required=True)
    e.add_argument("--beta", type=float, default=2.0)
    e.add_argument("--size", type=int, default=10_000)
    _common(e)

    d = sub.add_parser("describe", help="formula and tolerance policy of a check")
    d.add_argument("check", nargs="?", default=None, help="check id; omit to list all ids")
    return parser


def _config_from_args(args) -> RunConfig:
    config = load_config(args.config)
    config = replace(config, suite=args.suite, control=args.control or config.control)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.out is not None:
        config = replace(config, output=args.out)
    if args.paths is not None:
        config = replace(config, budget=replace(config.budget, paths=args.paths))
    return apply_overrides(config, args.grid).validate()


def _cmd_verify(args):
    try:
        config = _config_from_args(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, _ = run_suite(config, log=sys.stdout)
    return code


def _write_csv(path, header, rows, comment):
    with open(path, "w") as fh:
        fh.write(f"# {comment}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _cmd_simulate(args):
    seed = 0 if args.seed is None else args.seed
    if args.family == "laguerre":
        params = ModelParams(n=len(args.x0), theta=args.beta / 2, d=2.0 if args.d is None else args.d)
    else:
        params = ModelParams(n=len(args.x0), theta=args.beta / 2,
                             a=1.0 if args.a is None else args.a, b=1.0 if args.b is None else args.b)
    X = simulate(args.family, args.x0, params, args.t, SimConfig(dt=args.dt, paths=args.paths, seed=seed))
    out = args.out or "endpoints.csv"
    _write_csv(out, [f"x{i + 1}" for i in range(X.shape[1])], X,
               f"family={args.family} beta={args.beta!r} t={args.t!r} dt={args.dt!r} seed={seed}")
    print(f"{X.shape[0]} endpoints written to {out}; mean = {np.round(X.mean(axis=0), 6).tolist()}")
    return EXIT_OK


def _cmd_sample_kernel(args):
    seed = 0 if args.seed is None else args.seed
    theta = args.beta / 2
    if args.sampler == "gibbs":
        Y, _ = DixonAndersonGibbs(args.x, theta, rng=seed).sample(args.size)
    else:
        Y = da_dirichlet_sample(args.x, theta, args.size, rng=seed)
    out = args.out or "kernel_samples.csv"
    write_sample_dump(out, args.x, Y, theta, seed)
    print(f"{Y.shape[0]} draws written to {out}; mean = {np.round(Y.mean(axis=0), 6).tolist()}")
    return EXIT_OK


def _cmd_sample_ensemble(args):
    seed = 0 if args.seed is None else args.seed
    spec = EnsembleSpec(args.n, args.a, args.b, args.beta)
    draw = ensemble_mcmc(spec, args.size, seed)
    out = args.out or "ensemble_samples.csv"
    _write_csv(out, [f"x{i + 1}" for i in range(args.n)] + ["chain"],
               np.column_stack([draw.samples, draw.chain_id]),
               f"n={args.n} a={args.a!r} b={args.b!r} beta={args.beta!r} seed={seed} "
               f"acceptance={draw.acceptance:.3f}")
    print(f"{draw.samples.shape[0]} draws written to {out}; acceptance = {draw.acceptance:.3f}")
    return EXIT_OK


def _cmd_describe(args):
    if args.check is None:
        for check, info in CHECKS.items():
            print(f"{check:26s} {info.summary}")
        return EXIT_OK
    try:
        print(describe_check(args.check))
    except KeyError:
        print(f"unknown check id {args.check!r}; known ids: {', '.join(CHECKS)}", file=sys.stderr)
        return 1
    return EXIT_OK


COMMANDS = {
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "sample-kernel": _cmd_sample_kernel,
    "sample-ensemble": _cmd_sample_ensemble,
    "describe": _cmd_describe,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BetaIntertwineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
