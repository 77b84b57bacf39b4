"""Configuration, report format, exit codes and the command-line interface."""

import json
import math

import numpy as np
import pytest

from betaintertwine import NumericalFailure
from betaintertwine.harness import catalog, cli
from betaintertwine.harness.catalog import CHECKS, TASK_CHECKS, build_tasks, describe_check
from betaintertwine.harness.config import SUITES, ConfigError, RunConfig, apply_overrides, load_config
from betaintertwine.harness.report import ReportRecord, render

SMALL = ["--grid", "thetas=1", "--grid", "ds=3", "--grid", "jacobi=2:2", "--grid", "max_weight=2"]


def _verify(tmp_path, suite, *extra, name="report.json"):
    out = tmp_path / name
    code = cli.main(["verify", suite, "--out", str(out), *extra])
    return code, (json.loads(out.read_text()) if out.exists() else None)


# configuration --------------------------------------------------------------

def test_overrides_and_validation():
    c = apply_overrides(RunConfig(), ["thetas=0.5,1", "budget.paths=500", "tolerances.nse=4",
                                      "jacobi=1:1 2.5:1.5"])
    assert c.grid.thetas == (0.5, 1.0)
    assert c.budget.paths == 500 and c.tolerances.nse == 4.0
    assert c.grid.jacobi == ((1.0, 1.0), (2.5, 1.5))
    for bad in (["thetas"], ["nope.x=1"], ["grid.colour=3"], ["budget.paths=many"], ["jacobi=1"]):
        with pytest.raises(ConfigError):
            apply_overrides(RunConfig(), bad)
    for bad in (["thetas=0.25"], ["ds=1"], ["budget.paths=1"], ["kernel_max_n=4"]):
        with pytest.raises(ConfigError):
            apply_overrides(RunConfig(), bad).validate()
    with pytest.raises(ConfigError):
        RunConfig(suite="everything").validate()


def test_load_ini(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[run]\nsuite = kernel\nseed = 7\n\n[grid]\nthetas = 1, 2\n\n[budget]\nsamples = 1e4\n")
    c = load_config(path)
    assert (c.suite, c.seed, c.grid.thetas, c.budget.samples) == ("kernel", 7, (1.0, 2.0), 10_000)
    for text in ("[run]\ncolour = red\n", "[mystery]\nx = 1\n", "not an ini"):
        path.write_text(text)
        with pytest.raises(ConfigError):
            load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")


# catalog ------------------------------------------------------------------------

def test_every_task_has_a_described_check():
    for suite in SUITES:
        for control in (False, True):
            for func, _ in build_tasks(RunConfig(suite=suite, control=control)):
                assert TASK_CHECKS[func] in CHECKS
    for check, info in CHECKS.items():
        text = describe_check(check)
        assert check in text and info.summary in text
    with pytest.raises(KeyError):
        describe_check("nope")


def test_task_seeds_depend_on_root_seed():
    def seeds(seed):
        return [kw["seed"] for _, kw in build_tasks(RunConfig(suite="sde", seed=seed)) if "seed" in kw]

    assert seeds(1) == seeds(1)
    assert seeds(1) != seeds(2)
    assert len(set(seeds(1))) == len(seeds(1))


def test_record_consistency_rule():
    r = ReportRecord("sde", "sde.exact_moment", {}, 1.0, 1.2, 3.0, True, stderr=0.1)
    assert r.consistent()
    r.passed = False
    assert not r.consistent()
    assert ReportRecord("generator", "generator.dyson", {}, math.nan, 0.0, 1.0, False).consistent()
    assert "wall_time" not in r.to_dict(timing=False)


# verify ---------------------------------------------------------------------------

def test_verify_generator_passes(tmp_path, capsys):
    code, report = _verify(tmp_path, "generator", *SMALL)
    assert code == 0
    assert set(report) == {"records", "summary"}
    assert report["summary"]["failed"] == 0 and report["summary"]["total"] == len(report["records"])
    for d in report["records"]:
        d = dict(d)
        assert ReportRecord(**d).consistent()
        assert d["suite"] == "generator" and d["check"] in CHECKS
    assert "PASS" in capsys.readouterr().out


def test_verify_control_fails(tmp_path):
    code, report = _verify(tmp_path, "generator", *SMALL, "--control")
    assert code == 2
    assert report["summary"]["control"] is True and report["summary"]["failed"] > 0


def test_config_error_writes_no_report(tmp_path, capsys):
    code, report = _verify(tmp_path, "generator", "--grid", "thetas=0.1")
    assert code == 3 and report is None
    assert "configuration error" in capsys.readouterr().err


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    def broken(**_):
        raise NumericalFailure("quadrature collapsed")

    def nan_record(**_):
        return [ReportRecord("kernel", "kernel.mc", {}, math.nan, 1.0, 3.0, True, stderr=0.1)]

    for func in (broken, nan_record):
        monkeypatch.setitem(TASK_CHECKS, func, "kernel.mc")
        monkeypatch.setattr(cli, "build_tasks", lambda config, f=func: [(f, {})])
        code, records = cli.run_suite(RunConfig(suite="kernel"), out=str(tmp_path / "r.json"))
        assert code == 4
        assert len(records) == 1 and not records[0].passed and records[0].check == "kernel.mc"
        assert json.loads((tmp_path / "r.json").read_text())["summary"]["failed"] == 1


def test_reports_are_deterministic_and_worker_independent(tmp_path, monkeypatch):
    config = apply_overrides(RunConfig(suite="ensemble", seed=5),
                             ["budget.paths=400", "budget.samples=400", "budget.nodes=32"])
    _, a = cli.run_suite(config, out=str(tmp_path / "a.json"))
    _, b = cli.run_suite(config, out=str(tmp_path / "b.json"))
    monkeypatch.setenv("BETAINTERTWINE_WORKERS", "2")
    _, c = cli.run_suite(config, out=str(tmp_path / "c.json"))
    summary = {"seed": 5}
    texts = [render(r, summary, timing=False) for r in (a, b, c)]
    assert texts[0] == texts[1] == texts[2]


# other subcommands --------------------------------------------------------------

def test_simulate_command(tmp_path, capsys):
    out = tmp_path / "end.csv"
    assert cli.main(["simulate", "--family", "jacobi", "--x0", "0.2,0.6", "--a", "2", "--b", "2",
                     "--t", "0.1", "--paths", "50", "--seed", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# family=jacobi") and lines[1] == "x1,x2" and len(lines) == 52
    X = np.loadtxt(out, delimiter=",", skiprows=2)
    assert np.all((X >= 0) & (X <= 1)) and np.all(np.diff(X, axis=1) >= 0)
    assert "50 endpoints" in capsys.readouterr().out


def test_simulate_rejects_bad_start(capsys):
    assert cli.main(["simulate", "--x0", "1.5,0.5", "--paths", "5", "--out", "/dev/null"]) == 3
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("sampler", ["gibbs", "dirichlet"])
def test_sample_kernel_command(tmp_path, sampler):
    out = tmp_path / "k.csv"
    assert cli.main(["sample-kernel", "--x", "0,1,2", "--beta", "1", "--size", "40",
                     "--sampler", sampler, "--out", str(out)]) == 0
    data = np.loadtxt(out, delimiter=",", skiprows=2)
    assert data.shape == (40, 5)
    assert np.all(data[:, 3] <= 1) and np.all(data[:, 4] >= 1)


def test_sample_ensemble_command(tmp_path):
    out = tmp_path / "e.csv"
    assert cli.main(["sample-ensemble", "--n", "2", "--a", "2", "--b", "2", "--size", "100",
                     "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert "acceptance=" in lines[0] and lines[1] == "x1,x2,chain"
    assert len(lines) == 102


def test_describe_command(capsys):
    assert cli.main(["describe"]) == 0
    listed = capsys.readouterr().out
    assert all(check in listed for check in CHECKS)
    assert cli.main(["describe", "sde.dt_bias"]) == 0
    assert "sde.dt_bias" in capsys.readouterr().out
    assert cli.main(["describe", "nope"]) == 1


def test_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["verify", "everything"])
    assert info.value.code == 2


def test_catalog_exposes_acceptance_checks():
    # the deterministic and statistical families named in the acceptance suite
    for check in ("generator.intertwining", "semigroup.intertwining", "kernel.eigenrelation",
                  "sde.exact_moment", "step2.norm", "corollary.quadrature", "corollary.mc",
                  "ensemble.stationarity"):
        assert check in catalog.CHECKS
