import csv
import hashlib
import json
import os
import stat

import numpy as np
import pytest

import csswaves.gauge
from csswaves.checks import run_checks
from csswaves.cli import (
    EXIT_CONFIG,
    EXIT_CONVERGENCE,
    EXIT_DEGENERATE,
    EXIT_OK,
    EXIT_VERIFY,
    HISTORY_COLUMNS,
    RunOutput,
    main,
)
from csswaves.functional import gradient_field, make_problem
from csswaves.grid import Grid, Kernel, sample_kernel
from csswaves.model import make_model
from csswaves.operator import PotentialSpec

from .conftest import WELL

BASE = "domain.L = 12.0\ndomain.N = 64\n"


def write_cfg(tmp_path, body, name="run.cfg"):
    path = tmp_path / name
    path.write_text(BASE + body)
    return str(path)


def run(tmp_path, command, body, out="out", extra=()):
    cfg = write_cfg(tmp_path, body)
    code = main([command, "--config", cfg, "--out", str(tmp_path / out), *extra])
    return code, tmp_path / out


def visible(directory):
    return sorted(n for n in os.listdir(directory) if not n.startswith("."))


# ------------------------------------------------------------------ verify


def test_verify_passes(tmp_path, capsys):
    code, out = run(tmp_path, "verify", "potential.kind = gaussian_well\npotential.c = 8.0\n")
    assert code == EXIT_OK
    report = json.loads((out / "verify.json").read_text())
    assert report["passed"] and len(report["checks"]) == 16
    printed = capsys.readouterr().out.splitlines()
    assert len(printed) == 16 and all(line.startswith("ok") for line in printed)


def _flipped(kind, grid, corrected=True):
    k = sample_kernel(kind, grid, corrected)
    return Kernel(k.kind, k.grid, k.corrected, -k.samples, -k.spectrum)


def test_verify_detects_sign_fault(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(csswaves.gauge, "sample_kernel", _flipped)
    code, out = run(tmp_path, "verify", "")
    assert code == EXIT_VERIFY
    checks = {c["name"]: c for c in json.loads((out / "verify.json").read_text())["checks"]}
    assert not checks["curl_law"]["passed"]
    # |A| is blind to the sign, the curl law is not
    assert checks["radial_gauge_value"]["passed"]
    assert "FAIL curl_law" in capsys.readouterr().out


def test_run_checks_report_shape():
    problem = make_problem(Grid(12.0, 64), WELL, make_model())
    report = run_checks(problem, np.random.default_rng(0), samples=3)
    d = report.to_dict()
    assert d["N"] == 64 and d["passed"]
    assert all(set(c) == {"name", "defect", "tolerance", "passed"} for c in d["checks"])


# ------------------------------------------------------------------ spectrum


def test_spectrum(tmp_path, capsys):
    code, out = run(tmp_path, "spectrum", "potential.kind = gaussian_well\npotential.c = 8.0\n")
    assert code == EXIT_OK
    data = json.loads((out / "spectrum.json").read_text())
    assert data["ell"] == 1 and data["lambdas"][0] < 0 < data["lambdas"][1]
    assert data["gap"] == pytest.approx(min(abs(x) for x in data["lambdas"]))
    assert json.loads(capsys.readouterr().out) == data


def test_degenerate_exit(tmp_path, capsys):
    h = 24.0 / 64
    mu1 = 4.0 / h**2 * np.sin(np.pi / 128) ** 2
    code, _ = run(tmp_path, "spectrum", f"potential.kind = constant\npotential.omega = {float(-2 * mu1)!r}\n")
    assert code == EXIT_DEGENERATE
    assert "degenerate" in capsys.readouterr().err


def test_capacity_exit(tmp_path, capsys):
    code, _ = run(tmp_path, "spectrum", "potential.omega = -1000.0\nspectrum.k_max = 2\n")
    assert code == EXIT_CONFIG
    assert "k_max" in capsys.readouterr().err


# ------------------------------------------------------------------ solve


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("solve")
    code, out = run(tmp, "solve", "potential.kind = constant\nseed = 3\n")
    return code, out


def test_solve_outputs(solved):
    code, out = solved
    assert code == EXIT_OK
    assert visible(out) == ["history.csv", "manifest.json", "result.json", "u_star.f64raw"]
    result = json.loads((out / "result.json").read_text())
    assert result["N"] == 64 and result["nontrivial"] and result["residual"] <= 1e-6
    assert result["ell"] == 0


def test_raw_field_round_trip(solved):
    _, out = solved
    u = np.fromfile(out / "u_star.f64raw", dtype="<f8").reshape(64, 64)
    problem = make_problem(Grid(12.0, 64), PotentialSpec("constant"), make_model())
    assert gradient_field(problem, u).residual <= 1e-6


def test_history_csv(solved):
    _, out = solved
    raw = (out / "history.csv").read_bytes()
    assert raw.count(b"\r\n") == raw.count(b"\n")
    rows = list(csv.reader(raw.decode().splitlines()))
    assert tuple(rows[0]) == HISTORY_COLUMNS
    assert int(rows[1][0]) == 0
    assert float(rows[-1][2]) <= 1e-6


def test_manifest_checksums(solved):
    _, out = solved
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "solve"
    for name, digest in manifest["files"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    assert set(manifest["timings"]) == {"setup", "solve"}


def test_file_modes(solved):
    _, out = solved
    for name in visible(out):
        assert stat.S_IMODE(os.stat(out / name).st_mode) == 0o644


def test_mountain_pass_solve(tmp_path):
    code, out = run(tmp_path, "solve", "solver.method = mountain_pass\n")
    assert code == EXIT_OK
    assert json.loads((out / "result.json").read_text())["method"] == "mountain_pass"


def test_growth_failure_exit(tmp_path, capsys):
    body = "nonlinearity.p = 6.0\nsolver.method = mountain_pass\nsolver.seed_amplitude = 1.0\nsolver.seed_width = 3.0\n"
    code, out = run(tmp_path, "solve", body)
    assert code == EXIT_CONVERGENCE
    err = json.loads((out / "error.json").read_text())
    assert err["error"] == "growth" and "t^6" in err["condition"] and err["witness"]
    assert "growth" in capsys.readouterr().err


def test_convergence_failure_keeps_history(tmp_path):
    code, out = run(tmp_path, "solve", "solver.max_iters = 1\nsolver.grad_tol = 1e-12\n")
    assert code == EXIT_CONVERGENCE
    assert json.loads((out / "error.json").read_text())["error"] == "convergence"
    assert len((out / "history.csv").read_text().splitlines()) >= 2


def test_formats_subset(tmp_path):
    code, out = run(tmp_path, "solve", "output.formats = json\n")
    assert code == EXIT_OK
    assert visible(out) == ["manifest.json", "result.json"]


def test_seed_override_changes_hash(tmp_path):
    _, a = run(tmp_path, "spectrum", "", out="a")
    _, b = run(tmp_path, "spectrum", "", out="b", extra=("--seed", "5"))
    ha = json.loads((a / "manifest.json").read_text())["config_hash"]
    hb = json.loads((b / "manifest.json").read_text())["config_hash"]
    assert ha != hb


# ------------------------------------------------------------------ landscape


def test_landscape(tmp_path):
    body = "potential.kind = gaussian_well\npotential.c = 8.0\nlandscape.samples = 41\nlandscape.linking_samples = 3\n"
    code, out = run(tmp_path, "landscape", body)
    assert code == EXIT_OK
    rows = list(csv.reader((out / "rayscan.csv").read_text().splitlines()))
    assert rows[0] == ["s", "phi", "dphi_ds"] and len(rows) == 42
    linking = json.loads((out / "linking.json").read_text())
    assert linking["ell"] == 1 and linking["ray_flagged_rows"] == []
    assert len(linking["levels"]) == 3


def test_landscape_random_direction_is_seeded(tmp_path):
    body = "landscape.direction = random\nlandscape.samples = 11\nlandscape.linking_samples = 2\n"
    _, a = run(tmp_path, "landscape", body, out="a")
    _, b = run(tmp_path, "landscape", body, out="b")
    assert (a / "rayscan.csv").read_bytes() == (b / "rayscan.csv").read_bytes()


def test_landscape_bad_direction(tmp_path):
    code, _ = run(tmp_path, "landscape", "landscape.direction = sideways\n")
    assert code == EXIT_CONFIG


# ------------------------------------------------------------------ errors and plumbing


def test_bad_config_exit(tmp_path, capsys):
    code, _ = run(tmp_path, "verify", "domain.N = 63\n")
    assert code == EXIT_CONFIG
    assert "domain.N" in capsys.readouterr().err


def test_unknown_key_exit(tmp_path, capsys):
    code, _ = run(tmp_path, "verify", "solver.speed = 3\n")
    assert code == EXIT_CONFIG
    assert "solver.speed" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "nope.cfg")]) == EXIT_CONFIG


@pytest.mark.parametrize("argv", [["frobnicate", "--config", "x"], ["verify"], ["verify", "--config", "x", "--seed", "-1"]])
def test_argparse_rejects(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_default_output_dir_relative_to_config(tmp_path):
    path = write_cfg(tmp_path, "output.dir = results\n")
    assert main(["spectrum", "--config", path]) == EXIT_OK
    assert (tmp_path / "results" / "spectrum.json").exists()


def test_atomic_write_failure_leaves_nothing(tmp_path, monkeypatch):
    out = RunOutput(str(tmp_path))
    out.write_bytes("a.txt", b"old")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        out.write_bytes("a.txt", b"new")
    assert (tmp_path / "a.txt").read_bytes() == b"old"
    assert os.listdir(tmp_path) == ["a.txt"]


def test_csv_float_repr(tmp_path):
    out = RunOutput(str(tmp_path))
    out.write_csv("t.csv", ("a", "b"), [(1, 0.1 + 0.2)])
    assert (tmp_path / "t.csv").read_bytes() == b"a,b\r\n1,0.30000000000000004\r\n"
