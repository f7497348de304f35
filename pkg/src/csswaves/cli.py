"""Command-line front end: ``cssw verify|spectrum|solve|landscape --config PATH``.

Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 degenerate quadratic form, 4 non-convergence (including growth failures).
"""

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
import time

import numpy as np
from filelock import FileLock

from . import __version__
from .checks import run_config_checks
from .config import load
from .errors import (
    CapacityError,
    ConfigError,
    ConvergenceError,
    DegeneracyError,
    GrowthError,
    NumericError,
    UsageError,
)
from .functional import make_problem
from .grid import gaussian, random_bumps
from .operator import equivalent_norm
from .solver import local_linking_probe, ray_scan, solve

log = logging.getLogger("csswaves")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_CONVERGENCE = 0, 1, 2, 3, 4

HISTORY_COLUMNS = ("iter", "phi", "residual", "norm_minus", "norm_plus")
RAYSCAN_COLUMNS = ("s", "phi", "dphi_ds")
GROWTH_CONDITION = "F(x,t)/t^6 -> +inf as |t| -> inf, uniformly in x"


# --------------------------------------------------------------------------- output


class RunOutput:
    """Atomic writer for one output directory; records checksums and timings."""

    def __init__(self, directory):
        self.directory = directory
        self.files = {}
        self.timings = {}
        os.makedirs(directory, exist_ok=True)

    def write_bytes(self, name, data):
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.chmod(tmp, 0o644)
            os.replace(tmp, os.path.join(self.directory, name))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.files[name] = hashlib.sha256(data).hexdigest()

    def write_json(self, name, obj):
        text = json.dumps(obj, indent=2, allow_nan=True) + "\n"
        self.write_bytes(name, text.encode("utf-8"))

    def write_csv(self, name, header, rows):
        buf = io.StringIO(newline="")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
        self.write_bytes(name, buf.getvalue().encode("utf-8"))

    def write_field(self, name, u):
        self.write_bytes(name, np.ascontiguousarray(u, dtype="<f8").tobytes(order="C"))

    def write_manifest(self, command, config):
        self.write_json(
            "manifest.json",
            {
                "command": command,
                "version": __version__,
                "config_hash": config.digest(),
                "files": dict(sorted(self.files.items())),
                "timings": self.timings,
            },
        )


class _Stage:
    def __init__(self, out, name):
        self.out, self.name = out, name

    def __enter__(self):
        self.start = time.perf_counter()

    def __exit__(self, *exc):
        self.out.timings[self.name] = time.perf_counter() - self.start
        return False


def _history_rows(history):
    return [tuple(h[c] for c in HISTORY_COLUMNS) for h in history]


def _problem(config):
    grid = config.grid()
    return make_problem(grid, config.potential_spec(), config.model(), config.spectrum.k_max)


# --------------------------------------------------------------------------- commands


def cmd_verify(config, out):
    with _Stage(out, "checks"):
        report = run_config_checks(config)
    data = report.to_dict()
    out.write_json("verify.json", data)
    for c in report.checks:
        status = "ok  " if c.passed else "FAIL"
        print(f"{status} {c.name:32s} defect={c.defect:.3e} tol={c.tolerance:.3e}")
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_spectrum(config, out):
    with _Stage(out, "spectrum"):
        problem = _problem(config)
    report = problem.split.report()
    out.write_json("spectrum.json", report)
    print(json.dumps(report))
    return EXIT_OK


def cmd_solve(config, out):
    with _Stage(out, "setup"):
        problem = _problem(config)
    formats = set(config.output.formats)
    try:
        with _Stage(out, "solve"):
            result = solve(problem, config.solver_config(), A=config.solver.descent_level)
    except ConvergenceError as exc:
        if "csv" in formats:
            out.write_csv("history.csv", HISTORY_COLUMNS, _history_rows(exc.history))
        out.write_json("error.json", {"error": "convergence", "message": str(exc)})
        raise
    except GrowthError as exc:
        out.write_json(
            "error.json",
            {
                "error": "growth",
                "message": str(exc),
                "condition": GROWTH_CONDITION,
                "witness": [[float(s), float(v)] for s, v in exc.witness],
            },
        )
        raise
    grid = problem.grid
    meta = {
        "L": grid.L,
        "N": grid.N,
        "phi": result.phi,
        "residual": result.residual,
        **{k: v for k, v in result.summary().items() if k not in ("phi", "residual")},
        "ell": problem.split.ell,
        "config_hash": config.digest(),
    }
    out.write_json("result.json", meta)
    if "csv" in formats:
        out.write_csv("history.csv", HISTORY_COLUMNS, _history_rows(result.history))
    if "raw" in formats:
        out.write_field("u_star.f64raw", result.u)
    print(f"phi = {result.phi:.12g}  residual = {result.residual:.3e}  nontrivial = {result.nontrivial}")
    return EXIT_OK


def _landscape_direction(config, problem):
    grid = problem.grid
    lc = config.landscape
    if lc.direction == "gaussian":
        v = grid.restrict(gaussian(grid, 1.0, lc.direction_width))
    elif lc.direction == "random":
        v = random_bumps(grid, np.random.default_rng(config.seed))
    else:
        raise ConfigError(f"landscape.direction: unknown value {lc.direction!r}", "landscape.direction")
    return v / equivalent_norm(problem.split, v)


def cmd_landscape(config, out):
    lc = config.landscape
    with _Stage(out, "setup"):
        problem = _problem(config)
        v = _landscape_direction(config, problem)
    with _Stage(out, "ray_scan"):
        scan = ray_scan(problem, v, lc.s_max, lc.samples, lc.A)
    with _Stage(out, "linking"):
        rng = np.random.default_rng(config.seed)
        linking = local_linking_probe(problem, lc.eps, lc.linking_samples, rng)
    out.write_csv("rayscan.csv", RAYSCAN_COLUMNS, [tuple(r) for r in scan.rows])
    data = linking.to_dict()
    data["ray_flagged_rows"] = [int(i) for i in scan.flagged]
    data["A"] = lc.A
    out.write_json("linking.json", data)
    print(f"ray rows flagged: {len(scan.flagged)}  linking holds: {linking.holds()}")
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "solve": cmd_solve,
    "landscape": cmd_landscape,
}


def _u64(text):
    value = int(text, 10)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="cssw", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="key = value config file")
    parser.add_argument("--out", help="output directory (overrides output.dir)")
    parser.add_argument("--seed", type=_u64, help="RNG seed (overrides seed)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = load(args.config)
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
        config.validate()
    except (ConfigError, UsageError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = args.out or os.path.join(config.base_dir, config.output.dir)
    out = RunOutput(out_dir)
    with FileLock(os.path.join(out_dir, ".cssw.lock")):
        try:
            code = COMMANDS[args.command](config, out)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            code = EXIT_CONFIG
        except CapacityError as exc:
            print(f"config error: {exc} (spectrum.k_max)", file=sys.stderr)
            code = EXIT_CONFIG
        except DegeneracyError as exc:
            print(f"degenerate: {exc}", file=sys.stderr)
            code = EXIT_DEGENERATE
        except GrowthError as exc:
            print(f"growth failure: {exc}", file=sys.stderr)
            code = EXIT_CONVERGENCE
        except (ConvergenceError, NumericError) as exc:
            print(f"no convergence: {exc}", file=sys.stderr)
            code = EXIT_CONVERGENCE
        out.write_manifest(args.command, config)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
