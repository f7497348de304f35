"""Run configuration: dotted ``key = value`` text files and their dataclasses.

Example::

    # ground state of the constant-potential problem
    domain.L = 12.0
    domain.N = 128
    potential.kind = constant
    nonlinearity.p = 8.0
    solver.method = residual_min
    seed = 7

Lines starting with ``#`` and blank lines are ignored. Every key must name an
existing field; unknown keys are rejected with the key in the message.
"""

import dataclasses
import hashlib
import math
import os
import types
import typing
from dataclasses import dataclass, field

import numpy as np

from .errors import CSSError, ConfigError
from .grid import Grid
from .model import make_model
from .operator import PotentialSpec
from .solver import SolverConfig


@dataclass(frozen=True)
class DomainConfig:
    L: float = 12.0
    N: int = 256


@dataclass(frozen=True)
class PotentialConfig:
    kind: str = "constant"
    omega: float = 1.0
    c: float = 0.0
    sigma: float = 1.0
    table: str | None = None  # path to N*N little-endian f64 values (custom-table)


@dataclass(frozen=True)
class NonlinearityConfig:
    kind: str = "pure_power"
    p: float = 8.0
    gamma: float | None = None


@dataclass(frozen=True)
class SolverSection:
    method: str = "residual_min"
    grad_tol: float = 1e-6
    max_iters: int = 400
    delta0: float = 1e-3
    path_nodes: int = 9
    seed_amplitude: float = 2.0
    seed_width: float = 1.0
    descent_step: float = 0.5
    tau_min: float = 1e-3
    descent_level: float = 1.0  # A in Phi(e) = -A for the mountain-pass endpoint


@dataclass(frozen=True)
class SpectrumConfig:
    k_max: int = 6


@dataclass(frozen=True)
class LandscapeConfig:
    s_max: float = 10.0
    samples: int = 201
    A: float = 1.0
    eps: float = 1e-2
    linking_samples: int = 8
    direction: str = "gaussian"  # gaussian | random
    direction_width: float = 1.0


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"
    formats: tuple = ("json", "csv", "raw")


@dataclass(frozen=True)
class RunConfig:
    domain: DomainConfig = field(default_factory=DomainConfig)
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    nonlinearity: NonlinearityConfig = field(default_factory=NonlinearityConfig)
    solver: SolverSection = field(default_factory=SolverSection)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    landscape: LandscapeConfig = field(default_factory=LandscapeConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0
    base_dir: str = field(default=".", compare=False, repr=False)

    # ------------------------------------------------------------------ builders
    def grid(self):
        try:
            return Grid(self.domain.L, self.domain.N)
        except CSSError as exc:
            key = "domain.N" if str(exc).startswith("N") else "domain.L"
            raise ConfigError(f"{key}: {exc}", key) from exc

    def potential_spec(self):
        pc = self.potential
        table = None
        if pc.kind == "custom-table":
            if pc.table is None:
                raise ConfigError("potential.table is required for custom-table", "potential.table")
            path = os.path.join(self.base_dir, pc.table)
            try:
                table = np.fromfile(path, dtype="<f8")
            except OSError as exc:
                raise ConfigError(f"potential.table: {exc}", "potential.table") from exc
            n = self.domain.N
            if table.size != n * n:
                raise ConfigError(
                    f"potential.table holds {table.size} values, expected {n * n}", "potential.table"
                )
            table = table.reshape(n, n)
        try:
            return PotentialSpec(pc.kind, pc.omega, pc.c, pc.sigma, table)
        except CSSError as exc:
            raise ConfigError(f"potential.kind: {exc}", "potential.kind") from exc

    def model(self):
        nc = self.nonlinearity
        try:
            return make_model(nc.kind, nc.p, nc.gamma)
        except CSSError as exc:
            msg = str(exc)
            key = "nonlinearity." + ("gamma" if "gamma" in msg else "kind" if "kind" in msg else "p")
            raise ConfigError(f"{key}: {exc}", key) from exc

    def solver_config(self):
        sc = self.solver
        try:
            return SolverConfig(
                method=sc.method,
                max_iters=sc.max_iters,
                grad_tol=sc.grad_tol,
                delta0=sc.delta0,
                path_nodes=sc.path_nodes,
                seed_amplitude=sc.seed_amplitude,
                seed_width=sc.seed_width,
                descent_step=sc.descent_step,
                tau_min=sc.tau_min,
            )
        except CSSError as exc:
            raise ConfigError(f"solver: {exc}", "solver") from exc

    def validate(self):
        self.grid()
        self.potential_spec()
        self.model()
        self.solver_config()
        if self.spectrum.k_max < 1:
            raise ConfigError("spectrum.k_max must be >= 1", "spectrum.k_max")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer", "seed")
        return self

    def digest(self):
        return hashlib.sha256(serialize(self).encode("utf-8")).hexdigest()


# --------------------------------------------------------------------------- text format

_SECTIONS = [f.name for f in dataclasses.fields(RunConfig) if f.default_factory is not dataclasses.MISSING]


def _section_type(name):
    return {f.name: f.default_factory for f in dataclasses.fields(RunConfig)}[name]


def _format_value(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    return str(value)


def _parse_value(raw, annotation, key):
    text = raw.strip()
    origin = typing.get_origin(annotation)
    args = typing.get_args(annotation)
    if origin in (typing.Union, types.UnionType):
        if text.lower() == "none":
            return None
        annotation = next(a for a in args if a is not type(None))
    try:
        if annotation is int:
            value = int(text, 10)
        elif annotation is float:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError("not finite")
        elif annotation is tuple:
            value = tuple(part.strip() for part in text.split(",") if part.strip())
        elif annotation is str:
            if not text:
                raise ValueError("empty")
            value = text
        else:  # pragma: no cover - every field has one of the types above
            raise ValueError(f"unsupported type {annotation}")
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw.strip()!r} ({exc})", key) from None
    return value


def parse(text, base_dir="."):
    """Parse config text; later assignments to the same key win."""
    updates = {}
    top = {}
    hints = typing.get_type_hints(RunConfig)
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'", None)
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if "." in key:
            section, _, name = key.partition(".")
            if section not in _SECTIONS:
                raise ConfigError(f"unknown key {key!r}", key)
            cls = _section_type(section)
            fields_ = {f.name for f in dataclasses.fields(cls)}
            if name not in fields_:
                raise ConfigError(f"unknown key {key!r}", key)
            annotation = typing.get_type_hints(cls)[name]
            updates.setdefault(section, {})[name] = _parse_value(raw, annotation, key)
        else:
            if key != "seed":
                raise ConfigError(f"unknown key {key!r}", key)
            top[key] = _parse_value(raw, hints[key], key)
    sections = {name: _section_type(name)(**updates.get(name, {})) for name in _SECTIONS}
    return RunConfig(**sections, **top, base_dir=base_dir)


def load(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse(text, base_dir=os.path.dirname(os.path.abspath(path)))


def serialize(config):
    lines = []
    for section in _SECTIONS:
        obj = getattr(config, section)
        for f in dataclasses.fields(obj):
            lines.append(f"{section}.{f.name} = {_format_value(getattr(obj, f.name))}")
    lines.append(f"seed = {config.seed}")
    return "\n".join(lines) + "\n"
