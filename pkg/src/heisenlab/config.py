"""Run configuration: one JSON document, strictly validated, with dotted overrides."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, fields

from .convergence import DEFAULT_TOLERANCES, SuiteConfig, default_dt_grid
from .models import ModelSpec

SCHEMA = {
    "model": {"basis", "dim", "hbar", "mass", "omega", "lambda", "grid_extent", "custom_expr", "free"},
    "state": {"type", "alpha_re", "alpha_im", "n"},
    "evolution": {"t0", "dt_grid", "dt", "steps", "hadamard_order"},
    "output": {"path", "format"},
    "seed": None,
    "tolerances": set(DEFAULT_TOLERANCES),
    "suite": {f.name for f in fields(SuiteConfig)} - {"tolerances", "seed", "dt_grid", "alpha", "lam", "hbar", "mass", "omega"},
}

STATE_TYPES = ("coherent", "fock", "gaussian_grid")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: ModelSpec
    state_type: str = "coherent"
    alpha: complex = 1.0
    fock_n: int = 0
    t0: float = 0.0
    dt_grid: tuple | None = None
    dt: float = 0.1
    steps: int = 100
    hadamard_orders: tuple = (1, 2, 3)
    output_path: str | None = None
    output_format: str | None = None
    seed: int = 42
    tolerances: dict = field(default_factory=dict)
    suite: dict = field(default_factory=dict)
    dim_given: bool = False

    def dt_values(self):
        grid = default_dt_grid() / self.model.omega if self.dt_grid is None else self.dt_grid
        if len(grid) == 0:
            raise ConfigError("evolution.dt_grid is empty")
        return tuple(float(x) for x in grid)

    def time_grid(self):
        return tuple(self.t0 + j * self.dt for j in range(self.steps + 1))

    def suite_config(self) -> SuiteConfig:
        extra = dict(self.suite)
        if self.dim_given:
            extra.setdefault("harmonic_dim", self.model.dim)
            extra.setdefault("quartic_dim", self.model.dim)
        return SuiteConfig(
            hbar=self.model.hbar,
            mass=self.model.mass,
            omega=self.model.omega,
            lam=self.model.lam if self.model.lam > 0 else 0.1,
            alpha=self.alpha,
            dt_grid=self.dt_values(),
            seed=self.seed,
            tolerances=dict(self.tolerances),
            **extra,
        )


def apply_override(doc: dict, assignment: str) -> None:
    """Apply ``a.b.c=value``; the value is read as JSON, falling back to a plain string."""
    if "=" not in assignment:
        raise ConfigError(f"--set expects key=value, got {assignment!r}")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.strip().split(".")
    node = doc
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {key!r}: {part!r} is not a section")
    node[parts[-1]] = value


def _check_keys(doc: dict) -> None:
    for key, value in doc.items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        allowed = SCHEMA[key]
        if allowed is None:
            continue
        if not isinstance(value, dict):
            raise ConfigError(f"config section {key!r} must be an object")
        extra = set(value) - allowed
        if extra:
            raise ConfigError(f"unknown keys in {key!r}: {sorted(extra)}")


def parse_config(doc: dict | None, overrides=(), seed: int | None = None, output: str | None = None) -> RunConfig:
    doc = copy.deepcopy(doc or {})
    for assignment in overrides:
        apply_override(doc, assignment)
    _check_keys(doc)
    m = doc.get("model", {})
    s = doc.get("state", {})
    e = doc.get("evolution", {})
    o = doc.get("output", {})
    try:
        spec = ModelSpec(
            basis=m.get("basis", "fock"),
            dim=int(m.get("dim", 32)),
            hbar=float(m.get("hbar", 1.0)),
            mass=float(m.get("mass", 1.0)),
            omega=float(m.get("omega", 1.0)),
            lam=float(m.get("lambda", 0.0)),
            grid_extent=m.get("grid_extent"),
            custom_expr=m.get("custom_expr"),
            free=bool(m.get("free", False)),
        )
        state_type = s.get("type", "gaussian_grid" if spec.basis == "grid" else "coherent")
        if state_type not in STATE_TYPES:
            raise ConfigError(f"state.type must be one of {STATE_TYPES}, got {state_type!r}")
        orders = e.get("hadamard_order", [1, 2, 3])
        orders = (orders,) if isinstance(orders, int) else tuple(int(k) for k in orders)
        if not orders or any(k < 0 for k in orders):
            raise ConfigError("evolution.hadamard_order must be a nonnegative integer or a non-empty list of them")
        dt_grid = e.get("dt_grid")
        if dt_grid is not None:
            dt_grid = tuple(float(x) for x in dt_grid)
            if any(not x > 0 for x in dt_grid):
                raise ConfigError("evolution.dt_grid entries must be positive")
        steps = int(e.get("steps", 100))
        dt = float(e.get("dt", 0.1))
        if steps < 0 or not dt > 0:
            raise ConfigError("evolution.steps must be >= 0 and evolution.dt > 0")
        fmt = o.get("format")
        if fmt not in (None, "csv", "json"):
            raise ConfigError(f"output.format must be csv or json, got {fmt!r}")
        tolerances = {k: float(v) for k, v in doc.get("tolerances", {}).items()}
        return RunConfig(
            model=spec,
            state_type=state_type,
            alpha=complex(float(s.get("alpha_re", 1.0)), float(s.get("alpha_im", 0.0))),
            fock_n=int(s.get("n", 0)),
            t0=float(e.get("t0", 0.0)),
            dt_grid=dt_grid,
            dt=dt,
            steps=steps,
            hadamard_orders=orders,
            output_path=output if output is not None else o.get("path"),
            output_format=fmt,
            seed=int(seed if seed is not None else doc.get("seed", 42)),
            tolerances=tolerances,
            suite=dict(doc.get("suite", {})),
            dim_given="dim" in m,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | None, overrides=(), seed: int | None = None, output: str | None = None) -> RunConfig:
    doc = {}
    if path is not None:
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
    return parse_config(doc, overrides, seed, output)
