"""Run configuration: a JSON document with a fixed schema.

Schema (every key optional unless marked required)::

    {
      "name": "fig2a",                         # required, used for the output sub-directory
      "problem": {                             # required
        "kind": "factorization" | "recovery",
        "n1": 20, "n2": 20, "n3": 3,           # required
        "multi_rank": [10, 10, 10],            # required, or "tubal_rank": 10
        "kappa": 1.0, "sigma_max": 1.0,
        "m": 3000,                             # recovery only
        "op_seed": 7,                          # operator seed offset (added to the repeat seed)
        "noise_std": 0.0
      },
      "rank": 10,                              # estimated tubal rank r (default: true tubal rank)
      "seeds": [0, 1, 2],                      # one repeat per seed
      "init": {"kind": "spectral"} | {"kind": "random", "scale": 0.5} | {"kind": "small_random", "scale": 1e-10},
      "solvers": [                             # required, non-empty
        {"method": "apgd", "label": "APGD", "step_size": 0.5, "max_iters": 1000,
         "damping": "f/10" | 1e-10, "rebalance": true, "stop_tol": 1e-12,
         "divergence_guard": 1e6, "init": {...}}
      ],
      "sweep": {"axis": "step_size" | "damping", "values": [...]},
      "notes": "free text"
    }

Random factors have i.i.d. entries with std ``sqrt(scale/n1)`` (``L``) and
``sqrt(scale/n2)`` (``R``). Damping is written ``"f/c"`` for ``lambda_t = f(X_t)/c`` or as a bare number
for a fixed ``lambda``. Unknown keys are rejected. ``dumps(loads(text))`` is
a fixed point and ``loads(dumps(cfg)) == cfg``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

from ..errors import BadSpec, ConfigError
from ..solvers import METHODS, DampingSchedule, SolverConfig
from ..synth import GroundTruthSpec

__all__ = [
    "InitSpec",
    "ProblemSpec",
    "SolverSpec",
    "SweepSpec",
    "RunConfig",
    "loads",
    "dumps",
    "load",
    "parse_damping",
    "format_damping",
]

INIT_KINDS = ("spectral", "random", "small_random")
SWEEP_AXES = ("step_size", "damping")


def parse_damping(value):
    """``"f/10"`` -> proportional(10); a number (or numeric string) -> fixed."""
    if isinstance(value, DampingSchedule):
        return value
    if isinstance(value, str):
        m = re.fullmatch(r"\s*f\s*/\s*([0-9.eE+-]+)\s*", value)
        if m:
            return DampingSchedule.proportional(float(m.group(1)))
        try:
            return DampingSchedule.fixed(float(value))
        except ValueError as exc:
            raise ConfigError(f"bad damping {value!r}; use 'f/c' or a number") from exc
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"bad damping {value!r}; use 'f/c' or a number")
    return DampingSchedule.fixed(float(value))


def format_damping(d):
    if d.kind == "proportional":
        return f"f/{d.value:g}"
    return d.value


@dataclass(frozen=True)
class InitSpec:
    kind: str = "spectral"
    scale: Optional[float] = None

    def __post_init__(self):
        if self.kind not in INIT_KINDS:
            raise ConfigError(f"init kind must be one of {INIT_KINDS}, got {self.kind!r}")
        if self.kind != "spectral" and not (self.scale and self.scale > 0):
            raise ConfigError(f"init kind {self.kind!r} needs a positive 'scale'")

    def to_dict(self):
        d = {"kind": self.kind}
        if self.scale is not None:
            d["scale"] = self.scale
        return d


@dataclass(frozen=True)
class ProblemSpec:
    n1: int
    n2: int
    n3: int
    multi_rank: Tuple[int, ...]
    kind: str = "factorization"
    kappa: float = 1.0
    sigma_max: float = 1.0
    m: Optional[int] = None
    op_seed: int = 0
    noise_std: float = 0.0

    def __post_init__(self):
        if self.kind not in ("factorization", "recovery"):
            raise ConfigError(f"problem kind must be factorization or recovery, got {self.kind!r}")
        if self.kind == "recovery" and not (self.m and self.m >= 1):
            raise ConfigError("recovery problems need m >= 1")
        try:
            self.ground_truth(0).validate()
        except BadSpec as exc:
            raise ConfigError(str(exc)) from exc

    def ground_truth(self, seed):
        return GroundTruthSpec(self.n1, self.n2, self.n3, tuple(self.multi_rank), kappa=self.kappa,
                               seed=seed, sigma_max=self.sigma_max)

    @property
    def tubal_rank(self):
        return max(self.multi_rank)

    def to_dict(self):
        d = {"kind": self.kind, "n1": self.n1, "n2": self.n2, "n3": self.n3,
             "multi_rank": list(self.multi_rank), "kappa": self.kappa, "sigma_max": self.sigma_max}
        if self.kind == "recovery":
            d.update(m=self.m, op_seed=self.op_seed, noise_std=self.noise_std)
        return d


@dataclass(frozen=True)
class SolverSpec:
    method: str
    label: str
    config: SolverConfig
    init: Optional[InitSpec] = None

    def to_dict(self):
        c = self.config
        d = {"method": c.method, "label": self.label, "step_size": c.step_size,
             "max_iters": c.max_iters, "damping": format_damping(c.damping),
             "rebalance": c.rebalance, "stop_tol": c.stop_tol,
             "divergence_guard": c.divergence_guard}
        if self.init is not None:
            d["init"] = self.init.to_dict()
        return d


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one value")
        for v in self.values:
            if self.axis == "damping":
                parse_damping(v)
            elif isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"step sizes must be positive numbers, got {v!r}")

    def to_dict(self):
        return {"axis": self.axis, "values": list(self.values)}


@dataclass(frozen=True)
class RunConfig:
    name: str
    problem: ProblemSpec
    solvers: Tuple[SolverSpec, ...]
    rank: int
    seeds: Tuple[int, ...] = (0,)
    init: InitSpec = field(default_factory=InitSpec)
    sweep: Optional[SweepSpec] = None
    notes: str = ""

    def __post_init__(self):
        if not self.solvers:
            raise ConfigError("solver list is empty")
        if not self.seeds:
            raise ConfigError("seed list is empty")
        p = self.problem
        if not 1 <= self.rank <= min(p.n1, p.n2):
            raise ConfigError(f"rank {self.rank} outside [1, {min(p.n1, p.n2)}]")
        labels = [s.label for s in self.solvers]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"solver labels must be unique, got {labels}")
        for s in self.solvers:
            if (s.init or self.init).kind == "spectral" and p.kind != "recovery":
                raise ConfigError("spectral initialization needs a recovery problem")

    def with_seeds(self, seeds):
        return replace(self, seeds=tuple(int(s) for s in seeds))

    def to_dict(self):
        d = {"name": self.name, "problem": self.problem.to_dict(), "rank": self.rank,
             "seeds": list(self.seeds), "init": self.init.to_dict(),
             "solvers": [s.to_dict() for s in self.solvers]}
        if self.sweep is not None:
            d["sweep"] = self.sweep.to_dict()
        if self.notes:
            d["notes"] = self.notes
        return d


# --------------------------------------------------------------------------- parsing

_TOP = {"name", "problem", "rank", "seeds", "init", "solvers", "sweep", "notes"}
_PROBLEM = {"kind", "n1", "n2", "n3", "multi_rank", "tubal_rank", "kappa", "sigma_max", "m",
            "op_seed", "noise_std"}
_SOLVER = {"method", "label", "step_size", "max_iters", "damping", "rebalance", "stop_tol",
           "divergence_guard", "init"}
_INIT = {"kind", "scale"}
_SWEEP = {"axis", "values"}


class _Located:
    """Maps keys back to source line numbers for error messages."""

    def __init__(self, text):
        self.text = text

    def line_of(self, key):
        m = re.search(r'"%s"\s*:' % re.escape(key), self.text)
        if m is None:
            return None
        return self.text.count("\n", 0, m.start()) + 1

    def fail(self, msg, key=None):
        line = self.line_of(key) if key else None
        where = f"line {line}: " if line else ""
        raise ConfigError(where + msg)


def _check_keys(loc, obj, allowed, where):
    if not isinstance(obj, dict):
        loc.fail(f"{where} must be an object")
    for k in obj:
        if k not in allowed:
            loc.fail(f"unknown key {k!r} in {where}", key=k)


def _get(loc, obj, key, typ, where, default=None, required=False):
    if key not in obj:
        if required:
            loc.fail(f"missing required key {key!r} in {where}")
        return default
    v = obj[key]
    ok = isinstance(v, typ) and not (isinstance(v, bool) and bool not in _as_tuple(typ))
    if not ok:
        loc.fail(f"{where}.{key} has wrong type {type(v).__name__}", key=key)
    return v


def _as_tuple(t):
    return t if isinstance(t, tuple) else (t,)


def _wrap_errors(loc, key, fn):
    try:
        return fn()
    except ConfigError as exc:
        if str(exc).startswith("line "):
            raise
        loc.fail(str(exc), key=key)
    except (ValueError, TypeError) as exc:
        loc.fail(str(exc), key=key)


def _parse_init(loc, obj, where):
    _check_keys(loc, obj, _INIT, where)
    kind = _get(loc, obj, "kind", str, where, default="spectral")
    scale = _get(loc, obj, "scale", (int, float), where)
    return _wrap_errors(loc, "kind", lambda: InitSpec(kind, None if scale is None else float(scale)))


def _parse_problem(loc, obj):
    where = "problem"
    _check_keys(loc, obj, _PROBLEM, where)
    n = [_get(loc, obj, k, int, where, required=True) for k in ("n1", "n2", "n3")]
    rm = _get(loc, obj, "multi_rank", list, where)
    tr = _get(loc, obj, "tubal_rank", int, where)
    if rm is None and tr is None:
        loc.fail("problem needs 'multi_rank' or 'tubal_rank'")
    if rm is not None and tr is not None:
        loc.fail("give either 'multi_rank' or 'tubal_rank', not both", key="tubal_rank")
    if rm is None:
        rm = [tr] * n[2]
    if not all(isinstance(r, int) and not isinstance(r, bool) for r in rm):
        loc.fail("multi_rank entries must be integers", key="multi_rank")
    kw = dict(
        kind=_get(loc, obj, "kind", str, where, default="factorization"),
        kappa=float(_get(loc, obj, "kappa", (int, float), where, default=1.0)),
        sigma_max=float(_get(loc, obj, "sigma_max", (int, float), where, default=1.0)),
        m=_get(loc, obj, "m", int, where),
        op_seed=_get(loc, obj, "op_seed", int, where, default=0),
        noise_std=float(_get(loc, obj, "noise_std", (int, float), where, default=0.0)),
    )
    return _wrap_errors(loc, "problem", lambda: ProblemSpec(*n, tuple(rm), **kw))


def _parse_solver(loc, obj, i):
    where = f"solvers[{i}]"
    _check_keys(loc, obj, _SOLVER, where)
    method = _get(loc, obj, "method", str, where, required=True).lower()
    if method not in METHODS:
        loc.fail(f"{where}.method must be one of {METHODS}, got {method!r}", key="method")
    label = _get(loc, obj, "label", str, where, default=method)
    damping = obj.get("damping", "f/10")
    init = obj.get("init")

    def build():
        cfg = SolverConfig(
            method=method,
            step_size=float(_get(loc, obj, "step_size", (int, float), where, default=0.5)),
            max_iters=_get(loc, obj, "max_iters", int, where, default=1000),
            damping=parse_damping(damping),
            rebalance=_get(loc, obj, "rebalance", bool, where, default=True),
            stop_tol=float(_get(loc, obj, "stop_tol", (int, float), where, default=1e-12)),
            divergence_guard=float(_get(loc, obj, "divergence_guard", (int, float), where, default=1e6)),
        )
        return SolverSpec(method, label, cfg, None if init is None else _parse_init(loc, init, where + ".init"))

    return _wrap_errors(loc, "method", build)


def from_dict(obj, text=""):
    loc = _Located(text)
    _check_keys(loc, obj, _TOP, "config")
    name = _get(loc, obj, "name", str, "config", required=True)
    if not re.fullmatch(r"[A-Za-z0-9_.-]+", name):
        loc.fail(f"name {name!r} may only contain letters, digits, '_', '.', '-'", key="name")
    problem = _parse_problem(loc, _get(loc, obj, "problem", dict, "config", required=True))
    solvers = _get(loc, obj, "solvers", list, "config", required=True)
    solvers = tuple(_parse_solver(loc, s, i) for i, s in enumerate(solvers))
    seeds = _get(loc, obj, "seeds", list, "config", default=[0])
    if not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in seeds):
        loc.fail("seeds must be non-negative integers", key="seeds")
    init = _parse_init(loc, _get(loc, obj, "init", dict, "config", default={}), "init")
    sweep = obj.get("sweep")
    if sweep is not None:
        _check_keys(loc, sweep, _SWEEP, "sweep")
        axis = _get(loc, sweep, "axis", str, "sweep", required=True)
        values = _get(loc, sweep, "values", list, "sweep", required=True)
        sweep = _wrap_errors(loc, "sweep", lambda: SweepSpec(axis, tuple(values)))
    rank = _get(loc, obj, "rank", int, "config", default=problem.tubal_rank)
    notes = _get(loc, obj, "notes", str, "config", default="")
    return _wrap_errors(loc, "rank", lambda: RunConfig(name, problem, solvers, rank, tuple(seeds),
                                                       init, sweep, notes))


def loads(text):
    """Parse a config document; raises :class:`ConfigError` with a line number."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}: {exc.msg}") from exc
    return from_dict(obj, text)


def dumps(cfg):
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
