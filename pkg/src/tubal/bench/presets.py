"""Embedded desk-scale experiment presets.

Each preset is a plain config dict (see :mod:`tubal.bench.config`), so
``dump-preset NAME`` prints exactly what ``run --preset NAME`` executes.

Assumptions not fixed by the figure captions:

* factorization runs start from ``N(0, 0.5/n)`` factors (``scale = 0.5``);
  at ``N(0, 1/n)`` plain GD with step 0.5 blows up in a handful of steps;
* "random init" ``N(0, 1)`` is ``scale = n1`` and "small random init" is
  ``scale = 1e-10`` (entries of size ~1e-5);
* the non-full-rank factorization case uses multi-rank ``[5, 10, 10]``;
* ground truths have ``sigma_max = 1`` and ``sigma_min = 1/kappa``;
* the operator seed of repeat ``s`` is ``op_seed + s``.
"""

from __future__ import annotations

import copy

from ..errors import ConfigError
from .config import from_dict

__all__ = ["PRESETS", "preset", "preset_dict", "preset_names"]

FIG2_SCALE = 0.5


def _solver(method, label, eta, iters, **kw):
    d = {"method": method, "label": label, "step_size": eta, "max_iters": iters}
    d.update(kw)
    return d


def _trio(eta, iters, stop_tol):
    return [
        _solver("fgd", "GD", eta, iters, stop_tol=stop_tol),
        _solver("scaledgd", "ScaledGD", eta, iters, stop_tol=stop_tol),
        _solver("apgd", "APGD", eta, iters, stop_tol=stop_tol),
    ]


def _fig1(name, multi_rank, r):
    return {
        "name": name,
        "problem": {"kind": "recovery", "n1": 20, "n2": 20, "n3": 3, "multi_rank": multi_rank,
                    "kappa": 1.0, "m": 5 * r * 20 * 3, "op_seed": 7},
        "rank": r,
        "seeds": [0],
        "init": {"kind": "spectral"},
        "solvers": _trio(0.5, 300, 0.0),
        "notes": "recovery comparison; the full budget is run so late-stage failures show",
    }


def _fig2(name, kappa, multi_rank, r):
    return {
        "name": name,
        "problem": {"kind": "factorization", "n1": 20, "n2": 20, "n3": 3,
                    "multi_rank": multi_rank, "kappa": kappa},
        "rank": r,
        "seeds": [0, 1, 2],
        "init": {"kind": "random", "scale": FIG2_SCALE},
        "solvers": _trio(0.5, 1000, 0.0),
    }


def _fig3(name, kappa, multi_rank, r, iters=500):
    return {
        "name": name,
        "problem": {"kind": "recovery", "n1": 50, "n2": 50, "n3": 3, "multi_rank": multi_rank,
                    "kappa": kappa, "m": 5 * r * 50 * 3, "op_seed": 7},
        "rank": r,
        "seeds": [0],
        "init": {"kind": "spectral"},
        "solvers": [
            _solver("fgd", "FGD-spectral", 0.6, iters, stop_tol=1e-12),
            _solver("fgd", "FGD-small", 0.6, iters, stop_tol=1e-12,
                    init={"kind": "small_random", "scale": 1e-6}),
            _solver("scaledgd", "ScaledGD", 0.6, iters, stop_tol=0.0),
            _solver("apgd", "APGD", 0.6, iters, stop_tol=1e-12),
        ],
    }


def _fig4(name, r, kappa=1.0):
    return {
        "name": name,
        "problem": {"kind": "recovery", "n1": 20, "n2": 20, "n3": 3, "tubal_rank": 10,
                    "kappa": kappa, "m": 5 * 20 * 3 * r, "op_seed": 7},
        "rank": r,
        "seeds": [0],
        "init": {"kind": "spectral"},
        "solvers": _trio(0.5, 100, 0.0),
        "sweep": {"axis": "step_size", "values": [round(0.1 * k, 1) for k in range(1, 13)]},
        "notes": "error after a 100-iteration budget per step size",
    }


def _fig5(name, r):
    return {
        "name": name,
        "problem": {"kind": "recovery", "n1": 50, "n2": 50, "n3": 3, "tubal_rank": 5,
                    "kappa": 1.0, "m": 5 * 50 * 3 * r, "op_seed": 7},
        "rank": r,
        "seeds": [0],
        "init": {"kind": "spectral"},
        "solvers": [
            _solver("fgd", "FGD", 0.6, 500, stop_tol=1e-6),
            _solver("scaledgd", "ScaledGD", 0.6, 500, stop_tol=1e-6),
            _solver("apgd", "APGD", 0.6, 500, stop_tol=1e-6),
        ],
        "notes": "timing: wall clock to 1e-6 relative error; compare elapsed_s columns",
    }


_FIG6_PROBLEM = {"kind": "recovery", "n1": 20, "n2": 20, "n3": 3, "tubal_rank": 10,
                 "kappa": 1.0, "m": 5 * 20 * 3 * 20, "op_seed": 7}

PRESETS = {
    "fig1a": _fig1("fig1a", [5, 5, 5], 10),
    "fig1b": _fig1("fig1b", [3, 5, 5], 5),
    "fig2a": _fig2("fig2a", 1.0, [10, 10, 10], 10),
    "fig2b": _fig2("fig2b", 100.0, [10, 10, 10], 10),
    "fig2c": _fig2("fig2c", 1.0, [5, 10, 10], 10),
    "fig2d": _fig2("fig2d", 1.0, [10, 10, 10], 20),
    "fig3a": _fig3("fig3a", 2.0, [5, 5, 5], 5),
    "fig3b": _fig3("fig3b", 100.0, [5, 5, 5], 5),
    "fig3c": _fig3("fig3c", 100.0, [1, 5, 5], 5),
    "fig3d": _fig3("fig3d", 100.0, [5, 5, 5], 10),
    "fig4a": _fig4("fig4a", 10),
    "fig4b": _fig4("fig4b", 20),
    "fig5a": _fig5("fig5a", 5),
    "fig5b": _fig5("fig5b", 10),
    "fig6a": {
        "name": "fig6a",
        "problem": dict(_FIG6_PROBLEM),
        "rank": 20,
        "seeds": [0],
        "init": {"kind": "spectral"},
        "solvers": [
            _solver("apgd", "spectral", 0.5, 1000),
            _solver("apgd", "random", 0.5, 1000, init={"kind": "random", "scale": 20.0}),
            _solver("apgd", "small-random", 0.5, 1000,
                    init={"kind": "small_random", "scale": 1e-10}),
        ],
    },
    "fig6b": {
        "name": "fig6b",
        "problem": dict(_FIG6_PROBLEM),
        "rank": 20,
        "seeds": [0],
        "init": {"kind": "spectral"},
        "solvers": [_solver("apgd", "APGD", 0.5, 1500, stop_tol=1e-14)],
        "sweep": {"axis": "damping", "values": ["f/2", "f/10", 1e-10, 1e-15]},
    },
    "fig7": {
        "name": "fig7",
        "problem": {"kind": "recovery", "n1": 50, "n2": 50, "n3": 3, "tubal_rank": 5,
                    "kappa": 1.0, "m": 5 * 50 * 3 * 5, "op_seed": 7},
        "rank": 5,
        "seeds": [0],
        "init": {"kind": "spectral"},
        "solvers": [_solver("apgd", "APGD", 0.5, 500)],
    },
    "fig7-over": {
        "name": "fig7-over",
        "problem": {"kind": "recovery", "n1": 50, "n2": 50, "n3": 3, "tubal_rank": 5,
                    "kappa": 1.0, "m": 5 * 50 * 3 * 10, "op_seed": 7},
        "rank": 10,
        "seeds": [0],
        "init": {"kind": "spectral"},
        "solvers": [_solver("apgd", "APGD", 0.5, 500)],
    },
}


def preset_names():
    return sorted(PRESETS)


def preset_dict(name):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(preset_names())}")
    return copy.deepcopy(PRESETS[name])


def preset(name):
    """Parsed :class:`RunConfig` for a named preset."""
    return from_dict(preset_dict(name))
