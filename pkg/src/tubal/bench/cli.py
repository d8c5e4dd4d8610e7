"""``tubal-bench``: run, sweep and ablate solver experiments from configs or presets.

Exit codes: 0 success (diverged runs are data, not failures), 2 config
error, 3 I/O error. Output goes to ``--out-dir``, else ``$TUBAL_OUT_DIR``,
else ``./tubal_runs``; each config writes into ``<out>/<name>/``.
"""

from __future__ import annotations

import argparse
import os
import sys

from ..errors import ConfigError
from . import config as config_mod
from .presets import preset, preset_dict, preset_names
from .runner import ablation_jobs, execute, jobs_for, sweep_jobs

OUT_ENV = "TUBAL_OUT_DIR"
DEFAULT_OUT = "tubal_runs"

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _common(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="path to a JSON run config")
    src.add_argument("--preset", help="name of an embedded preset")
    p.add_argument("--out-dir", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.add_argument("--seed", type=int, help="run a single repeat with this seed")
    p.add_argument("--threads", type=int, default=1, help="independent runs executed concurrently")
    p.add_argument("--no-timing", action="store_true",
                   help="write elapsed_s as 0 so traces are byte-reproducible")
    p.add_argument("-q", "--quiet", action="store_true")


def build_parser():
    ap = argparse.ArgumentParser(prog="tubal-bench", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    _common(sub.add_parser("run", help="run every solver x seed of a config"))
    sw = sub.add_parser("sweep", help="grid over step size or damping")
    _common(sw)
    sw.add_argument("--axis", choices=config_mod.SWEEP_AXES)
    sw.add_argument("--values", help="comma separated, e.g. 0.1,0.5 or f/2,1e-10")
    _common(sub.add_parser("ablation", help="APGD with and without rebalancing"))
    dp = sub.add_parser("dump-preset", help="print a preset config (or list presets)")
    dp.add_argument("name", nargs="?")
    dp.add_argument("--preset", dest="preset_flag")
    return ap


def _load(args):
    if args.config:
        cfg = config_mod.load(args.config)
    elif args.preset:
        cfg = preset(args.preset)
    else:
        raise ConfigError("one of --config or --preset is required")
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        cfg = cfg.with_seeds([args.seed])
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    return cfg


def _out_dir(args, cfg):
    base = args.out_dir or os.environ.get(OUT_ENV) or DEFAULT_OUT
    return os.path.join(base, cfg.name)


def _parse_values(text, axis):
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if axis == "damping" and tok.startswith("f"):
            vals.append(tok)
            continue
        try:
            vals.append(float(tok))
        except ValueError:
            raise ConfigError(f"bad sweep value {tok!r}") from None
    return vals


def _sweep_plan(args, cfg):
    axis = args.axis or (cfg.sweep.axis if cfg.sweep else None)
    if axis is None:
        raise ConfigError("sweep needs --axis or a 'sweep' section in the config")
    if args.values:
        values = _parse_values(args.values, axis)
    elif cfg.sweep and cfg.sweep.axis == axis:
        values = list(cfg.sweep.values)
    else:
        raise ConfigError(f"no values given for sweep axis {axis!r}")
    config_mod.SweepSpec(axis, tuple(values))
    return sweep_jobs(cfg, axis, values), os.path.join(_out_dir(args, cfg), f"sweep_{axis}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    log = None if getattr(args, "quiet", False) else (lambda msg: print(msg, file=sys.stderr))
    try:
        if args.cmd == "dump-preset":
            name = args.name or args.preset_flag
            if not name:
                print("\n".join(preset_names()))
                return EXIT_OK
            sys.stdout.write(config_mod.dumps(config_mod.from_dict(preset_dict(name))))
            return EXIT_OK
        cfg = _load(args)
        if args.cmd == "run":
            jobs, out = jobs_for(cfg), _out_dir(args, cfg)
        elif args.cmd == "sweep":
            jobs, out = _sweep_plan(args, cfg)
        else:
            bad = [s.label for s in cfg.solvers if s.method != "apgd"]
            if bad:
                raise ConfigError(f"ablation is defined for APGD only; offending solvers: {bad}")
            jobs, out = ablation_jobs(cfg), os.path.join(_out_dir(args, cfg), "ablation")
        execute(cfg, jobs, out, threads=args.threads, timing=not args.no_timing, log=log)
        if log:
            log(f"wrote {len(jobs)} trace(s) and summary.csv to {out}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
