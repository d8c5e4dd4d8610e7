"""Executes run configs and writes trace / summary CSVs."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List

from ..objectives import random_init, spectral_init
from ..solvers import run
from ..synth import gen_problem
from .config import format_damping, parse_damping

__all__ = [
    "TRACE_HEADER",
    "SUMMARY_HEADER",
    "Job",
    "SummaryRow",
    "build_problem",
    "build_init",
    "jobs_for",
    "sweep_jobs",
    "ablation_jobs",
    "execute",
    "trace_csv",
    "summary_from_rows",
    "read_trace",
    "write_atomic",
]

TRACE_HEADER = ["iter", "loss", "rel_err", "balance_gap", "sigma_min_gram", "lambda", "elapsed_s", "status"]
SUMMARY_HEADER = ["label", "method", "seed", "value", "final_rel_err", "iters_to_1e-6", "wall_time_s", "status"]


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temp file in the same directory and rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_csv(trace, timing=True):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for r in trace.rows:
        w.writerow([r.iter, _fmt(r.loss), _fmt(r.rel_err), _fmt(r.balance_gap), _fmt(r.sigma_min_gram),
                    _fmt(r.lam), _fmt(r.elapsed_s if timing else 0.0), r.status])
    return buf.getvalue()


def read_trace(path):
    """Trace CSV back as a list of dicts with float fields."""
    with open(path, newline="") as fh:
        return read_trace_text(fh.read())


@dataclass(frozen=True)
class SummaryRow:
    label: str
    method: str
    seed: int
    value: str
    final_rel_err: float
    iters_to_1e6: object
    wall_time_s: float
    status: str

    def cells(self):
        it = "" if self.iters_to_1e6 is None else str(self.iters_to_1e6)
        return [self.label, self.method, str(self.seed), self.value, _fmt(self.final_rel_err), it,
                _fmt(self.wall_time_s), self.status]


def summary_from_rows(rows, label, method, seed, value=""):
    """Summary row computed only from trace rows (dicts as returned by :func:`read_trace`)."""
    last = rows[-1]
    status = last["status"]
    final = last["rel_err"] if status == "ok" else math.inf
    hit = next((r["iter"] for r in rows if r["status"] == "ok" and r["rel_err"] <= 1e-6), None)
    return SummaryRow(label, method, seed, value, final, hit, last["elapsed_s"], status)


def summary_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


# --------------------------------------------------------------------------- problem assembly


def build_problem(cfg, seed):
    p = cfg.problem
    return gen_problem(p.ground_truth(seed), p.kind, m=p.m, op_seed=p.op_seed + seed,
                       noise_std=p.noise_std)


def build_init(problem, init, rank, seed):
    if init.kind == "spectral":
        return spectral_init(problem.model, rank)
    return random_init(problem.target.dims, rank, scale=init.scale, seed=seed)


@dataclass(frozen=True)
class Job:
    """One solver run: a file name, the solver spec and the repeat seed."""

    filename: str
    label: str
    solver: object
    seed: int
    value: str = ""


def _value_tag(v):
    return str(v).replace("/", "_")


def jobs_for(cfg):
    return [Job(f"seed{s}_{sv.label}.csv", sv.label, sv, s) for s in cfg.seeds for sv in cfg.solvers]


def sweep_jobs(cfg, axis, values):
    jobs = []
    for s in cfg.seeds:
        for sv in cfg.solvers:
            for v in values:
                if axis == "step_size":
                    c = replace(sv.config, step_size=float(v))
                    tag = _fmt(float(v))
                else:
                    d = parse_damping(v)
                    c = replace(sv.config, damping=d)
                    tag = str(format_damping(d))
                jobs.append(Job(f"seed{s}_{sv.label}_{axis}={_value_tag(tag)}.csv", sv.label,
                                replace(sv, config=c), s, tag))
    return jobs


def ablation_jobs(cfg):
    jobs = []
    for s in cfg.seeds:
        for sv in cfg.solvers:
            for on in (True, False):
                tag = "rebalance" if on else "no-rebalance"
                jobs.append(Job(f"seed{s}_{sv.label}_{tag}.csv", sv.label,
                                replace(sv, config=replace(sv.config, rebalance=on)), s, tag))
    return jobs


def execute(cfg, jobs, out_dir, threads=1, timing=True, log=None):
    """Run ``jobs`` and write traces plus ``summary.csv`` under ``out_dir``.

    Problems are built once per seed. With ``threads > 1`` independent runs
    go to a thread pool; outputs do not depend on scheduling.
    """
    problems = {s: build_problem(cfg, s) for s in sorted({j.seed for j in jobs})}

    def one(job):
        prob = problems[job.seed]
        init = build_init(prob, job.solver.init or cfg.init, cfg.rank, job.seed)
        t0 = time.perf_counter()
        trace = run(prob.model, init, job.solver.config)
        text = trace_csv(trace, timing)
        write_atomic(os.path.join(out_dir, job.filename), text)
        if log:
            log(f"{job.filename}: {trace.status} rel_err={trace.rows[-1].rel_err:.3e} "
                f"iters={len(trace) - 1} ({time.perf_counter() - t0:.1f}s)")
        return text

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            texts = list(pool.map(one, jobs))
    else:
        texts = [one(j) for j in jobs]

    rows: List[SummaryRow] = []
    for job, text in zip(jobs, texts):
        parsed = read_trace_text(text)
        rows.append(summary_from_rows(parsed, job.label, job.solver.method, job.seed, job.value))
    write_atomic(os.path.join(out_dir, "summary.csv"), summary_csv(rows))
    return rows


def read_trace_text(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for r in rows:
        d = {k: float(v) for k, v in r.items() if k != "status"}
        d["iter"] = int(d["iter"])
        d["status"] = r["status"]
        out.append(d)
    return out
