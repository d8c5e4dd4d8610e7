"""APGD, ScaledGD and factorized GD under a common stepping interface."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from .errors import Diverged, SingularPreconditioner
from .factors import FactorPair
from .objectives import grad_L, grad_R, loss_value
from .tensor_core import Tensor3, fro_norm, irfft3, rfft3
from .tlinalg import _half_svd, gram_eigenvalues, half_qr, precond_solve

__all__ = [
    "FactorPair",
    "DampingSchedule",
    "SolverConfig",
    "TraceRow",
    "IterTrace",
    "rebalance",
    "apgd_step",
    "scaledgd_step",
    "fgd_step",
    "run",
    "damping_upper_bound",
    "METHODS",
]

METHODS = ("apgd", "scaledgd", "fgd")
STATUS_OK, STATUS_DIVERGED, STATUS_SINGULAR = "ok", "diverged", "singular"


@dataclass(frozen=True)
class DampingSchedule:
    """``lambda_t = f(X_t) / c`` (``kind="proportional"``) or a fixed ``lambda``."""

    kind: str = "proportional"
    value: float = 10.0

    def __post_init__(self):
        if self.kind not in ("proportional", "fixed"):
            raise ValueError(f"unknown damping kind {self.kind!r}")
        if not self.value > 0:
            raise ValueError("damping constant must be positive")

    @classmethod
    def proportional(cls, c=10.0):
        return cls("proportional", float(c))

    @classmethod
    def fixed(cls, lam):
        return cls("fixed", float(lam))

    def __call__(self, loss):
        if self.kind == "fixed":
            return self.value
        return max(float(loss), 0.0) / self.value


@dataclass(frozen=True)
class SolverConfig:
    method: str = "apgd"
    step_size: float = 0.5
    max_iters: int = 1000
    damping: DampingSchedule = field(default_factory=DampingSchedule)
    rebalance: bool = True
    stop_tol: float = 1e-12
    divergence_guard: float = 1e6

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.step_size > 0:
            raise ValueError("step size must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")


@dataclass(frozen=True)
class TraceRow:
    iter: int
    loss: float
    rel_err: float
    balance_gap: float
    sigma_min_gram: float
    lam: float
    elapsed_s: float
    status: str = STATUS_OK


@dataclass
class IterTrace:
    method: str
    rows: List[TraceRow] = field(default_factory=list)
    pair: Optional[FactorPair] = None

    @property
    def status(self):
        return self.rows[-1].status if self.rows else STATUS_OK

    @property
    def final_rel_err(self):
        """Last relative error; ``inf`` when the run did not end ``ok``."""
        if self.status != STATUS_OK:
            return math.inf
        return self.rows[-1].rel_err

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    def iters_to(self, tol):
        """First iteration with ``rel_err <= tol`` or ``None``."""
        for r in self.rows:
            if r.status == STATUS_OK and r.rel_err <= tol:
                return r.iter
        return None

    def __len__(self):
        return len(self.rows)


def rebalance(L_in, R_in):
    """Re-factor so that ``L^T * L = R^T * R`` while keeping ``L * R^T``.

    TQR of both factors, t-SVD of ``W_L * W_R^T``, then
    ``L = Q_L * U * S^(1/2)`` and ``R = Q_R * V * S^(1/2)``; done slice-wise
    on the half spectrum.
    """
    n3 = L_in.dims[2]
    qL, wL = half_qr(rfft3(L_in.slices), n3)
    qR, wR = half_qr(rfft3(R_in.slices), n3)
    u, s, vh = _half_svd(wL @ np.conj(wR).transpose(0, 2, 1), n3)
    root = np.sqrt(s)[:, None, :]
    L = qL @ (u * root)
    R = qR @ (np.conj(vh).transpose(0, 2, 1) * root)
    r = L_in.dims[1]
    if L.shape[2] < r:
        # r exceeds n1 or n2: the extra columns carry nothing, keep them as zeros
        pad = ((0, 0), (0, 0), (0, r - L.shape[2]))
        L, R = np.pad(L, pad), np.pad(R, pad)
    return FactorPair(Tensor3._wrap(irfft3(L, n3)), Tensor3._wrap(irfft3(R, n3)))


def _solve(g, m, lam):
    if lam == 0 and not np.any(g.slices):
        return g
    return precond_solve(g, m, lam)


def _guard(model, pair, cfg, ref):
    loss = loss_value(model, pair) if pair.is_finite() else math.inf
    norm = pair.factor_norm() if pair.is_finite() else math.inf
    loss0, norm0 = ref
    if not (math.isfinite(loss) and math.isfinite(norm)):
        raise Diverged("non-finite iterate")
    # floor so that a start at (numerically) zero loss does not trip the guard on round-off
    loss_floor = np.finfo(float).eps * max(norm0, 1.0) ** 4
    if loss > cfg.divergence_guard * max(loss0, loss_floor) or norm > cfg.divergence_guard * max(norm0, 1e-300):
        raise Diverged(f"loss {loss:.3e} / factor norm {norm:.3e} beyond guard")


def _reference(model, pair):
    return loss_value(model, pair), pair.factor_norm()


def apgd_step(model, pair, cfg, ref=None):
    """One APGD iteration; returns ``(new_pair, lambda_t)``.

    Update ``L`` with the damped preconditioner built from ``R``, rebalance,
    re-evaluate the gradient, update ``R`` likewise and rebalance again. The
    same ``lambda_t`` serves both half steps.
    """
    ref = ref or _reference(model, pair)
    eta = cfg.step_size
    lam = cfg.damping(loss_value(model, pair))
    L_tilde = pair.L - eta * _solve(grad_L(model, pair), pair.R, lam)
    half = rebalance(L_tilde, pair.R) if cfg.rebalance else FactorPair(L_tilde, pair.R)
    _guard(model, half, cfg, ref)
    R_tilde = half.R - eta * _solve(grad_R(model, half), half.L, lam)
    new = rebalance(half.L, R_tilde) if cfg.rebalance else FactorPair(half.L, R_tilde)
    _guard(model, new, cfg, ref)
    return new, lam


def scaledgd_step(model, pair, cfg, ref=None):
    """Simultaneous undamped preconditioned update of both factors."""
    ref = ref or _reference(model, pair)
    eta = cfg.step_size
    gl, gr = grad_L(model, pair), grad_R(model, pair)
    L = pair.L - eta * _solve(gl, pair.R, 0.0)
    R = pair.R - eta * _solve(gr, pair.L, 0.0)
    new = FactorPair(L, R)
    _guard(model, new, cfg, ref)
    return new, 0.0


def fgd_step(model, pair, cfg, ref=None):
    """Plain simultaneous gradient step on both factors."""
    ref = ref or _reference(model, pair)
    eta = cfg.step_size
    new = FactorPair(pair.L - eta * grad_L(model, pair), pair.R - eta * grad_R(model, pair))
    _guard(model, new, cfg, ref)
    return new, 0.0


STEPS = {"apgd": apgd_step, "scaledgd": scaledgd_step, "fgd": fgd_step}


def _row(model, pair, it, lam, elapsed, target_norm):
    loss = loss_value(model, pair)
    target = getattr(model, "target", None)
    if target is not None:
        rel = fro_norm(pair.product - target) / target_norm
    else:
        rel = math.nan
    eig = min(gram_eigenvalues(pair.L).min(), gram_eigenvalues(pair.R).min())
    return TraceRow(it, loss, rel, pair.balance_gap, float(eig), lam, elapsed)


def run(model, init, cfg, clock=time.perf_counter, callback=None):
    """Iterate ``cfg.method`` from ``init``.

    Stops when the relative error (or, without a known target, the loss
    relative to its initial value) reaches ``cfg.stop_tol``, after
    ``cfg.max_iters`` iterations, or on divergence/singularity, which is
    recorded as the status of the last trace row rather than raised.
    ``callback(iter, pair)`` sees every accepted iterate, including the start.
    """
    step = STEPS[cfg.method]
    target = getattr(model, "target", None)
    target_norm = fro_norm(target) if target is not None else 1.0
    trace = IterTrace(cfg.method)
    start = clock()
    pair = init
    row = _row(model, pair, 0, math.nan, 0.0, target_norm)
    trace.rows.append(row)
    ref = _reference(model, pair)
    if callback:
        callback(0, pair)

    def done(r):
        metric = r.rel_err if target is not None else r.loss / max(ref[0], 1e-300)
        return metric <= cfg.stop_tol

    for it in range(1, cfg.max_iters + 1):
        if done(row):
            break
        try:
            pair, lam = step(model, pair, cfg, ref)
        except SingularPreconditioner:
            trace.rows.append(replace(row, iter=it, loss=math.nan, rel_err=math.nan,
                                      elapsed_s=clock() - start, status=STATUS_SINGULAR))
            break
        except Diverged:
            trace.rows.append(replace(row, iter=it, loss=math.inf, rel_err=math.inf,
                                      elapsed_s=clock() - start, status=STATUS_DIVERGED))
            break
        row = _row(model, pair, it, lam, clock() - start, target_norm)
        trace.rows.append(row)
        if callback:
            callback(it, pair)
    trace.pair = pair
    return trace


def damping_upper_bound(loss, loss_star, L, mu, s_rm, s_rm_star, n3):
    """Largest damping admitted by the linear-convergence theory.

    ``sqrt(2 / (L c1^2)) (f_t - f*)^(1/2)`` with
    ``c1 = 1/(sqrt(5) - 1) + sqrt(2 (s_rm - s_rm*)) (L + mu) / sqrt(mu L n3)``.
    Diagnostic only; solvers never use it.
    """
    c1 = 1.0 / (math.sqrt(5.0) - 1.0) + math.sqrt(2.0 * (s_rm - s_rm_star)) * (L + mu) / math.sqrt(mu * L * n3)
    return math.sqrt(2.0 / (L * c1 ** 2)) * math.sqrt(max(loss - loss_star, 0.0))
