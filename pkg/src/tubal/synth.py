"""Synthetic ground truths with prescribed multi-rank and condition number."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import BadSpec
from .factors import FactorPair
from .objectives import FactorizationLoss, MeasurementOperator, RecoveryLoss
from .tensor_core import Tensor3, irfft3, n_half, self_conjugate

__all__ = ["GroundTruthSpec", "Problem", "gen_ground_truth", "gen_problem", "singular_value_ladder"]


@dataclass(frozen=True)
class GroundTruthSpec:
    """Dims, per-frequency-slice ranks, condition number and seed of ``X*``.

    ``sigma_max`` is the largest singular value of the block-diagonal
    Fourier matrix; the smallest is ``sigma_max / kappa``.
    """

    n1: int
    n2: int
    n3: int
    multi_rank: tuple
    kappa: float = 1.0
    seed: int = 0
    sigma_max: float = 1.0

    @classmethod
    def full(cls, n1, n2, n3, rank, **kw):
        """Spec with multi-rank ``[rank] * n3``."""
        return cls(n1, n2, n3, (rank,) * n3, **kw)

    @property
    def dims(self):
        return (self.n1, self.n2, self.n3)

    @property
    def tubal_rank(self):
        return max(self.multi_rank)

    def to_dict(self):
        d = asdict(self)
        d["multi_rank"] = list(self.multi_rank)
        return d

    def validate(self):
        n1, n2, n3 = self.dims
        if min(n1, n2, n3) < 1:
            raise BadSpec("dims must be positive")
        rm = tuple(int(r) for r in self.multi_rank)
        if len(rm) != n3:
            raise BadSpec(f"multi-rank has {len(rm)} entries, expected n3={n3}")
        if any(r < 1 or r > min(n1, n2) for r in rm):
            raise BadSpec(f"multi-rank entries must lie in [1, {min(n1, n2)}]")
        for k in range(1, n3):
            if rm[k] != rm[n3 - k]:
                raise BadSpec(f"slices {k + 1} and {n3 - k + 1} are conjugate and need equal rank")
        if not self.kappa >= 1:
            raise BadSpec("kappa must be >= 1")
        if not self.sigma_max > 0:
            raise BadSpec("sigma_max must be positive")
        independent = sum(rm[: n_half(n3)])
        if independent == 1 and self.kappa != 1:
            raise BadSpec("a single singular value cannot realize kappa > 1")


def singular_value_ladder(spec):
    """Per-slice singular values (half spectrum), log-uniform from sigma_max down to sigma_max/kappa.

    Values are dealt round-robin across slices so every slice sees the
    whole range.
    """
    h = n_half(spec.n3)
    ranks = list(spec.multi_rank[:h])
    total = sum(ranks)
    if total == 1:
        values = np.array([spec.sigma_max])
    else:
        values = spec.sigma_max * spec.kappa ** (-np.linspace(0.0, 1.0, total))
    per_slice = [[] for _ in range(h)]
    i = 0
    while i < total:
        for k in range(h):
            if len(per_slice[k]) < ranks[k] and i < total:
                per_slice[k].append(values[i])
                i += 1
    return [np.array(v) for v in per_slice]


def _orthonormal(rng, n, r, real):
    g = rng.standard_normal((n, r))
    if not real:
        g = g + 1j * rng.standard_normal((n, r))
    q, w = np.linalg.qr(g)
    # fix the QR sign freedom so the draw is a deterministic function of rng
    d = np.diagonal(w)
    return q * (d / np.abs(d))


def gen_ground_truth(spec):
    """Return ``(X*, L*, R*)`` with ``X* = L* * R*^T`` and balanced factors."""
    spec.validate()
    n1, n2, n3 = spec.dims
    h = n_half(n3)
    r_star = spec.tubal_rank
    real = self_conjugate(n3)
    rng = np.random.default_rng(spec.seed)
    sigmas = singular_value_ladder(spec)
    Lh = np.zeros((h, n1, r_star), dtype=np.complex128)
    Rh = np.zeros((h, n2, r_star), dtype=np.complex128)
    for k in range(h):
        rk = spec.multi_rank[k]
        U = _orthonormal(rng, n1, rk, k in real)
        V = _orthonormal(rng, n2, rk, k in real)
        root = np.sqrt(sigmas[k])
        Lh[k, :, :rk] = U * root
        Rh[k, :, :rk] = V * root
    L = Tensor3._wrap(irfft3(Lh, n3))
    R = Tensor3._wrap(irfft3(Rh, n3))
    return L @ R.T, L, R


@dataclass
class Problem:
    spec: GroundTruthSpec
    kind: str
    model: object
    target: Tensor3
    factors: FactorPair
    operator: Optional[MeasurementOperator] = None


def gen_problem(spec, kind="factorization", m=None, op_seed=0, noise_std=0.0, noise_seed=None,
                materialize=True):
    """Assemble a loss model around a fresh ground truth.

    ``kind`` is ``"factorization"`` or ``"recovery"``; recovery needs the
    sample count ``m`` and builds ``y = M(X*)`` (plus optional Gaussian
    noise of std ``noise_std``).
    """
    kind = kind.lower()
    if kind not in ("factorization", "recovery"):
        raise BadSpec(f"unknown problem kind {kind!r}")
    X, L, R = gen_ground_truth(spec)
    factors = FactorPair(L, R)
    if kind == "factorization":
        return Problem(spec, kind, FactorizationLoss(X), X, factors)
    if m is None or m < 1:
        raise BadSpec("recovery needs m >= 1")
    op = MeasurementOperator(m, spec.dims, op_seed, materialize=materialize)
    y = op.apply(X)
    if noise_std:
        rng = np.random.default_rng(op_seed if noise_seed is None else noise_seed)
        y = y + noise_std * rng.standard_normal(y.shape)
    return Problem(spec, kind, RecoveryLoss(op, y, target=X), X, factors, op)
