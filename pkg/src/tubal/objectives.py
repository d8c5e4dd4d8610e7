"""Loss models, the Gaussian measurement operator, and initializations."""

from __future__ import annotations

import numpy as np

from .errors import BadRank, DimMismatch
from .factors import FactorPair
from .tensor_core import Tensor3, fro_norm, zeros
from .tlinalg import fdiag_sqrt, truncated_tsvd

__all__ = [
    "MeasurementOperator",
    "FactorizationLoss",
    "RecoveryLoss",
    "loss_value",
    "grad_L",
    "grad_R",
    "spectral_init",
    "random_init",
    "zero_pair",
]

#: Rows per RNG block. Part of the operator definition: changing it changes the entries.
BLOCK_ROWS = 256


class MeasurementOperator:
    """Linear map ``X -> (<A_1, X>, ..., <A_m, X>)`` with Gaussian ``A_i``.

    Entries are i.i.d. ``N(0, 1/m)``. Row block ``b`` is drawn from the
    Philox stream keyed by ``seed`` and jumped ``b`` times, so any block can
    be regenerated independently and the operator is a pure function of
    ``(seed, m, dims)``.

    With ``materialize=True`` (default) the ``m x N`` matrix is built once;
    otherwise blocks are regenerated on every application.
    """

    def __init__(self, m, dims, seed, materialize=True):
        if m < 1:
            raise ValueError("m must be >= 1")
        self.m = int(m)
        self.dims = tuple(int(d) for d in dims)
        self.seed = int(seed)
        self.size = int(np.prod(self.dims))
        self._matrix = self._build() if materialize else None

    @classmethod
    def from_matrix(cls, matrix, dims):
        """Operator with explicitly given rows (vectorized slice-major); mainly for tests."""
        matrix = np.asarray(matrix, dtype=np.float64)
        obj = cls.__new__(cls)
        obj.dims = tuple(int(d) for d in dims)
        obj.size = int(np.prod(obj.dims))
        if matrix.ndim != 2 or matrix.shape[1] != obj.size:
            raise DimMismatch(f"matrix shape {matrix.shape} does not match dims {obj.dims}")
        obj.m = matrix.shape[0]
        obj.seed = None
        obj._matrix = matrix
        return obj

    @classmethod
    def identity(cls, dims):
        """``A_i`` = unit basis tensors, so ``M`` is the vectorization map."""
        return cls.from_matrix(np.eye(int(np.prod(dims))), dims)

    def _block(self, b):
        lo = b * BLOCK_ROWS
        rows = min(BLOCK_ROWS, self.m - lo)
        rng = np.random.Generator(np.random.Philox(self.seed).jumped(b))
        return rng.standard_normal((rows, self.size)) / np.sqrt(self.m)

    def _nblocks(self):
        return -(-self.m // BLOCK_ROWS)

    def _build(self):
        out = np.empty((self.m, self.size))
        for b in range(self._nblocks()):
            lo = b * BLOCK_ROWS
            out[lo : lo + BLOCK_ROWS] = self._block(b)
        return out

    @property
    def matrix(self):
        if self._matrix is None:
            return self._build()
        return self._matrix

    def spec(self):
        return {"seed": self.seed, "m": self.m, "dims": list(self.dims)}

    def _check(self, x):
        n1, n2, n3 = self.dims
        if x.dims != self.dims:
            raise DimMismatch(f"operator dims {self.dims} vs tensor {x.dims}")

    def apply(self, x):
        """``M(x)`` as a length-``m`` vector."""
        self._check(x)
        v = x.slices.ravel()
        if self._matrix is not None:
            return self._matrix @ v
        out = np.empty(self.m)
        for b in range(self._nblocks()):
            lo = b * BLOCK_ROWS
            out[lo : lo + BLOCK_ROWS] = self._block(b) @ v
        return out

    __call__ = apply

    def adjoint(self, y):
        """``M*(y) = sum_i y_i A_i``."""
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.m,):
            raise DimMismatch(f"expected {self.m} measurements, got shape {y.shape}")
        n1, n2, n3 = self.dims
        if self._matrix is not None:
            v = self._matrix.T @ y
        else:
            v = np.zeros(self.size)
            for b in range(self._nblocks()):
                lo = b * BLOCK_ROWS
                v += self._block(b).T @ y[lo : lo + BLOCK_ROWS]
        return Tensor3._wrap(v.reshape(n3, n1, n2))


class FactorizationLoss:
    """``f(X) = 0.5 ||X - X*||_F^2``."""

    kind = "factorization"

    def __init__(self, target):
        self.target = target
        self.dims = target.dims
        self.smoothness = 1.0

    def value_and_gradient(self, x):
        if x.dims != self.dims:
            raise DimMismatch(f"model dims {self.dims} vs {x.dims}")
        e = x - self.target
        return 0.5 * fro_norm(e) ** 2, e

    def value(self, x):
        return self.value_and_gradient(x)[0]

    def gradient(self, x):
        return self.value_and_gradient(x)[1]


class RecoveryLoss:
    """``f(X) = 0.5 ||M(X) - y||^2`` for observations ``y``.

    ``target`` (the ground truth, if known) is only used for error reporting.
    """

    kind = "recovery"

    def __init__(self, operator, y, target=None):
        self.operator = operator
        self.y = np.asarray(y, dtype=np.float64)
        self.dims = operator.dims
        self.target = target
        self._smoothness = None

    @classmethod
    def noiseless(cls, operator, target):
        return cls(operator, operator.apply(target), target=target)

    def value_and_gradient(self, x):
        res = self.operator.apply(x) - self.y
        return 0.5 * float(res @ res), self.operator.adjoint(res)

    def value(self, x):
        res = self.operator.apply(x) - self.y
        return 0.5 * float(res @ res)

    def gradient(self, x):
        return self.value_and_gradient(x)[1]

    @property
    def smoothness(self):
        """Empirical ``1 + delta`` from seeded low-tubal-rank probes."""
        if self._smoothness is None:
            self._smoothness = 1.0 + self.rip_constant()
        return self._smoothness

    def rip_constant(self, rank=None, trials=20, seed=0):
        """Largest ``| ||M(Z)||^2 / ||Z||^2 - 1 |`` over random tubal-rank probes."""
        n1, n2, n3 = self.dims
        r = rank or max(1, min(n1, n2) // 10)
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(trials):
            a = Tensor3._wrap(rng.standard_normal((n3, n1, r)))
            b = Tensor3._wrap(rng.standard_normal((n3, n2, r)))
            z = a @ b.T
            ratio = float(np.sum(self.operator.apply(z) ** 2)) / fro_norm(z) ** 2
            worst = max(worst, abs(ratio - 1.0))
        return worst


def loss_value(model, pair):
    """Loss at ``L * R^T``."""
    return pair.evaluate(model)[0]


def grad_L(model, pair):
    """``grad f(X) * R``."""
    return pair.evaluate(model)[1] @ pair.R


def grad_R(model, pair):
    """``grad f(X)^T * L``."""
    return pair.evaluate(model)[1].T @ pair.L


def spectral_init(model, r):
    """``L0 = U0 * S0^(1/2)``, ``R0 = V0 * S0^(1/2)`` from the rank-``r`` t-SVD of ``M*(y)``."""
    if not isinstance(model, RecoveryLoss):
        raise TypeError("spectral initialization needs a recovery model")
    n1, n2, _ = model.dims
    if not 1 <= r <= min(n1, n2):
        raise BadRank(f"rank {r} outside [1, {min(n1, n2)}]")
    f = truncated_tsvd(model.operator.adjoint(model.y), r)
    root = fdiag_sqrt(f.S)
    return FactorPair(f.U @ root, f.V @ root)


def random_init(dims, r, scale=1.0, seed=0):
    """Gaussian factors with std ``sqrt(scale / n1)`` and ``sqrt(scale / n2)``."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    n1, n2, n3 = dims
    rng = np.random.default_rng(seed)
    L = rng.standard_normal((n3, n1, r)) * np.sqrt(scale / n1)
    R = rng.standard_normal((n3, n2, r)) * np.sqrt(scale / n2)
    return FactorPair(Tensor3._wrap(L), Tensor3._wrap(R))


def zero_pair(dims, r):
    n1, n2, n3 = dims
    return FactorPair(zeros(n1, r, n3), zeros(n2, r, n3))
