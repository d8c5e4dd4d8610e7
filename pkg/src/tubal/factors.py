"""Factor pairs ``(L, R)`` representing ``X = L * R^T``."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimMismatch
from .tensor_core import Tensor3, fro_norm, rfft3


@dataclass(frozen=True, eq=False)
class FactorPair:
    """Factors ``L`` (n1 x r x n3) and ``R`` (n2 x r x n3).

    Frequency images, the product and loss evaluations are computed lazily
    and cached on the instance; the pair itself never changes.
    """

    L: Tensor3
    R: Tensor3
    _evals: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        n1, r, n3 = self.L.dims
        n2, r2, m3 = self.R.dims
        if r != r2 or n3 != m3:
            raise DimMismatch(f"factor dims disagree: L {self.L.dims}, R {self.R.dims}")

    @property
    def rank(self):
        return self.L.dims[1]

    @property
    def dims(self):
        """Dims ``(n1, n2, n3)`` of the represented tensor."""
        return (self.L.dims[0], self.R.dims[0], self.L.dims[2])

    @cached_property
    def L_half(self):
        return rfft3(self.L.slices)

    @cached_property
    def R_half(self):
        return rfft3(self.R.slices)

    @cached_property
    def product(self):
        return self.L @ self.R.T

    @cached_property
    def balance_gap(self):
        """``||L^T * L - R^T * R||_F``."""
        return fro_norm(self.L.T @ self.L - self.R.T @ self.R)

    def is_finite(self):
        return self.L.is_finite() and self.R.is_finite()

    def factor_norm(self):
        return float(np.sqrt(fro_norm(self.L) ** 2 + fro_norm(self.R) ** 2))

    def evaluate(self, model):
        """``(loss, grad f)`` at the product, memoized per model."""
        key = id(model)
        hit = self._evals.get(key)
        if hit is None or hit[0] is not model:
            hit = (model, model.value_and_gradient(self.product))
            self._evals[key] = hit
        return hit[1]
