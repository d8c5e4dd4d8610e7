import numpy as np
import pytest

from tubal.tensor_core import Tensor3


def rand_tensor(rng, n1, n2, n3):
    return Tensor3(rng.standard_normal((n3, n1, n2)))


def rel(a, b):
    """Relative Frobenius distance of two arrays/tensors."""
    a = getattr(a, "slices", a)
    b = getattr(b, "slices", b)
    denom = max(np.linalg.norm(np.ravel(b)), 1e-300)
    return np.linalg.norm(np.ravel(a) - np.ravel(b)) / denom


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
