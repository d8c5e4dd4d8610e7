"""Dense third-order tensors and the t-product algebra.

Storage is slice-major: a tensor with dims ``(n1, n2, n3)`` is held as a
C-contiguous ``(n3, n1, n2)`` float64 array, so frontal slice ``k`` is
``data[k]``. The FFT along the tube axis is forward-unnormalized and the
inverse carries the ``1/n3`` factor, as with ``numpy.fft``.

Real tensors have conjugate-symmetric spectra, so slice-wise kernels only
touch the first ``n3 // 2 + 1`` frequency slices ("half spectrum") and the
rest are filled by conjugation.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimMismatch, SymmetryViolation

__all__ = [
    "LAYOUT",
    "IMAG_TOL",
    "Tensor3",
    "FreqTensor",
    "to_freq",
    "from_freq",
    "tprod",
    "bcirc",
    "unfold",
    "fold",
    "bdiag",
    "bcirc_oracle_tprod",
    "ttranspose",
    "identity_tensor",
    "zeros",
    "inner",
    "fro_norm",
    "spectral_norm",
]

#: Fixed storage/transform convention, written into every TUB3 header.
LAYOUT = {"ordering": "slice-major", "fft_convention": "forward-unnormalized/inverse-1/n3"}

#: Relative imaginary residual tolerated by :func:`from_freq`.
IMAG_TOL = 1e-10


def n_half(n3):
    """Number of independent frequency slices of a real tensor."""
    return n3 // 2 + 1


def self_conjugate(n3):
    """Indices (into the half spectrum) of slices that are their own conjugate."""
    if n3 % 2 == 0 and n3 > 1:
        return (0, n3 // 2)
    return (0,)


def mirror(half, n3):
    """Expand a half spectrum ``(h, ...)`` to all ``n3`` slices by conjugation."""
    h = n_half(n3)
    full = np.empty((n3,) + half.shape[1:], dtype=np.complex128)
    full[:h] = half
    if n3 > h:
        full[h:] = np.conj(half[1 : n3 - h + 1][::-1])
    return full


def rfft3(data):
    return np.fft.rfft(data, axis=0)


def irfft3(half, n3):
    return np.fft.irfft(half, n=n3, axis=0)


class Tensor3:
    """Immutable real tensor of shape ``(n1, n2, n3)``.

    Construct from slice-major data ``(n3, n1, n2)`` or, via
    :meth:`from_array`, from a MATLAB-style ``(n1, n2, n3)`` array.

    Supports ``+``, ``-``, scalar ``*`` and ``/``, ``@`` for the t-product
    and ``.T`` for the tensor transpose.
    """

    __slots__ = ("_data",)
    __array_priority__ = 1000

    def __init__(self, slices):
        data = np.array(slices, dtype=np.float64, order="C", copy=True)
        if data.ndim != 3 or 0 in data.shape:
            raise DimMismatch(f"expected a non-empty (n3, n1, n2) array, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("tensor entries must be finite")
        data.flags.writeable = False
        self._data = data

    @classmethod
    def _wrap(cls, data):
        # trusted internal constructor; skips copy and finiteness scan
        obj = cls.__new__(cls)
        data = np.ascontiguousarray(data, dtype=np.float64)
        data.flags.writeable = False
        obj._data = data
        return obj

    @classmethod
    def from_array(cls, array):
        """Build from an ``(n1, n2, n3)`` array (tube axis last)."""
        array = np.asarray(array, dtype=np.float64)
        if array.ndim == 2:
            array = array[:, :, None]
        return cls(np.moveaxis(array, 2, 0))

    def to_array(self):
        """Copy out as an ``(n1, n2, n3)`` array."""
        return np.moveaxis(self._data, 0, 2).copy()

    @property
    def slices(self):
        """Read-only ``(n3, n1, n2)`` view of the frontal slices."""
        return self._data

    @property
    def dims(self):
        n3, n1, n2 = self._data.shape
        return (n1, n2, n3)

    @property
    def T(self):
        return ttranspose(self)

    def to_freq(self):
        return to_freq(self)

    def is_finite(self):
        return bool(np.all(np.isfinite(self._data)))

    def _check_same(self, other):
        if not isinstance(other, Tensor3):
            return NotImplemented
        if other.dims != self.dims:
            raise DimMismatch(f"dims differ: {self.dims} vs {other.dims}")
        return None

    def __add__(self, other):
        bad = self._check_same(other)
        if bad is NotImplemented:
            return bad
        return Tensor3._wrap(self._data + other._data)

    def __sub__(self, other):
        bad = self._check_same(other)
        if bad is NotImplemented:
            return bad
        return Tensor3._wrap(self._data - other._data)

    def __neg__(self):
        return Tensor3._wrap(-self._data)

    def __mul__(self, scalar):
        if isinstance(scalar, Tensor3) or not np.isscalar(scalar):
            return NotImplemented
        return Tensor3._wrap(self._data * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Tensor3) or not np.isscalar(scalar):
            return NotImplemented
        return Tensor3._wrap(self._data / float(scalar))

    def __matmul__(self, other):
        if not isinstance(other, Tensor3):
            return NotImplemented
        return tprod(self, other)

    def __repr__(self):
        n1, n2, n3 = self.dims
        return f"Tensor3({n1}x{n2}x{n3}, fro={fro_norm(self):.6g})"


class FreqTensor:
    """Frequency-domain image of a tensor: ``n3`` complex ``n1 x n2`` slices."""

    __slots__ = ("_slices",)

    def __init__(self, slices):
        s = np.array(slices, dtype=np.complex128, order="C", copy=True)
        if s.ndim != 3 or 0 in s.shape:
            raise DimMismatch(f"expected a non-empty (n3, n1, n2) array, got shape {s.shape}")
        s.flags.writeable = False
        self._slices = s

    @classmethod
    def _wrap(cls, slices):
        obj = cls.__new__(cls)
        slices = np.ascontiguousarray(slices, dtype=np.complex128)
        slices.flags.writeable = False
        obj._slices = slices
        return obj

    @property
    def slices(self):
        return self._slices

    @property
    def half(self):
        """The first ``n3 // 2 + 1`` slices, enough to determine a real tensor."""
        return self._slices[: n_half(self._slices.shape[0])]

    @property
    def dims(self):
        n3, n1, n2 = self._slices.shape
        return (n1, n2, n3)

    def __repr__(self):
        n1, n2, n3 = self.dims
        return f"FreqTensor({n1}x{n2}x{n3})"


def to_freq(x):
    """DFT along the tube axis (forward, unnormalized)."""
    n3 = x.dims[2]
    return FreqTensor._wrap(mirror(rfft3(x.slices), n3))


def from_freq(f):
    """Inverse DFT with ``1/n3`` scaling.

    Raises :class:`SymmetryViolation` when the imaginary part of the result
    exceeds ``IMAG_TOL`` times its Frobenius norm.
    """
    z = np.fft.ifft(f.slices, axis=0)
    scale = np.linalg.norm(z.ravel())
    resid = np.max(np.abs(z.imag)) if z.size else 0.0
    if resid > IMAG_TOL * scale:
        raise SymmetryViolation(
            f"imaginary residual {resid:.3e} exceeds {IMAG_TOL:g} x {scale:.3e}"
        )
    return Tensor3._wrap(z.real)


def _check_tprod(a, b):
    n1, p, n3 = a.dims
    q, n2, m3 = b.dims
    if p != q or n3 != m3:
        raise DimMismatch(f"cannot t-multiply {a.dims} by {b.dims}")
    return n1, n2, n3


def tprod(a, b):
    """t-product ``a * b`` via slice-wise products in the Fourier domain."""
    _, _, n3 = _check_tprod(a, b)
    return Tensor3._wrap(irfft3(rfft3(a.slices) @ rfft3(b.slices), n3))


def bcirc(a):
    """Block-circulant ``(n1 n3) x (n2 n3)`` matrix of ``a``."""
    n1, n2, n3 = a.dims
    out = np.empty((n3 * n1, n3 * n2))
    for i in range(n3):
        for j in range(n3):
            out[i * n1 : (i + 1) * n1, j * n2 : (j + 1) * n2] = a.slices[(i - j) % n3]
    return out


def unfold(a):
    """Stack the frontal slices vertically: ``(n1 n3) x n2``."""
    n1, n2, n3 = a.dims
    return a.slices.reshape(n3 * n1, n2).copy()


def fold(mat, n3):
    """Inverse of :func:`unfold`."""
    mat = np.asarray(mat, dtype=np.float64)
    rows, n2 = mat.shape
    if rows % n3:
        raise DimMismatch(f"{rows} rows is not a multiple of n3={n3}")
    return Tensor3(mat.reshape(n3, rows // n3, n2))


def bdiag(a):
    """Block-diagonal complex matrix of the frequency slices of ``a``."""
    f = a if isinstance(a, FreqTensor) else to_freq(a)
    return scipy.linalg.block_diag(*f.slices)


def bcirc_oracle_tprod(a, b):
    """Reference t-product ``fold(bcirc(a) @ unfold(b))``.

    Materializes the block-circulant matrix; meant for testing only.
    """
    _, _, n3 = _check_tprod(a, b)
    return fold(bcirc(a) @ unfold(b), n3)


def ttranspose(a):
    """Tensor transpose: transpose every slice, reverse slices 2..n3."""
    n3 = a.dims[2]
    order = (-np.arange(n3)) % n3
    return Tensor3._wrap(a.slices[order].transpose(0, 2, 1))


def identity_tensor(n, n3):
    if n < 1 or n3 < 1:
        raise ValueError("identity_tensor needs n, n3 >= 1")
    data = np.zeros((n3, n, n))
    data[0] = np.eye(n)
    return Tensor3._wrap(data)


def zeros(n1, n2, n3):
    return Tensor3._wrap(np.zeros((n3, n1, n2)))


def inner(a, b):
    """Real inner product: sum of entrywise products."""
    if a.dims != b.dims:
        raise DimMismatch(f"dims differ: {a.dims} vs {b.dims}")
    return float(np.vdot(a.slices, b.slices))


def fro_norm(a):
    return float(np.linalg.norm(a.slices.ravel()))


def spectral_norm(a):
    """Largest singular value over all frequency slices (``= ||bcirc(a)||``)."""
    half = rfft3(a.slices)
    return float(np.max(np.linalg.norm(half, ord=2, axis=(1, 2))))
