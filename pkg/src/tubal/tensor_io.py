"""TUB3 binary tensor files.

Layout (little-endian)::

    magic     4 bytes  b"TUB3"
    version   u32      currently 1
    n1 n2 n3  3 x u64
    ordering  u8       0 = slice-major (frontal slice index outermost)
    fft       u8       0 = forward unnormalized, inverse scaled by 1/n3
    reserved  2 bytes  zero
    data      n1*n2*n3 x f64, slice-major
"""

import os
import struct
import tempfile

import numpy as np

from .errors import TubalError
from .tensor_core import Tensor3

MAGIC = b"TUB3"
VERSION = 1
ORDERING_SLICE_MAJOR = 0
FFT_FORWARD_UNNORMALIZED = 0

_HEADER = struct.Struct("<4sI3QBB2x")


class TensorFileError(TubalError, IOError):
    """Malformed or unsupported TUB3 file."""


def dumps(x):
    n1, n2, n3 = x.dims
    header = _HEADER.pack(MAGIC, VERSION, n1, n2, n3, ORDERING_SLICE_MAJOR, FFT_FORWARD_UNNORMALIZED)
    return header + x.slices.astype("<f8").tobytes()


def loads(buf):
    if len(buf) < _HEADER.size:
        raise TensorFileError("truncated header")
    magic, version, n1, n2, n3, ordering, fft = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise TensorFileError(f"bad magic {magic!r}")
    if version != VERSION:
        raise TensorFileError(f"unsupported version {version}")
    if ordering != ORDERING_SLICE_MAJOR or fft != FFT_FORWARD_UNNORMALIZED:
        raise TensorFileError(f"unsupported layout descriptor ({ordering}, {fft})")
    count = n1 * n2 * n3
    payload = buf[_HEADER.size :]
    if len(payload) != 8 * count:
        raise TensorFileError(f"expected {8 * count} data bytes, found {len(payload)}")
    data = np.frombuffer(payload, dtype="<f8").reshape(n3, n1, n2)
    return Tensor3(data)


def save_tensor(path, x):
    """Write ``x`` atomically (temp file + rename)."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tub3-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(dumps(x))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_tensor(path):
    with open(path, "rb") as fh:
        return loads(fh.read())
