"""Geometric diagnostics on factor iterates: principal angles, dilation gap, balance."""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch, ZeroError
from .factors import FactorPair
from .tensor_core import Tensor3, fro_norm, irfft3, rfft3
from .tlinalg import RANK_TOL, half_qr

__all__ = ["column_projector", "diag_angles", "dilation_gap", "stack_factors", "balance_gap"]


def _half_basis(a, tol):
    """Per half-slice orthonormal basis of the numerical column space (via QR)."""
    n, r, n3 = a.dims
    half = rfft3(a.slices)
    q, w = half_qr(half, n3) if n >= r else _wide_qr(half)
    d = np.abs(np.diagonal(w, axis1=1, axis2=2))
    scale = d.max() if d.size else 0.0
    keep = d > tol * max(scale, 1e-300)
    return [q[k][:, keep[k]] for k in range(q.shape[0])]


def _wide_qr(half):
    """QR of wide slices, zero-padded to ``r`` columns so the diagonal test still applies."""
    h, n, r = half.shape
    q = np.zeros((h, n, r), dtype=np.complex128)
    w = np.zeros((h, r, r), dtype=np.complex128)
    qn, wn = np.linalg.qr(half, mode="complete")
    q[:, :, :n], w[:, :n, :] = qn, wn
    return q, w


def column_projector(a, tol=RANK_TOL):
    """Half-spectrum projectors ``Q_k Q_k^H`` onto the column space of ``a``, shape (h, n, n)."""
    basis = _half_basis(a, tol)
    return np.stack([b @ np.conj(b).T for b in basis])


def diag_angles(L, R, x_star, tol=RANK_TOL):
    """``(sin theta_L, sin theta_R)`` of the iterate ``L * R^T`` against ``x_star``.

    ``sin theta_L = ||(I - P_L) * X*||_F / ||L * R^T - X*||_F`` and likewise
    ``||X* * (I - P_R)||_F`` on the right, with ``P_L``, ``P_R`` the projectors
    onto the numerical column spaces of ``L`` and ``R``.
    """
    pair = FactorPair(L, R)
    if pair.dims != x_star.dims:
        raise DimMismatch(f"iterate dims {pair.dims} vs target {x_star.dims}")
    denom = fro_norm(pair.product - x_star)
    if denom == 0:
        raise ZeroError("iterate equals the target; angles undefined")
    n3 = x_star.dims[2]
    xh = rfft3(x_star.slices)
    pl = column_projector(L, tol)
    pr = column_projector(R, tol)
    left = xh - pl @ xh
    # X (I - P_R): P_R acts on the row side through its conjugate transpose, which is itself
    right = xh - xh @ np.conj(pr).transpose(0, 2, 1)
    sl = fro_norm(Tensor3._wrap(irfft3(left, n3)))
    sr = fro_norm(Tensor3._wrap(irfft3(right, n3)))
    return sl / denom, sr / denom


def stack_factors(pair):
    """``F = [L; R]``, an (n1 + n2) x r x n3 tensor."""
    return Tensor3._wrap(np.concatenate([pair.L.slices, pair.R.slices], axis=1))


def dilation_gap(pair, star):
    """``||F F^T - F* F*^T||_F`` for stacked factors of ``pair`` and ``star``."""
    if pair.dims != star.dims:
        raise DimMismatch(f"pair dims {pair.dims} vs {star.dims}")
    f, fs = stack_factors(pair), stack_factors(star)
    return fro_norm(f @ f.T - fs @ fs.T)


def balance_gap(pair, relative=False):
    """``||L^T L - R^T R||_F``, optionally divided by ``||L^T L||_F``."""
    gap = pair.balance_gap
    if not relative:
        return gap
    ref = fro_norm(pair.L.T @ pair.L)
    return gap / ref if ref > 0 else gap
