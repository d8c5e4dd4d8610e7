"""Slice-wise factorizations and solves in the Fourier domain.

Every routine transforms its operands along the tube axis, runs a dense
kernel on each independent frequency slice, and transforms back. Slices
that are their own conjugate (index 0, and ``n3 / 2`` for even ``n3``)
are handled in real arithmetic so the results stay exactly real.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BadRank, DimMismatch, NegativeDiagonal, NumericalFailure, SingularPreconditioner
from .tensor_core import Tensor3, irfft3, mirror, rfft3, self_conjugate

__all__ = [
    "RANK_TOL",
    "TsvdFactors",
    "RankProfile",
    "tsvd",
    "truncated_tsvd",
    "tqr",
    "rank_profile",
    "precond_solve",
    "gram_eigenvalues",
    "fdiag_sqrt",
    "singular_values",
]

#: Default relative tolerance for numerical rank decisions.
RANK_TOL = 1e-9

#: Undamped Gram slices with condition number above this are singular.
SINGULAR_COND = 1.0 / (100.0 * np.finfo(float).eps)


@dataclass(frozen=True)
class TsvdFactors:
    """``X = U * S * V^T`` with orthogonal ``U``, ``V`` and f-diagonal ``S``."""

    U: Tensor3
    S: Tensor3
    V: Tensor3

    @property
    def k(self):
        return self.S.dims[0]

    def reconstruct(self):
        return self.U @ self.S @ self.V.T


@dataclass(frozen=True)
class RankProfile:
    tubal_rank: int
    multi_rank: tuple
    s_rm: int
    tol: float
    singular_values: np.ndarray
    condition_number: float


def _half_svd(half, n3):
    """SVD of every half-spectrum slice with a deterministic phase convention.

    Returns ``(u, s, vh)`` stacked over slices.
    """
    real_slices = self_conjugate(n3)
    h, n1, n2 = half.shape
    k = min(n1, n2)
    u = np.empty((h, n1, k), dtype=np.complex128)
    s = np.empty((h, k))
    vh = np.empty((h, k, n2), dtype=np.complex128)
    try:
        for i in range(h):
            mat = half[i].real if i in real_slices else half[i]
            u[i], s[i], vh[i] = np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"slice SVD failed: {exc}") from exc
    # first entry of each left vector above noise level made real nonnegative
    mag = np.abs(u)
    first = np.argmax(mag > 1e-12, axis=1)
    lead = np.take_along_axis(u, first[:, None, :], axis=1)[:, 0, :]
    absl = np.abs(lead)
    phase = np.where(absl > 0, lead / np.where(absl > 0, absl, 1.0), 1.0)
    u *= np.conj(phase)[:, None, :]
    vh *= phase[:, :, None]
    return u, s, vh


def _factors_from_half(u, s, vh, n3):
    sd = np.zeros(s.shape + (s.shape[-1],), dtype=np.complex128)
    idx = np.arange(s.shape[-1])
    sd[:, idx, idx] = s
    v = np.conj(vh).transpose(0, 2, 1)
    return TsvdFactors(
        U=Tensor3._wrap(irfft3(u, n3)),
        S=Tensor3._wrap(irfft3(sd, n3)),
        V=Tensor3._wrap(irfft3(v, n3)),
    )


def tsvd(x):
    """Full (economy) t-SVD, ``k = min(n1, n2)``."""
    n3 = x.dims[2]
    u, s, vh = _half_svd(rfft3(x.slices), n3)
    return _factors_from_half(u, s, vh, n3)


def truncated_tsvd(x, r):
    """Keep the top ``r`` singular triplets of every frequency slice."""
    n1, n2, n3 = x.dims
    if not 1 <= r <= min(n1, n2):
        raise BadRank(f"rank {r} outside [1, {min(n1, n2)}]")
    u, s, vh = _half_svd(rfft3(x.slices), n3)
    return _factors_from_half(u[:, :, :r], s[:, :r], vh[:, :r, :], n3)


def half_qr(half, n3):
    """Economy QR of each half slice; ``W`` gets a nonnegative real diagonal.

    ``Q`` is n x k and ``W`` is k x r with ``k = min(n, r)``.
    """
    real_slices = self_conjugate(n3)
    h, n, r = half.shape
    k = min(n, r)
    q = np.empty((h, n, k), dtype=np.complex128)
    w = np.empty((h, k, r), dtype=np.complex128)
    try:
        for i in range(h):
            mat = half[i].real if i in real_slices else half[i]
            q[i], w[i] = np.linalg.qr(mat, mode="reduced")
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"slice QR failed: {exc}") from exc
    d = np.diagonal(w, axis1=1, axis2=2)
    absd = np.abs(d)
    phase = np.where(absd > 0, d / np.where(absd > 0, absd, 1.0), 1.0)
    q *= phase[:, None, :]
    w *= np.conj(phase)[:, :, None]
    return q, w


def tqr(a):
    """t-QR ``a = Q * W`` with orthonormal ``Q`` and slice-wise upper-triangular ``W``."""
    n, r, n3 = a.dims
    if n < r:
        raise DimMismatch(f"tqr needs n >= r, got {a.dims}")
    q, w = half_qr(rfft3(a.slices), n3)
    return Tensor3._wrap(irfft3(q, n3)), Tensor3._wrap(irfft3(w, n3))


def singular_values(x):
    """Singular values of every frequency slice, shape ``(n3, min(n1, n2))``."""
    n3 = x.dims[2]
    half = rfft3(x.slices)
    real_slices = self_conjugate(n3)
    s = np.empty((half.shape[0], min(half.shape[1:])))
    for i in range(half.shape[0]):
        mat = half[i].real if i in real_slices else half[i]
        s[i] = np.linalg.svd(mat, compute_uv=False)
    return mirror(s, n3).real


def rank_profile(x, tol=RANK_TOL):
    """Multi-rank, tubal rank, sorted singular values and condition number.

    A singular value counts as nonzero when it exceeds ``tol`` times the
    largest singular value over all frequency slices.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    s = singular_values(x)
    smax = float(s.max()) if s.size else 0.0
    keep = s > tol * smax if smax > 0 else np.zeros_like(s, dtype=bool)
    multi = tuple(int(c) for c in keep.sum(axis=1))
    values = np.sort(s[keep])[::-1]
    kappa = float(values[0] / values[-1]) if values.size else float("nan")
    return RankProfile(
        tubal_rank=max(multi),
        multi_rank=multi,
        s_rm=int(sum(multi)),
        tol=tol,
        singular_values=values,
        condition_number=kappa,
    )


def _half_gram(mh):
    return np.conj(mh).transpose(0, 2, 1) @ mh


def gram_eigenvalues(m):
    """Eigenvalues of every frequency slice of ``m^T * m``, shape ``(h, r)``."""
    g = _half_gram(rfft3(m.slices))
    return np.linalg.eigvalsh(g)


def half_precond_solve(gh, mh, lam):
    """Solve ``X (M^H M + lam I) = G`` for every half slice.

    ``gh`` is ``(h, n, r)``, ``mh`` is ``(h, p, r)``.
    """
    if lam < 0:
        raise ValueError("damping must be nonnegative")
    gram = _half_gram(mh)
    r = gram.shape[-1]
    if lam == 0:
        ev = np.linalg.eigvalsh(gram)
        top = ev[:, -1]
        bottom = ev[:, 0]
        if np.any(bottom <= 0) or np.any(top / np.where(bottom > 0, bottom, 1.0) > SINGULAR_COND):
            raise SingularPreconditioner("undamped Gram slice is numerically singular")
    else:
        gram = gram + lam * np.eye(r)
    out = np.empty_like(gh, dtype=np.complex128)
    for i in range(gh.shape[0]):
        rhs = np.conj(gh[i]).T
        try:
            c = scipy.linalg.cho_factor(gram[i], lower=True, check_finite=False)
            sol = scipy.linalg.cho_solve(c, rhs, check_finite=False)
        except np.linalg.LinAlgError:
            # roundoff made a tiny-damped Gram indefinite
            sol = scipy.linalg.solve(gram[i], rhs, assume_a="her", check_finite=False)
        out[i] = np.conj(sol).T
    return out


def precond_solve(g, m, lam):
    """Return ``g * (m^T * m + lam I)^{-1}`` via slice-wise SPD solves."""
    n, r, n3 = g.dims
    p, r2, m3 = m.dims
    if r != r2 or n3 != m3:
        raise DimMismatch(f"precond_solve: g {g.dims} incompatible with m {m.dims}")
    out = half_precond_solve(rfft3(g.slices), rfft3(m.slices), float(lam))
    return Tensor3._wrap(irfft3(out, n3))


def fdiag_sqrt(s):
    """Square root of a nonnegative f-diagonal tensor, taken on the frequency diagonals."""
    k, k2, n3 = s.dims
    if k != k2:
        raise DimMismatch(f"fdiag_sqrt needs square slices, got {s.dims}")
    half = rfft3(s.slices)
    d = np.diagonal(half, axis1=1, axis2=2)
    scale = max(float(np.max(np.abs(d))), 1e-300) if d.size else 1.0
    if np.any(d.real < -1e-12 * scale) or np.any(np.abs(d.imag) > 1e-10 * scale):
        raise NegativeDiagonal("frequency-domain diagonal is not real nonnegative")
    out = np.zeros_like(half)
    idx = np.arange(k)
    out[:, idx, idx] = np.sqrt(np.maximum(d.real, 0.0))
    return Tensor3._wrap(irfft3(out, n3))
