"""
The t-product and the t-SVD
===========================

Third-order tensors are stored slice-major, ``(n3, n1, n2)``.  The
t-product is a circular convolution along the tube axis, so after an FFT
along that axis it becomes one ordinary matrix product per frequency slice.
"""

import os
import tempfile

import numpy as np

import tubal
from tubal.tensor_core import bdiag

rng = np.random.default_rng(0)

# Two random tensors, 4x3x5 and 3x2x5 (n1 x n2 x n3)
A = tubal.Tensor3(rng.standard_normal((5, 4, 3)))
B = tubal.Tensor3(rng.standard_normal((5, 3, 2)))
C = A @ B
print("A*B dims:", C.dims)

# The FFT route agrees with multiplying by the block-circulant matrix
oracle = tubal.bcirc_oracle_tprod(A, B)
print("FFT vs block-circulant:", tubal.fro_norm(C - oracle) / tubal.fro_norm(oracle))

# Conjugate transpose reverses the product, and the identity tensor is neutral
print("(A*B)^T - B^T*A^T:", tubal.fro_norm(C.T - B.T @ A.T))
print("I*A - A:", tubal.fro_norm(tubal.identity_tensor(4, 5) @ A - A))

# t-SVD: X = U * S * V^T with orthogonal U, V and f-diagonal S
X = tubal.Tensor3(rng.standard_normal((5, 6, 4)))
f = tubal.tsvd(X)
print("t-SVD reconstruction:", tubal.fro_norm(f.reconstruct() - X) / tubal.fro_norm(X))
print("U^T*U = I:", tubal.fro_norm(f.U.T @ f.U - tubal.identity_tensor(f.k, 5)))

# Tensor singular values are those of the block-diagonal Fourier matrix
sv = np.sort(np.linalg.svd(bdiag(X), compute_uv=False))[::-1]
print("largest singular value:", sv[0], "spectral norm:", tubal.spectral_norm(X))

# A low tubal-rank tensor: the rank profile lists the rank of each Fourier slice
spec = tubal.GroundTruthSpec(8, 7, 5, (2, 3, 1, 1, 3), kappa=4.0, seed=1)
Xs, Ls, Rs = tubal.gen_ground_truth(spec)
prof = tubal.rank_profile(Xs)
print("multi-rank:", prof.multi_rank, "tubal rank:", prof.tubal_rank,
      "condition number:", round(prof.condition_number, 6))

# Truncating the t-SVD gives the best tubal-rank-r approximation
print("rank-3 truncation error:", tubal.fro_norm(tubal.truncated_tsvd(Xs, 3).reconstruct() - Xs))

# Tensors round-trip through the binary container
with tempfile.TemporaryDirectory() as d:
    path = os.path.join(d, "x.tub3")
    tubal.save_tensor(path, Xs)
    print("round trip exact:", np.array_equal(tubal.load_tensor(path).slices, Xs.slices))
