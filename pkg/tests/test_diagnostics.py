import numpy as np
import pytest

from conftest import rand_tensor
from tubal.diagnostics import balance_gap, column_projector, diag_angles, dilation_gap, stack_factors
from tubal.errors import DimMismatch, ZeroError
from tubal.factors import FactorPair
from tubal.solvers import rebalance
from tubal.synth import GroundTruthSpec, gen_ground_truth
from tubal.tensor_core import Tensor3, bdiag, fro_norm, zeros


def oracle_angles(L, R, x_star):
    """Angles from dense block-diagonal matrices and pseudo-inverse projectors."""
    bl, br, bx = bdiag(L), bdiag(R), bdiag(x_star)
    pl = bl @ np.linalg.pinv(bl, rcond=1e-9)
    pr = br @ np.linalg.pinv(br, rcond=1e-9)
    denom = np.linalg.norm(bdiag(L @ R.T) - bx)
    sl = np.linalg.norm(bx - pl @ bx) / denom
    sr = np.linalg.norm(bx - bx @ pr.conj().T) / denom
    return sl, sr


def truth(seed=0):
    return gen_ground_truth(GroundTruthSpec.full(8, 7, 3, 3, kappa=4.0, seed=seed))


def test_against_dense_oracle(rng):
    x, Ls, Rs = truth()
    for scale in (0.01, 0.1, 1.0):
        L = Ls + scale * rand_tensor(rng, 8, 3, 3)
        R = Rs + scale * rand_tensor(rng, 7, 3, 3)
        ours = diag_angles(L, R, x)
        ref = oracle_angles(L, R, x)
        np.testing.assert_allclose(ours, ref, rtol=1e-9, atol=1e-12)
        assert all(0.0 <= v <= 1.0 + 1e-12 for v in ours)


def test_over_parameterized_oracle(rng):
    x, _, _ = truth(1)
    L, R = rand_tensor(rng, 8, 5, 3), rand_tensor(rng, 7, 5, 3)
    np.testing.assert_allclose(diag_angles(L, R, x), oracle_angles(L, R, x), rtol=1e-9, atol=1e-12)


def test_exact_column_space_zero_angle(rng):
    x, Ls, Rs = truth(2)
    # correct column spaces, wrong scaling of the product
    sl, sr = diag_angles(2.0 * Ls, Rs, x)
    assert sl < 1e-12 and sr < 1e-12


def test_rank_deficient_factor_uses_numerical_span(rng):
    x, Ls, Rs = truth(3)
    L = np.concatenate([Ls.slices, np.zeros((3, 8, 2))], axis=2)
    R = np.concatenate([Rs.slices, np.zeros((3, 7, 2))], axis=2)
    sl, sr = diag_angles(Tensor3(L), Tensor3(0.5 * R), x)
    assert sl < 1e-12 and sr < 1e-12


def test_orthogonal_span_gives_one():
    n3 = 2
    x = np.zeros((n3, 4, 4))
    x[0, 0, 0] = x[0, 1, 1] = 1.0
    L = np.zeros((n3, 4, 2))
    L[0, 2, 0] = L[0, 3, 1] = 1.0
    sl, sr = diag_angles(Tensor3(L), Tensor3(np.zeros((n3, 4, 2))), Tensor3(x))
    assert sl == pytest.approx(1.0)
    assert sr == pytest.approx(1.0)


def test_zero_error_raises():
    x, Ls, Rs = truth()
    with pytest.raises(ZeroError):
        diag_angles(Ls, Rs, x)


def test_dims_checked(rng):
    x, Ls, Rs = truth()
    with pytest.raises(DimMismatch):
        diag_angles(Ls, Rs, rand_tensor(rng, 7, 8, 3))


def test_projector_idempotent(rng):
    p = column_projector(rand_tensor(rng, 6, 2, 4))
    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    np.testing.assert_allclose(np.trace(p, axis1=1, axis2=2).real, 2.0, atol=1e-12)


def test_dilation_gap(rng):
    x, Ls, Rs = truth()
    star = FactorPair(Ls, Rs)
    assert dilation_gap(star, star) < 1e-12
    pair = rebalance(Ls + 0.1 * rand_tensor(rng, 8, 3, 3), Rs + 0.1 * rand_tensor(rng, 7, 3, 3))
    assert dilation_gap(pair, star) <= 2 * fro_norm(pair.product - x) + 1e-8 * fro_norm(x)
    f = stack_factors(pair)
    assert f.dims == (15, 3, 3)


def test_balance_gap_helper(rng):
    pair = FactorPair(rand_tensor(rng, 5, 2, 3), rand_tensor(rng, 4, 2, 3))
    assert balance_gap(pair) == pytest.approx(fro_norm(pair.L.T @ pair.L - pair.R.T @ pair.R))
    assert balance_gap(pair, relative=True) == pytest.approx(balance_gap(pair) / fro_norm(pair.L.T @ pair.L))
    z = FactorPair(zeros(3, 2, 2), zeros(3, 2, 2))
    assert balance_gap(z, relative=True) == 0.0
