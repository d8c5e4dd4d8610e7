import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rand_tensor, rel
from tubal.errors import BadRank, DimMismatch
from tubal.factors import FactorPair
from tubal.objectives import (
    BLOCK_ROWS,
    FactorizationLoss,
    MeasurementOperator,
    RecoveryLoss,
    grad_L,
    grad_R,
    loss_value,
    random_init,
    spectral_init,
    zero_pair,
)
from tubal.synth import GroundTruthSpec, gen_ground_truth, gen_problem
from tubal.tensor_core import fro_norm, identity_tensor, inner
from tubal.tlinalg import truncated_tsvd


def rand_pair(rng, n1, n2, r, n3):
    return FactorPair(rand_tensor(rng, n1, r, n3), rand_tensor(rng, n2, r, n3))


def directional_fd(model, pair, dl, dr, h=1e-5):
    plus = FactorPair(pair.L + h * dl, pair.R + h * dr)
    minus = FactorPair(pair.L - h * dl, pair.R - h * dr)
    return (loss_value(model, plus) - loss_value(model, minus)) / (2 * h)


class TestOperator:
    def test_adjoint_identity_50_pairs(self, rng):
        op = MeasurementOperator(300, (4, 5, 3), seed=11)
        for _ in range(50):
            x, y = rand_tensor(rng, 4, 5, 3), rng.standard_normal(300)
            lhs = float(op.apply(x) @ y)
            rhs = inner(x, op.adjoint(y))
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1.0)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n1=st.integers(1, 5), n2=st.integers(1, 5),
           n3=st.integers(1, 5), m=st.integers(1, 300))
    def test_adjoint_property(self, seed, n1, n2, n3, m):
        rng = np.random.default_rng(seed)
        op = MeasurementOperator(m, (n1, n2, n3), seed=seed % 1000)
        x, y = rand_tensor(rng, n1, n2, n3), rng.standard_normal(m)
        lhs = float(op.apply(x) @ y)
        rhs = inner(x, op.adjoint(y))
        assert abs(lhs - rhs) <= 1e-10 * max(np.linalg.norm(op.apply(x)) * np.linalg.norm(y), 1.0)

    def test_regeneration_bit_identical(self):
        a = MeasurementOperator(600, (3, 4, 5), seed=3).matrix
        b = MeasurementOperator(600, (3, 4, 5), seed=3).matrix
        assert np.array_equal(a, b)
        assert not np.array_equal(a, MeasurementOperator(600, (3, 4, 5), seed=4).matrix)

    def test_blocks_are_independent_streams(self):
        m, dims = 2 * BLOCK_ROWS + 17, (2, 3, 2)
        mat = MeasurementOperator(m, dims, seed=5).matrix
        g = np.random.Generator(np.random.Philox(5).jumped(2))
        tail = g.standard_normal((17, 12)) / np.sqrt(m)
        assert np.array_equal(mat[2 * BLOCK_ROWS :], tail)

    def test_lazy_matches_materialized(self, rng):
        dims = (3, 4, 3)
        eager = MeasurementOperator(700, dims, seed=9)
        lazy = MeasurementOperator(700, dims, seed=9, materialize=False)
        x, y = rand_tensor(rng, *dims), rng.standard_normal(700)
        np.testing.assert_allclose(lazy.apply(x), eager.apply(x), rtol=1e-12, atol=1e-14)
        assert rel(lazy.adjoint(y), eager.adjoint(y)) < 1e-12

    def test_entry_statistics(self):
        mat = MeasurementOperator(2000, (5, 5, 4), seed=1).matrix
        assert abs(mat.mean()) < 5e-4
        assert mat.var() * 2000 == pytest.approx(1.0, rel=0.02)

    def test_identity_operator(self, rng):
        x = rand_tensor(rng, 3, 2, 4)
        op = MeasurementOperator.identity(x.dims)
        assert rel(op.adjoint(op.apply(x)), x) == 0

    def test_dims_checked(self, rng):
        op = MeasurementOperator(20, (2, 2, 2), seed=0)
        with pytest.raises(DimMismatch):
            op.apply(rand_tensor(rng, 2, 3, 2))
        with pytest.raises(DimMismatch):
            op.adjoint(np.zeros(19))

    def test_spec(self):
        assert MeasurementOperator(10, (2, 2, 1), seed=4).spec() == {"seed": 4, "m": 10, "dims": [2, 2, 1]}

    def test_trip_sanity(self, rng):
        n, n3, r = 10, 3, 2
        m = 5 * r * n * n3
        op = MeasurementOperator(m, (n, n, n3), seed=21)
        for _ in range(100):
            z = rand_tensor(rng, n, r, n3) @ rand_tensor(rng, n, r, n3).T
            ratio = float(np.sum(op.apply(z) ** 2)) / fro_norm(z) ** 2
            assert 0.5 <= ratio <= 1.5


class TestLosses:
    def test_factorization_values(self, rng):
        x = rand_tensor(rng, 4, 3, 2)
        model = FactorizationLoss(x)
        assert loss_value(model, zero_pair((4, 3, 2), 2)) == pytest.approx(0.5 * fro_norm(x) ** 2)
        f = truncated_tsvd(x, 3)
        exact = FactorPair(f.U @ f.S, f.V)
        assert loss_value(model, exact) < 1e-25

    def test_factorization_rel_err_identity(self, rng):
        x = rand_tensor(rng, 5, 4, 3)
        model = FactorizationLoss(x)
        pair = rand_pair(rng, 5, 4, 2, 3)
        e = fro_norm(pair.product - x) / fro_norm(x)
        assert loss_value(model, pair) == pytest.approx(0.5 * e ** 2 * fro_norm(x) ** 2, rel=1e-12)

    def test_recovery_direct_sum_oracle(self, rng):
        dims = (3, 4, 2)
        x_star = rand_tensor(rng, *dims)
        op = MeasurementOperator(40, dims, seed=2)
        model = RecoveryLoss.noiseless(op, x_star)
        pair = rand_pair(rng, 3, 4, 2, 2)
        e = pair.product - x_star
        total = 0.0
        for i in range(op.m):
            a = op.matrix[i].reshape(2, 3, 4)  # slice-major sensing tensor A_i
            s = 0.0
            for k in range(2):
                for p in range(3):
                    for q in range(4):
                        s += a[k, p, q] * e.slices[k, p, q]
            total += s * s
        assert loss_value(model, pair) == pytest.approx(total / 2, rel=1e-12)

    def test_noiseless_value_zero_at_truth(self):
        p = gen_problem(GroundTruthSpec.full(6, 5, 3, 2, seed=1), "recovery", m=200, op_seed=3)
        assert loss_value(p.model, p.factors) < 1e-25

    def test_gradients_zero_at_minimizer(self):
        p = gen_problem(GroundTruthSpec.full(6, 5, 3, 2, seed=1), "recovery", m=200, op_seed=3)
        assert fro_norm(grad_L(p.model, p.factors)) < 1e-12
        assert fro_norm(grad_R(p.model, p.factors)) < 1e-12

    def test_grad_L_with_identity_R(self, rng):
        x = rand_tensor(rng, 4, 4, 3)
        L = rand_tensor(rng, 4, 4, 3)
        pair = FactorPair(L, identity_tensor(4, 3))
        assert rel(grad_L(FactorizationLoss(x), pair), L - x) < 1e-12

    def test_recovery_gradient_formula(self, rng):
        dims = (3, 3, 3)
        x_star = rand_tensor(rng, *dims)
        op = MeasurementOperator(60, dims, seed=8)
        model = RecoveryLoss.noiseless(op, x_star)
        pair = rand_pair(rng, 3, 3, 2, 3)
        g = op.adjoint(op.apply(pair.product - x_star))
        assert rel(grad_L(model, pair), g @ pair.R) < 1e-12
        assert rel(grad_R(model, pair), g.T @ pair.L) < 1e-12

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(["factorization", "recovery"]))
    def test_finite_difference(self, seed, kind):
        rng = np.random.default_rng(seed)
        dims, r = (4, 3, 3), 2
        x_star = rand_tensor(rng, *dims)
        if kind == "factorization":
            model = FactorizationLoss(x_star)
        else:
            model = RecoveryLoss.noiseless(MeasurementOperator(80, dims, seed=seed % 1000), x_star)
        pair = rand_pair(rng, 4, 3, r, 3)
        gl, gr = grad_L(model, pair), grad_R(model, pair)
        for _ in range(5):
            dl, dr = rand_tensor(rng, 4, r, 3), rand_tensor(rng, 3, r, 3)
            fd = directional_fd(model, pair, dl, dr)
            an = inner(gl, dl) + inner(gr, dr)
            assert abs(fd - an) <= 1e-6 * max(abs(an), 1e-8)

    def test_recovery_smoothness_near_one(self):
        p = gen_problem(GroundTruthSpec.full(10, 10, 3, 2), "recovery", m=5 * 2 * 10 * 3 * 4, op_seed=1)
        assert 1.0 <= p.model.smoothness < 1.5


class TestInit:
    def test_identity_operator_spectral_exact(self):
        x_star, _, _ = gen_ground_truth(GroundTruthSpec.full(6, 5, 3, 2, seed=4))
        model = RecoveryLoss.noiseless(MeasurementOperator.identity(x_star.dims), x_star)
        for r in (2, 3):
            pair = spectral_init(model, r)
            assert rel(pair.product, x_star) < 1e-12
            assert pair.balance_gap <= 1e-10 * fro_norm(pair.L.T @ pair.L)

    def test_identity_operator_truncates(self, rng):
        x = rand_tensor(rng, 5, 5, 3)
        model = RecoveryLoss.noiseless(MeasurementOperator.identity(x.dims), x)
        assert rel(spectral_init(model, 2).product, truncated_tsvd(x, 2).reconstruct()) < 1e-12

    def test_spectral_needs_recovery(self, rng):
        with pytest.raises(TypeError):
            spectral_init(FactorizationLoss(rand_tensor(rng, 3, 3, 2)), 1)

    @pytest.mark.parametrize("r", [0, 6])
    def test_spectral_bad_rank(self, r):
        p = gen_problem(GroundTruthSpec.full(5, 5, 2, 2), "recovery", m=100)
        with pytest.raises(BadRank):
            spectral_init(p.model, r)

    def test_spectral_init_statistical(self):
        # n=50, n3=3, r*=5, m = 5 r n1 n3: initial relative error over 10 seeds
        errs = []
        for s in range(10):
            p = gen_problem(GroundTruthSpec.full(50, 50, 3, 5, kappa=2.0, seed=s), "recovery",
                            m=5 * 5 * 50 * 3, op_seed=100 + s)
            pair = spectral_init(p.model, 5)
            errs.append(fro_norm(pair.product - p.target) / fro_norm(p.target))
        print("spectral init relative errors:", np.round(errs, 3))
        assert max(errs) <= 0.5

    def test_random_init_deterministic(self):
        a = random_init((5, 4, 3), 2, scale=1.0, seed=7)
        b = random_init((5, 4, 3), 2, scale=1.0, seed=7)
        c = random_init((5, 4, 3), 2, scale=1.0, seed=8)
        assert np.array_equal(a.L.slices, b.L.slices) and np.array_equal(a.R.slices, b.R.slices)
        assert not np.array_equal(a.L.slices, c.L.slices)

    def test_random_init_scale(self):
        pair = random_init((400, 100, 3), 20, scale=1.0, seed=0)
        assert pair.L.slices.std() == pytest.approx(np.sqrt(1 / 400), rel=0.03)
        assert pair.R.slices.std() == pytest.approx(np.sqrt(1 / 100), rel=0.03)

    def test_small_random_init_near_zero(self):
        p = gen_problem(GroundTruthSpec.full(10, 10, 3, 2, seed=0), "factorization")
        pair = random_init(p.target.dims, 4, scale=1e-10, seed=1)
        assert fro_norm(pair.L) < 1e-4
        assert loss_value(p.model, pair) == pytest.approx(0.5 * fro_norm(p.target) ** 2, rel=1e-6)

    def test_random_init_bad_scale(self):
        with pytest.raises(ValueError):
            random_init((2, 2, 2), 1, scale=0.0)
