"""
Losses, measurements and initialisation
=======================================

Two objectives share one interface: plain factorization ``0.5 ||L*R^T - X*||^2``
and recovery from Gaussian linear measurements ``y = M(X*)``.
"""

import numpy as np

import tubal

spec = tubal.GroundTruthSpec.full(10, 10, 3, 2, kappa=2.0, seed=0)
X_star, _, _ = tubal.gen_ground_truth(spec)

# Factorization loss
fact = tubal.FactorizationLoss(X_star)

# Recovery loss: m Gaussian measurements with entries of variance 1/m
m = 5 * 4 * 10 * 3
op = tubal.MeasurementOperator(m, X_star.dims, seed=3)
rec = tubal.RecoveryLoss.noiseless(op, X_star)
print("y shape:", op.apply(X_star).shape)

# <M(X), y> = <X, M*(y)>
x = tubal.Tensor3(np.random.default_rng(1).standard_normal(X_star.slices.shape))
y = np.random.default_rng(2).standard_normal(m)
print("adjoint check:", op.apply(x) @ y - tubal.inner(x, op.adjoint(y)))

# Gradients with respect to the factors, checked by central differences
pair = tubal.random_init(X_star.dims, 4, seed=5)
rng = np.random.default_rng(6)
dL = tubal.Tensor3(rng.standard_normal(pair.L.slices.shape))
dR = tubal.Tensor3(rng.standard_normal(pair.R.slices.shape))
for name, model in [("factorization", fact), ("recovery", rec)]:
    h = 1e-5
    up = tubal.loss_value(model, tubal.FactorPair(pair.L + dL * h, pair.R + dR * h))
    dn = tubal.loss_value(model, tubal.FactorPair(pair.L - dL * h, pair.R - dR * h))
    an = tubal.inner(tubal.grad_L(model, pair), dL) + tubal.inner(tubal.grad_R(model, pair), dR)
    print(f"{name}: finite difference {(up - dn) / (2 * h):.8f}, analytic {an:.8f}")

# Spectral initialisation: truncated t-SVD of M*(y)
init = tubal.spectral_init(rec, 4)
err = tubal.fro_norm(init.product - X_star) / tubal.fro_norm(X_star)
print("spectral init relative error:", round(err, 3))

# Random initialisation with entries N(0, scale/n)
small = tubal.random_init(X_star.dims, 4, scale=1e-6, seed=0)
print("small random init norm:", tubal.fro_norm(small.L))
