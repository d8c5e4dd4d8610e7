"""
APGD, ScaledGD and factorized GD
================================

All three solvers run through ``tubal.run`` and return a per-iteration
trace.  APGD alternates preconditioned half steps and rebalances the factors
after each one; ScaledGD and GD update both factors at once.
"""

import tubal

spec = tubal.GroundTruthSpec.full(20, 20, 3, 3, kappa=10.0, seed=0)
# over-parameterized: estimated rank 6 for a tubal-rank-3 target
r = 6
problem = tubal.gen_problem(spec, "recovery", m=5 * r * 20 * 3, op_seed=1)
init = tubal.spectral_init(problem.model, r)

for method in ("apgd", "scaledgd", "fgd"):
    cfg = tubal.SolverConfig(method=method, step_size=0.5, max_iters=300, stop_tol=1e-12)
    trace = tubal.run(problem.model, init, cfg)
    last = trace.rows[-1]
    print(f"{method:9s} status={trace.status:9s} iters={last.iter:4d} "
          f"rel_err={last.rel_err:.2e} to 1e-6 in {trace.iters_to(1e-6)}")

# Rebalancing keeps L*R^T and makes L^T*L = R^T*R
pair = tubal.random_init((6, 5, 3), 3, seed=2)
pair = tubal.FactorPair(pair.L * 10.0, pair.R / 10.0)
out = tubal.rebalance(pair.L, pair.R)
print("gap before:", round(tubal.balance_gap(pair), 3), "after:", out.balance_gap)
print("product change:", tubal.fro_norm(out.product - pair.product))

# A single step is available too
cfg = tubal.SolverConfig(method="apgd", step_size=0.5)
new_pair, lam = tubal.apgd_step(problem.model, init, cfg)
err = tubal.fro_norm(new_pair.product - problem.target) / tubal.fro_norm(problem.target)
print(f"one APGD step: rel_err {err:.3e} with lambda {lam:.2e}")
