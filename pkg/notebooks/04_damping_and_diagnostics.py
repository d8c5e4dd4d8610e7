"""
Damping, rebalancing and diagnostics
====================================

The preconditioner ``(R^T*R + lambda I)^{-1}`` uses a damping ``lambda``
that is either proportional to the current loss or fixed.  A fixed damping
that is too large stops the fast local rate once the error drops below it.
"""

from dataclasses import replace

import tubal

spec = tubal.GroundTruthSpec.full(20, 20, 3, 10, seed=0)
problem = tubal.gen_problem(spec, "recovery", m=6000, op_seed=7)
init = tubal.spectral_init(problem.model, 20)
base = tubal.SolverConfig(method="apgd", step_size=0.5, max_iters=300, stop_tol=1e-14)

for label, damping in [("f/10", tubal.DampingSchedule.proportional(10)),
                       ("1e-15", tubal.DampingSchedule.fixed(1e-15)),
                       ("1e-10", tubal.DampingSchedule.fixed(1e-10))]:
    trace = tubal.run(problem.model, init, replace(base, damping=damping))
    e = trace.column("rel_err")
    print(f"damping {label:6s}: error after 100 iters {e[min(100, len(e) - 1)]:.1e}, "
          f"final {e[-1]:.1e}")

# Without rebalancing the factors still stay close to balanced
spec5 = tubal.GroundTruthSpec.full(30, 30, 3, 3, seed=0)
p5 = tubal.gen_problem(spec5, "recovery", m=5 * 3 * 30 * 3, op_seed=1)
init5 = tubal.spectral_init(p5.model, 3)
cfg5 = tubal.SolverConfig(method="apgd", step_size=0.5, max_iters=200)
for on in (True, False):
    trace = tubal.run(p5.model, init5, replace(cfg5, rebalance=on))
    gaps = trace.column("balance_gap")
    print(f"rebalance={on}: final error {trace.rows[-1].rel_err:.1e}, max balance gap {gaps.max():.2e}")

# Angle diagnostics and the dilation gap along a run
rows = []


def watch(it, pair):
    if it in (1, 5, 20):
        sl, sr = tubal.diag_angles(pair.L, pair.R, p5.target)
        rows.append((it, sl, sr, tubal.dilation_gap(pair, p5.factors)))


tubal.run(p5.model, init5, replace(cfg5, max_iters=20), callback=watch)
for it, sl, sr, dg in rows:
    print(f"iter {it:2d}: sin angles {sl:.2e} {sr:.2e}, dilation gap {dg:.2e}")
