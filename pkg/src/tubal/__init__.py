"""Low-tubal-rank tensor estimation: t-product algebra, losses and factored solvers."""

from .diagnostics import balance_gap, diag_angles, dilation_gap
from .errors import (
    BadRank,
    BadSpec,
    ConfigError,
    DimMismatch,
    Diverged,
    NegativeDiagonal,
    NumericalFailure,
    SingularPreconditioner,
    SymmetryViolation,
    TubalError,
    ZeroError,
)
from .factors import FactorPair
from .objectives import (
    FactorizationLoss,
    MeasurementOperator,
    RecoveryLoss,
    grad_L,
    grad_R,
    loss_value,
    random_init,
    spectral_init,
)
from .solvers import (
    DampingSchedule,
    IterTrace,
    SolverConfig,
    apgd_step,
    fgd_step,
    rebalance,
    run,
    scaledgd_step,
)
from .synth import GroundTruthSpec, gen_ground_truth, gen_problem
from .tensor_core import (
    FreqTensor,
    Tensor3,
    bcirc,
    bcirc_oracle_tprod,
    fro_norm,
    from_freq,
    identity_tensor,
    inner,
    spectral_norm,
    to_freq,
    tprod,
    ttranspose,
)
from .tensor_io import load_tensor, save_tensor
from .tlinalg import precond_solve, rank_profile, tqr, truncated_tsvd, tsvd

__version__ = "0.1.0"
