"""Least-squares condition numbers of underdetermined constant-rank systems."""

from .linalg import (
    InvalidRankError,
    NumericalError,
    RankPolicy,
    SvdResult,
    fold,
    kron,
    multilinear_multiply,
    multilinear_rank,
    pseudoinverse,
    rng_gaussian_matrix,
    rng_orthonormal,
    rng_unit_tensor,
    smallest_nonzero_sv,
    svd,
    unfold,
)
from .engine import (
    ConditionReport,
    DegenerateSystemError,
    JacobianBlocks,
    finite_difference_jacobian,
    kappa_inverse_problem,
    kappa_ls,
    subproblem_kappas,
)
from .two_factor import (
    TwoFactorCondReport,
    TwoFactorPair,
    balanced_factorization,
    cond_two_factor,
    cond_two_factor_oracle,
)
from .tucker import (
    TuckerCondReport,
    TuckerDecomposition,
    cond_tucker,
    cond_tucker_oracle,
    st_hosvd,
    tucker_fiber_rotate,
    tucker_reconstruct,
)
from .alignment import (
    AlignmentProblem,
    AlignmentResult,
    GdConfig,
    alignment_gradient,
    alignment_objective,
    ls_distance,
    ls_distance_bruteforce_2d,
)
from .experiment import (
    ExperimentConfig,
    ModelParams,
    SampleRecord,
    generate_decomposition,
    perturb_and_project,
    run_cell,
    run_experiment,
    summarize,
)

__version__ = "0.1.0"
