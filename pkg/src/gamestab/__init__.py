"""Local stability of gradient play in two-player continuous games."""

from .classify import (
    Certificate,
    EquilibriumReport,
    LambdaSummary,
    check_differential_nash,
    classify_equilibrium,
    detect_structure,
    instability_certificate,
    lambda_summary,
    potential_bounds,
    potential_robustness,
    schur_stability,
    zero_sum_bounds,
    zero_sum_robustness,
)
from .decomposition import (
    compress_to_2x2,
    rotated_block_form,
    split_potential_rotational,
    split_symmetric_skew,
)
from .dynamics import optimal_tau, simulate_continuous, simulate_discrete, tau_sweep
from .game import (
    CostOracle,
    GameJacobian,
    JointAction,
    LearningConfig,
    QuadraticGame,
    assemble_jacobian,
    eval_gradient_field,
    finite_difference_jacobian,
    find_fixed_point,
    jacobian_at,
)
from .qnr import QnrEstimate, containment_check, sample_numerical_range, sample_qnr
from .spectral import (
    Spectrum,
    eigenvalues,
    is_hurwitz,
    spectral_norm,
    spectral_radius,
    symmetric_eig,
)

__version__ = "0.1.0"
