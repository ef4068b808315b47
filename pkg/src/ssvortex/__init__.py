"""Mode-by-mode stability verification for the self-similar power-law vortex."""

from .generator import (
    EvolutionTrace,
    GeneratorMatrix,
    assemble_generator,
    eig_scan,
    evolve,
    growth_fit,
    stable_dt,
)
from .homogeneous import (
    Homo2Params,
    ShootingResult,
    eval_2f2_reg,
    homo2_defect,
    homo2_params,
    hyp2f2_regularized,
    q_frak,
    shoot_homogeneous,
)
from .modes import (
    KernelK1,
    LogGrid,
    ModeFunction,
    apply_phi1,
    k1_eval,
    lq_norm,
    phi1_matrix,
    psi_from_U,
    reweight,
    second_order_relation,
)
from .params import (
    FieldSample,
    SelfSimilarPoint,
    VortexParams,
    a0_of,
    map_field,
    omega_bar,
    v_bar,
)
from .resolvent import (
    ConvergenceError,
    KernelK2,
    ResolventSolution,
    SolveConfig,
    SpectralPoint,
    apply_phi2,
    contraction_bound,
    k2_eval,
    ode_residual,
    resolvent_bound_check,
    solve_k0,
    solve_mode,
    verify_kernel_composition,
    verify_neat_identities,
)
from .suites import RunConfig, emit, run

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
