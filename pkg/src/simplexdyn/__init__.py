"""Log-ratio geometry of the simplex, replicator dynamics, and their diffusions."""

__version__ = "0.1.0"

from .aitchison import (
    aitchison_gradient,
    aitchison_log_density,
    as_composition,
    barycenter,
    closure,
    clr,
    contrast_matrix,
    dist,
    ilr,
    ilr_inv,
    inner,
    inverse,
    ito_corrector,
    norm,
    ominus,
    perturb,
    power,
    sfm,
    sfm_jacobian,
    shahshahani_gradient,
    shahshahani_inv,
)
from .payoff import (
    Decomposition,
    DefinitenessReport,
    EquilibriumReport,
    EssStatus,
    as_payoff_matrix,
    decompose,
    definiteness,
    enumerate_nash,
    interior_ne_decomposed,
    is_ess,
    is_nash,
    monotonicity_probe,
    nash_set_zero_lambda,
    potential_lambda,
    sum_condition,
)
from .replicator import (
    OdeConfig,
    Trajectory,
    ilr_drift,
    integrate_replicator,
    phase_portrait,
    replicator_rhs,
)
from .sde import (
    DirichletLangevinDrift,
    Ensemble,
    NoDrift,
    ReplicatorDrift,
    SdeConfig,
    bm_exact,
    bm_path,
    bm_terminal_ensemble,
    coupled_pair,
    donsker_rescaled,
    em_terminal_ensemble,
    heat_kernel_density,
    heat_kernel_log_density,
    ou_fitness_path,
    sde_path,
    simplex_random_walk,
    wong_zakai_path,
)
from .verify import (
    ContractionReport,
    TestReport,
    contraction_report,
    dircond_residual,
    dirichlet_moment_check,
    hj_residual,
    ks_statistic,
    two_sample_energy,
    vertex_absorption_stats,
    wasserstein_1d,
)
from .jko import entropy, jko_flow, jko_flow_vs_heat, jko_step, w2_quantile
