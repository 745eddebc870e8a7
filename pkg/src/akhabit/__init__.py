"""AK growth with finite-memory consumption habits.

Closed-form optimal policy of the linear-technology growth model whose
utility penalizes consumption below an exponentially weighted average of
the last tau units of consumption, together with the numerical machinery
to verify the closed form: spectral analysis of the habit kernel,
feasibility of initial data, two independent closed-loop integrators,
residual checks of the external-habit policy formula, and a brute-force
finite-horizon optimality oracle.
"""

from .dde import (
    FeasibilityReport,
    SampledPath,
    check_feasibility,
    dominated_capital,
    minimal_consumption,
)
from .errors import (
    AkHabitError,
    BracketError,
    CoarseGridError,
    ConstraintError,
    ContourError,
    DomainError,
    InconsistencyError,
    InfeasibleError,
    MismatchError,
    NonConvergence,
    OptimalityViolation,
    RegimeError,
    ScenarioError,
    StepError,
)
from .hjb import (
    G_value,
    StateSample,
    current_value_hamiltonian,
    feedback,
    hjb_residual,
    value_bound_coefficient,
    value_function,
)
from .model import (
    DEFAULT_GRID,
    DerivedConstants,
    HistoryGrid,
    InitialState,
    ModelParams,
    habit_of_history,
    validate,
)
from .oracle import (
    DiscreteProblem,
    PerturbationReport,
    evaluate_objective,
    objective_breakdown,
    perturbation_test,
    projected_ascent,
)
from .simulate import (
    MonitorReport,
    Trajectory,
    external_policy_residual,
    external_residual_profile,
    initial_capital_threshold,
    invariant_monitor,
    lambda_constant,
    simulate_integral_form,
    simulate_lambda_form,
)
from .spectral import (
    DominanceCertificate,
    RootRegime,
    SpectralReport,
    count_zeros,
    dominance_certificate,
    leading_coefficient,
    phi,
    phi_prime,
    real_root,
    regime,
    spectral_report,
)

__version__ = "0.1.0"

__all__ = [
    "AkHabitError",
    "BracketError",
    "CoarseGridError",
    "ConstraintError",
    "ContourError",
    "DEFAULT_GRID",
    "DerivedConstants",
    "DiscreteProblem",
    "DomainError",
    "DominanceCertificate",
    "FeasibilityReport",
    "G_value",
    "HistoryGrid",
    "InconsistencyError",
    "InfeasibleError",
    "InitialState",
    "MismatchError",
    "ModelParams",
    "MonitorReport",
    "NonConvergence",
    "OptimalityViolation",
    "PerturbationReport",
    "RegimeError",
    "RootRegime",
    "SampledPath",
    "ScenarioError",
    "SpectralReport",
    "StateSample",
    "StepError",
    "Trajectory",
    "check_feasibility",
    "count_zeros",
    "current_value_hamiltonian",
    "dominance_certificate",
    "dominated_capital",
    "evaluate_objective",
    "external_policy_residual",
    "external_residual_profile",
    "feedback",
    "habit_of_history",
    "hjb_residual",
    "initial_capital_threshold",
    "invariant_monitor",
    "lambda_constant",
    "leading_coefficient",
    "minimal_consumption",
    "objective_breakdown",
    "perturbation_test",
    "phi",
    "phi_prime",
    "projected_ascent",
    "real_root",
    "regime",
    "simulate_integral_form",
    "simulate_lambda_form",
    "spectral_report",
    "validate",
    "value_bound_coefficient",
    "value_function",
]
