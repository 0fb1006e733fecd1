"""Dissipative tunneling of Gaussian packets through a parabolic barrier.

Closed-form moment dynamics of a damped inverted oscillator (Markovian
open-system evolution with position/momentum diffusion), the resulting
penetration probability, and two structurally independent numerical
oracles: direct integration of the moment equations and a finite-volume
phase-space transport solver.
"""

from .errors import (
    AmbiguousRegime,
    CFLViolation,
    LindbladTunnelingError,
    MassLoss,
    NegativeDelta,
    NegativeDensity,
    NonFiniteState,
    RegimeViolation,
    SingularParameters,
    StepSizeUnderflow,
)
from .model import (
    BathSpec,
    ConstraintReport,
    DimensionlessConfig,
    ModelParams,
    check_positivity_constraint,
    dimensional_to_dimensionless,
    dimensionless_to_dimensional,
    gibbs_constraint_satisfied,
    thermal_coefficients,
)
from .moment_ode import (
    Curvature,
    ErrorReport,
    IntegratorConfig,
    QuadraticPotential,
    compare_with_analytic,
    integrate_moments,
    spread_ratio_at,
)
from .phase_space import (
    GridMoments,
    PhaseSpaceGrid,
    density_matrix_eval,
    evolve_grid,
    export_binary,
    export_csv,
    fokker_planck_evolve,
    forecast_bounds,
    grid_for_evolution,
    grid_moments,
    interface_velocities,
    load_binary,
    position_density,
    wigner_eval,
)
from .propagator import (
    AsymptoticSummary,
    GaussianState,
    Regime,
    asymptotics,
    mean_propagator,
    propagate_covariance,
    propagate_mean,
    propagate_state,
    stationary_covariance,
)
from .tunneling import (
    EnergyReport,
    PenetrabilityResult,
    asymptotic_penetrability,
    dimensionless_ratio,
    initial_energy,
    initial_energy_from_state,
    penetrability_dimensionless,
    penetrability_from_moments,
    tunneling_probability_at,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousRegime",
    "AsymptoticSummary",
    "BathSpec",
    "CFLViolation",
    "ConstraintReport",
    "Curvature",
    "DimensionlessConfig",
    "EnergyReport",
    "ErrorReport",
    "GaussianState",
    "GridMoments",
    "IntegratorConfig",
    "LindbladTunnelingError",
    "MassLoss",
    "ModelParams",
    "NegativeDelta",
    "NegativeDensity",
    "NonFiniteState",
    "PenetrabilityResult",
    "PhaseSpaceGrid",
    "QuadraticPotential",
    "Regime",
    "RegimeViolation",
    "SingularParameters",
    "StepSizeUnderflow",
    "asymptotic_penetrability",
    "asymptotics",
    "check_positivity_constraint",
    "compare_with_analytic",
    "density_matrix_eval",
    "dimensional_to_dimensionless",
    "dimensionless_ratio",
    "dimensionless_to_dimensional",
    "evolve_grid",
    "export_binary",
    "export_csv",
    "fokker_planck_evolve",
    "forecast_bounds",
    "gibbs_constraint_satisfied",
    "grid_for_evolution",
    "grid_moments",
    "initial_energy",
    "initial_energy_from_state",
    "integrate_moments",
    "interface_velocities",
    "load_binary",
    "mean_propagator",
    "penetrability_dimensionless",
    "penetrability_from_moments",
    "position_density",
    "propagate_covariance",
    "propagate_mean",
    "propagate_state",
    "spread_ratio_at",
    "stationary_covariance",
    "thermal_coefficients",
    "tunneling_probability_at",
    "wigner_eval",
]
