"""Simulator and optimizer for a four-stroke coupled-spin quantum refrigerator.

The package models a reciprocating refrigeration cycle whose working
medium is a pair of coupled spins: two bath-contact strokes at fixed
external field bracket two field sweeps, and the uncontrollable spin-spin
coupling makes fast sweeps generate quantum friction.  Segment dynamics
are affine maps on four observables, so limit cycles, heat flows and
optimal time allocations are all computed exactly or by small dense ODE
integrations.
"""

from .adiabats import (
    AdiabatGeometry,
    AdiabatSpec,
    FrictionlessSolution,
    NoiseParams,
    PhaseNoiseAsymptote,
    adiabat_geometry,
    adiabaticity_delta,
    amplitude_noise_asymptotics,
    closed_form_propagator,
    constant_mu_optimality_check,
    constant_mu_schedule,
    frictionless_family,
    numeric_propagator,
    phase_noise_asymptotics,
    perturbed_mu_schedule,
)
from .cycle import (
    CycleMetrics,
    CycleSpec,
    ThermoBounds,
    adiabat_propagator,
    cycle_propagator,
    cycle_trajectory,
    limit_cycle,
    min_temperature,
    q_c_max,
    segment_propagators,
    thermo_bounds,
)
from .errors import (
    DegenerateField,
    IntegrationFailure,
    NoFeasibleRefrigerator,
    NoSolution,
    NoUniqueLimitCycle,
    ParseError,
    PhysicalityViolation,
    ScheduleInfeasible,
    SpinFridgeError,
    ValidationError,
)
from .isochores import IsochoreSpec, isochore_oracle, isochore_propagator
from .medium import (
    Bath,
    FieldPoint,
    MediumParams,
    ObservableState,
    basis_operators,
    effective_gap,
    entropies,
    equilibrium_energy,
    extract_observables,
    reconstruct_rho,
    thermal_state,
)
from .optimize import (
    OptimizeRequest,
    SweepResult,
    comb_sweep,
    j_scaling_sweep,
    min_temperature_sweep,
    optimal_isochore_split,
    optimal_total_split,
    optimize_allocation,
)
from .propagator import AffinePropagator

__version__ = "0.1.0"

__all__ = [
    "AdiabatGeometry", "AdiabatSpec", "AffinePropagator", "Bath",
    "CycleMetrics", "CycleSpec", "DegenerateField", "FieldPoint",
    "FrictionlessSolution", "IntegrationFailure", "IsochoreSpec",
    "MediumParams", "NoFeasibleRefrigerator", "NoSolution",
    "NoUniqueLimitCycle", "NoiseParams", "ObservableState",
    "OptimizeRequest", "ParseError", "PhaseNoiseAsymptote",
    "PhysicalityViolation", "ScheduleInfeasible", "SpinFridgeError",
    "SweepResult", "ThermoBounds", "ValidationError",
    "adiabat_geometry", "adiabat_propagator", "adiabaticity_delta",
    "amplitude_noise_asymptotics", "basis_operators",
    "closed_form_propagator", "comb_sweep", "constant_mu_optimality_check",
    "constant_mu_schedule", "cycle_propagator", "cycle_trajectory",
    "effective_gap", "entropies", "equilibrium_energy",
    "extract_observables", "frictionless_family", "isochore_oracle",
    "isochore_propagator", "j_scaling_sweep", "limit_cycle",
    "min_temperature", "min_temperature_sweep", "numeric_propagator",
    "optimal_isochore_split", "optimal_total_split", "optimize_allocation",
    "perturbed_mu_schedule", "phase_noise_asymptotics", "q_c_max",
    "reconstruct_rho", "segment_propagators", "thermal_state",
    "thermo_bounds",
]
