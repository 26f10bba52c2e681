"""Planner for robust entanglement generation between few-qubit registers.

Models majority-vote readout, two-level entanglement pumping, and the
absorbing-chain resource analysis of an optically linked register pair,
with an independent density-matrix / Monte-Carlo verification layer.
"""

from .model import (
    BellDiagonalState,
    BudgetCapError,
    ErrorParams,
    MeasurementPlan,
    NoiseKind,
    PhysicalTimings,
    PlanResult,
    PumpSchedule,
    RestartMode,
    StepKind,
    UnpurifiableError,
    ValidationError,
    validate,
)
from .measurement import exact_vote_error, measurement_error, measurement_time, optimal_m
from .timing import build_timings, entanglement_time, memory_check, optical_times
from .pumping import (
    PumpTrace,
    StepRecord,
    closed_form_infidelity,
    pump_step,
    raw_pair,
    run_standard,
    run_two_level,
)
from .markov import (
    MarkovChain,
    MarkovResult,
    analyze_chain,
    build_chain,
    expected_pairs,
    failure_probability,
    optimize_schedule,
    plan,
    solve_budget,
)
from .oracle import DensityMatrix, MonteCarloResult, monte_carlo_pumping, simulate_pump_step

__version__ = "0.1.0"

__all__ = [
    "BellDiagonalState",
    "BudgetCapError",
    "DensityMatrix",
    "ErrorParams",
    "MarkovChain",
    "MarkovResult",
    "MeasurementPlan",
    "MonteCarloResult",
    "NoiseKind",
    "PhysicalTimings",
    "PlanResult",
    "PumpSchedule",
    "PumpTrace",
    "RestartMode",
    "StepKind",
    "StepRecord",
    "UnpurifiableError",
    "ValidationError",
    "analyze_chain",
    "build_chain",
    "build_timings",
    "closed_form_infidelity",
    "entanglement_time",
    "expected_pairs",
    "failure_probability",
    "exact_vote_error",
    "measurement_error",
    "measurement_time",
    "memory_check",
    "monte_carlo_pumping",
    "optical_times",
    "optimal_m",
    "optimize_schedule",
    "plan",
    "pump_step",
    "raw_pair",
    "run_standard",
    "run_two_level",
    "simulate_pump_step",
    "solve_budget",
    "validate",
    "__version__",
]
