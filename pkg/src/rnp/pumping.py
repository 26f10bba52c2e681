"""Entanglement-pumping engine: per-step Bell-diagonal maps and schedules.

Every pure Bell-product state is labelled by four flag bits
(x1, z1, x2, z2): pair 1 is the kept ("keeper") pair, pair 2 the fresh pair
consumed by the step; x marks a bit flip (Psi components), z a phase flip.
CNOTs are Clifford and the noise is Pauli, so a whole pumping step is an
exact stochastic map on the 16 flag configurations:

  bit step    keeper controls fresh, fresh measured in Z;
              flags map (x1, z1, x2, z2) -> (x1, z1^z2, x2^x1, z2),
              accept when the measured parity x2^x1 reads 0.
  phase step  fresh controls keeper, fresh measured in X;
              flags map (x1, z1, x2, z2) -> (x1^x2, z1, x2, z2^z1),
              accept when the measured parity z2^z1 reads 0.

Gate noise is a 16-point XOR convolution per register (see noise.py) and a
voted-readout error flips each of the two compared outcomes independently,
so the comparison itself flips with probability 2*eps*(1-eps).  The maps
here are the closed-form transcription of exactly what the density-matrix
oracle computes; the oracle is the arbiter (they agree to 1e-10).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    BellDiagonalState,
    ErrorParams,
    NoiseKind,
    PumpSchedule,
    StepKind,
    UnpurifiableError,
    ValidationError,
)
from .noise import GATE_NOISE, GateNoise

__all__ = [
    "StepRecord",
    "PumpTrace",
    "raw_pair",
    "pump_step",
    "run_two_level",
    "run_standard",
    "closed_form_infidelity",
]


def _pack(x1: int, z1: int, x2: int, z2: int) -> int:
    return 8 * x1 + 4 * z1 + 2 * x2 + z2


def _cnot_permutation(kind: StepKind) -> np.ndarray:
    """Index map new_J = perm[old_J] for the bilateral CNOT of a step."""
    perm = np.zeros(16, dtype=np.intp)
    for j in range(16):
        x1, z1, x2, z2 = (j >> 3) & 1, (j >> 2) & 1, (j >> 1) & 1, j & 1
        if kind is StepKind.BIT:
            jn = _pack(x1, z1 ^ z2, x2 ^ x1, z2)
        else:
            jn = _pack(x1 ^ x2, z1, x2, z2 ^ z1)
        perm[j] = jn
    return perm


_PERM = {StepKind.BIT: _cnot_permutation(StepKind.BIT), StepKind.PHASE: _cnot_permutation(StepKind.PHASE)}

# Measured parity bit per joint flag index: x2 for bit steps, z2 for phase.
_PARITY = {
    StepKind.BIT: np.array([(j >> 1) & 1 for j in range(16)], dtype=np.int8),
    StepKind.PHASE: np.array([j & 1 for j in range(16)], dtype=np.int8),
}


def _noise_matrix(weight: float) -> np.ndarray:
    """XOR-convolution matrix of one register's two-qubit depolarizing hit.

    The 16 two-qubit Pauli patterns map one-to-one onto flag-flip masks;
    identity keeps 1-weight, the 15 others share weight/15 each.
    """
    mat = np.zeros((16, 16))
    for j in range(16):
        for d in range(16):
            p = 1.0 - weight if d == 0 else weight / 15.0
            mat[j ^ d, j] += p
    return mat


@dataclass(frozen=True)
class StepRecord:
    """One accepted pumping step along the deterministic trace."""

    kind: StepKind
    state_before: BellDiagonalState
    success_prob: float
    state_after_success: BellDiagonalState

    def __post_init__(self) -> None:
        if not (0.0 < self.success_prob <= 1.0):
            raise ValidationError(f"success_prob must be in (0, 1], got {self.success_prob!r}")


@dataclass(frozen=True)
class PumpTrace:
    """Deterministic all-success trace of a pumping schedule."""

    schedule: PumpSchedule
    steps: tuple[StepRecord, ...]
    final_state: BellDiagonalState
    infidelity: float


def raw_pair(params: ErrorParams) -> BellDiagonalState:
    """Bell-diagonal form of one freshly generated pair.

    Depolarizing generation spreads the infidelity evenly over the three
    error components (Werner form); dephasing puts it all on Phi-.
    """
    f = params.fidelity
    if f <= 0.5:
        raise UnpurifiableError(f"fidelity must exceed 0.5, got {f!r}")
    if params.noise is NoiseKind.DEPOLARIZING:
        e = (1.0 - f) / 3.0
        return BellDiagonalState(f, e, e, e)
    return BellDiagonalState(f, 1.0 - f, 0.0, 0.0)


def pump_step(
    target: BellDiagonalState,
    fresh: BellDiagonalState,
    kind: StepKind,
    p_local: float,
    meas_flip: float,
    gate_noise: GateNoise = GATE_NOISE,
) -> StepRecord:
    """Post-selected map of one pumping step.

    ``meas_flip`` is the voted-readout error of each of the two compared
    measurements (one per register); ``p_local`` the per-step local-gate
    error budget, shaped by ``gate_noise``.
    """
    if not isinstance(kind, StepKind):
        raise ValidationError(f"kind must be a StepKind, got {kind!r}")
    if not (0.0 <= p_local <= 1.0) or not (0.0 <= meas_flip <= 1.0):
        raise ValidationError("p_local and meas_flip must lie in [0, 1]")

    q = np.array(target.as_tuple())
    r = np.array(fresh.as_tuple())
    dist = np.outer(q, r).reshape(16)  # J = 4*f1 + f2

    noise = _noise_matrix(gate_noise.weight_factor * p_local)
    perm = _PERM[kind]
    if gate_noise.placement == "before":
        dist = noise @ dist  # register A's gate
        dist = noise @ dist  # register B's gate
        permuted = np.zeros(16)
        permuted[perm] = dist
        dist = permuted
    else:
        permuted = np.zeros(16)
        permuted[perm] = dist
        dist = noise @ (noise @ permuted)

    comp_flip = 2.0 * meas_flip * (1.0 - meas_flip)
    accept_w = np.where(_PARITY[kind] == 0, 1.0 - comp_flip, comp_flip)
    weighted = accept_w * dist
    success = float(weighted.sum())
    if success <= 0.0:
        raise ValidationError("pump step has zero acceptance probability")
    keeper = weighted.reshape(4, 4).sum(axis=1) / success
    return StepRecord(
        kind=kind,
        state_before=target,
        success_prob=min(success, 1.0),
        state_after_success=BellDiagonalState.from_vector(keeper),
    )


def run_two_level(
    schedule: PumpSchedule,
    params: ErrorParams,
    meas_flip: float,
    gate_noise: GateNoise = GATE_NOISE,
) -> PumpTrace:
    """Deterministic trace of two-level pumping.

    Level one filters bit errors: a raw keeper is pumped n_b times with raw
    fresh pairs.  Level two filters phase errors: the bit-purified pair is
    the keeper and also the fresh input of each of the n_p phase steps.
    """
    base = raw_pair(params)
    steps: list[StepRecord] = []

    keeper = base
    for _ in range(schedule.n_b):
        rec = pump_step(keeper, base, StepKind.BIT, params.p_local, meas_flip, gate_noise)
        steps.append(rec)
        keeper = rec.state_after_success

    bit_purified = keeper
    for _ in range(schedule.n_p):
        rec = pump_step(keeper, bit_purified, StepKind.PHASE, params.p_local, meas_flip, gate_noise)
        steps.append(rec)
        keeper = rec.state_after_success

    return PumpTrace(
        schedule=schedule,
        steps=tuple(steps),
        final_state=keeper,
        infidelity=keeper.infidelity,
    )


def run_standard(
    total_steps: int,
    params: ErrorParams,
    meas_flip: float,
    gate_noise: GateNoise = GATE_NOISE,
) -> PumpTrace:
    """Alternating bit/phase pumping fed with raw pairs throughout.

    This is the conventional scheme two-level pumping is compared against;
    raw fresh pairs keep re-injecting both error species, which floors the
    reachable infidelity.
    """
    if not isinstance(total_steps, int) or total_steps < 0:
        raise ValidationError(f"total_steps must be a nonnegative integer, got {total_steps!r}")
    base = raw_pair(params)
    keeper = base
    steps: list[StepRecord] = []
    n_b = n_p = 0
    for i in range(total_steps):
        kind = StepKind.BIT if i % 2 == 0 else StepKind.PHASE
        rec = pump_step(keeper, base, kind, params.p_local, meas_flip, gate_noise)
        steps.append(rec)
        keeper = rec.state_after_success
        if kind is StepKind.BIT:
            n_b += 1
        else:
            n_p += 1
    return PumpTrace(
        schedule=PumpSchedule(n_b=n_b, n_p=n_p),
        steps=tuple(steps),
        final_state=keeper,
        infidelity=keeper.infidelity,
    )


def closed_form_infidelity(
    schedule: PumpSchedule,
    params: ErrorParams,
    meas_flip: float,
) -> float:
    """Leading-order infidelity estimate of two-level pumping (depolarizing).

    Sum of the linear gate-noise cost, the measurement-error cross term,
    and the two exponentially suppressed residuals (bit errors surviving
    level one, phase errors surviving level two).
    """
    if params.noise is not NoiseKind.DEPOLARIZING:
        raise ValidationError("closed-form estimate is defined for depolarizing noise only")
    n_b, n_p = schedule.n_b, schedule.n_p
    one_minus_f = 1.0 - params.fidelity
    gate_term = (3.0 + 2.0 * n_p) / 4.0 * params.p_local
    meas_term = (4.0 + 2.0 * (n_b + n_p)) / 3.0 * one_minus_f * meas_flip
    bit_residual = (n_p + 1) * (2.0 * one_minus_f / 3.0) ** (n_b + 1)
    phase_residual = ((n_b + 1) * one_minus_f / 3.0) ** (n_p + 1)
    return gate_term + meas_term + bit_residual + phase_residual
