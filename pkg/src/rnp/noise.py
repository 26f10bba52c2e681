"""Gate-noise convention shared by the pumping recurrence and the oracle.

A pumping step applies one local CNOT in each of the two registers.  Each
CNOT carries two-qubit depolarizing noise: with probability ``weight`` a
uniformly random non-identity two-qubit Pauli hits the gate's qubit pair.
``placement`` says whether that Pauli acts before or after the perfect gate
(both are standard faulty-gate formulations; they differ in how much of the
error the step's own parity check can catch).

The module-level ``GATE_NOISE`` constant is the single convention used
package-wide, so the closed-form recurrence and the density-matrix oracle
always model the same channel.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["GateNoise", "GATE_NOISE"]


@dataclass(frozen=True)
class GateNoise:
    #: "before" or "after" the perfect CNOT.
    placement: str
    #: per-CNOT channel weight as a fraction of p_local.
    weight_factor: float

    def __post_init__(self) -> None:
        if self.placement not in ("before", "after"):
            raise ValueError(f"placement must be 'before' or 'after', got {self.placement!r}")
        if not (0.0 < self.weight_factor <= 1.0):
            raise ValueError(f"weight_factor must be in (0, 1], got {self.weight_factor!r}")


# Each register's CNOT carries the full weight p_local.  Placement is
# immaterial for this channel: conjugating a uniform non-identity Pauli
# mixture through a Clifford permutes its terms and leaves it unchanged,
# so "before" and "after" compose to the same step map.
GATE_NOISE = GateNoise(placement="after", weight_factor=1.0)
