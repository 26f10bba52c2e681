"""Absorbing-chain analysis of the pumping process and the plan composer.

One chain transition consumes exactly one raw pair.  A state (b, r) means:
build b is in progress (b = 0 is the keeper build, b = k >= 1 the fresh
pair for phase step k) and r raw pairs are already sunk into it.  The raw
consumed in a state either starts the build (its base pair), attempts the
next bit-pumping step, or - when it completes a fresh build - additionally
attempts the phase comparison.  Failures throw work away according to the
restart mode; DONE is the single absorbing state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .measurement import optimal_m
from .model import (
    BudgetCapError,
    ErrorParams,
    MeasurementPlan,
    NoiseKind,
    PhysicalTimings,
    PlanResult,
    PumpSchedule,
    RestartMode,
    ValidationError,
)
from .noise import GATE_NOISE, GateNoise
from .pumping import PumpTrace, StepKind, run_two_level

__all__ = [
    "MarkovChain",
    "MarkovResult",
    "analyze_chain",
    "build_chain",
    "failure_probability",
    "expected_pairs",
    "optimize_schedule",
    "solve_budget",
    "plan",
    "BUDGET_CAP",
]

#: Hard cap on the raw-pair budget search.
BUDGET_CAP = 10**6


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Absorbing chain over raw-pair consumption.

    ``states`` lists the transient progress labels plus "DONE";
    ``step_success`` is each transient state's probability of advancing on
    its next raw pair (products where a build completion and a phase
    comparison ride on the same raw).
    """

    states: tuple[str, ...]
    step_success: tuple[float, ...]
    restart_mode: RestartMode
    n_b: int
    n_p: int
    trans_src: np.ndarray
    trans_dst: np.ndarray
    trans_p: np.ndarray

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def start(self) -> int:
        return 0

    @property
    def done(self) -> int:
        return len(self.states) - 1

    @property
    def min_pairs(self) -> int:
        """Raw pairs on the all-success path."""
        return (self.n_b + 1) * (self.n_p + 1)

    def transition_matrix(self) -> np.ndarray:
        t = np.zeros((self.n_states, self.n_states))
        np.add.at(t, (self.trans_src, self.trans_dst), self.trans_p)
        return t


@dataclass(frozen=True)
class MarkovResult:
    """Failure probability at a budget plus the expected consumption."""

    eps_fail: float
    expected_pairs: float
    budget: int


def analyze_chain(chain: MarkovChain, budget: int) -> MarkovResult:
    """Bundle the chain's failure probability at ``budget`` with its mean."""
    return MarkovResult(
        eps_fail=failure_probability(chain, budget),
        expected_pairs=expected_pairs(chain),
        budget=int(budget),
    )


def build_chain(trace: PumpTrace, restart_mode: RestartMode) -> MarkovChain:
    """Assemble the absorbing chain from a deterministic pump trace."""
    if not isinstance(restart_mode, RestartMode):
        raise ValidationError(f"restart_mode must be a RestartMode, got {restart_mode!r}")
    n_b = trace.schedule.n_b
    n_p = trace.schedule.n_p
    bit_succ = [s.success_prob for s in trace.steps if s.kind is StepKind.BIT]
    phase_succ = [s.success_prob for s in trace.steps if s.kind is StepKind.PHASE]
    if len(bit_succ) != n_b or len(phase_succ) != n_p:
        raise ValidationError("trace steps do not match its schedule")

    width = n_b + 1

    def idx(b: int, r: int) -> int:
        return b * width + r

    n_transient = (n_p + 1) * width
    done = n_transient
    labels = []
    step_success = []
    src: list[int] = []
    dst: list[int] = []
    prob: list[float] = []

    def add(s: int, d: int, p: float) -> None:
        if p > 0.0:
            src.append(s)
            dst.append(d)
            prob.append(p)

    for b in range(n_p + 1):
        advance_to = done if b == n_p else idx(b + 1, 0)
        restart_to = idx(0, 0) if restart_mode is RestartMode.FULL else idx(b, 0)
        for r in range(width):
            s = idx(b, r)
            role = "keeper" if b == 0 else f"phase{b}"
            labels.append(f"{role}:raws{r}")
            if n_b == 0:
                # The single raw is the whole build.
                if b == 0:
                    add(s, advance_to, 1.0)
                    step_success.append(1.0)
                else:
                    p = phase_succ[b - 1]
                    add(s, advance_to, p)
                    add(s, restart_to, 1.0 - p)
                    step_success.append(p)
            elif r == 0:
                add(s, idx(b, 1), 1.0)
                step_success.append(1.0)
            elif r < n_b:
                p = bit_succ[r - 1]
                add(s, idx(b, r + 1), p)
                add(s, restart_to, 1.0 - p)
                step_success.append(p)
            else:
                p_bit = bit_succ[n_b - 1]
                if b == 0:
                    add(s, advance_to, p_bit)
                    add(s, restart_to, 1.0 - p_bit)
                    step_success.append(p_bit)
                else:
                    p_cmp = phase_succ[b - 1]
                    add(s, advance_to, p_bit * p_cmp)
                    add(s, restart_to, 1.0 - p_bit * p_cmp)
                    step_success.append(p_bit * p_cmp)
    labels.append("DONE")
    add(done, done, 1.0)

    return MarkovChain(
        states=tuple(labels),
        step_success=tuple(step_success),
        restart_mode=restart_mode,
        n_b=n_b,
        n_p=n_p,
        trans_src=np.asarray(src, dtype=np.int64),
        trans_dst=np.asarray(dst, dtype=np.int64),
        trans_p=np.asarray(prob, dtype=np.float64),
    )


def failure_probability(chain: MarkovChain, budget: int) -> float:
    """Probability that ``budget`` raw pairs do not finish the schedule."""
    if budget < 0:
        raise ValidationError(f"budget must be >= 0, got {budget!r}")
    dist = backend.chain_evolve(
        chain.trans_src, chain.trans_dst, chain.trans_p, chain.n_states, chain.start, int(budget)
    )
    return float(min(max(1.0 - dist[chain.done], 0.0), 1.0))


def expected_pairs(chain: MarkovChain) -> float:
    """Expected raw pairs until absorption (fundamental-matrix solve)."""
    if min(chain.step_success) <= 0.0:
        raise ValidationError("a step has zero success probability; the chain cannot absorb")
    n_t = chain.n_states - 1
    q = np.zeros((n_t, n_t))
    for s, d, p in zip(chain.trans_src, chain.trans_dst, chain.trans_p):
        if s < n_t and d < n_t:
            q[s, d] += p
    t = np.linalg.solve(np.eye(n_t) - q, np.ones(n_t))
    return float(t[chain.start])


def solve_budget(chain: MarkovChain, delta_min: float, cap: int = BUDGET_CAP) -> int:
    """Smallest budget whose failure probability is at most ``delta_min``."""
    if not (0.0 <= delta_min < 1.0) or not math.isfinite(delta_min):
        raise ValidationError(f"delta_min must lie in [0, 1), got {delta_min!r}")
    budget, _eps = backend.chain_scan(
        chain.trans_src,
        chain.trans_dst,
        chain.trans_p,
        chain.n_states,
        chain.start,
        chain.done,
        float(delta_min),
        int(cap),
    )
    if budget < 0:
        raise BudgetCapError(
            f"no budget up to {cap} reaches failure probability {delta_min!r}"
        )
    return int(budget)


def optimize_schedule(
    params: ErrorParams,
    meas_flip: float,
    bound: int = 15,
    gate_noise: GateNoise = GATE_NOISE,
) -> tuple[PumpSchedule, float]:
    """Exhaustively minimize the pumped infidelity over (n_b, n_p).

    Ties break toward fewer total steps, then fewer phase steps.  Dephased
    raw pairs carry no bit errors, so their search is restricted to the
    one-level (n_b = 0) row.
    """
    if not isinstance(bound, int) or bound < 0:
        raise ValidationError(f"bound must be a nonnegative integer, got {bound!r}")
    n_b_range = [0] if params.noise is NoiseKind.DEPHASING else range(bound + 1)
    best: tuple[float, int, int] | None = None
    best_sched: PumpSchedule | None = None
    for n_b in n_b_range:
        for n_p in range(bound + 1):
            sched = PumpSchedule(n_b=n_b, n_p=n_p)
            infid = run_two_level(sched, params, meas_flip, gate_noise).infidelity
            key = (infid, n_b + n_p, n_p)
            if best is None or key < best:
                best = key
                best_sched = sched
    assert best is not None and best_sched is not None
    return best_sched, best[0]


def plan(
    params: ErrorParams,
    timings: PhysicalTimings,
    meas: MeasurementPlan | None = None,
    bound: int = 15,
    restart_mode: RestartMode = RestartMode.FULL,
    gate_noise: GateNoise = GATE_NOISE,
) -> PlanResult:
    """Compose the full plan for one parameter point.

    Picks the infidelity-optimal schedule, sizes the raw-pair budget so the
    failure probability matches the reachable infidelity, and assembles
    the clock cycle and effective gate error.  When ``meas`` is omitted the
    repetition count is optimized from ``params`` and ``timings``.
    """
    if meas is None:
        meas = optimal_m(params, timings=timings)
    if meas.duration_s is None:
        raise ValidationError("plan requires a MeasurementPlan with a duration")

    schedule, delta_min = optimize_schedule(params, meas.error_prob, bound, gate_noise)
    trace = run_two_level(schedule, params, meas.error_prob, gate_noise)
    chain = build_chain(trace, restart_mode)
    stats = analyze_chain(chain, solve_budget(chain, delta_min))
    eps_fail, expected, budget = stats.eps_fail, stats.expected_pairs, stats.budget

    eps_e = eps_fail + delta_min
    t_meas = meas.duration_s
    t_robust_ent = expected * (timings.t_ent + timings.t_local + t_meas)
    t_c = t_robust_ent + 2.0 * timings.t_local + t_meas
    gamma = eps_e + 2.0 * params.p_local + 2.0 * meas.error_prob
    p_cnot_raw = (1.0 - params.fidelity) + 2.0 * params.p_local + 2.0 * params.p_meas

    return PlanResult(
        schedule=schedule,
        delta_min=delta_min,
        n_tot_budget=budget,
        expected_pairs=expected,
        eps_fail=eps_fail,
        eps_E=eps_e,
        t_robust_ent=t_robust_ent,
        t_C=t_c,
        gamma=gamma,
        p_cnot_raw=min(p_cnot_raw, 1.0),
        restart_mode=restart_mode,
    )
