
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rnp import (
    BellDiagonalState,
    ErrorParams,
    NoiseKind,
    PumpSchedule,
    StepKind,
    UnpurifiableError,
    ValidationError,
    closed_form_infidelity,
    pump_step,
    raw_pair,
    run_standard,
    run_two_level,
)


def params(f=0.95, p_l=0.0, noise=NoiseKind.DEPOLARIZING):
    return ErrorParams(p_local=p_l, p_init=0.05, p_meas=0.05, fidelity=f, noise=noise)


PERFECT = BellDiagonalState(1.0, 0.0, 0.0, 0.0)


class TestRawPair:
    def test_depolarizing_werner_form(self):
        s = raw_pair(params(0.95))
        assert s.as_tuple() == pytest.approx((0.95, 0.05 / 3, 0.05 / 3, 0.05 / 3))

    def test_perfect_pair(self):
        assert raw_pair(params(1.0)).as_tuple() == (1.0, 0.0, 0.0, 0.0)

    def test_dephasing_populates_only_phase_flip(self):
        s = raw_pair(params(0.95, noise=NoiseKind.DEPHASING))
        assert s.as_tuple() == pytest.approx((0.95, 0.05, 0.0, 0.0))

    def test_unpurifiable(self):
        with pytest.raises(UnpurifiableError):
            ErrorParams(p_local=0.0, p_init=0.0, p_meas=0.0, fidelity=0.45)


class TestPumpStep:
    def test_noiseless_bit_step_closed_form(self):
        # Independent first-principles check: accept on equal Z-parities,
        # keeper keeps x, gains the fresh pair's z.  For Werner inputs with
        # e = (1-F)/3: success = (F+e)^2 + (2e)^2, new Phi+ = (F^2+e^2)/P.
        f, e = 0.95, 0.05 / 3
        w = raw_pair(params(0.95))
        rec = pump_step(w, w, StepKind.BIT, 0.0, 0.0)
        p_expect = (f + e) ** 2 + (2 * e) ** 2
        assert rec.success_prob == pytest.approx(p_expect, abs=1e-14)
        expect = (
            (f * f + e * e) / p_expect,
            2 * f * e / p_expect,
            2 * e * e / p_expect,
            2 * e * e / p_expect,
        )
        assert rec.state_after_success.as_tuple() == pytest.approx(expect, abs=1e-14)

    def test_perfect_inputs_are_fixed_points(self):
        for kind in (StepKind.BIT, StepKind.PHASE):
            rec = pump_step(PERFECT, PERFECT, kind, 0.0, 0.0)
            assert rec.success_prob == 1.0
            assert rec.state_after_success.as_tuple() == pytest.approx((1, 0, 0, 0), abs=1e-15)

    def test_phase_step_suppresses_phase_flip(self):
        for a in (0.6, 0.8, 0.95):
            s = BellDiagonalState(a, 1.0 - a, 0.0, 0.0)
            rec = pump_step(s, s, StepKind.PHASE, 0.0, 0.0)
            assert rec.state_after_success.p_phi_minus < 1.0 - a
            # first-principles value: (1-a)^2 / (a^2 + (1-a)^2)
            assert rec.state_after_success.p_phi_minus == pytest.approx(
                (1 - a) ** 2 / (a**2 + (1 - a) ** 2), abs=1e-14
            )

    def test_rejects_bad_kind(self):
        with pytest.raises(ValidationError):
            pump_step(PERFECT, PERFECT, "bit", 0.0, 0.0)  # type: ignore[arg-type]

    @given(
        st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=4, max_size=4),
        st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=4, max_size=4),
        st.sampled_from([StepKind.BIT, StepKind.PHASE]),
        st.floats(min_value=0.0, max_value=0.05),
        st.floats(min_value=0.0, max_value=0.05),
    )
    def test_output_normalized(self, q_raw, r_raw, kind, p_l, eps_m):
        q = BellDiagonalState.from_vector([x / sum(q_raw) for x in q_raw])
        r = BellDiagonalState.from_vector([x / sum(r_raw) for x in r_raw])
        rec = pump_step(q, r, kind, p_l, eps_m)
        assert abs(sum(rec.state_after_success.as_tuple()) - 1.0) <= 1e-12
        assert 0.0 < rec.success_prob <= 1.0


class TestRunTwoLevel:
    def test_no_pumping_returns_raw_infidelity(self):
        trace = run_two_level(PumpSchedule(0, 0), params(0.93), 0.0)
        assert trace.steps == ()
        assert trace.infidelity == pytest.approx(0.07)

    def test_step_count_and_order(self):
        trace = run_two_level(PumpSchedule(3, 2), params(), 1e-4)
        assert len(trace.steps) == 5
        kinds = [s.kind for s in trace.steps]
        assert kinds == [StepKind.BIT] * 3 + [StepKind.PHASE] * 2

    def test_bit_suppression_monotone(self):
        masses = []
        for n_b in range(7):
            trace = run_two_level(PumpSchedule(n_b, 0), params(0.9), 0.0)
            masses.append(trace.final_state.bit_error_mass)
        assert all(a > b for a, b in zip(masses, masses[1:]))

    def test_perfect_operations_reach_tiny_infidelity(self):
        best = min(
            run_two_level(PumpSchedule(n_b, n_p), params(0.95), 0.0).infidelity
            for n_b in range(16)
            for n_p in range(16)
        )
        assert best < 1e-10

    def test_normalization_preserved_along_trace(self):
        trace = run_two_level(PumpSchedule(4, 4), params(0.9, p_l=1e-3), 1e-3)
        for step in trace.steps:
            assert abs(sum(step.state_after_success.as_tuple()) - 1.0) <= 1e-12


class TestRunStandard:
    def test_zero_steps(self):
        trace = run_standard(0, params(0.95), 0.0)
        assert trace.infidelity == pytest.approx(0.05)

    @pytest.mark.parametrize("f", [0.90, 0.95, 0.99])
    def test_floor_never_beaten(self, f):
        floor = (1.0 - f) ** 2 / 9.0
        for steps in range(31):
            trace = run_standard(steps, params(f), 0.0)
            assert trace.infidelity >= floor

    def test_two_level_beats_the_floor(self):
        f = 0.95
        floor = (1.0 - f) ** 2 / 9.0
        best = min(
            run_two_level(PumpSchedule(n_b, n_p), params(f), 0.0).infidelity
            for n_b in range(16)
            for n_p in range(16)
        )
        assert best < floor

    def test_alternation_bookkeeping(self):
        trace = run_standard(5, params(), 0.0)
        assert trace.schedule.n_b == 3
        assert trace.schedule.n_p == 2


class TestClosedForm:
    def test_no_pumping_value(self):
        # (2(1-F)/3) + ((1-F)/3) = 1 - F at zero steps and zero noise.
        v = closed_form_infidelity(PumpSchedule(0, 0), params(0.95), 0.0)
        assert v == pytest.approx(0.05, rel=1e-12)

    def test_perfect_fidelity_vanishes(self):
        assert closed_form_infidelity(PumpSchedule(3, 3), params(1.0), 0.0) == 0.0

    def test_reference_cell_value(self):
        # direct evaluation at (4, 5), F = 0.95, p_L = 1e-6, eps_M = 1.2e-5
        v = closed_form_infidelity(PumpSchedule(4, 5), params(0.95, p_l=1e-6), 1.2e-5)
        gate = (3 + 2 * 5) / 4 * 1e-6
        meas = (4 + 2 * 9) / 3 * 0.05 * 1.2e-5
        bit = 6 * (0.1 / 3) ** 5
        phase = (5 * 0.05 / 3) ** 6
        assert v == pytest.approx(gate + meas + bit + phase, rel=1e-12)
        assert v == pytest.approx(8.23e-6, rel=0.01)

    def test_rejects_dephasing(self):
        with pytest.raises(ValidationError):
            closed_form_infidelity(PumpSchedule(0, 3), params(noise=NoiseKind.DEPHASING), 0.0)
