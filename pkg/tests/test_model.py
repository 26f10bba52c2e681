
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rnp import (
    BellDiagonalState,
    ErrorParams,
    NoiseKind,
    PumpSchedule,
    UnpurifiableError,
    ValidationError,
    validate,
)


class TestErrorParams:
    def test_paper_operating_point_accepted(self):
        p = ErrorParams(p_local=1e-4, p_init=0.05, p_meas=0.05, fidelity=0.95)
        assert p.noise is NoiseKind.DEPOLARIZING
        assert validate(p) == p

    def test_out_of_range_fidelity_names_field(self):
        with pytest.raises(ValidationError, match="fidelity"):
            ErrorParams(p_local=0.0, p_init=0.0, p_meas=0.0, fidelity=1.2)

    def test_unpurifiable_fidelity_rejected(self):
        with pytest.raises(UnpurifiableError):
            ErrorParams(p_local=0.0, p_init=0.0, p_meas=0.0, fidelity=0.4)
        with pytest.raises(UnpurifiableError):
            ErrorParams(p_local=0.0, p_init=0.0, p_meas=0.0, fidelity=0.5)

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -0.1, 1.5])
    def test_rejects_non_probabilities(self, bad):
        with pytest.raises(ValidationError):
            ErrorParams(p_local=bad, p_init=0.0, p_meas=0.0, fidelity=0.9)


class TestBellDiagonalState:
    def test_fidelity_accessor(self):
        s = BellDiagonalState(0.7, 0.1, 0.1, 0.1)
        assert s.fidelity == pytest.approx(0.7, abs=1e-12)
        assert s.infidelity == pytest.approx(0.3, abs=1e-12)
        assert s.bit_error_mass == pytest.approx(0.2, abs=1e-12)

    def test_renormalizes_small_drift(self):
        drift = 1e-13
        s = BellDiagonalState(0.7 + drift, 0.1, 0.1, 0.1)
        assert abs(sum(s.as_tuple()) - 1.0) <= 1e-12

    def test_rejects_negative_component(self):
        with pytest.raises(ValidationError):
            BellDiagonalState(1.0, 0.1, -0.1, 0.0)

    def test_rejects_bad_sum(self):
        with pytest.raises(ValidationError):
            BellDiagonalState(0.5, 0.1, 0.1, 0.1)

    @given(
        st.lists(
            st.floats(min_value=1e-6, max_value=1.0, allow_nan=False), min_size=4, max_size=4
        )
    )
    def test_normalization_invariant(self, raw):
        total = sum(raw)
        s = BellDiagonalState.from_vector([x / total for x in raw])
        assert abs(sum(s.as_tuple()) - 1.0) <= 1e-12
        assert all(c >= 0.0 for c in s.as_tuple())


class TestPumpSchedule:
    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            PumpSchedule(n_b=-1, n_p=0)

    def test_rejects_non_integer(self):
        with pytest.raises(ValidationError):
            PumpSchedule(n_b=1.5, n_p=0)  # type: ignore[arg-type]

    def test_accepts_search_bound_range(self):
        s = PumpSchedule(n_b=15, n_p=15)
        assert (s.n_b, s.n_p) == (15, 15)
