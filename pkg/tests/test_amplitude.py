import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tactorbelt.amplitude import (
    AmplitudeDecodeError,
    AmplitudeVector,
    FalloffParams,
    amplitudes_at,
    decode_static,
    encode_static,
    falloff,
)
from tactorbelt.geometry import TargetKind, build_layout

_LAYOUT = build_layout()
_PARAMS = FalloffParams.for_layout(_LAYOUT)

# frozen from direct evaluation: y(offset) = 1 - e^(-(60 - |offset|)/15)
EXPECTED = {
    0.0: 1.0 - math.exp(-4.0),
    15.0: 1.0 - math.exp(-3.0),
    30.0: 1.0 - math.exp(-2.0),
    45.0: 1.0 - math.exp(-1.0),
    60.0: 0.0,
    90.0: 0.0,
}


def _reference_falloff(x: float, d: float, decay: float = 15.0) -> float:
    """Literal piecewise form, valid when x and d do not wrap around 0/360."""
    if x <= d:
        return max(1.0 - math.exp(-(x - d + 60.0) / decay), 0.0)
    return max(1.0 - math.exp(-(d - x + 60.0) / decay), 0.0)


class TestFalloff:
    @pytest.mark.parametrize("offset,expected", sorted(EXPECTED.items()))
    def test_reference_values(self, params, offset, expected):
        assert falloff(90.0 + offset, 90.0, params) == pytest.approx(expected, abs=1e-12)
        assert falloff(90.0 - offset, 90.0, params) == pytest.approx(expected, abs=1e-12)

    def test_matches_piecewise_form_away_from_seam(self, params):
        d = 180.0
        x = 60.0
        while x <= 300.0:
            assert falloff(x, d, params) == pytest.approx(
                _reference_falloff(x, d), abs=1e-12
            )
            x += 0.37

    def test_wrap_seam_continuity(self, params):
        # equal separations on either side of a tactor give equal amplitudes,
        # including when the short arc crosses 0/360
        assert falloff(350.0, 330.0, params) == pytest.approx(
            falloff(310.0, 330.0, params), abs=1e-12
        )
        assert falloff(10.0, 330.0, params) == pytest.approx(
            falloff(290.0, 330.0, params), abs=1e-12
        )
        assert falloff(359.0, 30.0, params) == pytest.approx(
            falloff(61.0, 30.0, params), abs=1e-12
        )

    def test_continuity_on_fine_grid(self, params):
        step = 0.01
        prev = falloff(0.0, 90.0, params)
        max_jump = 0.0
        x = step
        while x < 360.0:
            cur = falloff(x, 90.0, params)
            max_jump = max(max_jump, abs(cur - prev))
            prev = cur
            x += step
        assert max_jump < 1e-3

    @given(
        st.floats(-720, 720, allow_nan=False),
        st.floats(0, 360, exclude_max=True, allow_nan=False),
    )
    def test_range(self, x, d):
        y = falloff(x, d, FalloffParams())
        assert 0.0 <= y <= 1.0

    def test_zero_at_and_beyond_span(self, params):
        for sep in (60.0, 75.0, 90.0, 120.0, 180.0):
            assert falloff(90.0 + sep, 90.0, params) == 0.0


class TestEncodeStatic:
    def test_on_tactor_single_nonzero(self, layout, target_set, params):
        v = encode_static(target_set.by_angle(30.0), layout, params)
        assert v.active_indices() == (0,)
        assert v[0] == pytest.approx(1.0 - math.exp(-4.0), abs=1e-9)

    def test_midpoint_equal_split(self, layout, target_set, params):
        v = encode_static(target_set.by_angle(60.0), layout, params)
        assert v.active_indices() == (0, 1)
        assert v[0] == pytest.approx(1.0 - math.exp(-2.0), abs=1e-9)
        assert v[0] == v[1]

    def test_quarter_point(self, layout, target_set, params):
        v = encode_static(target_set.by_angle(45.0), layout, params)
        assert v[0] == pytest.approx(1.0 - math.exp(-3.0), abs=1e-7)
        assert v[1] == pytest.approx(1.0 - math.exp(-1.0), abs=1e-7)

    def test_support_invariant_all_targets(self, layout, target_set, params):
        for t in target_set:
            v = encode_static(t, layout, params)
            v.check_support()
            active = v.active_indices()
            if t.kind is TargetKind.ON_TACTOR:
                assert len(active) == 1
            else:
                assert len(active) == 2

    def test_bracket_monotonicity_sweep(self, layout, params):
        # first tactor fades, second grows, as the source sweeps the gap
        prev_first, prev_second = None, None
        for step in range(61):
            v = amplitudes_at(30.0 + step, layout, params)
            if prev_first is not None:
                assert v[0] < prev_first or (v[0] == 0.0 and prev_first == 0.0)
                assert v[1] > prev_second or step == 0
            prev_first, prev_second = v[0], v[1]


class TestDecodeStatic:
    def test_round_trip_all_targets(self, layout, target_set, params):
        for t in target_set:
            v = encode_static(t, layout, params)
            assert decode_static(v, layout, params) == pytest.approx(
                t.angle_deg, abs=1e-9
            )

    def test_one_hot_decodes_to_tactor(self, layout, params):
        peak = 1.0 - math.exp(-4.0)
        v = AmplitudeVector((0.0, 0.0, peak, 0.0, 0.0, 0.0))
        assert decode_static(v, layout, params) == pytest.approx(150.0, abs=1e-9)

    def test_all_zero_rejected(self, layout, params):
        with pytest.raises(AmplitudeDecodeError):
            decode_static(AmplitudeVector((0.0,) * 6), layout, params)

    def test_nonadjacent_support_rejected(self, layout, params):
        v = AmplitudeVector((0.5, 0.0, 0.5, 0.0, 0.0, 0.0))
        with pytest.raises(AmplitudeDecodeError):
            decode_static(v, layout, params)

    def test_saturated_amplitude_rejected(self, layout, params):
        with pytest.raises(AmplitudeDecodeError):
            decode_static(AmplitudeVector((1.0, 0.0, 0.0, 0.0, 0.0, 0.0)), layout, params)

    def test_seam_round_trip(self, layout, params):
        for angle in (345.0, 350.0, 0.0, 10.0, 15.0):
            v = amplitudes_at(angle, layout, params)
            assert decode_static(v, layout, params) == pytest.approx(angle, abs=1e-9)

    @given(st.floats(0, 360, exclude_max=True, allow_nan=False))
    def test_round_trip_any_angle(self, angle):
        v = amplitudes_at(angle, _LAYOUT, _PARAMS)
        assert decode_static(v, _LAYOUT, _PARAMS) == pytest.approx(
            angle % 360.0, abs=1e-7
        )


class TestAmplitudeVector:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            AmplitudeVector((0.5, 1.5, 0.0, 0.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            AmplitudeVector((-0.1, 0.0, 0.0, 0.0, 0.0, 0.0))

    def test_wrap_pair_counts_as_adjacent(self):
        v = AmplitudeVector((0.4, 0.0, 0.0, 0.0, 0.0, 0.4))
        v.check_support()  # tactors 5 and 0 are belt neighbors

    def test_more_than_two_active_rejected(self):
        v = AmplitudeVector((0.4, 0.4, 0.4, 0.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            v.check_support()

    def test_midpoint_surrogate_amplitude(self, layout, target_set, params):
        # the weakest between-point drive still exceeds 0.86 of full scale
        v = encode_static(target_set.by_angle(60.0), layout, params)
        assert min(x for x in v if x > 0) >= 0.86
