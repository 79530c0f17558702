from __future__ import annotations

import math

import hypothesis.strategies as st
import pytest
from hypothesis import assume, given

from bodyosc.mapping import (
    ExpDb,
    ExpNorm,
    Linear,
    PitchExp,
    SpeedCalibration,
    amplitude_curve,
    apply,
    calibrate,
    jnd_analyze,
    map_exp_db,
    map_exp_norm,
    map_linear,
    map_pitch,
    normalize_speed,
    speed_grid,
)

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestNormalizeSpeed:
    def test_rest_is_zero(self):
        assert normalize_speed(0.0, SpeedCalibration(s_max=6.0)) == 0.0

    def test_half_scale(self):
        assert normalize_speed(3.0, SpeedCalibration(s_max=6.0)) == 0.5

    def test_clamped_at_full_scale(self):
        assert normalize_speed(9.0, SpeedCalibration(s_max=6.0)) == 1.0

    @given(st.floats(min_value=0.0, max_value=1e6, allow_nan=False))
    def test_range(self, s_bl):
        assert 0.0 <= normalize_speed(s_bl, SpeedCalibration(s_max=6.0)) <= 1.0


class TestLinear:
    def test_endpoints_and_identity(self):
        assert map_linear(0.0) == 0.0
        assert map_linear(1.0) == 1.0
        assert map_linear(0.5) == 0.5


class TestExpDb:
    FN = ExpDb(db_floor=-60.0, gate=0.02)

    def test_full_scale_exact(self):
        assert map_exp_db(1.0, self.FN) == 1.0

    def test_midpoint(self):
        assert map_exp_db(0.5, self.FN) == pytest.approx(10.0 ** -1.5, rel=1e-12)
        assert map_exp_db(0.5, self.FN) == pytest.approx(0.0316228, abs=1e-7)

    def test_gated_silence(self):
        assert map_exp_db(0.01, self.FN) == 0.0
        assert map_exp_db(0.0, self.FN) == 0.0
        assert map_exp_db(0.02, self.FN) > 0.0  # boundary is live, not gated

    @given(
        st.floats(min_value=0.02, max_value=1.0),
        st.floats(min_value=0.0, max_value=0.98),
    )
    def test_weber_property_exact(self, s, delta):
        # Equal speed steps give equal dB steps, independent of s.
        assume(s + delta <= 1.0)
        step = 20.0 * math.log10(map_exp_db(s + delta, self.FN) / map_exp_db(s, self.FN))
        assert step == pytest.approx(60.0 * delta, abs=1e-9)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            ExpDb(db_floor=3.0)
        with pytest.raises(ValueError):
            ExpDb(gate=1.0)


class TestExpNorm:
    FN = ExpNorm(k=4.0)

    def test_exact_zero_and_one(self):
        assert map_exp_norm(0.0, self.FN) == 0.0
        assert map_exp_norm(1.0, self.FN) == 1.0

    def test_midpoint(self):
        expected = (math.e**2 - 1.0) / (math.e**4 - 1.0)
        assert map_exp_norm(0.5, self.FN) == pytest.approx(expected, rel=1e-12)
        assert map_exp_norm(0.5, self.FN) == pytest.approx(0.119203, abs=1e-6)


class TestPitch:
    FN = PitchExp(f0=220.0, octaves=2.0)

    def test_endpoints_and_octaves(self):
        assert map_pitch(0.0, self.FN) == 220.0
        assert map_pitch(0.5, self.FN) == 440.0
        assert map_pitch(1.0, self.FN) == 880.0

    @given(unit, st.floats(min_value=0.5, max_value=8.0), st.floats(min_value=20.0, max_value=2000.0))
    def test_octave_law(self, u, octaves, f0):
        fn = PitchExp(f0=f0, octaves=octaves)
        u2 = u + 1.0 / octaves
        assume(u2 <= 1.0)
        assert map_pitch(u2, fn) == pytest.approx(2.0 * map_pitch(u, fn), rel=1e-9)

    @given(unit)
    def test_range(self, u):
        f = map_pitch(u, self.FN)
        assert 220.0 <= f <= 880.0


class TestMonotonicity:
    @given(unit, unit)
    def test_amplitude_maps_non_decreasing(self, a, b):
        lo, hi = min(a, b), max(a, b)
        for fn in (Linear(), ExpDb(), ExpNorm()):
            assert apply(fn, lo) <= apply(fn, hi)

    @given(unit, unit)
    def test_pitch_strictly_increasing(self, a, b):
        assume(abs(a - b) > 1e-9)
        lo, hi = min(a, b), max(a, b)
        assert map_pitch(lo, PitchExp()) < map_pitch(hi, PitchExp())

    @given(unit)
    def test_amplitude_range(self, s):
        for fn in (Linear(), ExpDb(), ExpNorm()):
            assert 0.0 <= apply(fn, s) <= 1.0


class TestCalibrate:
    def test_nearest_rank_95(self):
        samples = [float(i) for i in range(1, 101)]
        cal = calibrate(samples, percentile=95.0)
        assert cal.s_max == 95.0
        assert cal.method == "percentile"

    def test_all_equal(self):
        cal = calibrate([3.5] * 40, percentile=95.0)
        assert cal.s_max == 3.5

    def test_too_few_samples(self):
        with pytest.raises(ValueError, match="too few"):
            calibrate([1.0] * 10)

    def test_unordered_input(self):
        samples = [float(i) for i in range(100, 0, -1)]
        assert calibrate(samples, percentile=95.0).s_max == 95.0

    def test_percentile_100_is_max(self):
        samples = [float(i) for i in range(1, 41)]
        assert calibrate(samples, percentile=100.0).s_max == 40.0


class TestJnd:
    def test_linear_constant_imperceptible_steps(self):
        report = jnd_analyze(Linear(), w_in=0.1, l_jnd=1.0)
        expected = 20.0 * math.log10(1.1)
        # Evaluated points: s in (0, 1/1.1], i.e. 181 of the 200 grid points.
        assert len(report.s) == 181
        for step in report.step_db:
            assert step == pytest.approx(expected, abs=1e-12)
        assert not any(report.perceptible)
        assert math.isnan(report.uniformity)

    def test_exp_db_steps_match_closed_form(self):
        fn = ExpDb(db_floor=-60.0, gate=0.02)
        report = jnd_analyze(fn, w_in=0.1, l_jnd=1.0)
        for s, step in zip(report.s, report.step_db):
            assert step == pytest.approx(6.0 * s, abs=1e-9)

    def test_exp_db_perceptible_threshold_one_sixth(self):
        report = jnd_analyze(ExpDb(db_floor=-60.0), w_in=0.1, l_jnd=1.0)
        grid_step = 1.0 / 200.0
        first = min(s for s, p in zip(report.s, report.perceptible) if p)
        assert abs(first - 1.0 / 6.0) <= grid_step
        for s, p in zip(report.s, report.perceptible):
            assert p == (s >= first)

    def test_exp_db_uniformity_ratio(self):
        report = jnd_analyze(ExpDb(db_floor=-60.0), w_in=0.1, l_jnd=1.0)
        perceptible = [s for s, p in zip(report.s, report.perceptible) if p]
        expected = (6.0 * max(perceptible)) / (6.0 * min(perceptible))
        assert report.uniformity == pytest.approx(expected, abs=1e-9)
        # Close to the continuum endpoints ratio (1/1.1)/(1/6) = 5.45...
        assert report.uniformity == pytest.approx(6.0 / 1.1, rel=0.05)

    def test_csv_columns(self):
        text = jnd_analyze(Linear()).to_csv()
        header, first = text.splitlines()[:2]
        assert header == "s,step_db,perceptible"
        s, step, perc = first.split(",")
        float(s), float(step)
        assert perc in ("0", "1")

    def test_pitch_rejected(self):
        with pytest.raises(ValueError):
            jnd_analyze(PitchExp())

    def test_gate_points_excluded_silently(self):
        report = jnd_analyze(ExpDb(db_floor=-60.0, gate=0.1), w_in=0.1)
        assert min(report.s) >= 0.1

    @given(
        st.floats(min_value=0.01, max_value=0.5),
        st.floats(min_value=0.1, max_value=3.0),
    )
    def test_jnd_grid_against_brute_force(self, w_in, l_jnd):
        fn = ExpDb(db_floor=-48.0, gate=0.05)
        report = jnd_analyze(fn, w_in=w_in, l_jnd=l_jnd)
        for s, step, perc in zip(report.s, report.step_db, report.perceptible):
            brute = 20.0 * math.log10(apply(fn, s * (1.0 + w_in)) / apply(fn, s))
            assert step == pytest.approx(brute, abs=1e-12)
            assert perc == (step >= l_jnd)


class TestCurve:
    def test_grid_contains_midpoint_and_fullscale(self):
        grid = speed_grid(200)
        assert 0.5 in grid and 1.0 in grid
        assert len(grid) == 200

    def test_curve_rows(self):
        rows = amplitude_curve(ExpDb(db_floor=-60.0))
        by_s = dict(rows)
        assert by_s[0.5] == pytest.approx(10.0 ** -1.5, rel=1e-12)
        assert by_s[1.0] == 1.0
        assert len(rows) == 200

    def test_linear_curve_identity(self):
        rows = amplitude_curve(Linear())
        assert all(m == s for s, m in rows)
