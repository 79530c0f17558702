from __future__ import annotations

import math

import hypothesis.strategies as st
import pytest
from hypothesis import given

from bodyosc.kinematics import (
    DEFAULT_PAIRS,
    PointState,
    SmootherConfig,
    features,
    update,
)
from bodyosc.wire import RawKeypoint

from conftest import unit_floats

FPS30_MS = 1000.0 / 30.0


def run_sequence(xs, cfg, dt_ms=FPS30_MS, y=0.5, confidence=0.9, name="right_wrist"):
    state = PointState()
    out = []
    for k, x in enumerate(xs):
        obs = None if x is None else RawKeypoint(name, x, y, confidence)
        state = update(state, obs, k * dt_ms, cfg if k else cfg)
        out.append(state)
    return out


class TestUpdate:
    def test_constant_observations_fixed_point(self):
        cfg = SmootherConfig()
        states = run_sequence([0.5] * 60, cfg)
        final = states[-1]
        assert final.p_hat == (0.5, 0.5)
        assert final.v == (0.0, 0.0)
        assert final.valid

    def test_linear_ramp_velocity_with_smoothing_off(self):
        # alpha pinned to 1 via tau=0: velocity is the raw backward
        # difference, which recovers the ramp slope (up to float rounding).
        cfg = SmootherConfig(tau=0.0)
        state = PointState()
        for k in range(60):
            t_ms = k * FPS30_MS
            x = 0.1 * (t_ms / 1000.0)
            state = update(state, RawKeypoint("right_wrist", x, 0.5, 0.9), t_ms, cfg)
            if k >= 1:
                assert state.v[0] == pytest.approx(0.1, abs=1e-12)
                assert state.v[1] == 0.0

    def test_first_observation_zero_velocity(self):
        cfg = SmootherConfig()
        state = update(PointState(), RawKeypoint("nose", 0.3, 0.4, 0.9), 0.0, cfg)
        assert state.v == (0.0, 0.0)
        assert state.p_hat == (0.3, 0.4)
        assert state.valid

    def test_hold_then_invalid_after_t_hold(self):
        cfg = SmootherConfig(t_hold=300.0)
        state = update(PointState(), RawKeypoint("nose", 0.5, 0.5, 0.9), 0.0, cfg)
        state = update(state, None, 200.0, cfg)
        assert state.valid
        assert state.p_hat == (0.5, 0.5)
        state = update(state, None, 350.0, cfg)
        assert not state.valid
        assert state.p_hat == (0.5, 0.5)

    def test_velocity_decays_while_missing(self):
        cfg = SmootherConfig(tau=80.0, t_hold=1000.0)
        state = PointState(p_hat=(0.5, 0.5), v=(1.0, -2.0), last_seen_t=0.0, last_t=0.0, valid=True)
        state = update(state, None, 80.0, cfg)
        decay = math.exp(-1.0)
        assert state.v[0] == pytest.approx(decay)
        assert state.v[1] == pytest.approx(-2.0 * decay)

    def test_low_confidence_treated_as_missing(self):
        cfg = SmootherConfig(c_min=0.5)
        state = update(PointState(), RawKeypoint("nose", 0.5, 0.5, 0.9), 0.0, cfg)
        state = update(state, RawKeypoint("nose", 0.9, 0.9, 0.2), 33.0, cfg)
        assert state.p_hat == (0.5, 0.5)

    def test_reacquire_after_hold_reseeds_without_velocity_spike(self):
        cfg = SmootherConfig(t_hold=100.0)
        state = update(PointState(), RawKeypoint("nose", 0.1, 0.1, 0.9), 0.0, cfg)
        state = update(state, None, 200.0, cfg)
        assert not state.valid
        state = update(state, RawKeypoint("nose", 0.9, 0.9, 0.9), 233.0, cfg)
        assert state.valid
        assert state.p_hat == (0.9, 0.9)
        assert state.v == (0.0, 0.0)

    def test_non_increasing_timestamp_rejected(self):
        cfg = SmootherConfig()
        state = update(PointState(), RawKeypoint("nose", 0.5, 0.5, 0.9), 10.0, cfg)
        with pytest.raises(ValueError, match="non-increasing"):
            update(state, RawKeypoint("nose", 0.5, 0.5, 0.9), 10.0, cfg)

    def test_never_seen_point_stays_unseeded(self):
        cfg = SmootherConfig()
        state = update(PointState(), None, 5.0, cfg)
        assert state.p_hat is None
        assert not state.valid


class TestVelocityOracle:
    def test_sine_motion_tracks_analytic_derivative(self):
        # x(t) = 0.2 sin(2*pi*f*t), f = 0.5 Hz, 30 fps, alpha = 1. The
        # backward difference over (t-h, t] estimates the derivative at the
        # interval midpoint; compare there, against the worst sample.
        cfg = SmootherConfig(tau=0.0)
        state = PointState()
        peak = 0.2 * math.pi
        worst = 0.0
        prev_t = None
        for k in range(301):
            t_ms = k * FPS30_MS
            t_s = t_ms / 1000.0
            x = 0.5 + 0.2 * math.sin(math.pi * t_s)
            state = update(state, RawKeypoint("right_wrist", x, 0.5, 0.9), t_ms, cfg)
            if k >= 1:
                mid_s = (t_s + prev_t / 1000.0) / 2.0
                analytic = 0.2 * math.pi * math.cos(math.pi * mid_s)
                worst = max(worst, abs(state.v[0] - analytic))
            prev_t = t_ms
        assert worst < 0.05 * peak


@st.composite
def observation_runs(draw):
    xs = draw(st.lists(unit_floats, min_size=1, max_size=25))
    dts = draw(st.lists(st.floats(min_value=1.0, max_value=200.0, allow_nan=False),
                        min_size=len(xs), max_size=len(xs)))
    tau = draw(st.floats(min_value=0.0, max_value=500.0, allow_nan=False))
    return xs, dts, tau


class TestSmoothingHull:
    @given(observation_runs())
    def test_position_stays_in_observed_hull(self, run):
        xs, dts, tau = run
        cfg = SmootherConfig(tau=tau, c_min=0.0, t_hold=1e9)
        state = PointState()
        t = 0.0
        lo, hi = math.inf, -math.inf
        for x, dt in zip(xs, dts):
            t += dt
            lo, hi = min(lo, x), max(hi, x)
            state = update(state, RawKeypoint("nose", x, 0.5, 1.0), t, cfg)
            assert lo <= state.p_hat[0] <= hi


velocities = st.tuples(
    st.floats(min_value=-100.0, max_value=100.0, allow_nan=False),
    st.floats(min_value=-100.0, max_value=100.0, allow_nan=False),
)


class TestFeatures:
    def _states(self, va, vb):
        return {
            "left_wrist": PointState(p_hat=(0.3, 0.5), v=va, last_seen_t=1.0, last_t=1.0, valid=True),
            "right_wrist": PointState(p_hat=(0.7, 0.5), v=vb, last_seen_t=1.0, last_t=1.0, valid=True),
        }

    def test_three_four_five_speed(self):
        feats = features(self._states((0.3, 0.4), (0.0, 0.0)), DEFAULT_PAIRS, 1.0)
        assert feats.points["left_wrist"].speed == 0.5

    def test_relative_velocity_antisymmetry(self):
        feats = features(self._states((0.2, 0.0), (-0.1, 0.0)), DEFAULT_PAIRS, 1.0)
        fwd = feats.rel_velocity("left_wrist", "right_wrist")
        rev = feats.rel_velocity("right_wrist", "left_wrist")
        assert fwd.v == (0.30000000000000004, 0.0)
        assert rev.v[0] == -fwd.v[0]
        assert rev.v[1] == -fwd.v[1]

    @given(velocities, velocities)
    def test_antisymmetry_exact(self, va, vb):
        feats = features(self._states(va, vb), DEFAULT_PAIRS, 1.0)
        fwd = feats.rel_velocity("left_wrist", "right_wrist")
        rev = feats.rel_velocity("right_wrist", "left_wrist")
        assert fwd.v[0] + rev.v[0] == 0.0
        assert fwd.v[1] + rev.v[1] == 0.0
        assert fwd.speed == rev.speed

    def test_all_static_zero(self):
        feats = features(self._states((0.0, 0.0), (0.0, 0.0)), DEFAULT_PAIRS, 1.0)
        assert all(p.speed == 0.0 for p in feats.points.values())
        rel = feats.rel_velocity("left_wrist", "right_wrist")
        assert rel.v == (0.0, 0.0)

    def test_pair_with_invalid_point_marked_invalid(self):
        states = self._states((0.1, 0.0), (0.0, 0.0))
        states["right_wrist"] = PointState(
            p_hat=(0.7, 0.5), v=(0.0, 0.0), last_seen_t=0.0, last_t=1.0, valid=False
        )
        feats = features(states, DEFAULT_PAIRS, 1.0)
        assert not feats.rel_velocity("left_wrist", "right_wrist").valid
        assert feats.points["left_wrist"].valid

    def test_missing_pair_member(self):
        states = self._states((0.1, 0.0), (0.0, 0.0))
        del states["right_wrist"]
        feats = features(states, DEFAULT_PAIRS, 1.0)
        rel = feats.rel_velocity("left_wrist", "right_wrist")
        assert rel is not None and not rel.valid

    @given(velocities, velocities)
    def test_speed_non_negative(self, va, vb):
        feats = features(self._states(va, vb), DEFAULT_PAIRS, 1.0)
        assert all(p.speed >= 0.0 for p in feats.points.values())
