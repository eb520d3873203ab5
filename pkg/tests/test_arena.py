import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antdyn import (
    Action,
    AgentState,
    ArenaGeometry,
    ConfigError,
    KinematicParams,
    RecordingMeta,
    apply_action,
    px_of_mm,
    wrap_angle,
)

GEOM = ArenaGeometry.from_resolution(1280)
KIN = KinematicParams()


def rest_state(x=640.0, y=640.0, theta=0.0):
    return AgentState(x=x, y=y, s=0.0, theta=theta, theta_dot=0.0)


class TestWrap:
    @given(st.floats(-50.0, 50.0))
    def test_range(self, theta):
        w = wrap_angle(theta)
        assert -math.pi < w <= math.pi

    @given(st.floats(-10.0, 10.0))
    def test_period(self, theta):
        assert wrap_angle(theta + math.tau) == pytest.approx(wrap_angle(theta), abs=1e-9)

    def test_pi_maps_to_pi(self):
        assert wrap_angle(math.pi) == math.pi
        assert wrap_angle(-math.pi) == math.pi
        assert wrap_angle(3 * math.pi) == math.pi


class TestApplyAction:
    def test_forward_from_rest(self):
        kin = KinematicParams(damping=1.0)
        out = apply_action(rest_state(theta=0.7), Action.FORWARD, kin, GEOM)
        s = kin.a_lin * kin.dt
        assert out.s == pytest.approx(s)
        assert out.theta == 0.7
        assert out.theta_dot == 0.0
        assert out.x == pytest.approx(640.0 + s * kin.dt * math.cos(0.7))
        assert out.y == pytest.approx(640.0 + s * kin.dt * math.sin(0.7))

    def test_turn_left_from_rest_holds_position(self):
        out = apply_action(rest_state(), Action.TURN_LEFT, KIN, GEOM)
        assert out.theta_dot == pytest.approx(KIN.a_ang * KIN.dt)
        assert out.theta_dot > 0  # + is counter-clockwise
        assert out.s == 0.0
        assert (out.x, out.y) == (640.0, 640.0)

    def test_backward_cancels_forward_without_damping(self):
        kin = KinematicParams(damping=1.0)
        mid = apply_action(rest_state(), Action.FORWARD, kin, GEOM)
        out = apply_action(mid, Action.BACKWARD, kin, GEOM)
        assert out.s == pytest.approx(0.0, abs=1e-12)

    def test_boundary_projection_zeroes_speed(self):
        # 1 px inside the wall, heading straight out, at full speed
        start = AgentState(x=GEOM.cx + GEOM.radius - 1.0, y=GEOM.cy,
                           s=KIN.v_max, theta=0.0, theta_dot=0.0)
        out = apply_action(start, Action.FORWARD, KIN, GEOM)
        d = math.hypot(out.x - GEOM.cx, out.y - GEOM.cy)
        assert d == pytest.approx(GEOM.radius, abs=1e-6)
        assert out.s == 0.0
        out.validate(KIN, GEOM)

    def test_speed_clamped_at_v_max(self):
        state = rest_state()
        for _ in range(40):
            state = apply_action(state, Action.FORWARD, KinematicParams(damping=1.0), GEOM)
            if state.s == KinematicParams().v_max:
                break
        assert state.s <= KIN.v_max

    def test_turn_mirror_symmetry(self):
        # reflect about the horizontal line through the centre: the arena is
        # symmetric, so mirrored-state + opposite-turn = mirrored trajectory
        rng = np.random.default_rng(8)
        for _ in range(200):
            st_ = AgentState(
                x=float(rng.uniform(200, 1000)), y=float(rng.uniform(200, 1000)),
                s=float(rng.uniform(-KIN.v_max, KIN.v_max)),
                theta=float(rng.uniform(-math.pi, math.pi)),
                theta_dot=float(rng.uniform(-KIN.omega_max, KIN.omega_max)))
            if not GEOM.contains(st_.x, st_.y):
                continue
            mirrored = AgentState(x=st_.x, y=2 * GEOM.cy - st_.y, s=st_.s,
                                  theta=wrap_angle(-st_.theta), theta_dot=-st_.theta_dot)
            a = apply_action(st_, Action.TURN_LEFT, KIN, GEOM)
            b = apply_action(mirrored, Action.TURN_RIGHT, KIN, GEOM)
            assert b.x == pytest.approx(a.x, abs=1e-9)
            assert b.y == pytest.approx(2 * GEOM.cy - a.y, abs=1e-9)
            assert b.theta == pytest.approx(wrap_angle(-a.theta), abs=1e-9)
            assert b.theta_dot == pytest.approx(-a.theta_dot, abs=1e-9)
            assert b.s == pytest.approx(a.s, abs=1e-9)

    def test_fuzz_preserves_invariants(self):
        rng = np.random.default_rng(19)
        actions = list(Action)
        state = rest_state()
        for _ in range(5000):
            state = apply_action(state, actions[int(rng.integers(4))], KIN, GEOM)
            state.validate(KIN, GEOM)

    def test_fuzz_from_random_valid_states(self):
        rng = np.random.default_rng(20)
        for _ in range(2000):
            ang = rng.uniform(0, math.tau)
            rad = GEOM.radius * math.sqrt(rng.uniform(0, 1.0))
            state = AgentState(
                x=GEOM.cx + rad * math.cos(ang), y=GEOM.cy + rad * math.sin(ang),
                s=float(rng.uniform(-KIN.v_max, KIN.v_max)),
                theta=wrap_angle(float(rng.uniform(-math.pi, math.pi))),
                theta_dot=float(rng.uniform(-KIN.omega_max, KIN.omega_max)))
            out = apply_action(state, list(Action)[int(rng.integers(4))], KIN, GEOM)
            out.validate(KIN, GEOM)


class TestUnits:
    def test_full_arena_width(self):
        assert px_of_mm(100.0, RecordingMeta()) == 1280.0

    def test_zero(self):
        assert px_of_mm(0.0, RecordingMeta()) == 0.0

    def test_fifteen_mm(self):
        # 15 mm at 12.8 px/mm
        assert px_of_mm(15.0, RecordingMeta()) == pytest.approx(192.0)


class TestParams:
    @pytest.mark.parametrize("bad", [
        dict(dt=0.0), dict(v_max=-1.0), dict(a_lin=0.0),
        dict(omega_max=0.0), dict(a_ang=-2.0), dict(damping=1.5),
    ])
    def test_invalid(self, bad):
        with pytest.raises(ConfigError):
            KinematicParams(**bad)

    def test_action_count(self):
        assert len(Action) == 4
        assert [a.name for a in Action] == ["FORWARD", "BACKWARD", "TURN_LEFT", "TURN_RIGHT"]
