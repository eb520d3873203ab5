import math

import numpy as np
import pytest

from antdyn import (
    AgentState,
    ConfigError,
    KinematicParams,
    RecordingMeta,
    Segment,
    VisionConfig,
    build_observation,
    segment_index,
    sense_segments,
    wrap_angle,
)
from antdyn.sensing import OBS_FIELDS, OBS_SIZE

VISION = VisionConfig()
META = RecordingMeta()
KIN = KinematicParams()

DEG = math.pi / 180.0


def agent_at(x=640.0, y=640.0, theta=0.0):
    return AgentState(x=x, y=y, s=0.0, theta=theta, theta_dot=0.0)


class TestSegmentIndex:
    def test_dead_ahead_is_centre(self):
        assert segment_index(0.0) == Segment.FC

    def test_dead_astern_is_back(self):
        assert segment_index(math.pi) == Segment.B

    @pytest.mark.parametrize("deg,expected", [
        (0.0, Segment.FC), (17.99, Segment.FC), (-17.99, Segment.FC),
        (18.01, Segment.FL2), (53.99, Segment.FL2),
        (54.01, Segment.FL1), (89.99, Segment.FL1),
        (90.01, Segment.L), (149.99, Segment.L),
        (150.01, Segment.B), (180.0, Segment.B), (-150.01, Segment.B),
        (-149.99, Segment.R), (-90.01, Segment.R),
        (-89.99, Segment.FR1), (-54.01, Segment.FR1),
        (-53.99, Segment.FR2), (-18.01, Segment.FR2),
        (-17.99, Segment.FC),
    ])
    def test_sector_extents(self, deg, expected):
        assert segment_index(deg * DEG) == expected

    def test_half_open_edges_at_exact_floats(self):
        # boundaries that are exactly representable relative to the thresholds
        assert segment_index(math.pi / 2) == Segment.L       # 90 deg starts the left-rear
        assert segment_index(-math.pi / 2) == Segment.FR1    # -90 deg starts the forward arc
        assert segment_index(math.pi) == Segment.B

    def test_exhaustive_sweep_partitions_the_circle(self):
        # 3600 uniform bearings: exactly one segment each, sector widths
        # 5 x 36 deg forward + 3 x 60 deg rear
        counts = {seg: 0 for seg in Segment}
        for i in range(3600):
            phi = -math.pi + (i + 0.5) * (math.tau / 3600)
            counts[segment_index(phi)] += 1
        for seg in (Segment.FL1, Segment.FL2, Segment.FC, Segment.FR2, Segment.FR1):
            assert counts[seg] == 360
        for seg in (Segment.L, Segment.B, Segment.R):
            assert counts[seg] == 600

    def test_narrow_forward_span_still_partitions(self):
        span = 2.0
        counts = {seg: 0 for seg in Segment}
        n = 36000
        for i in range(n):
            phi = -math.pi + (i + 0.5) * (math.tau / n)
            counts[segment_index(phi, forward_span=span)] += 1
        total_forward = sum(counts[s] for s in
                            (Segment.FL1, Segment.FL2, Segment.FC, Segment.FR2, Segment.FR1))
        assert total_forward == pytest.approx(n * span / math.tau, abs=2)
        assert sum(counts.values()) == n


class TestSenseSegments:
    def test_empty_scene(self):
        assert sense_segments(agent_at(), [], VISION) == [0.0] * 8

    def test_single_ant_dead_ahead(self):
        v = sense_segments(agent_at(), [(640.0 + VISION.radius / 2, 640.0)], VISION)
        assert v[Segment.FC] == pytest.approx(0.2)  # 1 ant / n_norm=5
        assert sum(v) == pytest.approx(0.2)

    def test_ant_exactly_at_radius_included(self):
        v = sense_segments(agent_at(), [(640.0 + VISION.radius, 640.0)], VISION)
        assert v[Segment.FC] == pytest.approx(0.2)

    def test_ant_beyond_radius_excluded(self):
        v = sense_segments(agent_at(), [(640.0 + VISION.radius + 1e-6, 640.0)], VISION)
        assert v == [0.0] * 8

    def test_coincident_ant_counts_forward_centre(self):
        v = sense_segments(agent_at(theta=2.5), [(640.0, 640.0)], VISION)
        assert v[Segment.FC] == pytest.approx(0.2)

    def test_saturation(self):
        ants = [(660.0, 640.0)] * 9
        v = sense_segments(agent_at(), ants, VISION)
        assert v[Segment.FC] == 1.0

    def test_counts_sum_matches_brute_force(self):
        rng = np.random.default_rng(33)
        for _ in range(300):
            agent = agent_at(theta=float(rng.uniform(-math.pi, math.pi)))
            ants = [(float(rng.uniform(440, 840)), float(rng.uniform(440, 840)))
                    for _ in range(int(rng.integers(0, 25)))]
            inside = sum(1 for x, y in ants
                         if math.hypot(x - agent.x, y - agent.y) <= VISION.radius)
            cfg = VisionConfig(radius=VISION.radius, n_norm=max(1, len(ants)))
            v = sense_segments(agent, ants, cfg)
            assert sum(v) * cfg.n_norm == pytest.approx(inside)

    def test_rotation_equivariance(self):
        rng = np.random.default_rng(71)
        for _ in range(200):
            theta = float(rng.uniform(-math.pi, math.pi))
            agent = agent_at(theta=theta)
            ants = [(agent.x + float(rng.uniform(-120, 120)),
                     agent.y + float(rng.uniform(-120, 120)))
                    for _ in range(12)]
            base = sense_segments(agent, ants, VISION)
            rho = float(rng.uniform(0, math.tau))
            cr, sr = math.cos(rho), math.sin(rho)
            rotated_agent = agent_at(theta=wrap_angle(theta + rho))
            rotated_ants = [(agent.x + (x - agent.x) * cr - (y - agent.y) * sr,
                             agent.y + (x - agent.x) * sr + (y - agent.y) * cr)
                            for x, y in ants]
            assert sense_segments(rotated_agent, rotated_ants, VISION) == base

    def test_mirror_symmetry(self):
        # reflecting across the heading axis swaps left/right channel pairs
        rng = np.random.default_rng(72)
        swap = {Segment.FL1: Segment.FR1, Segment.FR1: Segment.FL1,
                Segment.FL2: Segment.FR2, Segment.FR2: Segment.FL2,
                Segment.L: Segment.R, Segment.R: Segment.L,
                Segment.FC: Segment.FC, Segment.B: Segment.B}
        for _ in range(200):
            agent = agent_at(theta=0.0)  # heading axis = x axis
            ants = [(agent.x + float(rng.uniform(-120, 120)),
                     agent.y + float(rng.uniform(-120, 120)))
                    for _ in range(10)]
            base = sense_segments(agent, ants, VISION)
            mirrored = sense_segments(agent, [(x, 2 * agent.y - y) for x, y in ants], VISION)
            for seg in Segment:
                assert mirrored[seg] == base[swap[seg]]

    def test_monotone_in_added_ants(self):
        rng = np.random.default_rng(73)
        agent = agent_at()
        ants: list[tuple[float, float]] = []
        prev = sense_segments(agent, ants, VISION)
        for _ in range(30):
            ants.append((agent.x + float(rng.uniform(-90, 90)),
                         agent.y + float(rng.uniform(-90, 90))))
            cur = sense_segments(agent, ants, VISION)
            assert all(c >= p for c, p in zip(cur, prev))
            prev = cur


class TestObservation:
    def test_centred_rest_state(self):
        theta = 1.1
        obs = build_observation(agent_at(theta=theta), [], META, KIN, VISION)
        expected = np.zeros(13)
        expected[0] = expected[1] = 0.5
        expected[3] = theta / math.pi
        np.testing.assert_allclose(obs, expected)

    def test_length_and_field_names(self):
        obs = build_observation(agent_at(), [], META, KIN, VISION)
        assert obs.shape == (OBS_SIZE,)
        assert OBS_SIZE == 13
        assert len(OBS_FIELDS) == 13
        assert OBS_FIELDS[:5] == ("x", "y", "s", "theta", "theta_dot")
        assert OBS_FIELDS[5:] == ("v_fl1", "v_fl2", "v_fc", "v_fr2", "v_fr1",
                                  "v_r", "v_b", "v_l")

    def test_channel_order_matches_segment_enum(self):
        # one ant dead ahead lands in obs[5 + Segment.FC]
        obs = build_observation(agent_at(), [(700.0, 640.0)], META, KIN, VISION)
        assert obs[5 + Segment.FC] == pytest.approx(0.2)
        assert np.count_nonzero(obs[5:]) == 1

    def test_bounds_fuzz(self):
        rng = np.random.default_rng(44)
        geom = META.geometry()
        for _ in range(10000):
            ang = rng.uniform(0, math.tau)
            rad = geom.radius * math.sqrt(rng.uniform(0, 1.0))
            agent = AgentState(
                x=geom.cx + rad * math.cos(ang), y=geom.cy + rad * math.sin(ang),
                s=float(rng.uniform(-KIN.v_max, KIN.v_max)),
                theta=wrap_angle(float(rng.uniform(-math.pi, math.pi))),
                theta_dot=float(rng.uniform(-KIN.omega_max, KIN.omega_max)))
            ants = [(float(rng.uniform(0, 1280)), float(rng.uniform(0, 1280)))
                    for _ in range(int(rng.integers(0, 8)))]
            obs = build_observation(agent, ants, META, KIN, VISION)
            assert 0.0 <= obs[0] <= 1.0 and 0.0 <= obs[1] <= 1.0
            assert -1.0 <= obs[2] <= 1.0
            assert -1.0 < obs[3] <= 1.0
            assert -1.0 <= obs[4] <= 1.0
            assert np.all(obs[5:] >= 0.0) and np.all(obs[5:] <= 1.0)

    def test_raw_pose_mode(self):
        agent = AgentState(x=400.0, y=500.0, s=-30.0, theta=0.25, theta_dot=1.5)
        obs = build_observation(agent, [], META, KIN, VISION, raw_pose=True)
        np.testing.assert_allclose(obs[:5], [400.0, 500.0, -30.0, 0.25, 1.5])


class TestVisionConfig:
    @pytest.mark.parametrize("bad", [
        dict(radius=0.0), dict(n_norm=0), dict(forward_span=0.0),
        dict(forward_span=math.tau),
    ])
    def test_invalid(self, bad):
        with pytest.raises(ConfigError):
            VisionConfig(**bad)
