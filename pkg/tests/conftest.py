import numpy as np
import pytest

from antdyn import ColonyRecording, RecordingMeta, SyntheticParams, gen_synthetic


def straight_line_recording(total_px: float = 200.0, seconds: float = 30.0,
                            rate: float = 10.0, start=(540.0, 640.0),
                            direction=(1.0, 0.0)) -> ColonyRecording:
    """One ant walking a perfectly straight line at constant speed."""
    n = int(round(seconds * rate)) + 1
    t = np.arange(n) * (1.0 / rate)
    frac = t / seconds
    dx, dy = direction
    norm = np.hypot(dx, dy)
    xs = start[0] + frac * total_px * dx / norm
    ys = start[1] + frac * total_px * dy / norm
    return ColonyRecording(ants={0: np.column_stack([t, xs, ys])}, meta=RecordingMeta())


@pytest.fixture(scope="session")
def small_colony() -> ColonyRecording:
    """10 synthetic ants, 40 s at 10 Hz; shared read-only fixture."""
    return gen_synthetic(SyntheticParams(n_ants=10, duration_s=40.0), np.random.default_rng(42))


@pytest.fixture()
def line_recording() -> ColonyRecording:
    return straight_line_recording()
