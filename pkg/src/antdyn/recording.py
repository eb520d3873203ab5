"""Colony trajectory recordings: load, write, validate, resample, synthesize.

A recording bundle on disk is ``<name>.csv`` with header
``ant_id,t_sec,x_px,y_px`` plus a ``<name>.meta.json`` sidecar carrying
``arena_diameter_mm``, ``resolution_px`` and ``sample_rate_hz``. Rows may be
grouped by ant or interleaved; the loader sorts. All positions must lie
inside the arena disc and every ant's timestamps must strictly increase.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arena import ArenaGeometry
from .errors import ConfigError, DataError, NoCandidateError

CSV_HEADER = ["ant_id", "t_sec", "x_px", "y_px"]


@dataclass(frozen=True)
class RecordingMeta:
    arena_diameter_mm: float = 100.0
    resolution_px: int = 1280
    sample_rate_hz: float = 10.0

    def __post_init__(self):
        if not self.arena_diameter_mm > 0:
            raise ConfigError(f"arena_diameter_mm must be > 0, got {self.arena_diameter_mm}")
        if not self.resolution_px >= 2:
            raise ConfigError(f"resolution_px must be >= 2, got {self.resolution_px}")
        if not self.sample_rate_hz > 0:
            raise ConfigError(f"sample_rate_hz must be > 0, got {self.sample_rate_hz}")

    def geometry(self) -> ArenaGeometry:
        return ArenaGeometry.from_resolution(self.resolution_px)


@dataclass(frozen=True)
class ColonyRecording:
    """Time-indexed positions of all tracked ants.

    ``ants`` maps ant id to a read-only float array of shape (n, 3) with
    columns (t_sec, x_px, y_px). Immutable after construction; safe to share
    across threads.
    """

    ants: dict[int, np.ndarray]
    meta: RecordingMeta

    def __post_init__(self):
        if not self.ants:
            raise DataError("recording contains no ants")
        geom = self.meta.geometry()
        r2 = geom.radius * geom.radius * (1.0 + 1e-9)
        for ant_id in self.ants:
            if not isinstance(ant_id, int) or ant_id < 0:
                raise DataError(f"ant id must be a non-negative integer, got {ant_id!r}")
            series = np.asarray(self.ants[ant_id], dtype=np.float64)
            if series.ndim != 2 or series.shape[1] != 3:
                raise DataError(f"ant {ant_id}: series must have shape (n, 3)")
            if series.shape[0] < 2:
                raise DataError(f"ant {ant_id}: needs at least 2 samples, has {series.shape[0]}")
            if not np.all(np.isfinite(series)):
                raise DataError(f"ant {ant_id}: series contains non-finite values")
            if not np.all(np.diff(series[:, 0]) > 0):
                bad = int(np.argmax(np.diff(series[:, 0]) <= 0))
                raise DataError(
                    f"ant {ant_id}: timestamps not strictly increasing at sample {bad + 1} "
                    f"(t={series[bad + 1, 0]} after t={series[bad, 0]})")
            d2 = (series[:, 1] - geom.cx) ** 2 + (series[:, 2] - geom.cy) ** 2
            if np.any(d2 > r2):
                bad = int(np.argmax(d2 > r2))
                raise DataError(
                    f"ant {ant_id}: position ({series[bad, 1]}, {series[bad, 2]}) at "
                    f"t={series[bad, 0]} lies outside the arena disc")
            series.setflags(write=False)
            self.ants[ant_id] = series

    @property
    def ant_ids(self) -> list[int]:
        return sorted(self.ants)

    def duration(self) -> float:
        return max(float(a[-1, 0]) - float(a[0, 0]) for a in self.ants.values())


@dataclass(frozen=True)
class TargetSelection:
    """One target-ant trail window: (t, x, y) samples covering
    [start_time, start_time + t_lim] on the environment's dt grid."""

    ant_id: int
    start_time: float
    trail: np.ndarray  # shape (T + 1, 3), columns (t, x, y)


@dataclass(frozen=True)
class SyntheticParams:
    n_ants: int = 10
    duration_s: float = 60.0
    sample_rate_hz: float = 10.0
    noise_px: float = 6.0
    cluster_pull: float = 0.3
    meta: RecordingMeta = field(default_factory=RecordingMeta)

    def __post_init__(self):
        if self.n_ants < 1:
            raise ConfigError(f"n_ants must be >= 1, got {self.n_ants}")
        if not self.duration_s > 0:
            raise ConfigError(f"duration_s must be > 0, got {self.duration_s}")
        if not self.sample_rate_hz > 0:
            raise ConfigError(f"sample_rate_hz must be > 0, got {self.sample_rate_hz}")
        if self.noise_px < 0:
            raise ConfigError(f"noise_px must be >= 0, got {self.noise_px}")
        if not 0.0 <= self.cluster_pull <= 1.0:
            raise ConfigError(f"cluster_pull must be in [0, 1], got {self.cluster_pull}")


def _bundle_paths(path: str | Path) -> tuple[Path, Path]:
    """Resolve a bundle name (stem or .csv path) to (csv_path, meta_path)."""
    p = Path(path)
    if p.suffix == ".csv":
        p = p.with_suffix("")
    return p.with_suffix(".csv"), p.with_name(p.name + ".meta.json")


def load_recording(path: str | Path) -> ColonyRecording:
    """Load and validate a recording bundle.

    Parameters
    ----------
    path : str or Path
        Bundle name: either the common stem or the ``.csv`` path. The
        ``.meta.json`` sidecar must sit next to the CSV.

    Returns
    -------
    ColonyRecording
        Validated recording; every invariant checked, errors name the
        offending ant id and row.
    """
    csv_path, meta_path = _bundle_paths(path)
    if not csv_path.exists():
        raise DataError(f"recording file not found: {csv_path}")
    if not meta_path.exists():
        raise DataError(f"metadata sidecar not found: {meta_path}")

    try:
        raw_meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataError(f"{meta_path}: invalid JSON ({e})") from e
    for key in ("arena_diameter_mm", "resolution_px", "sample_rate_hz"):
        if key not in raw_meta:
            raise DataError(f"{meta_path}: missing metadata field '{key}'")
    try:
        meta = RecordingMeta(
            arena_diameter_mm=float(raw_meta["arena_diameter_mm"]),
            resolution_px=int(raw_meta["resolution_px"]),
            sample_rate_hz=float(raw_meta["sample_rate_hz"]),
        )
    except (TypeError, ValueError) as e:
        raise DataError(f"{meta_path}: bad metadata value ({e})") from e

    rows: dict[int, list[tuple[float, float, float]]] = {}
    with open(csv_path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise DataError(f"{csv_path}: expected header {','.join(CSV_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DataError(f"{csv_path}: row {lineno}: expected 4 fields, got {len(row)}")
            try:
                ant_id = int(row[0])
                t, x, y = float(row[1]), float(row[2]), float(row[3])
            except ValueError as e:
                raise DataError(f"{csv_path}: row {lineno}: unparsable value ({e})") from e
            if ant_id < 0:
                raise DataError(f"{csv_path}: row {lineno}: negative ant id {ant_id}")
            if not (math.isfinite(t) and math.isfinite(x) and math.isfinite(y)):
                raise DataError(f"{csv_path}: row {lineno}: non-finite value")
            rows.setdefault(ant_id, []).append((t, x, y))

    if not rows:
        raise DataError(f"{csv_path}: no data rows")
    ants = {}
    for ant_id in sorted(rows):
        series = np.array(sorted(rows[ant_id]), dtype=np.float64)
        ants[ant_id] = series
    try:
        return ColonyRecording(ants=ants, meta=meta)
    except DataError as e:
        raise DataError(f"{csv_path}: {e}") from e


def write_recording(recording: ColonyRecording, path: str | Path) -> tuple[Path, Path]:
    """Write a recording bundle (CSV + meta sidecar). Returns the two paths.

    Floats are written with repr precision so load_recording round-trips
    exactly.
    """
    csv_path, meta_path = _bundle_paths(path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with open(csv_path, "w", newline="\n", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for ant_id in recording.ant_ids:
            for t, x, y in recording.ants[ant_id]:
                writer.writerow([ant_id, repr(float(t)), repr(float(x)), repr(float(y))])
    meta = recording.meta
    meta_path.write_text(json.dumps({
        "arena_diameter_mm": meta.arena_diameter_mm,
        "resolution_px": meta.resolution_px,
        "sample_rate_hz": meta.sample_rate_hz,
    }, indent=2) + "\n", encoding="utf-8")
    return csv_path, meta_path


def _resample_series(series: np.ndarray, dt: float) -> np.ndarray:
    t0 = float(series[0, 0])
    t_end = float(series[-1, 0])
    n_steps = int(math.floor((t_end - t0) / dt + 1e-9))
    grid = t0 + dt * np.arange(n_steps + 1)
    # keep the exact original endpoint when the duration is not a multiple of dt
    if t_end - grid[-1] > 1e-9 * max(1.0, abs(t_end)):
        grid = np.append(grid, t_end)
    x = np.interp(grid, series[:, 0], series[:, 1])
    y = np.interp(grid, series[:, 0], series[:, 2])
    return np.column_stack([grid, x, y])


def resample(recording: ColonyRecording, dt: float) -> ColonyRecording:
    """Re-grid every ant's series to uniform spacing dt by linear interpolation.

    Each ant's grid starts at its own first timestamp. Linear interpolation
    between points of a convex disc stays inside the disc, so the arena
    invariant is preserved.
    """
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    ants = {aid: _resample_series(recording.ants[aid], dt) for aid in recording.ant_ids}
    return ColonyRecording(ants=ants, meta=recording.meta)


def is_on_grid(recording: ColonyRecording, dt: float, tol: float = 1e-9) -> bool:
    """True if every ant's series already sits on a uniform dt grid (a final
    partial step, as produced by resample, is allowed)."""
    for series in recording.ants.values():
        diffs = np.diff(series[:, 0])
        body = diffs[:-1] if diffs[-1] < dt - tol else diffs
        if body.size and np.any(np.abs(body - dt) > tol):
            return False
    return True


def select_target(recording: ColonyRecording, t_lim: float, d_min: float,
                  rng: np.random.Generator) -> TargetSelection:
    """Pick one (ant, start) window uniformly among all windows of length
    t_lim whose net displacement is at least d_min.

    The recording must already be resampled to the environment dt; windows
    are aligned to each ant's sample grid.
    """
    if not t_lim > 0:
        raise ConfigError(f"t_lim must be > 0, got {t_lim}")
    candidates: list[tuple[int, int, float]] = []  # (ant_id, start index, dt)
    max_disp = 0.0
    for ant_id in recording.ant_ids:
        series = recording.ants[ant_id]
        diffs = np.diff(series[:, 0])
        dt = float(diffs[0])
        # exclude a trailing partial step from window eligibility
        n_uniform = series.shape[0]
        if diffs.size > 1 and abs(diffs[-1] - dt) > 1e-9:
            n_uniform -= 1
        if np.any(np.abs(diffs[:n_uniform - 1] - dt) > 1e-9):
            raise ConfigError(
                f"ant {ant_id}: series is not on a uniform grid; resample() first")
        steps = int(round(t_lim / dt))
        if steps < 1 or steps >= n_uniform:
            continue
        p = series[:n_uniform, 1:3]
        disp = np.hypot(p[steps:, 0] - p[:-steps, 0], p[steps:, 1] - p[:-steps, 1])
        if disp.size:
            max_disp = max(max_disp, float(disp.max()))
        for k in np.flatnonzero(disp >= d_min):
            candidates.append((ant_id, int(k), dt))
    if not candidates:
        raise NoCandidateError(
            f"no window of {t_lim} s has net displacement >= {d_min} px "
            f"(maximum found: {max_disp:.3f} px)", max_displacement=max_disp)
    ant_id, k, dt = candidates[int(rng.integers(len(candidates)))]
    steps = int(round(t_lim / dt))
    trail = np.array(recording.ants[ant_id][k:k + steps + 1], dtype=np.float64)
    return TargetSelection(ant_id=ant_id, start_time=float(trail[0, 0]), trail=trail)


def gen_synthetic(params: SyntheticParams, rng: np.random.Generator) -> ColonyRecording:
    """Generate a synthetic colony: correlated random walks biased toward the
    colony centroid (clustering), deterministic given the rng seed."""
    meta = RecordingMeta(
        arena_diameter_mm=params.meta.arena_diameter_mm,
        resolution_px=params.meta.resolution_px,
        sample_rate_hz=params.sample_rate_hz,
    )
    geom = meta.geometry()
    n = params.n_ants
    n_samples = int(round(params.duration_s * params.sample_rate_hz)) + 1
    dt_nominal = 1.0 / params.sample_rate_hz

    # start positions uniform over the inner 90% of the disc
    u = rng.random(n)
    ang = rng.random(n) * math.tau
    rad = geom.radius * 0.9 * np.sqrt(u)
    pos = np.column_stack([geom.cx + rad * np.cos(ang), geom.cy + rad * np.sin(ang)])
    vel = np.zeros((n, 2))

    persistence = 0.8      # step-to-step correlation of the walk
    pull_gain = 0.05       # fraction of the centroid offset applied per step

    tracks = np.empty((n_samples, n, 2))
    tracks[0] = pos
    for k in range(1, n_samples):
        centroid = pos.mean(axis=0)
        noise = rng.normal(0.0, 1.0, size=(n, 2)) * params.noise_px
        vel = persistence * vel + noise + params.cluster_pull * pull_gain * (centroid - pos)
        pos = pos + vel
        # radial clamp onto the disc; kill outward velocity at the wall
        off = pos - [geom.cx, geom.cy]
        d = np.hypot(off[:, 0], off[:, 1])
        outside = d > geom.radius
        if np.any(outside):
            f = (geom.radius * (1.0 - 1e-12)) / d[outside]
            pos[outside] = [geom.cx, geom.cy] + off[outside] * f[:, None]
            vel[outside] = 0.0
        tracks[k] = pos

    t = np.arange(n_samples) * dt_nominal
    ants = {i: np.column_stack([t, tracks[:, i, 0], tracks[:, i, 1]]) for i in range(n)}
    return ColonyRecording(ants=ants, meta=meta)
