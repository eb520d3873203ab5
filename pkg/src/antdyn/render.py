"""Offline rendering: PNG frames and an SVG trail plot.

Screen coordinates flip the y-axis relative to the simulation's y-up math
frame (screen_y = resolution - world_y); every SVG carries that note in a
header comment. Fixed palette: agent blue, agent trail light blue, target
and target trail red, replayed ants grey.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from PIL import Image, ImageDraw

from .env import EpisodeState
from .errors import ConfigError

AGENT_COLOR = "#1f5fd0"        # blue
AGENT_TRAIL_COLOR = "#9cc4f0"  # light blue
TARGET_COLOR = "#d02020"       # red (target ant and target trail)
OTHER_COLOR = "#808080"        # replayed ants
BACKGROUND = "#f8f8f4"
ARENA_EDGE = "#404040"

ANT_DOT = 5      # px radius of an ant marker
FRAME_PATTERN = "frame_%05d.png"


@dataclass(frozen=True)
class RenderSpec:
    output_dir: Path
    frame_stride: int = 10  # simulation steps per emitted frame

    def __post_init__(self):
        if self.frame_stride < 1:
            raise ConfigError(f"frame_stride must be >= 1, got {self.frame_stride}")
        object.__setattr__(self, "output_dir", Path(self.output_dir))


def _flip(y: float, resolution: int) -> float:
    return resolution - y


def render_frame(ep: EpisodeState, path: Path) -> None:
    """Draw the current episode state to one PNG frame."""
    res = ep.meta.resolution_px
    img = Image.new("RGB", (res, res), BACKGROUND)
    draw = ImageDraw.Draw(img)
    geom = ep.geometry
    draw.ellipse(
        [geom.cx - geom.radius, _flip(geom.cy + geom.radius, res),
         geom.cx + geom.radius, _flip(geom.cy - geom.radius, res)],
        outline=ARENA_EDGE, width=2)

    k = ep.step_index
    for _, track in ep.replay:
        x, y = track[k]
        sy = _flip(y, res)
        draw.ellipse([x - ANT_DOT, sy - ANT_DOT, x + ANT_DOT, sy + ANT_DOT], fill=OTHER_COLOR)

    if len(ep.target_trail) > 1:
        draw.line([(x, _flip(y, res)) for x, y in ep.target_trail], fill=TARGET_COLOR, width=2)
    if len(ep.agent_trail) > 1:
        draw.line([(x, _flip(y, res)) for x, y in ep.agent_trail], fill=AGENT_TRAIL_COLOR, width=2)

    tx, ty = ep.target_trail[-1]
    sy = _flip(ty, res)
    draw.ellipse([tx - ANT_DOT, sy - ANT_DOT, tx + ANT_DOT, sy + ANT_DOT], fill=TARGET_COLOR)

    ax, ay = ep.agent.x, ep.agent.y
    sy = _flip(ay, res)
    draw.ellipse([ax - ANT_DOT, sy - ANT_DOT, ax + ANT_DOT, sy + ANT_DOT], fill=AGENT_COLOR)
    # heading tick
    hx = ax + 3 * ANT_DOT * math.cos(ep.agent.theta)
    hy = ay + 3 * ANT_DOT * math.sin(ep.agent.theta)
    draw.line([(ax, sy), (hx, _flip(hy, res))], fill=AGENT_COLOR, width=2)

    img.save(path, format="PNG")


def frame_steps(horizon: int, stride: int) -> list[int]:
    """Steps at which frames are emitted: every stride-th step plus the final
    one, i.e. ceil(T / stride) + 1 frames in total."""
    steps = list(range(0, horizon + 1, stride))
    if steps[-1] != horizon:
        steps.append(horizon)
    return steps


def trails_svg(ep: EpisodeState, path: Path) -> None:
    """Write the agent/target trail comparison plot as an SVG with exactly
    two polylines."""
    res = ep.meta.resolution_px
    geom = ep.geometry

    def pts(trail: list[tuple[float, float]]) -> str:
        return " ".join(f"{x:.3f},{_flip(y, res):.3f}" for x, y in trail)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        "<!-- screen coordinates: y axis flipped relative to the simulation "
        "frame (screen_y = resolution - world_y) -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{res}" height="{res}" '
        f'viewBox="0 0 {res} {res}">',
        f'  <rect width="{res}" height="{res}" fill="{BACKGROUND}"/>',
        f'  <circle cx="{geom.cx}" cy="{_flip(geom.cy, res)}" r="{geom.radius}" '
        f'fill="none" stroke="{ARENA_EDGE}" stroke-width="2"/>',
        f'  <polyline id="target-trail" points="{pts(ep.target_trail)}" '
        f'fill="none" stroke="{TARGET_COLOR}" stroke-width="2"/>',
        f'  <polyline id="agent-trail" points="{pts(ep.agent_trail)}" '
        f'fill="none" stroke="{AGENT_TRAIL_COLOR}" stroke-width="2"/>',
        "</svg>",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
