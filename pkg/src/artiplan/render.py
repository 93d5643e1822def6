"""SVG drawing of a chain configuration (forward kinematics as a polyline)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .domain import State, Topology


@dataclass(frozen=True)
class RenderSpec:
    width: int = 400
    height: int = 400
    stroke_width: float = 4.0
    use_instance_lengths: bool = True
    margin: float = 20.0

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0 or self.stroke_width <= 0:
            raise ValueError("canvas and stroke dimensions must be positive")
        if self.margin < 0 or 2 * self.margin >= min(self.width, self.height):
            raise ValueError("margin leaves no room to draw")


def chain_points(angles: Sequence[int], lengths: Sequence[float]) -> list[tuple[float, float]]:
    """Endpoints of each segment in model coordinates, starting at the origin."""
    x = y = 0.0
    points = [(x, y)]
    for theta, length in zip(angles, lengths):
        rad = math.radians(theta)
        x += length * math.cos(rad)
        y += length * math.sin(rad)
        points.append((x, y))
    return points


def _num(v: float) -> str:
    text = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def render_config(state: State, topology: Topology, spec: RenderSpec = RenderSpec()) -> str:
    lengths = topology.link_lengths if spec.use_instance_lengths else (1.0,) * len(state.angles)
    pts = chain_points(state.angles, lengths)
    cx, cy = spec.width / 2, spec.height / 2
    reach = sum(lengths) or 1.0
    scale = (min(spec.width, spec.height) / 2 - spec.margin) / reach
    canvas = [(cx + x * scale, cy - y * scale) for x, y in pts]
    poly = " ".join(f"{_num(x)},{_num(y)}" for x, y in canvas)
    r = _num(spec.stroke_width * 1.5)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{spec.width}" '
        f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">',
        f'  <rect width="{spec.width}" height="{spec.height}" fill="white"/>',
        f'  <polyline points="{poly}" fill="none" stroke="black" '
        f'stroke-width="{_num(spec.stroke_width)}" stroke-linejoin="round"/>',
    ]
    for i, (x, y) in enumerate(canvas):
        fill = "red" if i == 0 else "steelblue"
        lines.append(f'  <circle cx="{_num(x)}" cy="{_num(y)}" r="{r}" fill="{fill}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
