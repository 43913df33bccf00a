"""Deterministic SVG emission for the command-line front end.

Figures use a fixed convention: the unit disk is centered on the canvas
with a radius of 256 pixels, counterclockwise is positive, and every
coordinate is written with fixed precision so identical inputs produce
byte-identical files.  A generation timestamp comment is the only
non-deterministic element and is suppressed by the deterministic flag.
"""

from __future__ import annotations

import math
from datetime import datetime, timezone
from typing import Optional, Sequence

__all__ = ["disk_figure", "profile_figure"]

_RADIUS = 256.0
_MARGIN = 16.0
_SIZE = 2.0 * (_RADIUS + _MARGIN)
_CENTER = _RADIUS + _MARGIN

_GEODESIC_SEGMENTS = 32


def _xy(z: complex) -> tuple[float, float]:
    return (_CENTER + _RADIUS * z.real, _CENTER - _RADIUS * z.imag)


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _point(z: complex) -> str:
    x, y = _xy(z)
    return f"{_fmt(x)},{_fmt(y)}"


def _geodesic_points(z1: complex, z2: complex) -> list[complex]:
    """Sample the Poincare geodesic from z1 to z2 at 33 points by
    pulling the straight ray through a disk automorphism."""
    w = (z2 - z1) / (1.0 - z1.conjugate() * z2)
    pts = []
    for j in range(_GEODESIC_SEGMENTS + 1):
        u = w * (j / _GEODESIC_SEGMENTS)
        pts.append((u + z1) / (1.0 + z1.conjugate() * u))
    return pts


def _klein_inverse(k: complex) -> complex:
    return k / (1.0 + math.sqrt(max(0.0, 1.0 - abs(k) ** 2)))


def _header(deterministic: bool, width: float, height: float) -> list[str]:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" '
        f'height="{height:g}" viewBox="0 0 {width:g} {height:g}">',
    ]
    if not deterministic:
        stamp = datetime.now(timezone.utc).isoformat()
        lines.insert(0, f"<!-- generated {stamp} -->")
    return lines


def disk_figure(zeros: Sequence[complex] = (),
                critical: Sequence[complex] = (),
                hull_generators: Sequence[complex] = (),
                leaves: Sequence[tuple[complex, complex]] = (),
                deterministic: bool = False) -> str:
    """Unit-disk figure: zeros as filled dots, critical points as
    crosses, the hyperbolic hull of the generators as geodesic
    polylines, and lamination leaves as straight chords.

    Parameters
    ----------
    zeros, critical : sequences of complex
        Point markers.
    hull_generators : sequence of complex
        Points whose hyperbolic convex hull boundary gets drawn; the
        hull is taken in the Klein model and each edge rendered as a
        32-segment polyline of the true geodesic arc.
    leaves : sequence of (complex, complex)
        Chord endpoints on the circle, drawn as straight lines.
    deterministic : bool
        Suppress the timestamp comment.
    """
    lines = _header(deterministic, _SIZE, _SIZE)
    lines.append(
        f'<circle cx="{_fmt(_CENTER)}" cy="{_fmt(_CENTER)}" '
        f'r="{_fmt(_RADIUS)}" fill="none" stroke="#24292f" '
        f'stroke-width="1.5"/>')
    if hull_generators:
        from .hypgeo import _convex_hull, klein_embed
        hull = _convex_hull([(klein_embed(z).real, klein_embed(z).imag)
                             for z in hull_generators])
        if len(hull) >= 2:
            vertices = [_klein_inverse(complex(x, y)) for x, y in hull]
            for i in range(len(vertices)):
                a = vertices[i]
                b = vertices[(i + 1) % len(vertices)]
                if len(vertices) == 2 and i == 1:
                    break
                pts = " ".join(_point(p) for p in _geodesic_points(a, b))
                lines.append(
                    f'<polyline points="{pts}" fill="none" '
                    f'stroke="#2da44e" stroke-width="1.2" '
                    f'class="hull-edge"/>')
    for a, b in leaves:
        xa, ya = _xy(a)
        xb, yb = _xy(b)
        lines.append(
            f'<line x1="{_fmt(xa)}" y1="{_fmt(ya)}" x2="{_fmt(xb)}" '
            f'y2="{_fmt(yb)}" stroke="#8250df" stroke-width="1" '
            f'class="leaf"/>')
    for z in zeros:
        x, y = _xy(z)
        lines.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="#1f6feb" '
            f'class="zero"/>')
    for z in critical:
        x, y = _xy(z)
        lines.append(
            f'<path d="M {_fmt(x - 5)} {_fmt(y - 5)} L {_fmt(x + 5)} '
            f'{_fmt(y + 5)} M {_fmt(x - 5)} {_fmt(y + 5)} L {_fmt(x + 5)} '
            f'{_fmt(y - 5)}" stroke="#d1242f" stroke-width="1.6" '
            f'fill="none" class="critical"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def profile_figure(xs: Sequence[float], ys: Sequence[float],
                   xlabel: str, ylabel: str,
                   deterministic: bool = False) -> str:
    """Log-log polyline plot of a convergence profile."""
    if len(xs) != len(ys) or not xs:
        raise ValueError("xs and ys must be nonempty and equal-length")
    width, height = 480.0, 360.0
    pad = 48.0
    lx = [math.log10(max(x, 1e-300)) for x in xs]
    ly = [math.log10(max(y, 1e-300)) for y in ys]

    def scaled(vals: list[float], lo_px: float, hi_px: float
               ) -> list[float]:
        vmin, vmax = min(vals), max(vals)
        if vmax - vmin < 1e-12:
            return [(lo_px + hi_px) / 2.0 for _ in vals]
        return [lo_px + (v - vmin) * (hi_px - lo_px) / (vmax - vmin)
                for v in vals]

    px = scaled(lx, pad, width - pad)
    py = scaled(ly, height - pad, pad)
    lines = _header(deterministic, width, height)
    lines.append(
        f'<rect x="{_fmt(pad)}" y="{_fmt(pad)}" '
        f'width="{_fmt(width - 2 * pad)}" height="{_fmt(height - 2 * pad)}" '
        f'fill="none" stroke="#24292f" stroke-width="1"/>')
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(px, py))
    lines.append(
        f'<polyline points="{pts}" fill="none" stroke="#1f6feb" '
        f'stroke-width="1.5"/>')
    for x, y in zip(px, py):
        lines.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="#1f6feb"/>')
    lines.append(
        f'<text x="{_fmt(width / 2)}" y="{_fmt(height - 12)}" '
        f'font-size="12" text-anchor="middle" fill="#24292f">'
        f'log10 {xlabel}</text>')
    lines.append(
        f'<text x="14" y="{_fmt(height / 2)}" font-size="12" '
        f'text-anchor="middle" fill="#24292f" '
        f'transform="rotate(-90 14 {_fmt(height / 2)})">'
        f'log10 {ylabel}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
