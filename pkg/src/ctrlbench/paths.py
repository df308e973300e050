"""Tunnel paths for constrained-motion tasks.

A path is an ordered chain of straight and arc segments traversed with
continuous heading, carrying a piecewise-linear width profile W(s) over
normalized arc length s in [0, 1]. The difficulty of traversing the tunnel
is the integral of ds/W(s) along the path: it reduces to length/width for a
constant-width tunnel and generalizes Fitts-style difficulty to arbitrary
shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError

# Quadrature control: interval halving until successive composite-trapezoid
# estimates agree to _QUAD_RTOL relative, hard interval cap 2**20.
_QUAD_RTOL = 1e-9
_QUAD_MAX_INTERVALS = 1 << 20


@dataclass(frozen=True)
class Straight:
    length: float

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValidationError(f"straight segment length must be finite and > 0, got {self.length}")

    @property
    def arc_length(self) -> float:
        return self.length


@dataclass(frozen=True)
class Arc:
    """Circular arc; positive angle turns left, negative turns right."""

    radius: float
    angle: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValidationError(f"arc radius must be finite and > 0, got {self.radius}")
        if not (math.isfinite(self.angle) and self.angle != 0):
            raise ValidationError(f"arc angle must be finite and nonzero, got {self.angle}")

    @property
    def arc_length(self) -> float:
        return self.radius * abs(self.angle)


Segment = Straight | Arc


@dataclass(frozen=True)
class PathSpec:
    """Tunnel centerline plus width profile.

    ``width_profile`` is a sequence of (s, width) knots with s covering
    [0, 1] in non-decreasing order; a repeated s encodes a step change in
    width (zero-length pieces contribute nothing to the integral).
    """

    segments: tuple[Segment, ...]
    width_profile: tuple[tuple[float, float], ...]

    def __post_init__(self):
        segments = tuple(self.segments)
        profile = tuple((float(s), float(w)) for s, w in self.width_profile)
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "width_profile", profile)
        if not segments:
            raise ValidationError("path needs at least one segment")
        for seg in segments:
            if not isinstance(seg, (Straight, Arc)):
                raise ValidationError(f"unknown segment type: {seg!r}")
        if len(profile) < 2:
            raise ValidationError("width profile needs at least two knots")
        if profile[0][0] != 0.0 or profile[-1][0] != 1.0:
            raise ValidationError("width profile must cover s in [0, 1]")
        last_s = -1.0
        repeats = 0
        for s, w in profile:
            if not (math.isfinite(s) and math.isfinite(w)):
                raise ValidationError("width profile knots must be finite")
            if w <= 0:
                raise ValidationError(f"tunnel width must be > 0 everywhere, got {w}")
            if s < last_s:
                raise ValidationError("width profile knots must be sorted by s")
            repeats = repeats + 1 if s == last_s else 0
            if repeats >= 2:
                raise ValidationError(f"more than two width knots at s={s}")
            last_s = s

    # -- constructors -------------------------------------------------

    @classmethod
    def straight(cls, length: float, width: float) -> "PathSpec":
        """Straight tunnel of constant width."""
        return cls((Straight(length),), ((0.0, width), (1.0, width)))

    @classmethod
    def circle(cls, radius: float, width: float) -> "PathSpec":
        """Full circular tunnel of constant width."""
        return cls((Arc(radius, 2.0 * math.pi),), ((0.0, width), (1.0, width)))

    @classmethod
    def straight_linear_width(cls, length: float, w_start: float, w_end: float) -> "PathSpec":
        """Straight tunnel whose width tapers linearly from w_start to w_end."""
        return cls((Straight(length),), ((0.0, w_start), (1.0, w_end)))

    # -- geometry -----------------------------------------------------

    def total_length(self) -> float:
        return sum(seg.arc_length for seg in self.segments)

    def width_at(self, s: float) -> float:
        """Width at normalized arc length s in [0, 1]."""
        if not 0.0 <= s <= 1.0:
            raise DomainError(f"normalized arc length must be in [0, 1], got {s}")
        knots = self.width_profile
        for (s0, w0), (s1, w1) in zip(knots, knots[1:]):
            if s0 <= s <= s1 and s1 > s0:
                u = (s - s0) / (s1 - s0)
                return w0 + (w1 - w0) * u
        return knots[-1][1]

    def point_at(self, s: float) -> tuple[float, float]:
        """Centerline position at normalized arc length s. Starts at the
        origin heading +x; heading is continuous across segments."""
        if not 0.0 <= s <= 1.0:
            raise DomainError(f"normalized arc length must be in [0, 1], got {s}")
        remaining = s * self.total_length()
        x, y, heading = 0.0, 0.0, 0.0
        for seg in self.segments:
            ln = seg.arc_length
            d = min(remaining, ln)
            if isinstance(seg, Straight):
                x += d * math.cos(heading)
                y += d * math.sin(heading)
            else:
                sweep = math.copysign(d / seg.radius, seg.angle)
                # rotate about the arc center, which sits radius away at 90°
                # left (positive angle) or right (negative) of the heading
                side = math.copysign(1.0, seg.angle)
                cx = x - side * seg.radius * math.sin(heading)
                cy = y + side * seg.radius * math.cos(heading)
                phi = math.atan2(y - cy, x - cx) + sweep
                x = cx + seg.radius * math.cos(phi)
                y = cy + seg.radius * math.sin(phi)
                heading += sweep
            remaining -= d
            if remaining <= 0.0:
                break
        return x, y

    def polyline(self, n: int = 1024) -> tuple[np.ndarray, np.ndarray]:
        """(n+1, 2) centerline points and their normalized arc lengths."""
        if n < 1:
            raise DomainError(f"polyline needs >= 1 pieces, got {n}")
        s = np.linspace(0.0, 1.0, n + 1)
        pts = np.array([self.point_at(v) for v in s])
        return pts, s

    def concat(self, other: "PathSpec") -> "PathSpec":
        """Join two tunnels end to end, composing their width profiles."""
        l1, l2 = self.total_length(), other.total_length()
        f = l1 / (l1 + l2)
        knots = [(s * f, w) for s, w in self.width_profile]
        knots += [(f + s * (1.0 - f), w) for s, w in other.width_profile]
        return PathSpec(self.segments + other.segments, tuple(knots))


def _trapezoid_unit_inverse(w0: float, w1: float) -> float:
    """∫0..1 du / (w0 + (w1-w0)·u) by composite trapezoid with halving."""
    f0 = 1.0 / w0
    f1 = 1.0 / w1
    n = 1
    est = 0.5 * (f0 + f1)
    while n < _QUAD_MAX_INTERVALS:
        h = 1.0 / n
        mids = (np.arange(n) + 0.5) * h
        mid_sum = float(np.sum(1.0 / (w0 + (w1 - w0) * mids)))
        refined = 0.5 * (est + h * mid_sum)
        n *= 2
        if abs(refined - est) < _QUAD_RTOL * abs(refined):
            return refined
        est = refined
    return est


def steering_difficulty(path: PathSpec) -> float:
    """Tunnel difficulty: the integral of ds/W(s) along the whole path.

    Constant-width pieces use the exact closed form length/width; pieces
    with varying width are integrated by composite trapezoid quadrature
    (interval halving to 1e-9 relative agreement).
    """
    total_len = path.total_length()
    acc = 0.0
    knots = path.width_profile
    for (s0, w0), (s1, w1) in zip(knots, knots[1:]):
        if s1 == s0:
            continue
        span = (s1 - s0) * total_len
        if w0 == w1:
            acc += span / w0
        else:
            acc += span * _trapezoid_unit_inverse(w0, w1)
    return acc
