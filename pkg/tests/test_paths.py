import math

import numpy as np
import pytest

from ctrlbench.errors import ValidationError
from ctrlbench.paths import Arc, PathSpec, Straight, steering_difficulty


def brute_force_difficulty(path, n=1 << 18):
    """Independent oracle: flat midpoint rule over the whole profile."""
    total = path.total_length()
    s = (np.arange(n) + 0.5) / n
    widths = np.array([path.width_at(v) for v in s])
    return float(np.sum(total / n / widths))


class TestSteeringDifficulty:
    def test_straight_constant_width(self):
        assert steering_difficulty(PathSpec.straight(200, 10)) == pytest.approx(20.0, rel=1e-9)

    def test_full_circle_constant_width(self):
        d = steering_difficulty(PathSpec.circle(50, 5))
        assert d == pytest.approx(2 * math.pi * 50 / 5, rel=1e-9)

    def test_straight_linear_width_closed_form(self):
        # closed form: L / (W2 - W1) * ln(W2 / W1)
        path = PathSpec.straight_linear_width(100, 10, 20)
        expected = 100.0 / (20.0 - 10.0) * math.log(20.0 / 10.0)
        d = steering_difficulty(path)
        assert d == pytest.approx(expected, rel=1e-6)
        assert d == pytest.approx(brute_force_difficulty(path), rel=1e-6)

    def test_matches_brute_force_on_mixed_profile(self):
        path = PathSpec(
            (Straight(80), Arc(30, math.pi), Straight(40)),
            ((0.0, 12.0), (0.3, 12.0), (0.7, 4.0), (1.0, 9.0)),
        )
        assert steering_difficulty(path) == pytest.approx(brute_force_difficulty(path), rel=1e-6)

    def test_additive_under_concatenation(self):
        p1 = PathSpec.straight_linear_width(60, 8, 14)
        p2 = PathSpec.circle(25, 6)
        joined = p1.concat(p2)
        d_sum = steering_difficulty(p1) + steering_difficulty(p2)
        assert steering_difficulty(joined) == pytest.approx(d_sum, rel=1e-9)

    def test_width_step_via_repeated_knot(self):
        path = PathSpec((Straight(100),), ((0.0, 10.0), (0.5, 10.0), (0.5, 20.0), (1.0, 20.0)))
        assert steering_difficulty(path) == pytest.approx(50 / 10 + 50 / 20, rel=1e-9)


class TestPathValidation:
    def test_empty_segments_rejected(self):
        with pytest.raises(ValidationError):
            PathSpec((), ((0.0, 10.0), (1.0, 10.0)))

    def test_nonpositive_width_rejected(self):
        with pytest.raises(ValidationError):
            PathSpec((Straight(10),), ((0.0, 10.0), (1.0, 0.0)))
        with pytest.raises(ValidationError):
            PathSpec((Straight(10),), ((0.0, -2.0), (1.0, 5.0)))

    def test_profile_must_cover_unit_interval(self):
        with pytest.raises(ValidationError):
            PathSpec((Straight(10),), ((0.1, 5.0), (1.0, 5.0)))
        with pytest.raises(ValidationError):
            PathSpec((Straight(10),), ((0.0, 5.0), (0.9, 5.0)))

    def test_unsorted_knots_rejected(self):
        with pytest.raises(ValidationError):
            PathSpec((Straight(10),), ((0.0, 5.0), (0.7, 5.0), (0.4, 6.0), (1.0, 5.0)))

    def test_bad_segments_rejected(self):
        with pytest.raises(ValidationError):
            Straight(0.0)
        with pytest.raises(ValidationError):
            Arc(0.0, 1.0)
        with pytest.raises(ValidationError):
            Arc(5.0, 0.0)


class TestGeometry:
    def test_total_length(self):
        path = PathSpec((Straight(80), Arc(30, math.pi)), ((0.0, 5.0), (1.0, 5.0)))
        assert path.total_length() == pytest.approx(80 + 30 * math.pi)

    def test_straight_runs_along_x(self):
        path = PathSpec.straight(100, 10)
        assert path.point_at(0.0) == (0.0, 0.0)
        x, y = path.point_at(0.5)
        assert (x, y) == pytest.approx((50.0, 0.0))

    def test_full_circle_returns_to_start(self):
        path = PathSpec.circle(50, 5)
        x, y = path.point_at(1.0)
        assert (x, y) == pytest.approx((0.0, 0.0), abs=1e-9)
        # quarter of the way round a left-turning circle from the origin
        x, y = path.point_at(0.25)
        assert (x, y) == pytest.approx((50.0, 50.0), abs=1e-9)

    def test_right_turn_arc(self):
        path = PathSpec((Arc(10, -math.pi / 2),), ((0.0, 2.0), (1.0, 2.0)))
        x, y = path.point_at(1.0)
        assert (x, y) == pytest.approx((10.0, -10.0), abs=1e-9)

    def test_width_at_interpolates(self):
        path = PathSpec.straight_linear_width(10, 10, 20)
        assert path.width_at(0.0) == 10.0
        assert path.width_at(1.0) == 20.0
        assert path.width_at(0.5) == pytest.approx(15.0)
