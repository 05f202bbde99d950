import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from looplab.errors import GeometryError
from looplab.geometry import (
    AnnularRegion,
    JordanCurve,
    NeighborhoodSpec,
    circle,
    distance_to_curve,
    hausdorff_distance,
    in_neighborhood,
    is_simple,
    load_curve,
    points_enclosed,
    save_curve,
    winding_number,
)


def wobbly(radius=1.0, amplitude=0.2, mode=3, n=128, center=0j):
    theta = 2.0 * np.pi * np.arange(n) / n
    rho = radius * (1.0 + amplitude * np.cos(mode * theta))
    return JordanCurve(center + rho * np.exp(1j * theta), True, 0)


class TestJordanCurve:
    def test_too_few_vertices(self):
        with pytest.raises(GeometryError):
            JordanCurve(np.exp(2j * np.pi * np.arange(4) / 4), True, 0)

    def test_duplicate_consecutive_vertices(self):
        v = np.exp(2j * np.pi * np.arange(16) / 16)
        v[5] = v[4]
        with pytest.raises(GeometryError):
            JordanCurve(v, True, 0)

    def test_orientation_flag_must_match_area(self):
        v = np.exp(2j * np.pi * np.arange(16) / 16)
        with pytest.raises(GeometryError):
            JordanCurve(v, False, 0)
        JordanCurve(v[::-1], False, 0)  # reversed curve is clockwise

    def test_root_index_range(self):
        v = np.exp(2j * np.pi * np.arange(16) / 16)
        with pytest.raises(GeometryError):
            JordanCurve(v, True, 16)

    def test_circle_diameter(self):
        assert circle(0j, 2.0, 256).diameter == pytest.approx(4.0, rel=1e-3)


class TestWinding:
    def test_center_winds_once(self):
        assert winding_number(circle(0j, 1.0, 64), 0j) == 1

    def test_outside_winds_zero(self):
        assert winding_number(circle(0j, 1.0, 64), 3.0 + 0j) == 0

    def test_clockwise_winds_negative(self):
        v = np.exp(2j * np.pi * np.arange(64) / 64)[::-1]
        assert winding_number(JordanCurve(v, False, 0), 0j) == -1

    @given(
        radius=st.floats(0.5, 2.0),
        amplitude=st.floats(0.0, 0.3),
        mode=st.integers(2, 6),
        x=st.floats(-3.0, 3.0),
        y=st.floats(-3.0, 3.0),
    )
    def test_points_enclosed_matches_winding(self, radius, amplitude, mode, x, y):
        curve = wobbly(radius, amplitude, mode)
        p = complex(x, y)
        if distance_to_curve(curve, p) < 1e-6:
            return
        enclosed = points_enclosed(curve, np.array([p]))[0]
        assert enclosed == (winding_number(curve, p) != 0)

    def test_points_enclosed_vectorized_circle(self, rng):
        curve = circle(0j, 1.0, 512)
        pts = rng.uniform(-2, 2, size=(400, 2)) @ np.array([1, 1j])
        keep = np.abs(np.abs(pts) - 1.0) > 1e-3
        pts = pts[keep]
        assert np.array_equal(points_enclosed(curve, pts), np.abs(pts) < 1.0)


class TestSimplicityAndDistance:
    def test_circle_is_simple(self):
        assert is_simple(circle(0j, 1.0, 128))

    def test_figure_eight_is_not_simple(self):
        theta = 2.0 * np.pi * np.arange(64) / 64
        v = np.sin(theta) + 1j * np.sin(2 * theta) + 0.01 * np.exp(1j * theta)
        area = float(np.sum(np.imag(np.conj(v) * np.roll(v, -1))))
        assert not is_simple(JordanCurve(v, area > 0, 0))

    def test_distance_to_circle(self):
        curve = circle(0j, 1.0, 1024)
        assert distance_to_curve(curve, 0.25 + 0j) == pytest.approx(0.75, abs=1e-4)
        assert distance_to_curve(curve, 2.0 + 0j) == pytest.approx(1.0, abs=1e-4)


class TestHausdorff:
    def test_zero_on_self(self):
        v = circle(0j, 1.0, 64).vertices
        assert hausdorff_distance(v, v) == 0.0

    def test_concentric_circles(self):
        a = circle(0j, 1.0, 512).vertices
        b = circle(0j, 1.5, 512).vertices
        assert hausdorff_distance(a, b) == pytest.approx(0.5, abs=1e-3)

    @given(dx=st.floats(-1.0, 1.0), dy=st.floats(-1.0, 1.0))
    def test_symmetry(self, dx, dy):
        a = circle(0j, 1.0, 64).vertices
        b = circle(complex(dx, dy), 0.7, 64).vertices
        assert hausdorff_distance(a, b) == pytest.approx(
            hausdorff_distance(b, a), rel=1e-12)


class TestRegions:
    def test_annulus_parameter_range(self):
        with pytest.raises(GeometryError):
            AnnularRegion(1.5)
        with pytest.raises(GeometryError):
            AnnularRegion(0.0)

    def test_round_annulus_contains(self):
        region = AnnularRegion(0.5)
        assert region.contains_points(np.array([1.0 + 0j, 0.6j]))
        assert not region.contains_points(np.array([0.25 + 0j]))

    def test_neighborhood_membership(self):
        spec = NeighborhoodSpec(AnnularRegion(0.5), 0.2)
        assert in_neighborhood(circle(0j, 1.0, 128), spec)
        assert in_neighborhood(circle(0j, 1.1, 128), spec)
        assert not in_neighborhood(circle(0j, 0.6, 128), spec)
        # winds zero around the core
        assert not in_neighborhood(circle(1.05 + 0j, 0.1, 128), spec)

    def test_epsilon_range(self):
        with pytest.raises(GeometryError):
            NeighborhoodSpec(AnnularRegion(0.5), 0.6)


class TestCurveIO:
    def test_round_trip(self, tmp_path):
        curve = wobbly(1.2, 0.1, 4, n=64)
        path = str(tmp_path / "curve.csv")
        save_curve(curve, path)
        back = load_curve(path)
        assert np.allclose(back.vertices, curve.vertices)
        assert back.ccw == curve.ccw and back.root_index == curve.root_index
