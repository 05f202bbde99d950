import numpy as np
import pytest

from looplab.errors import MapConstructionError
from looplab.geometry import JordanCurve, circle, winding_number
from looplab.loewner import (
    equipotential_annulus,
    exact_circle_maps,
    liouville_action,
    riemann_maps,
)


def wobbly_circle(amplitude: float, mode: int = 3, n: int = 1024):
    theta = 2 * np.pi * np.arange(n) / n
    r = 1.0 + amplitude * np.cos(mode * theta)
    return JordanCurve(r * np.exp(1j * theta), ccw=True)


class TestRiemannMaps:
    def test_exact_circle_pair(self):
        maps = exact_circle_maps(0j, 2.0)
        assert maps.fprime0 == pytest.approx(2.0)
        assert maps.gprime_inf == pytest.approx(2.0)
        bdry = maps.interior_boundary(64)
        assert np.allclose(np.abs(bdry), 2.0)

    def test_numerical_circle_matches_exact(self):
        maps = riemann_maps(circle(0.5j, 1.5, 1024))
        assert maps.fprime0 == pytest.approx(1.5, rel=1e-6)
        assert maps.gprime_inf == pytest.approx(1.5, rel=1e-6)
        assert maps.center == pytest.approx(0.5j, abs=1e-6)

    def test_interior_boundary_approximates_curve(self):
        curve = wobbly_circle(0.2)
        maps = riemann_maps(curve)
        bdry = maps.interior_boundary(256)
        # every mapped boundary point lies near the target curve
        dists = np.abs(bdry[:, None] - curve.vertices[None, :]).min(axis=1)
        assert dists.max() < 5e-3

    def test_exterior_map_derivative_positive(self):
        maps = riemann_maps(wobbly_circle(0.25))
        assert maps.gprime_inf > 0


class TestEquipotentialAnnulus:
    def test_contains_the_curve(self):
        curve = wobbly_circle(0.15)
        ann = equipotential_annulus(curve, 0.2)
        assert ann.contains_points(curve.vertices[::64])

    def test_excludes_core_and_far_points(self):
        ann = equipotential_annulus(circle(0j, 1.0, 512), 0.2)
        assert not ann.contains_points([0j])
        assert not ann.contains_points([5.0 + 0j])

    def test_nested_in_larger_delta(self):
        curve = wobbly_circle(0.1)
        small = equipotential_annulus(curve, 0.1)
        large = equipotential_annulus(curve, 0.3)
        probe = small.inner_curve.vertices[::128]
        assert all(winding_number(large.inner_curve, p) == 0 for p in probe)

    def test_delta_range_enforced(self):
        with pytest.raises(MapConstructionError):
            equipotential_annulus(circle(0j, 1.0, 64), 0.7)


class TestLiouvilleAction:
    def test_circle_is_exactly_zero(self):
        result = liouville_action(exact_circle_maps(0j, 1.0))
        assert result.route == "disk_formula"
        assert abs(result.value) < 1e-12

    def test_scale_invariance_of_exact_circles(self):
        assert liouville_action(exact_circle_maps(1j, 3.7)).value == (
            pytest.approx(0.0, abs=1e-12))

    def test_numerical_circle_near_zero(self):
        maps = riemann_maps(circle(0j, 1.0, 2048))
        assert abs(liouville_action(maps).value) < 0.01

    def test_positive_for_distorted_curve(self):
        maps = riemann_maps(wobbly_circle(0.2, n=2048))
        result = liouville_action(maps)
        assert result.value > 0.05
        assert result.error_estimate < 1e-2
