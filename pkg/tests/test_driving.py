import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from looplab.errors import ConfigError, ZipperError
from looplab.loewner import (
    DrivingFunction,
    dirichlet_energy,
    extract_driving,
    trace_from_driving,
    zip_step,
)


class TestDrivingFunction:
    def test_validation(self):
        with pytest.raises(ConfigError):
            DrivingFunction(np.array([0.5, 1.0]), np.array([0.0, 0.0]))
        with pytest.raises(ConfigError):
            DrivingFunction(np.array([0.0, 1.0]), np.array([0.0]))
        with pytest.raises(ConfigError):
            DrivingFunction(np.array([0.0, 1.0]), np.array([0.0, np.nan]))

    def test_csv_round_trip(self, tmp_path):
        d = DrivingFunction(np.array([0.0, 0.5, 1.25]),
                            np.array([0.0, -0.3, 0.7]))
        path = str(tmp_path / "drive.csv")
        d.to_csv(path)
        again = DrivingFunction.from_csv(path)
        assert np.allclose(again.t, d.t) and np.allclose(again.w, d.w)


class TestDirichletEnergy:
    def test_constant_driving_has_zero_energy(self):
        d = DrivingFunction(np.linspace(0, 1, 5), np.full(5, 0.3))
        assert dirichlet_energy(d) == 0.0

    def test_linear_driving(self):
        # W = a t on [0, T] has energy a² T / 2
        t = np.linspace(0, 2.0, 9)
        d = DrivingFunction(t, 1.5 * t)
        assert dirichlet_energy(d) == pytest.approx(1.5**2 * 2.0 / 2)

    @given(a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_piecewise_linear_interpolant_minimizes(self, a, b):
        # inserting a midpoint sample on the interpolant leaves energy fixed
        t = np.array([0.0, 1.0, 2.0])
        d = DrivingFunction(t, np.array([0.0, a, b]))
        fine = DrivingFunction(np.array([0.0, 0.5, 1.0, 2.0]),
                               np.array([0.0, a / 2, a, b]))
        assert dirichlet_energy(fine) == pytest.approx(dirichlet_energy(d))


class TestZipStep:
    def test_vertical_slit_capacity(self):
        # vertical slit of height y has capacity y²/4
        _, tau, _ = zip_step(np.array([], dtype=complex), 2.0j, 0.0)
        assert tau == pytest.approx(1.0)

    def test_geodesic_tip_maps_to_driving_value(self):
        zeta = 0.4 + 0.9j
        img, _, new_w = zip_step(np.array([zeta]), zeta, 0.0)
        assert img[0] == pytest.approx(new_w, abs=1e-6)

    @given(x=st.floats(-1.0, 1.0), y=st.floats(0.3, 2.0))
    def test_preserves_upper_half_plane(self, x, y):
        zeta = complex(x, y)
        pts = np.array([3.0 + 0.5j, -2.0 + 1.5j, 0.1 + 3.0j])
        img, tau, _ = zip_step(pts, zeta, 0.0)
        assert tau > 0
        assert np.all(img.imag > 0)

    @given(x=st.floats(-1.0, 1.0), y=st.floats(0.3, 2.0))
    def test_hydrodynamic_normalization(self, x, y):
        # far away, the map looks like identity plus O(1/|z|)
        far = np.array([1e7 + 1e6j, -1e7 + 1e6j])
        img, _, _ = zip_step(far, complex(x, y), 0.0)
        assert np.all(np.abs(img - far) < 1e-4)


class TestZipperRoundTrip:
    def test_vertical_slit_driving_is_constant(self):
        arc = 0.25j * np.arange(17)
        d = extract_driving(arc)
        assert np.allclose(d.w, 0.0, atol=1e-9)
        assert d.t[-1] == pytest.approx(4.0**2 / 4, rel=1e-6)

    def test_arc_must_start_on_real_axis(self):
        with pytest.raises(ConfigError):
            extract_driving(np.array([0.5j, 1.0j]))

    def test_dipping_arc_raises(self):
        arc = np.array([0.0, 0.5j, 1.0j, 0.4j, -0.1j])
        with pytest.raises(ZipperError):
            extract_driving(arc)

    def test_extract_then_trace_recovers_arc(self):
        theta = np.linspace(0, 0.8 * np.pi, 80)
        arc = np.exp(1j * theta)  # circular arc leaning left
        d = extract_driving(arc)
        tips = trace_from_driving(d, step=d.t[-1] / 4096)
        assert np.abs(tips - arc).max() < 0.02

    def test_trace_validates_input(self):
        with pytest.raises(ConfigError):
            trace_from_driving(DrivingFunction(np.array([0.0]),
                                               np.array([0.0])))
