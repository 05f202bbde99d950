import numpy as np
import pytest

from looplab.brownian import brownian_om_check, path_energy
from looplab.errors import ConfigError, EstimateError


class TestPathEnergy:
    def test_linear_path(self):
        # phi = a t on [0,1] has Dirichlet energy a²/2
        t = np.linspace(0, 1, 33)
        assert path_energy(1.5 * t) == pytest.approx(1.5**2 / 2)

    def test_zero_path(self):
        assert path_energy(np.zeros(17)) == 0.0

    def test_validation(self):
        with pytest.raises(ConfigError):
            path_energy(np.array([0.0, np.inf]))
        # paths not starting at 0 are rejected by the tube comparison
        with pytest.raises(ConfigError):
            brownian_om_check(np.array([0.5, 1.0]), kappa=1.0,
                              sample_count=1000)


class TestBrownianOMCheck:
    def test_zero_path_ratio_is_exactly_one(self):
        report = brownian_om_check(np.zeros(17), kappa=1.0,
                                   eps_schedule=(0.4,), sample_count=2000,
                                   seed=0)
        ratios = report.details["ratios"]
        assert ratios == [1.0]
        assert report.rhs == 1.0

    def test_linear_path_matches_prediction(self):
        t = np.linspace(0, 1, 65)
        report = brownian_om_check(0.5 * t, kappa=1.0,
                                   eps_schedule=(0.5, 0.4), sample_count=20000,
                                   seed=1)
        assert report.rhs == pytest.approx(np.exp(-path_energy(0.5 * t)))
        assert report.verdict == "pass"

    def test_deterministic_given_seed(self):
        t = np.linspace(0, 1, 33)
        a = brownian_om_check(0.3 * t, kappa=2.0, eps_schedule=(0.5,),
                              sample_count=2000, seed=9)
        b = brownian_om_check(0.3 * t, kappa=2.0, eps_schedule=(0.5,),
                              sample_count=2000, seed=9)
        assert a.lhs == b.lhs

    def test_parameter_validation(self):
        t = np.linspace(0, 1, 17)
        with pytest.raises(ConfigError):
            brownian_om_check(t, kappa=-1.0)
        with pytest.raises(ConfigError):
            brownian_om_check(t, kappa=1.0, eps_schedule=(0.2, 0.3))
        with pytest.raises(ConfigError):
            brownian_om_check(t, kappa=1.0, sample_count=10)

    def test_tiny_epsilon_exhausts_budget(self):
        t = np.linspace(0, 1, 17)
        with pytest.raises(EstimateError):
            brownian_om_check(2.0 * t, kappa=0.5, eps_schedule=(0.01,),
                              sample_count=1000, seed=0)
