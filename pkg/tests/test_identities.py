import numpy as np
import pytest

from looplab.conformal import Quadratic
from looplab.errors import ConfigError
from looplab.geometry import AnnularRegion, circle
from looplab.identities import (
    OMConfig,
    central_charge,
    om_prediction,
    verify_mass_identity,
    verify_restriction_lemma,
)

K = {"disk": {"center": [0.0, 0.0], "radius": 0.3}}
DPRIME = {"disk": {"center": [0.0, 0.0], "radius": 1.0}}
D = {"disk": {"center": [0.0, 0.0], "radius": 2.0}}
FAST_MESHES = (1 / 8, 1 / 16)


class TestCentralCharge:
    def test_zero_at_eight_thirds(self):
        assert central_charge(8 / 3) == pytest.approx(0.0, abs=1e-14)

    def test_known_value(self):
        assert central_charge(2.0) == pytest.approx(-2.0)

    def test_positive_kappa_required(self):
        with pytest.raises(ConfigError):
            central_charge(0.0)


@pytest.fixture(scope="module")
def report():
    return verify_restriction_lemma(K, DPRIME, D, mesh_schedule=FAST_MESHES)


class TestRestrictionLemma:
    def test_telescoping_is_exact(self, report):
        # both sides come from the same log-determinants, so at matched
        # mesh and truncation the identity holds to roundoff
        assert report.verdict == "pass"
        assert report.discrepancy < 1e-8

    def test_report_record_and_summary(self, report):
        rec = report.to_record()
        assert rec["name"] == "restriction"
        assert rec["verdict"] == "pass"
        assert "pass" in report.summary()
        assert len(report.details["per_mesh"]) == 2

    def test_nesting_enforced(self):
        with pytest.raises(ConfigError):
            verify_restriction_lemma(DPRIME, K, D, mesh_schedule=(1 / 8,))
        huge = {"disk": {"radius": 10.0}}
        with pytest.raises(ConfigError):
            verify_restriction_lemma(K, DPRIME, huge,
                                     mesh_schedule=(1 / 8,),
                                     truncation_radius=4.0)


class TestMassIdentity:
    def test_solid_form_passes(self):
        report = verify_mass_identity(
            circle(1.2 + 0j, 0.25, 256),
            AnnularRegion(0.5),
            Quadratic(None, 0.1),
            form="solid",
            h=1 / 8,
            radius_schedule=(4.0, 6.0, 9.0, 14.0),
            replicas=400,
            seed=0,
        )
        assert report.verdict == "pass"
        assert report.provenance["radius_schedule"]

    def test_unknown_form_rejected(self):
        with pytest.raises(ConfigError):
            verify_mass_identity(circle(1.2 + 0j, 0.25, 128),
                                 AnnularRegion(0.5), Quadratic(None, 0.1),
                                 form="shell", replicas=400)


class TestOMPrediction:
    def test_config_validation(self):
        curve = circle(0j, 1.0, 128)
        with pytest.raises(ConfigError):
            OMConfig(5.0, curve, AnnularRegion(0.5), Quadratic(None, 0.1))
        with pytest.raises(ConfigError):
            OMConfig(8 / 3, curve, AnnularRegion(0.5), Quadratic(None, 0.1),
                     eps_schedule=(0.1, 0.2))

    def test_charge_vanishes_at_eight_thirds(self):
        m = Quadratic(None, 0.15)
        config = OMConfig(8 / 3, circle(0j, 1.0, 512).refined(0.02),
                          AnnularRegion(0.5, map=m), m)
        pred = om_prediction(config)
        assert pred.charge == pytest.approx(0.0, abs=1e-14)
        assert pred.value == 1.0
        assert pred.consistency is None

    def test_prediction_tracks_energy_for_other_kappa(self):
        m = Quadratic(None, 0.15)
        curve = circle(0j, 1.0, 512).refined(0.02)
        config = OMConfig(2.0, curve, AnnularRegion(0.5, map=m), m)
        pred = om_prediction(config)
        assert pred.value == pytest.approx(
            np.exp(central_charge(2.0) / 24.0 * pred.energy))
