import numpy as np
import pytest

from looplab.errors import ConfigError
from looplab.lattice import (
    box_domain,
    disk_domain,
    hitting_mass,
    werner_mass,
    werner_mass_multi,
)


@pytest.fixture(scope="module")
def setup():
    h = 0.25
    domain = box_domain(h, -3.0, 3.0, -3.0, 3.0)
    v1 = disk_domain(h, -1.5 + 0j, 0.5)
    v2 = disk_domain(h, 1.5 + 0j, 0.5)
    return h, domain, v1, v2


class TestWernerMass:
    def test_validation(self, setup):
        h, domain, v1, v2 = setup
        with pytest.raises(ConfigError):
            werner_mass(v1, v2, domain, replicas=10, seed=0)
        with pytest.raises(ConfigError):
            werner_mass(v1, v1, domain, replicas=200, seed=0)
        far = disk_domain(h, 10.0 + 0j, 0.5)
        with pytest.raises(ConfigError):
            werner_mass(v1, far, domain, replicas=200, seed=0)

    def test_deterministic_across_thread_counts(self, setup):
        _, domain, v1, v2 = setup
        a = werner_mass(v1, v2, domain, replicas=150, seed=42, threads=1)
        b = werner_mass(v1, v2, domain, replicas=150, seed=42, threads=4)
        assert a.value == b.value
        assert a.stderr == b.stderr

    def test_positive_with_finite_stderr(self, setup):
        _, domain, v1, v2 = setup
        est = werner_mass(v1, v2, domain, replicas=300, seed=1)
        assert est.kind == "estimate"
        assert est.value > 0
        assert 0 < est.stderr < est.value

    def test_bounded_by_hitting_mass(self, setup):
        # hull-hitting loops are a subset of set-hitting loops
        _, domain, v1, v2 = setup
        w = werner_mass(v1, v2, domain, replicas=400, seed=3)
        b = hitting_mass(v1, v2, domain)
        assert w.value <= b.value + 3 * w.stderr

    def test_multi_shares_replica_stream(self, setup):
        _, domain, v1, v2 = setup
        single = werner_mass(v1, v2, domain, replicas=150, seed=5)
        multi = werner_mass_multi([(v1, v2), (v2, v1)], domain,
                                  replicas=150, seed=5)
        assert multi[0].value == single.value
        # symmetric pair under the same soup gives the identical estimate
        assert multi[0].value == multi[1].value

    def test_monotone_for_nested_targets(self, setup):
        h, domain, v1, _ = setup
        big = disk_domain(h, 1.5 + 0j, 0.8)
        small = disk_domain(h, 1.5 + 0j, 0.4)
        got = werner_mass_multi([(v1, small), (v1, big)], domain,
                                replicas=200, seed=6)
        # coupled replicas: the larger target catches every hit of the smaller
        assert got[0].value <= got[1].value
