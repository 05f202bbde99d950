import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from looplab.errors import ConfigError, GeometryError
from looplab.geometry import circle
from looplab.lattice import (
    GreenOperator,
    LatticeDomain,
    annulus_domain,
    box_domain,
    curve_tube_domain,
    disk_domain,
    domain_from_spec,
    domain_hash,
    hitting_mass,
    loop_mass,
)


def tiny(h, *ij):
    return LatticeDomain(h, np.array(ij, dtype=np.int64))


class TestLatticeDomain:
    def test_duplicate_sites_rejected(self):
        with pytest.raises(GeometryError):
            tiny(0.5, (0, 0), (0, 0), (1, 0))

    def test_set_algebra(self):
        a = tiny(1.0, (0, 0), (1, 0), (2, 0))
        b = tiny(1.0, (1, 0), (3, 0))
        assert len(a.union(b)) == 4
        assert len(a.minus(b)) == 2
        assert len(a.intersect(b)) == 1

    def test_mesh_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            tiny(1.0, (0, 0)).union(tiny(0.5, (0, 0)))

    def test_contains_and_indices(self):
        d = tiny(1.0, (0, 0), (2, 3), (5, 5))
        q = np.array([[2, 3], [9, 9]], dtype=np.int64)
        assert list(d.contains(q)) == [True, False]
        idx = d.indices_of(np.array([[2, 3]], dtype=np.int64))
        assert np.array_equal(d.sites[idx[0]], [2, 3])

    def test_neighbor_count(self):
        d = tiny(1.0, (0, 0), (1, 0), (0, 1))
        counts = dict(zip(map(tuple, d.sites), d.neighbor_count()))
        assert counts[(0, 0)] == 2
        assert counts[(1, 0)] == 1

    def test_hash_is_order_independent(self):
        a = tiny(1.0, (0, 0), (1, 0))
        b = tiny(1.0, (1, 0), (0, 0))
        assert domain_hash(a) == domain_hash(b)
        assert domain_hash(a) != domain_hash(tiny(1.0, (0, 0)))


class TestConstructors:
    def test_disk_site_count_scales_with_area(self):
        d = disk_domain(0.05, 0j, 1.0)
        assert len(d) == pytest.approx(np.pi / 0.05**2, rel=0.02)

    def test_box_is_exact(self):
        d = box_domain(0.5, 0.0, 2.0, 0.0, 1.0)
        assert len(d) == 5 * 3

    def test_annulus_excludes_hole(self):
        d = annulus_domain(0.1, 0.5)
        r = np.abs(d.points - d.points[0] * 0)  # distances from origin
        assert r.min() > 0.5 and r.max() < 2.0

    def test_tube_follows_curve(self):
        d = curve_tube_domain(0.1, circle(0j, 1.0, 128), 0.15)
        r = np.abs(d.points)
        assert r.min() > 0.8 and r.max() < 1.2

    def test_spec_dispatch(self):
        assert len(domain_from_spec({"disk": {"radius": 1.0}}, 0.25)) > 0
        with pytest.raises(ConfigError):
            domain_from_spec({"disk": {}, "box": {}}, 0.25)
        with pytest.raises(ConfigError):
            domain_from_spec({"pentagon": {}}, 0.25)


class TestLoopMass:
    def test_empty_domain(self):
        assert loop_mass(LatticeDomain(1.0, np.empty((0, 2), int))).value == 0.0

    def test_single_site(self):
        # one site: I - P = 1, so the mass is zero
        assert loop_mass(tiny(1.0, (0, 0))).value == pytest.approx(0.0)

    def test_two_adjacent_sites(self):
        # det(I-P) = 1 - (1/4)² on a domino, mass = log(16/15)
        val = loop_mass(tiny(1.0, (0, 0), (1, 0))).value
        assert val == pytest.approx(np.log(16 / 15), abs=1e-12)

    def test_mass_is_monotone_in_domain(self):
        small = box_domain(1.0, 0, 3, 0, 3)
        large = box_domain(1.0, 0, 5, 0, 5)
        assert loop_mass(small).value < loop_mass(large).value

    def test_mesh_independence_of_combinatorics(self):
        # mass depends only on the site graph, not the physical mesh
        a = tiny(1.0, (0, 0), (1, 0), (0, 1))
        b = tiny(0.125, (0, 0), (1, 0), (0, 1))
        assert loop_mass(a).value == pytest.approx(loop_mass(b).value)

    @given(n=st.integers(2, 5))
    def test_matches_dense_determinant(self, n):
        d = box_domain(1.0, 0, n - 1, 0, 1)
        sites = d.sites
        adj = (np.abs(sites[:, None, 0] - sites[None, :, 0])
               + np.abs(sites[:, None, 1] - sites[None, :, 1])) == 1
        dense = np.eye(len(d)) - adj / 4.0
        assert loop_mass(d).value == pytest.approx(
            -np.log(np.linalg.det(dense)), abs=1e-10)


class TestGreenOperator:
    def test_solve_against_dense(self):
        d = box_domain(1.0, 0, 4, 0, 4)
        g = GreenOperator(d)
        sites = d.sites
        adj = (np.abs(sites[:, None, 0] - sites[None, :, 0])
               + np.abs(sites[:, None, 1] - sites[None, :, 1])) == 1
        dense = np.eye(len(d)) - adj / 4.0
        rhs = np.zeros(len(d))
        rhs[0] = 1.0
        assert np.allclose(g.solve(rhs), np.linalg.solve(dense, rhs))

    def test_green_diag_counts_returns(self):
        d = box_domain(1.0, 0, 10, 0, 10)
        g = GreenOperator(d)
        center = d.indices_of(np.array([[5, 5]], dtype=np.int64))[0]
        corner = d.indices_of(np.array([[0, 0]], dtype=np.int64))[0]
        assert g.green_diag_at(center) > g.green_diag_at(corner) > 1.0


class TestHittingMass:
    def test_validation(self):
        box = box_domain(1.0, 0, 6, 0, 6)
        v1 = tiny(1.0, (1, 1))
        with pytest.raises(ConfigError):
            hitting_mass(v1, tiny(1.0, (9, 9)), box)
        with pytest.raises(ConfigError):
            hitting_mass(v1, v1, box)

    def test_positive_and_decays_with_separation(self):
        box = box_domain(1.0, 0, 20, 0, 6)
        v1 = tiny(1.0, (2, 3))
        near = hitting_mass(v1, tiny(1.0, (6, 3)), box).value
        far = hitting_mass(v1, tiny(1.0, (18, 3)), box).value
        assert near > far > 0.0

    def test_symmetric_in_the_two_sets(self):
        box = box_domain(1.0, 0, 10, 0, 10)
        v1, v2 = tiny(1.0, (2, 2)), tiny(1.0, (7, 8))
        assert hitting_mass(v1, v2, box).value == pytest.approx(
            hitting_mass(v2, v1, box).value, abs=1e-12)
