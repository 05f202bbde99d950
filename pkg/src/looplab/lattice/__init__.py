"""Random-walk loop measures on square lattices: exact masses via sparse
log-determinants, Poissonian loop-soup sampling, hull extraction, and the
renormalized two-set mass."""

from .domain import (
    GreenOperator,
    LatticeDomain,
    MassValue,
    annulus_domain,
    box_domain,
    curve_tube_domain,
    disk_domain,
    domain_from_spec,
    hitting_mass,
    loop_mass,
)
from .hull import outer_boundary
from .soup import SoupSample, SoupSampler, domain_hash, sample_soup, site_rates
from .werner import werner_mass, werner_mass_multi

__all__ = [
    "GreenOperator",
    "LatticeDomain",
    "MassValue",
    "SoupSample",
    "SoupSampler",
    "annulus_domain",
    "box_domain",
    "curve_tube_domain",
    "disk_domain",
    "domain_from_spec",
    "domain_hash",
    "hitting_mass",
    "loop_mass",
    "outer_boundary",
    "sample_soup",
    "site_rates",
    "werner_mass",
    "werner_mass_multi",
]
