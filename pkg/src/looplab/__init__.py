"""Numerical laboratory for the Loewner energy of Jordan curves and for
lattice Brownian loop-measure quantities, with identity checks tying the
two together."""

from .brownian import brownian_om_check, path_energy
from .conformal import (
    Composition,
    ConformalTestMap,
    Mobius,
    Quadratic,
    identity_map,
    map_from_config,
    push_curve,
)
from .errors import (
    ConfigError,
    EstimateError,
    GeometryError,
    LooplabError,
    MapConstructionError,
    MeshError,
    ZipperError,
)
from .geometry import (
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
from .identities import (
    IdentityReport,
    OMConfig,
    OMPrediction,
    central_charge,
    om_empirical_83,
    om_prediction,
    verify_continuity,
    verify_divergence_lemma,
    verify_energy_variation,
    verify_mass_identity,
    verify_restriction_lemma,
)
from .lattice import (
    GreenOperator,
    LatticeDomain,
    MassValue,
    SoupSampler,
    annulus_domain,
    box_domain,
    curve_tube_domain,
    disk_domain,
    domain_from_spec,
    hitting_mass,
    loop_mass,
    outer_boundary,
    sample_soup,
    werner_mass,
    werner_mass_multi,
)
from .lattice.lambda_star import LambdaStarEstimate, lambda_star
from .loewner import (
    DrivingFunction,
    dirichlet_energy,
    extract_driving,
    liouville_action,
    riemann_maps,
    rooted_loop_energy,
    trace_from_driving,
)

__version__ = "0.1.0"
