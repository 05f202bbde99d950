from .driving import DrivingFunction, dirichlet_energy, extract_driving, trace_from_driving, zip_step
from .energy import EnergyValue, rooted_loop_energy
from .maps import (DiskSide, EquipotentialAnnulus, MapPair, equipotential_annulus,
                   exact_circle_maps, liouville_action, riemann_maps)
