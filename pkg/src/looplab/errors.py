"""Exception hierarchy shared across the package.

Every error raised on a documented failure path derives from LooplabError so
the CLI can map "expected" failures to exit code 1 and reserve tracebacks for
genuine bugs.
"""


class LooplabError(Exception):
    """Base class for all anticipated failures."""


class ConfigError(LooplabError):
    """Malformed configuration, curve file, or map description."""


class GeometryError(LooplabError):
    """Invalid curve data or degenerate geometric query."""


class PointOnCurveError(GeometryError):
    """Query point lies on the curve within tolerance."""


class OutsideDomainError(LooplabError):
    """Evaluation of a conformal map outside its declared domain."""


class InversionError(LooplabError):
    """Conformal inversion failed to converge or target not in range."""


class ZipperError(LooplabError):
    """Driving-function extraction hit a self-intersection or left the

    upper half-plane during unzipping."""


class MapConstructionError(LooplabError):
    """Riemann-map computation did not converge."""


class MeshError(LooplabError):
    """Lattice extrapolation inconsistent across meshes."""


class EstimateError(LooplabError):
    """Monte Carlo estimate unusable (e.g. zero observed events)."""
