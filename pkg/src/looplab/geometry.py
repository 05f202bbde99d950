"""Planar and spherical curve geometry.

Curves are closed oriented polylines in the plane.  The Riemann sphere enters
only through the chordal metric and the distinguished point at infinity, which
is represented by a sentinel object rather than a large coordinate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, GeometryError, PointOnCurveError


class _Infinity:
    """Sentinel for the point at infinity on the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"


INF = _Infinity()

SpherePoint = complex | _Infinity


def spherical_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Chordal distance on the Riemann sphere (diameter 2)."""
    p_inf = isinstance(p, _Infinity)
    q_inf = isinstance(q, _Infinity)
    if p_inf and q_inf:
        return 0.0
    if p_inf:
        return 2.0 / math.sqrt(1.0 + abs(q) ** 2)
    if q_inf:
        return 2.0 / math.sqrt(1.0 + abs(p) ** 2)
    p = complex(p)
    q = complex(q)
    return 2.0 * abs(p - q) / math.sqrt((1.0 + abs(p) ** 2) * (1.0 + abs(q) ** 2))


def _signed_area(vertices: np.ndarray) -> float:
    x = vertices.real
    y = vertices.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class JordanCurve:
    """Closed oriented polyline with a distinguished root vertex.

    The last vertex connects back to the first; the first vertex is *not*
    repeated.  ``ccw`` records the intended orientation and must agree with
    the sign of the polygon area.
    """

    vertices: np.ndarray
    ccw: bool = True
    root_index: int = 0

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex)
        object.__setattr__(self, "vertices", v)
        if v.ndim != 1 or v.size < 8:
            raise GeometryError("curve needs at least 8 vertices")
        if np.any(np.abs(v - np.roll(v, -1)) == 0.0):
            raise GeometryError("consecutive vertices must be distinct")
        if not (0 <= self.root_index < v.size):
            raise GeometryError("root index out of range")
        area = _signed_area(v)
        if (area > 0) != self.ccw:
            raise GeometryError("orientation flag inconsistent with signed area")

    def __len__(self) -> int:
        return self.vertices.size

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(
            max(v.real.max() - v.real.min(), v.imag.max() - v.imag.min())
        ) or 1.0

    def rooted_vertices(self) -> np.ndarray:
        """Vertices in storage order starting from the root."""
        return np.roll(self.vertices, -self.root_index)

    def with_root(self, root_index: int) -> "JordanCurve":
        return JordanCurve(self.vertices, self.ccw, root_index)

    def reversed(self) -> "JordanCurve":
        n = self.vertices.size
        return JordanCurve(
            self.vertices[::-1].copy(),
            not self.ccw,
            n - 1 - self.root_index,
        )

    def refined(self, max_edge: float) -> "JordanCurve":
        """Subdivide edges so none is longer than ``max_edge``."""
        v = self.vertices
        nxt = np.roll(v, -1)
        pieces = []
        root = 0
        for k in range(v.size):
            if k == self.root_index:
                root = sum(p.size for p in pieces)
            m = max(1, int(np.ceil(abs(nxt[k] - v[k]) / max_edge)))
            t = np.arange(m) / m
            pieces.append(v[k] + t * (nxt[k] - v[k]))
        return JordanCurve(np.concatenate(pieces), self.ccw, root)


def circle(center: complex = 0j, radius: float = 1.0, n: int = 256,
           ccw: bool = True, root_index: int = 0) -> JordanCurve:
    theta = 2.0 * np.pi * np.arange(n) / n
    if not ccw:
        theta = -theta
    return JordanCurve(center + radius * np.exp(1j * theta), ccw, root_index)


def _point_segment_distances(p: complex, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    t = np.clip(((p - a) * np.conj(d)).real / np.abs(d) ** 2, 0.0, 1.0)
    return np.abs(p - (a + t * d))


def distance_to_curve(curve: JordanCurve, p: complex) -> float:
    a = curve.vertices
    b = np.roll(a, -1)
    return float(_point_segment_distances(p, a, b).min())


def winding_number(curve: JordanCurve, p: complex, tol: float | None = None) -> int:
    """Signed winding number of the polyline about ``p`` via turning angles."""
    if tol is None:
        tol = 1e-9 * curve.diameter
    if distance_to_curve(curve, p) <= tol:
        raise PointOnCurveError("point on curve")
    u = curve.vertices - p
    ang = np.angle(np.roll(u, -1) / u)
    return int(round(float(ang.sum()) / (2.0 * np.pi)))


def points_enclosed(curve: JordanCurve, pts: np.ndarray) -> np.ndarray:
    """Even-odd containment test for an array of complex points.

    Points on the polyline itself may land on either side; callers needing
    a guard band should shrink or fatten the curve first.
    """
    pts = np.asarray(pts, dtype=complex).ravel()
    a = curve.vertices
    b = np.roll(a, -1)
    ay, by = a.imag[:, None], b.imag[:, None]
    inside = np.zeros(pts.size, dtype=bool)
    chunk = max(1, 20_000_000 // max(a.size, 1))
    for lo in range(0, pts.size, chunk):
        x = pts.real[None, lo : lo + chunk]
        y = pts.imag[None, lo : lo + chunk]
        straddle = (ay > y) != (by > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xcross = a.real[:, None] + (y - ay) * (
                (b.real - a.real)[:, None] / (by - ay)
            )
        hits = straddle & (x < xcross)
        inside[lo : lo + chunk] = hits.sum(axis=0) % 2 == 1
    return inside


def _segments_cross(a0, a1, b0, b1) -> np.ndarray:
    """Vectorized proper/improper intersection test for segment batches."""

    def orient(p, q, r):
        return np.sign(((q - p) * np.conj(r - p)).imag)

    d1 = orient(a0, a1, b0)
    d2 = orient(a0, a1, b1)
    d3 = orient(b0, b1, a0)
    d4 = orient(b0, b1, a1)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)

    def on_seg(p, q, r):
        # r collinear with pq: is it within the bounding box?
        return (
            (np.minimum(p.real, q.real) - 1e-15 <= r.real)
            & (r.real <= np.maximum(p.real, q.real) + 1e-15)
            & (np.minimum(p.imag, q.imag) - 1e-15 <= r.imag)
            & (r.imag <= np.maximum(p.imag, q.imag) + 1e-15)
        )

    touch = (
        ((d1 == 0) & on_seg(a0, a1, b0))
        | ((d2 == 0) & on_seg(a0, a1, b1))
        | ((d3 == 0) & on_seg(b0, b1, a0))
        | ((d4 == 0) & on_seg(b0, b1, a1))
    )
    return proper | touch


def is_simple(curve: JordanCurve) -> bool:
    """True iff no two non-adjacent segments intersect."""
    v = curve.vertices
    n = v.size
    a = v
    b = np.roll(v, -1)
    for i in range(n - 2):
        # candidate partners: j in [i+2, n-1], excluding (0, n-1) adjacency
        j0 = i + 2
        j1 = n if i > 0 else n - 1
        if j0 >= j1:
            continue
        js = np.arange(j0, j1)
        hit = _segments_cross(a[i], b[i], a[js], b[js])
        if np.any(hit):
            return False
    return True


def hausdorff_distance(k1: Sequence[complex] | np.ndarray,
                       k2: Sequence[complex] | np.ndarray,
                       metric: str = "euclidean") -> float:
    """Hausdorff distance between finite point samples of compact sets."""
    p = np.asarray(k1, dtype=complex).ravel()
    q = np.asarray(k2, dtype=complex).ravel()
    if p.size == 0 or q.size == 0:
        raise GeometryError("empty compact set")
    if metric == "euclidean":
        dist = np.abs(p[:, None] - q[None, :])
    elif metric == "spherical":
        sp = np.sqrt(1.0 + np.abs(p) ** 2)
        sq = np.sqrt(1.0 + np.abs(q) ** 2)
        dist = 2.0 * np.abs(p[:, None] - q[None, :]) / (sp[:, None] * sq[None, :])
    else:
        raise ConfigError(f"unknown metric {metric!r}")
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


@dataclass(frozen=True)
class AnnularRegion:
    """A conformal annulus: either the round 𝔸_r = {r < |z| < 1/r} or its

    image under an injective test map.  ``core_point`` is a point of the
    bounded complementary component, used for winding tests."""

    r: float
    map: object | None = None  # ConformalTestMap; None means round annulus
    core_point: complex = 0j

    def __post_init__(self):
        if not (0.0 < self.r < 1.0):
            raise GeometryError("annulus parameter must lie in (0,1)")

    @property
    def kind(self) -> str:
        return "round" if self.map is None else "map_image"

    def image_core(self) -> complex:
        if self.map is None:
            return self.core_point
        return self.map.eval(self.core_point)

    def contains_points(self, w: np.ndarray, hint: complex | None = None) -> bool:
        """True iff every point of ``w`` lies strictly inside the region."""
        w = np.asarray(w, dtype=complex).ravel()
        if self.map is None:
            z = w
        else:
            # bypass the inverse's own domain check: landing outside the
            # annulus means "not contained", not an error
            z = self.map._invert(w, hint)
        az = np.abs(z)
        return bool(np.all((az > self.r) & (az < 1.0 / self.r)))


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Admissible neighborhood: simple loops winding in the image of the

    sub-annulus 𝔸_{1−ε} of ``base_region``."""

    base_region: AnnularRegion
    epsilon: float

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0 - self.base_region.r):
            raise GeometryError("epsilon must lie in (0, 1-r)")

    def inner_region(self) -> AnnularRegion:
        return AnnularRegion(
            1.0 - self.epsilon, self.base_region.map, self.base_region.core_point
        )


def in_neighborhood(curve: JordanCurve, spec: NeighborhoodSpec,
                    max_edge: float | None = None) -> bool:
    """Membership test for admissible neighborhoods.

    Checks that the (refined) curve lies in the image of 𝔸_{1−ε} and winds
    around the image of the core point.
    """
    region = spec.inner_region()
    if max_edge is None:
        max_edge = curve.diameter / 64.0
    dense = curve.refined(max_edge)
    hint = curve.vertices[0] if region.map is not None else None
    if not region.contains_points(dense.vertices, hint=hint):
        return False
    return winding_number(curve, region.image_core()) != 0


def save_curve(curve: JordanCurve, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        orient = "ccw" if curve.ccw else "cw"
        fh.write(f"# root={curve.root_index} orientation={orient}\n")
        for z in curve.vertices:
            fh.write(f"{float(z.real)!r},{float(z.imag)!r}\n")


def load_curve(path: str) -> JordanCurve:
    root = 0
    ccw = True
    pts: list[complex] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("root="):
                        root = int(tok[5:])
                    elif tok.startswith("orientation="):
                        ccw = tok[12:] == "ccw"
                continue
            try:
                re_s, im_s = line.split(",")
                pts.append(complex(float(re_s), float(im_s)))
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad vertex line {line!r}") from exc
    try:
        return JordanCurve(np.asarray(pts), ccw, root)
    except GeometryError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
