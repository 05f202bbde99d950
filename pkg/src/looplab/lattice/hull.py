"""Outer-boundary (hull) extraction for lattice loops.

A sampled loop is a closed walk on the integer lattice.  Its *outer
boundary* is the set of visited sites adjacent to the unbounded
component of the complement, returned as a closed cyclic path.  The
complement is flood-filled with 4-connectivity, which makes the filled
region effectively 8-connected; the boundary is traced by following the
cracks (unit edges) between the filled region and the unbounded
component, keeping the filled region on the right.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..errors import ConfigError, GeometryError
from .domain import LatticeDomain

__all__ = ["outer_boundary"]

_FOUR = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)

# Headings in (row, col) steps; index order is a quarter turn per slot,
# so "toward the filled side" (which we keep on the right) is d + 1.
_DIRS = np.array([[0, 1], [1, 0], [0, -1], [-1, 0]], dtype=np.int64)


def _edge_cells(ci: int, cj: int, d: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Cells (left, right) flanking the edge leaving corner (ci, cj) with heading d.

    Corner (ci, cj) is the upper-left corner of cell (ci, cj).
    """
    if d == 0:      # east
        return (ci - 1, cj), (ci, cj)
    if d == 1:      # south (increasing row)
        return (ci, cj), (ci, cj - 1)
    if d == 2:      # west
        return (ci, cj - 1), (ci - 1, cj - 1)
    return (ci - 1, cj - 1), (ci - 1, cj)  # north


def outer_boundary(loop: np.ndarray, bbox: LatticeDomain) -> np.ndarray:
    """Extract the outer boundary of a closed lattice walk as a cyclic site path.

    ``loop`` is an ``(m, 2)`` integer array of visited sites (a closed
    walk, e.g. one entry of :meth:`SoupSample.loops`).  ``bbox`` is the
    ambient domain; the walk must stay one full cell away from its
    complement so that the unbounded component is well defined.

    Returns a ``(k, 2)`` integer array of sites forming a closed cycle
    (the first site is *not* repeated at the end).  The operation is
    idempotent: applied to its own output it returns the same cycle.
    """
    sites = np.asarray(loop, dtype=np.int64)
    if sites.ndim != 2 or sites.shape[1] != 2 or len(sites) == 0:
        raise ConfigError("loop must be a non-empty (m, 2) integer array")
    padded = sites[None, :, :] + _DIRS[:, None, :]
    inside = bbox.contains(np.vstack([sites, padded.reshape(-1, 2)]))
    if not inside.all():
        raise ConfigError("loop must lie inside the domain with one cell of margin")

    lo = sites.min(axis=0) - 2
    shape = sites.max(axis=0) - lo + 5
    filled = np.zeros(shape, dtype=bool)
    local = sites - lo
    filled[local[:, 0], local[:, 1]] = True

    # Unbounded component of the complement, then fill the holes.
    labels, _ = ndimage.label(~filled, structure=_FOUR)
    outer = labels == labels[0, 0]
    filled = ~outer
    boundary = filled & ndimage.binary_dilation(outer, structure=_FOUR)
    if not boundary.any():
        raise GeometryError("degenerate trace")

    # Start at the topmost-then-leftmost boundary cell; the cell above it
    # sits in the unbounded component, so heading east keeps the filled
    # region on the right.
    start = np.argwhere(boundary)[0]
    ci, cj, d = int(start[0]), int(start[1]), 0
    state0 = (ci, cj, d)
    cells: list[tuple[int, int]] = []
    limit = 8 * int(boundary.sum()) + 64
    for _ in range(limit):
        _, right = _edge_cells(ci, cj, d)
        if not cells or cells[-1] != right:
            cells.append(right)
        ci += int(_DIRS[d, 0])
        cj += int(_DIRS[d, 1])
        for nd in ((d + 1) % 4, d, (d + 3) % 4):
            lcell, rcell = _edge_cells(ci, cj, nd)
            if filled[rcell] and outer[lcell]:
                d = nd
                break
        else:
            raise GeometryError("degenerate trace")
        if (ci, cj, d) == state0:
            break
    else:
        raise GeometryError("degenerate trace")

    path = np.array(cells, dtype=np.int64)
    if len(path) > 1 and (path[0] == path[-1]).all():
        path = path[:-1]
    return path + lo
