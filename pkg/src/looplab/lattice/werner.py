"""Monte Carlo estimate of the outer-boundary (hull) loop mass.

The self-avoiding-loop measure assigns to a hull the total mass of the
random-walk loops sharing that outer boundary, so the mass of "hull hits
both compact sets" equals the expected number of soup loops whose outer
boundary meets both sets.  We estimate it as the mean count over
independent soup replicas; several set pairs can share one stream of
replicas, with hulls extracted once per qualifying loop.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import ConfigError
from .domain import LatticeDomain, MassValue, _keys
from .hull import outer_boundary
from .soup import SoupSampler

__all__ = ["werner_mass", "werner_mass_multi"]


def _ambient_box(domain: LatticeDomain) -> LatticeDomain:
    lo = domain.sites.min(axis=0) - 2
    hi = domain.sites.max(axis=0) + 2
    ii, jj = np.meshgrid(
        np.arange(lo[0], hi[0] + 1), np.arange(lo[1], hi[1] + 1), indexing="ij"
    )
    sites = np.column_stack([ii.ravel(), jj.ravel()])
    return LatticeDomain(h=domain.h, sites=sites)


def _replica_counts(sampler, bbox, key_pairs, seed, replica) -> np.ndarray:
    counts = np.zeros(len(key_pairs), dtype=np.int64)
    sample = sampler.sample(seed, replica)
    if sample.steps.size == 0:
        return counts
    step_keys = _keys(sample.steps)
    starts = sample.offsets[:-1]
    cand = np.zeros((len(key_pairs), len(starts)), dtype=bool)
    for p, (k1, k2) in enumerate(key_pairs):
        hit1 = np.isin(step_keys, k1).astype(np.int64)
        hit2 = np.isin(step_keys, k2).astype(np.int64)
        cand[p] = (np.add.reduceat(hit1, starts) > 0) & (
            np.add.reduceat(hit2, starts) > 0
        )
    for k in np.flatnonzero(cand.any(axis=0)):
        loop = sample.steps[sample.offsets[k] : sample.offsets[k + 1]]
        hull_keys = _keys(outer_boundary(loop, bbox))
        for p in np.flatnonzero(cand[:, k]):
            k1, k2 = key_pairs[p]
            if np.isin(hull_keys, k1).any() and np.isin(hull_keys, k2).any():
                counts[p] += 1
    return counts


def werner_mass_multi(
    pairs: list[tuple[LatticeDomain, LatticeDomain]],
    domain: LatticeDomain,
    replicas: int,
    seed: int,
    threads: int = 1,
) -> list[MassValue]:
    """Hull-hitting masses for several set pairs over one shared replica stream.

    Every pair sees the same soup replicas, so estimates for nested or
    overlapping targets are positively coupled — useful when differences
    or monotone trends are the quantity of interest.  Deterministic given
    ``(domain, seed, replicas)`` regardless of ``threads``.
    """
    if replicas < 100:
        raise ConfigError("at least 100 replicas are required")
    for v1, v2 in pairs:
        if len(v1) == 0 or len(v2) == 0:
            raise ConfigError("target sets must be non-empty")
        if not domain.contains(v1.sites).all() or not domain.contains(v2.sites).all():
            raise ConfigError("target sets must lie inside the domain")
        if len(v1.intersect(v2)) > 0:
            raise ConfigError("sets must be disjoint")

    sampler = SoupSampler(domain)
    bbox = _ambient_box(domain)
    key_pairs = [(_keys(v1.sites), _keys(v2.sites)) for v1, v2 in pairs]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_replica_counts, sampler, bbox, key_pairs, seed, r)
                for r in range(replicas)
            ]
            counts = np.array([f.result() for f in futures], dtype=float)
    else:
        counts = np.array(
            [_replica_counts(sampler, bbox, key_pairs, seed, r) for r in range(replicas)],
            dtype=float,
        )
    out = []
    for p in range(len(pairs)):
        col = counts[:, p]
        stderr = col.std(ddof=1) / np.sqrt(replicas) if replicas > 1 else np.inf
        out.append(MassValue(value=float(col.mean()), kind="estimate", stderr=float(stderr)))
    return out


def werner_mass(
    v1: LatticeDomain,
    v2: LatticeDomain,
    domain: LatticeDomain,
    replicas: int,
    seed: int,
    threads: int = 1,
) -> MassValue:
    """Mean count of soup loops in ``domain`` whose outer boundary meets both sets.

    Returns a :class:`MassValue` with ``kind="estimate"`` carrying the
    standard error of the replica mean.
    """
    return werner_mass_multi([(v1, v2)], domain, replicas, seed, threads)[0]
