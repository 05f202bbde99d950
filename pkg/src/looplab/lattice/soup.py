"""Poissonian loop-soup sampling with the random-walk loop measure as

intensity.

The sampler uses the minimal-site decomposition: in row-major site order
v₁ < … < v_n, loops with minimal site v_k form a Poisson process with rate
log G_{D_k}(v_k, v_k), where D_k is the domain minus all earlier sites.  A
loop at v_k consists of a logarithmic-series distributed number of
independent first-return excursions of the killed walk in D_k, sampled by
rejection.  All per-site rates come from one sparse LDL pass in reversed
row-major elimination order.

RNG streams are counter-based (splitmix64), keyed by (seed, replica, site),
so replicas parallelize deterministically and a sample depends only on
(domain, seed, replica).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

import numba
from numba import njit

from ..errors import ConfigError
from .domain import LatticeDomain, _i_minus_p


def site_rates(domain: LatticeDomain):
    """Per-site Poisson rates and first-return probabilities.

    Returns (rates, first_return) with rates[k] = log G_{D_k}(v_k,v_k) and
    first_return[k] = 1 − 1/G_{D_k}(v_k,v_k), D_k = sites of row-major index
    ≥ k.
    """
    n = len(domain)
    a = _i_minus_p(domain)
    rev = np.arange(n)[::-1]
    ar = a[rev][:, rev].tocsc()
    lu = splu(ar, permc_spec="NATURAL", diag_pivot_thresh=0.0,
              options={"SymmetricMode": True})
    if not (np.array_equal(lu.perm_r, np.arange(n))
            and np.array_equal(lu.perm_c, np.arange(n))):
        raise ConfigError("factorization reordered; rates would be misaligned")
    dbar = lu.U.diagonal()[::-1]
    if np.any(dbar <= 0) or np.any(dbar > 1.0 + 1e-12):
        raise ConfigError("domain not strictly sub-stochastic")
    rates = -np.log(dbar)
    return rates, 1.0 - dbar


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z ^= z >> np.uint64(30)
    z = (z * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z ^= z >> np.uint64(27)
    z = (z * np.uint64(0x94D049BB133111EB)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z ^= z >> np.uint64(31)
    return z


@njit(cache=True, nogil=True, inline="always")
def _advance(s):
    return (s + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, nogil=True, inline="always")
def _to_uniform(s):
    return (_mix64(s) >> np.uint64(11)) * 1.1102230246251565e-16


@njit(cache=True, nogil=True)
def _sample_replica(rank, i0, j0, sites, rates, fret, seed, replica):
    """Sample one soup replica.

    rank: 2-d int32 array mapping grid offsets to row-major site index (or
    -1 off-domain); sites: (n,2) absolute site coordinates; rates/fret as in
    site_rates.  Returns (steps_i, steps_j, offsets) with loop l occupying
    steps[offsets[l]:offsets[l+1]] as a closed walk (first site repeated at
    the end is omitted; steps are consecutive 4-neighbors cyclically).
    """
    n = sites.shape[0]
    cap = 4096
    buf_i = np.empty(cap, dtype=np.int32)
    buf_j = np.empty(cap, dtype=np.int32)
    offs_cap = 1024
    offs = np.empty(offs_cap, dtype=np.int64)
    offs[0] = 0
    n_off = 1
    pos = 0
    state = np.uint64(0)
    height = rank.shape[0]
    width = rank.shape[1]
    max_steps = 200 * n + 10000
    for k in range(n):
        lam = rates[k]
        if lam <= 0.0:
            continue
        state = _mix64(np.uint64(seed) ^ _mix64(
            np.uint64(replica) * np.uint64(0x100000001B3) + np.uint64(k)))
        # Poisson(lam) by Knuth multiplication
        limit = np.exp(-lam)
        count = 0
        state = _advance(state)
        prod = _to_uniform(state)
        while prod > limit:
            count += 1
            state = _advance(state)
            prod *= _to_uniform(state)
        if count == 0:
            continue
        f = fret[k]
        log1mf = np.log(1.0 - f)
        si = sites[k, 0]
        sj = sites[k, 1]
        for _ in range(count):
            # number of first-return excursions ~ logarithmic series
            state = _advance(state)
            target = _to_uniform(state) * (-log1mf)
            cum = 0.0
            term = f
            nexc = 1
            while True:
                cum += term / nexc
                if cum >= target or nexc > 100000:
                    break
                term *= f
                nexc += 1
            # grow the loop: nexc accepted excursions
            start = pos
            done_exc = 0
            while done_exc < nexc:
                # one attempted excursion from (si, sj)
                trial_start = pos
                ci, cj = si, sj
                alive = True
                steps = 0
                while True:
                    state = _advance(state)
                    d = int(_to_uniform(state) * 4.0)
                    if d == 0:
                        ni, nj = ci + 1, cj
                    elif d == 1:
                        ni, nj = ci - 1, cj
                    elif d == 2:
                        ni, nj = ci, cj + 1
                    else:
                        ni, nj = ci, cj - 1
                    gi = ni - i0
                    gj = nj - j0
                    if gi < 0 or gj < 0 or gi >= height or gj >= width:
                        alive = False
                    elif rank[gi, gj] < k:
                        alive = False
                    if not alive:
                        break
                    # record the step (site left behind)
                    if pos >= cap:
                        cap *= 2
                        nb_i = np.empty(cap, dtype=np.int32)
                        nb_j = np.empty(cap, dtype=np.int32)
                        nb_i[:pos] = buf_i[:pos]
                        nb_j[:pos] = buf_j[:pos]
                        buf_i = nb_i
                        buf_j = nb_j
                    buf_i[pos] = ci
                    buf_j[pos] = cj
                    pos += 1
                    ci, cj = ni, nj
                    steps += 1
                    if ci == si and cj == sj:
                        break
                    if steps > max_steps:
                        alive = False
                        break
                if alive:
                    done_exc += 1
                else:
                    pos = trial_start  # reject the attempt
            if n_off >= offs_cap:
                offs_cap *= 2
                no = np.empty(offs_cap, dtype=np.int64)
                no[:n_off] = offs[:n_off]
                offs = no
            offs[n_off] = pos
            n_off += 1
    return buf_i[:pos].copy(), buf_j[:pos].copy(), offs[:n_off].copy()


@dataclass(frozen=True)
class SoupSample:
    """One Poissonian soup realization on a lattice domain."""

    domain: LatticeDomain
    seed: int
    replica: int
    steps: np.ndarray    # (m, 2) concatenated closed walks
    offsets: np.ndarray  # (L+1,) loop l = steps[offsets[l]:offsets[l+1]]
    intensity: float = 1.0

    @property
    def loop_count(self) -> int:
        return self.offsets.size - 1

    def loops(self):
        for a, b in zip(self.offsets[:-1], self.offsets[1:]):
            yield self.steps[a:b]

    def to_jsonl(self, path: str) -> None:
        header = {
            "mesh": self.domain.h,
            "seed": int(self.seed),
            "replica": int(self.replica),
            "domain_hash": domain_hash(self.domain),
        }
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(header) + "\n")
            for loop in self.loops():
                fh.write(json.dumps(loop.tolist()) + "\n")


def domain_hash(domain: LatticeDomain) -> str:
    import hashlib
    hsh = hashlib.sha256()
    hsh.update(np.float64(domain.h).tobytes())
    hsh.update(domain.sites.tobytes())
    return hsh.hexdigest()[:16]


class SoupSampler:
    """Reusable sampler: precomputes rates and grid tables for a domain."""

    def __init__(self, domain: LatticeDomain):
        if len(domain) == 0:
            raise ConfigError("domain non-empty required")
        self.domain = domain
        self.rates, self.fret = site_rates(domain)
        ij = domain.sites
        self.i0 = int(ij[:, 0].min()) - 1
        self.j0 = int(ij[:, 1].min()) - 1
        hgt = int(ij[:, 0].max()) - self.i0 + 2
        wid = int(ij[:, 1].max()) - self.j0 + 2
        self.rank = np.full((hgt, wid), -1, dtype=np.int64)
        self.rank[ij[:, 0] - self.i0, ij[:, 1] - self.j0] = np.arange(len(domain))

    def sample(self, seed: int, replica: int = 0) -> SoupSample:
        bi, bj, offs = _sample_replica(
            self.rank, self.i0, self.j0, self.domain.sites,
            self.rates, self.fret, np.uint64(seed), np.uint64(replica))
        return SoupSample(self.domain, seed, replica,
                          np.column_stack([bi, bj]).astype(np.int64), offs)


def sample_soup(domain: LatticeDomain, seed: int, replica: int = 0) -> SoupSample:
    if len(domain) == 1:
        return SoupSample(domain, seed, replica,
                          np.empty((0, 2), dtype=np.int64),
                          np.zeros(1, dtype=np.int64))
    return SoupSampler(domain).sample(seed, replica)
