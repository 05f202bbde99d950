"""Closed-form conformal test maps: Möbius, quadratic perturbation, and

compositions thereof, with exact derivatives and inverses."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, InversionError, OutsideDomainError
from .geometry import JordanCurve


@dataclass(frozen=True)
class ConformalTestMap:
    """Base class; subclasses implement _eval/_invert on arrays.

    ``domain_r`` declares the annulus 𝔸_r = {r < |z| < 1/r} (equivalently the
    disk of radius 1/r for maps injective there) on which injectivity is
    guaranteed; None means the whole plane.
    """

    domain_r: float | None = None

    # -- scalar front ends -------------------------------------------------
    def eval(self, z: complex, order: int = 0) -> complex:
        return complex(self.eval_many(np.asarray([z], dtype=complex), order)[0])

    def invert(self, w: complex, hint: complex = 0j) -> complex:
        return complex(self.invert_many(np.asarray([w], dtype=complex), hint)[0])

    # -- array interface ---------------------------------------------------
    def eval_many(self, z: np.ndarray, order: int = 0) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        self._check_domain(z)
        if order not in (0, 1, 2):
            raise ConfigError("derivative order must be 0, 1 or 2")
        return self._eval(z, order)

    def invert_many(self, w: np.ndarray, hint: complex | None = None) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        z = self._invert(w, hint)
        self._check_domain(z, inverted=True)
        return z

    def _check_domain(self, z: np.ndarray, inverted: bool = False) -> None:
        if self.domain_r is None:
            return
        az = np.abs(z)
        ok = az <= 1.0 / self.domain_r + 1e-9
        if not np.all(ok):
            if inverted:
                raise InversionError("inversion failed")
            raise OutsideDomainError("outside map domain")

    def _eval(self, z, order):  # pragma: no cover - abstract
        raise NotImplementedError

    def _invert(self, w, hint):  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class Mobius(ConformalTestMap):
    a: complex = 1.0 + 0j
    b: complex = 0j
    c: complex = 0j
    d: complex = 1.0 + 0j

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise ConfigError("Möbius determinant vanishes")

    def _eval(self, z, order):
        den = self.c * z + self.d
        if np.any(den == 0):
            raise OutsideDomainError("outside map domain")
        det = self.a * self.d - self.b * self.c
        if order == 0:
            return (self.a * z + self.b) / den
        if order == 1:
            return det / den**2
        return -2.0 * self.c * det / den**3

    def _invert(self, w, hint):
        den = -self.c * w + self.a
        if np.any(den == 0):
            raise InversionError("inversion failed")
        return (self.d * w - self.b) / den

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @staticmethod
    def from_matrix(m: np.ndarray, domain_r: float | None = None) -> "Mobius":
        return Mobius(domain_r, m[0, 0], m[0, 1], m[1, 0], m[1, 1])


@dataclass(frozen=True)
class Quadratic(ConformalTestMap):
    """z ↦ z + c z², injective on |z| < 1/(2|c|)."""

    c: complex = 0j

    def __post_init__(self):
        if self.domain_r is not None and abs(self.c) >= self.domain_r / 2.0:
            raise ConfigError("quadratic coefficient violates injectivity bound")

    def _eval(self, z, order):
        if order == 0:
            return z + self.c * z**2
        if order == 1:
            return 1.0 + 2.0 * self.c * z
        return np.full_like(z, 2.0 * self.c)

    def _invert(self, w, hint):
        if self.c == 0:
            return w.copy()
        # root of c z² + z − w = 0 nearest the hint
        disc = np.sqrt(1.0 + 4.0 * self.c * w)
        z1 = (-1.0 + disc) / (2.0 * self.c)
        z2 = (-1.0 - disc) / (2.0 * self.c)
        if hint is None:
            hint = 0j
        return np.where(np.abs(z1 - hint) <= np.abs(z2 - hint), z1, z2)


@dataclass(frozen=True)
class Composition(ConformalTestMap):
    """Apply ``maps`` left to right: z ↦ maps[-1](…maps[0](z))."""

    maps: tuple = ()

    def __post_init__(self):
        if len(self.maps) == 0:
            raise ConfigError("composition needs at least one map")

    def _eval(self, z, order):
        if order == 0:
            for m in self.maps:
                z = m.eval_many(z, 0)
            return z
        if order == 1:
            d = np.ones_like(z)
            for m in self.maps:
                d = d * m.eval_many(z, 1)
                z = m.eval_many(z, 0)
            return d
        # second derivative by chain rule: (g∘f)'' = g''∘f·f'² + g'∘f·f''
        d1 = np.ones_like(z)
        d2 = np.zeros_like(z)
        for m in self.maps:
            f1 = m.eval_many(z, 1)
            f2 = m.eval_many(z, 2)
            d2 = f2 * d1**2 + f1 * d2
            d1 = d1 * f1
            z = m.eval_many(z, 0)
        return d2

    def _invert(self, w, hint):
        hints = [hint]
        if hint is not None:
            h = np.asarray([hint], dtype=complex)
            for m in self.maps[:-1]:
                h = m.eval_many(h, 0)
                hints.append(complex(h[0]))
        else:
            hints = [None] * len(self.maps)
        for m, h in zip(reversed(self.maps), reversed(hints)):
            w = m.invert_many(w, hint=h)
        return w


def push_curve(m: ConformalTestMap, curve: JordanCurve,
               max_edge: float | None = None) -> JordanCurve:
    """Image polyline of ``curve`` under ``m``, adaptively refined so that

    consecutive image vertices are closer than ``max_edge`` (default 1/256 of
    the image diameter)."""
    w = m.eval_many(curve.vertices, 0)
    if max_edge is None:
        span = max(w.real.max() - w.real.min(), w.imag.max() - w.imag.min())
        max_edge = span / 256.0
    v = curve.vertices
    root = curve.root_index
    for _ in range(8):
        gaps = np.abs(w - np.roll(w, -1))
        if float(gaps.max()) <= max_edge:
            break
        splits = np.ceil(gaps / max_edge).astype(int)
        nxt = np.roll(v, -1)
        pieces = []
        new_root = 0
        for k in range(v.size):
            if k == root:
                new_root = sum(p.size for p in pieces)
            t = np.arange(splits[k]) / splits[k]
            pieces.append(v[k] + t * (nxt[k] - v[k]))
        v = np.concatenate(pieces)
        root = new_root
        w = m.eval_many(v, 0)
    area = 0.5 * float(np.sum(w.real * np.roll(w.imag, -1)
                              - np.roll(w.real, -1) * w.imag))
    return JordanCurve(w, area > 0, root)


def map_from_config(spec: dict) -> ConformalTestMap:
    """Parse the nested-record map description used in run configs."""
    if not isinstance(spec, dict) or "variant" not in spec:
        raise ConfigError("map spec needs a 'variant' field")
    variant = spec["variant"]
    domain_r = spec.get("domain_r")

    def _cplx(v):
        if isinstance(v, (list, tuple)):
            return complex(v[0], v[1] if len(v) > 1 else 0.0)
        return complex(v)

    if variant == "quadratic":
        return Quadratic(domain_r, _cplx(spec["c"]))
    if variant == "mobius":
        coeffs = [_cplx(c) for c in spec["coeffs"]]
        if len(coeffs) != 4:
            raise ConfigError("mobius needs four coefficients")
        return Mobius(domain_r, *coeffs)
    if variant == "composition":
        maps = tuple(map_from_config(s) for s in spec["maps"])
        return Composition(domain_r, maps)
    raise ConfigError(f"unknown map variant {variant!r}")


def identity_map() -> Mobius:
    return Mobius()
