"""Chordal Loewner numerics: the geodesic zipper, forward traces, and

Dirichlet energy of driving functions.

Conventions: time is half-plane capacity (a vertical slit of height h has
capacity h²/4), so the slit map at driving value ξ with capacity increment
τ is w ↦ ξ + √((w−ξ)² + 4τ).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, ZipperError


@dataclass(frozen=True)
class DrivingFunction:
    """Sampled driving function (t_i, W_i), t strictly increasing, t_0 = 0."""

    t: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "w", w)
        if t.shape != w.shape or t.ndim != 1 or t.size < 1:
            raise ConfigError("driving samples must be matching 1-d arrays")
        if abs(t[0]) > 1e-15:
            raise ConfigError("driving time must start at 0")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(w)):
            raise ConfigError("driving samples must be finite")

    def to_csv(self, path: str) -> None:
        np.savetxt(path, np.column_stack([self.t, self.w]),
                   delimiter=",", header="t,W", comments="")

    @staticmethod
    def from_csv(path: str) -> "DrivingFunction":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return DrivingFunction(data[:, 0], data[:, 1])


def dirichlet_energy(d: DrivingFunction) -> float:
    """½ ∫ (dW/dt)² dt of the piecewise-linear interpolant."""
    dt = np.diff(d.t)
    if d.t.size < 2:
        return 0.0
    if np.any(dt <= 0):
        raise ConfigError("degenerate time step")
    dw = np.diff(d.w)
    return 0.5 * float(np.sum(dw * dw / dt))


def _slit_sqrt(v: np.ndarray, d: float) -> np.ndarray:
    """√(v² + d²) mapping ℍ∖[0, id] → ℍ, asymptotic to v at infinity."""
    s = np.sqrt(v * v + d * d)
    return np.where(v.real < 0.0, -s, s)


def zip_step(points: np.ndarray, zeta: complex, base: float):
    """One geodesic-zipper step.

    Maps ℍ minus the hyperbolic geodesic from ``base`` (on ℝ) through
    ``zeta`` back onto ℍ, hydrodynamically normalized.  Returns the images
    of ``points``, the capacity increment, and the new driving value.
    """
    u = zeta - base
    x, y = u.real, u.imag
    tau = x * x / 8.0 + y * y / 4.0
    new_w = base + 1.5 * x
    v = points - base
    if abs(x) < 1e-12 * y:
        return base + _slit_sqrt(v, y), tau, new_w
    r2 = x * x + y * y
    p = r2 / x
    d = r2 / y
    q = math.hypot(p, d)
    sigma = 1.0 if x > 0 else -1.0
    mv = p * v / (p - v)
    c = _slit_sqrt(mv, d)
    g = c + sigma * q
    # where the branch sign of c opposes sigma, c + sigma*q cancels at large
    # |v|; use the equivalent form sigma*(p² − M²)/(q + |c|) there
    cancel = (np.sign(mv.real) != sigma) & (mv.real != 0.0)
    if np.any(cancel):
        vc = v[cancel]
        su = np.sqrt(mv[cancel] ** 2 + d * d)
        g = g.astype(complex)
        g[cancel] = sigma * p**3 * (p - 2.0 * vc) / ((p - vc) ** 2 * (q + su))
    amp = abs(p) ** 3 / q
    shift = base + p * (1.5 * d * d + p * p) / (q * q)
    return shift - amp / g, tau, new_w


def extract_driving(arc: np.ndarray, tol: float | None = None) -> DrivingFunction:
    """Driving function of an arc in ℍ via the geodesic zipper.

    ``arc[0]`` must lie on ℝ (within tolerance); the rest strictly in ℍ.
    Returns one (t, W) sample per vertex, t_0 = 0.
    """
    pts = np.asarray(arc, dtype=complex).copy()
    if pts.size < 2:
        raise ConfigError("arc needs at least 2 points")
    scale = float(np.abs(pts - pts[0]).max())
    if tol is None:
        tol = 1e-9 * scale
    if abs(pts[0].imag) > tol:
        raise ConfigError("arc must start on the real axis")
    n = pts.size
    t = np.zeros(n)
    w = np.zeros(n)
    w[0] = pts[0].real
    base = w[0]
    for k in range(1, n):
        zeta = pts[k]
        if zeta.imag <= 0.0:
            raise ZipperError("arc self-intersects under zipper")
        pts[k + 1:], tau, base = zip_step(pts[k + 1:], zeta, base)
        t[k] = t[k - 1] + tau
        w[k] = base
    return DrivingFunction(t, w)


def trace_from_driving(d: DrivingFunction, step: float | None = None) -> np.ndarray:
    """Trace tips of the chordal Loewner evolution driven by ``d``.

    Each driving interval is split into capacity sub-steps of size ≤ ``step``
    with linearly interpolated W, the hull grows by vertical-slit increments,
    and tips are recovered by backward composition of the inverse slit maps.
    Returns one tip per input sample (tip at t=0 is W_0).
    """
    if d.t.size < 2:
        raise ConfigError("need at least two driving samples")
    dt = np.diff(d.t)
    if np.any(dt <= 0):
        raise ConfigError("degenerate time step")
    if step is None:
        step = float(d.t[-1]) / 1024.0
    # refined grid: sub-steps per interval, remembering sample positions
    ts = [np.array([0.0])]
    ws = [np.array([d.w[0]])]
    sample_at = [0]
    for i in range(dt.size):
        m = max(1, int(np.ceil(dt[i] / step)))
        frac = np.arange(1, m + 1) / m
        ts.append(d.t[i] + frac * dt[i])
        ws.append(d.w[i] + frac * (d.w[i + 1] - d.w[i]))
        sample_at.append(sample_at[-1] + m)
    t = np.concatenate(ts)
    w = np.concatenate(ws)
    m = t.size - 1  # number of slit increments
    xi = 0.5 * (w[:-1] + w[1:])  # driving value per increment
    tau = np.diff(t)
    # seeds: tip after k increments starts at the driving point w[k]
    z = w.astype(complex).copy()
    for j in range(m, 0, -1):
        # apply inverse slit map of increment j to all tips with k >= j
        sl = slice(j, None)
        v = z[sl] - xi[j - 1]
        s = np.sqrt(v * v - 4.0 * tau[j - 1])
        s = np.where(s.imag < 0.0, -s, s)
        # on the real axis keep the sign matching v so ±∞ stay put
        real_mask = (s.imag == 0.0)
        s = np.where(real_mask & (np.sign(s.real) != np.sign(v.real)), -s, s)
        z[sl] = xi[j - 1] + s
    return z[np.asarray(sample_at)]
