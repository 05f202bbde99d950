"""Small-tube probabilities for scaled Brownian motion.

The ratio P(sup|√κ·B − φ| < ε) / P(sup|√κ·B| < ε) converges, as the tube
radius ε shrinks, to exp(−E(φ)/κ) with E the Dirichlet energy of the
target path.  Tube probabilities at useful radii are far below direct
Monte Carlo reach (≈ e^{−31} at ε = 0.2), so each one is estimated by
stage-wise splitting: particles evolve in blocks, the surviving fraction
of each block multiplies the running estimate, and survivors are
resampled back to full population before the next block.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError, EstimateError
from .identities import IdentityReport, _report
from .loewner import DrivingFunction, dirichlet_energy


def _resample_path(phi: np.ndarray, steps: int) -> np.ndarray:
    """Values of the piecewise-linear interpolant of ``phi`` on the
    uniform grid with ``steps`` intervals over [0, 1]."""
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 1 or phi.size < 2:
        raise ConfigError("path must be a 1-d array with at least two samples")
    if not np.all(np.isfinite(phi)):
        raise ConfigError("path samples must be finite")
    if abs(phi[0]) > 1e-15:
        raise ConfigError("path must start at 0")
    src = np.linspace(0.0, 1.0, phi.size)
    dst = np.linspace(0.0, 1.0, steps + 1)
    return np.interp(dst, src, phi)


def path_energy(phi: np.ndarray) -> float:
    """Dirichlet energy ½∫φ′² of the piecewise-linear path."""
    phi = np.asarray(phi, dtype=float)
    t = np.linspace(0.0, 1.0, phi.size)
    return dirichlet_energy(DrivingFunction(t, phi))


def _log_tube_prob(target: np.ndarray, kappa: float, eps: float,
                   sample_count: int, block: int,
                   rng: np.random.Generator) -> tuple[float, float]:
    """Splitting estimate of log P(sup_k |√κ·B_{t_k} − target_k| < ε).

    Returns the log-probability and an approximate variance of the log
    estimate (block fractions treated as independent binomials).
    """
    steps = target.size - 1
    scale = math.sqrt(kappa / steps)
    x = np.zeros(sample_count)
    log_prob = 0.0
    var = 0.0
    for start in range(0, steps, block):
        width = min(block, steps - start)
        incs = rng.standard_normal((width, sample_count))
        pos = x + scale * np.cumsum(incs, axis=0)
        offsets = target[start + 1 : start + 1 + width, None]
        alive = np.all(np.abs(pos - offsets) < eps, axis=0)
        hits = int(alive.sum())
        if hits == 0:
            raise EstimateError("epsilon too small for sample budget")
        fraction = hits / sample_count
        log_prob += math.log(fraction)
        var += (1.0 - fraction) / (fraction * sample_count)
        survivors = pos[-1, alive]
        x = survivors[rng.integers(0, hits, size=sample_count)]
    return log_prob, var


def brownian_om_check(
    phi: np.ndarray,
    kappa: float,
    eps_schedule: tuple[float, ...] = (0.4, 0.3, 0.2),
    sample_count: int = 100_000,
    seed: int = 0,
    steps: int = 1024,
    block: int = 16,
) -> IdentityReport:
    """Tube-probability ratios against the exponential energy prediction.

    For each tube radius the target-path and reference (zero-path) tube
    probabilities use identically seeded streams, so a zero target gives
    ratio exactly 1 at any sample count.  The verdict requires the final
    ratio to match exp(−E(φ)/κ) within budget and the distance to the
    prediction not to grow along the schedule beyond noise.
    """
    if kappa <= 0.0:
        raise ConfigError("kappa must be positive")
    if len(eps_schedule) == 0 or any(np.diff(eps_schedule) >= 0):
        raise ConfigError("eps schedule must be non-empty and decreasing")
    if sample_count < 1000:
        raise ConfigError("sample budget too small")
    target = _resample_path(phi, steps)
    zero = np.zeros(steps + 1)
    prediction = math.exp(-path_energy(phi) / kappa)

    ratios: list[float] = []
    log_errs: list[float] = []
    for eps in eps_schedule:
        log_num, var_num = _log_tube_prob(
            target, kappa, eps, sample_count, block,
            np.random.default_rng(seed))
        log_den, var_den = _log_tube_prob(
            zero, kappa, eps, sample_count, block,
            np.random.default_rng(seed))
        ratios.append(math.exp(log_num - log_den))
        log_errs.append(math.sqrt(var_num + var_den))

    final = ratios[-1]
    final_err = final * log_errs[-1]
    distances = [abs(r - prediction) for r in ratios]
    sigmas = [r * e for r, e in zip(ratios, log_errs)]
    trending = all(
        distances[k + 1] <= distances[k] + 3.0 * sigmas[k]
        for k in range(len(ratios) - 1)
    )
    discrepancy = abs(final - prediction) if trending else np.inf
    return _report(
        "brownian-tube-ratio",
        final,
        prediction,
        final_err,
        0.0,
        allowance=0.1 * prediction,
        provenance={"kappa": kappa, "eps_schedule": list(eps_schedule),
                    "sample_count": sample_count, "seed": seed,
                    "steps": steps, "block": block},
        details={"ratios": ratios, "ratio_stderr": sigmas,
                 "energy": path_energy(phi), "trending": trending},
        discrepancy=discrepancy,
    )
