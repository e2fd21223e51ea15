"""Energy-per-bit figures and SNR sweeps.

Each sweep point re-optimizes the whole training scheme at that SNR and
records the best rate, the winning period, and the resulting bit energy
Eb/N0 = SNR / rate.  Curves are plain data; the CLI serializes them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .channel import ChannelParams
from .optimize import OptimizationResult, default_t_max, optimize_scheme

_WINDOW = 6  # how far the per-point period search looks around the previous winner


@dataclass(frozen=True)
class SweepPoint:
    snr_linear: float
    snr_db: float
    best_rate_bits: float
    bit_energy_db: float
    best_period: int


@dataclass(eq=False)
class SweepCurve:
    """(SNR, rate, Eb/N0, T*) tuples along an ascending SNR grid."""

    points: list
    params: ChannelParams
    objective: str
    converged: bool = True


def bit_energy(rate_bits: float, snr_linear: float) -> float:
    """Energy per information bit over noise density, linear: SNR / rate."""
    if rate_bits <= 0.0:
        raise ValueError("rate must be positive; a zero-rate point has no bit energy")
    if snr_linear <= 0.0:
        raise ValueError("snr must be positive")
    return snr_linear / rate_bits


def _merge_scan(params, objective, t_lo, t_hi, bound_lo, bound_hi, seed) -> OptimizationResult:
    """optimize_scheme over [t_lo, t_hi], expanding while the argmax sits on an
    edge that is not a hard bound.  Merged per-period maps keep the result
    identical to one full-range call as long as rate-vs-T is unimodal."""
    result = optimize_scheme(params, objective, t_lo, t_hi, seed=seed)
    per_period = dict(result.per_period)
    while True:
        best_T = _argmax_period(per_period)
        lo, hi = min(per_period), max(per_period)
        if best_T == lo and lo > bound_lo:
            ext = optimize_scheme(params, objective, max(bound_lo, lo - _WINDOW), lo - 1, seed=seed)
        elif best_T == hi and hi < bound_hi:
            ext = optimize_scheme(params, objective, hi + 1, min(bound_hi, hi + _WINDOW), seed=seed)
        else:
            break
        per_period.update(ext.per_period)
    best_T = _argmax_period(per_period)
    best = per_period[best_T]
    return OptimizationResult(
        per_period=per_period,
        best_period=best_T,
        best_scheme=best.scheme,
        best_rate_bits=best.rate_bits,
        objective=result.objective,
    )


def _argmax_period(per_period) -> int:
    best_rate = max(r.rate_bits for r in per_period.values())
    tol = 1e-9 * max(best_rate, 1e-300)
    return min(T for T, r in per_period.items() if r.rate_bits >= best_rate - tol)


def sweep_snr(
    params_template: ChannelParams,
    snr_grid_db,
    objective: str = "bpsk",
    t_min: int = 2,
    t_max=None,
    seed=0,
) -> SweepCurve:
    """Optimize the scheme at every SNR of an ascending dB grid.

    The winning period moves slowly along the grid, so after a full scan at
    the first point the search window just tracks the previous winner
    (growing again whenever the argmax lands on a window edge).  Points whose
    best rate is zero are omitted: they have no finite bit energy.
    """
    grid = [float(s) for s in snr_grid_db]
    if not grid:
        raise ValueError("snr grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("snr grid must be strictly increasing")
    if t_max is None:
        t_max = default_t_max(params_template.alpha)
    if not 2 <= t_min <= t_max:
        raise ValueError(f"need 2 <= t_min <= t_max, got [{t_min}, {t_max}]")

    points = []
    converged = True
    prev_T = None
    for snr_db in grid:
        snr = 10.0 ** (snr_db / 10.0)
        params = replace(params_template, power_budget=snr * params_template.sigma_n_sq)
        if prev_T is None:
            result = optimize_scheme(params, objective, t_min, t_max, seed=seed)
        else:
            lo = max(t_min, prev_T - _WINDOW)
            hi = min(t_max, prev_T + _WINDOW)
            result = _merge_scan(params, objective, lo, hi, t_min, t_max, seed)
        converged = converged and result.all_converged
        if result.best_rate_bits <= 0.0:
            continue
        prev_T = result.best_period
        points.append(
            SweepPoint(
                snr_linear=snr,
                snr_db=snr_db,
                best_rate_bits=result.best_rate_bits,
                bit_energy_db=10.0 * math.log10(bit_energy(result.best_rate_bits, snr)),
                best_period=result.best_period,
            )
        )
    return SweepCurve(points=points, params=params_template, objective=objective, converged=converged)


def min_bit_energy(curve: SweepCurve):
    """Grid point with the least bit energy, ties going to the lower SNR.

    Returns (snr_db, bit_energy_db), or None when the curve has no positive-
    rate points at all.
    """
    if not curve.points:
        return None
    best = None
    for p in curve.points:
        if best is None or p.bit_energy_db < best.bit_energy_db:
            best = p
    return (best.snr_db, best.bit_energy_db)
