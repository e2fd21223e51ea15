"""Worst-case-Gaussian rate bound and its Jensen surrogate.

Treating the product of the estimation error and the data symbol as extra
Gaussian noise gives a capacity lower bound per data slot:

    E[log2(1 + rho * |xi|^2)],   xi ~ CN(0, 1),

which has the closed form exp_e1_scaled(1/rho) / ln 2.  Pushing the
expectation inside the logarithm gives the cheaper Jensen upper bound
log2(1 + rho).  Both are used as optimization surrogates for the exact
binary-input objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bpsk import RateResult, SlotRate
from .channel import ChannelParams, TrainingScheme, error_variance, slot_snr_ratio

LN2 = math.log(2.0)
EULER_GAMMA = 0.5772156649015329

_SWITCH = 1.0  # series below, continued fraction above
_TOL = 1e-14
_MAX_ITER = 10**4
_RHO_FLOOR = 1e-300  # below this the slot carries nothing; avoids forming 1/rho


@dataclass(frozen=True)
class EffectiveNoise:
    """Total disturbance seen by one data slot: noise plus estimation-error leakage."""

    offset: int
    variance: float


def effective_noise(params: ChannelParams, pilot_power, data_power, offset) -> EffectiveNoise:
    var = error_variance(params, pilot_power, offset) * data_power + params.sigma_n_sq
    return EffectiveNoise(offset=int(offset), variance=float(var))


def _e1_series_scaled(x: np.ndarray) -> np.ndarray:
    """e^x E1(x) for x <= 1 via the alternating power series for E1."""
    total = -EULER_GAMMA - np.log(x)
    term = np.ones_like(x)  # (-x)^n / n!
    for n in range(1, _MAX_ITER + 1):
        term = term * (-x) / n
        contrib = -term / n
        total += contrib
        if np.all(np.abs(contrib) <= _TOL * np.abs(total)):
            break
    return np.exp(x) * total


def _e1_lentz_scaled(x: np.ndarray) -> np.ndarray:
    """e^x E1(x) for x > 1 via the modified Lentz continued fraction.

    The fraction is evaluated directly in scaled form, so no e^x factor is
    ever materialized and arbitrarily large x stays finite.
    """
    tiny = 1e-300
    b = x + 1.0
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _MAX_ITER + 1):
        a = -float(i * i)
        b = b + 2.0
        d = a * d + b
        np.copyto(d, tiny, where=np.abs(d) < tiny)
        c = b + a / c
        np.copyto(c, tiny, where=np.abs(c) < tiny)
        d = 1.0 / d
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= _TOL):
            break
    return h


def exp_e1_scaled(x):
    """e^x E1(x), the scaled exponential integral, for positive x.

    Decreasing from +inf at 0+ to 0, with x * exp_e1_scaled(x) -> 1 as
    x -> inf.  Scalar in, scalar out; arrays are handled elementwise.
    """
    arr = np.asarray(x, dtype=float)
    if arr.size and (np.any(~np.isfinite(arr)) or np.any(arr <= 0.0)):
        raise ValueError("x must be finite and positive")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    low = arr <= _SWITCH
    if low.any():
        out[low] = _e1_series_scaled(arr[low])
    if (~low).any():
        out[~low] = _e1_lentz_scaled(arr[~low])
    return float(out[0]) if scalar else out


def _slot_rate_from_ratio(rho):
    """E[log2(1 + rho |xi|^2)] elementwise; zero where rho is (essentially) zero."""
    r = np.atleast_1d(np.asarray(rho, dtype=float))
    out = np.zeros_like(r)
    live = r > _RHO_FLOOR
    if live.any():
        out[live] = exp_e1_scaled(1.0 / r[live]) / LN2
    return out


def gaussian_slot_rate(params: ChannelParams, pilot_power, data_power, offset) -> float:
    """Lower-bound rate in bits of one data slot under the Gaussian-noise model."""
    if data_power < 0.0:
        raise ValueError("data_power must be nonnegative")
    rho = slot_snr_ratio(params, pilot_power, data_power, offset)
    return float(_slot_rate_from_ratio(rho)[0])


def gaussian_frame_rate(scheme: TrainingScheme, params: ChannelParams) -> RateResult:
    """Frame-averaged Gaussian-bound rate; the pilot slot contributes zero."""
    offsets = np.arange(1, scheme.period)
    rho = slot_snr_ratio(params, scheme.pilot_power, scheme.data_powers, offsets)
    rates = _slot_rate_from_ratio(rho)
    slot_rates = [SlotRate(int(k), float(r)) for k, r in zip(offsets, rates)]
    return RateResult(
        scheme=scheme,
        slot_rates=slot_rates,
        frame_rate_bits=float(rates.sum() / scheme.period),
        method="gaussian-lb",
    )


def jensen_frame_rate(scheme: TrainingScheme, params: ChannelParams) -> RateResult:
    """Frame rate with the expectation moved inside the log: (1/T) sum log2(1 + rho_k)."""
    offsets = np.arange(1, scheme.period)
    rho = slot_snr_ratio(params, scheme.pilot_power, scheme.data_powers, offsets)
    rates = np.log1p(rho) / LN2
    slot_rates = [SlotRate(int(k), float(r)) for k, r in zip(offsets, rates)]
    return RateResult(
        scheme=scheme,
        slot_rates=slot_rates,
        frame_rate_bits=float(rates.sum() / scheme.period),
        method="jensen-ub",
    )
