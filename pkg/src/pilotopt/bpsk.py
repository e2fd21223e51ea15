"""Binary-input mutual information per data slot and the frame-averaged rate.

Conditioned on the pilot observation, each data slot is a binary-input
complex Gaussian channel whose mutual information depends on everything only
through one effective SNR gamma.  Averaging that scalar function over the
exponentially distributed |estimate|^2 gives the slot rate, and averaging
slot rates over a frame (pilot slot contributing zero) gives the achievable
rate that the optimizer maximizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import ChannelParams, TrainingScheme, slot_snr_ratio

LN2 = math.log(2.0)

DEFAULT_HERMITE_ORDER = 64
DEFAULT_LAGUERRE_ORDER = 32


@dataclass(frozen=True)
class SlotRate:
    """Rate of one data slot, already averaged over the pilot observation."""

    offset: int
    rate_bits: float


@dataclass(eq=False)
class RateResult:
    """Per-slot rates and their frame average for one training scheme."""

    scheme: TrainingScheme
    slot_rates: list
    frame_rate_bits: float
    method: str  # one of bpsk, gaussian-lb, jensen-ub


@lru_cache(maxsize=None)
def _hermite_rule(order: int):
    t, w = np.polynomial.hermite.hermgauss(order)
    return t, w


@lru_cache(maxsize=None)
def _laguerre_rule(order: int):
    u, w = np.polynomial.laguerre.laggauss(order)
    return u, w


def bpsk_mi(gamma, hermite_order: int = DEFAULT_HERMITE_ORDER):
    """Mutual information in bits of equiprobable binary signaling at SNR gamma.

    gamma is the complex-channel SNR |m|^2 / sigma^2 of a channel
    y = m*x + w with x = +-1 and circular complex noise.  After derotation
    the real part is sufficient and carries half the complex noise variance,
    which is where the factors of 4 in the exponent come from.  Strictly
    increasing, 0 at gamma = 0, saturating at 1 bit.

    Vectorized over gamma; negative or non-finite inputs are rejected.
    """
    g = np.asarray(gamma, dtype=float)
    if g.size and (np.any(~np.isfinite(g)) or np.any(g < 0.0)):
        raise ValueError("gamma must be finite and nonnegative")
    t, w = _hermite_rule(hermite_order)
    expo = -4.0 * g[..., None] - 4.0 * np.sqrt(g[..., None]) * t
    # log(1 + e^expo) without overflow for large positive exponents
    softplus = np.logaddexp(0.0, expo)
    out = 1.0 - (softplus @ w) / (math.sqrt(math.pi) * LN2)
    out = np.clip(out, 0.0, 1.0)  # quadrature roundoff at the endpoints
    return out if out.ndim else float(out)


def _slot_rate_from_ratio(
    rho,
    hermite_order: int = DEFAULT_HERMITE_ORDER,
    laguerre_order: int = DEFAULT_LAGUERRE_ORDER,
):
    """Average bpsk_mi(rho * u) over the unit-mean exponential u, elementwise."""
    u, w = _laguerre_rule(laguerre_order)
    r = np.asarray(rho, dtype=float)
    vals = bpsk_mi(r[..., None] * u, hermite_order)
    out = vals @ w
    return out if out.ndim else float(out)


def bpsk_slot_rate(
    params: ChannelParams,
    pilot_power,
    data_power,
    offset: int,
    hermite_order: int = DEFAULT_HERMITE_ORDER,
    laguerre_order: int = DEFAULT_LAGUERRE_ORDER,
) -> float:
    """Rate in bits of the data slot `offset` symbols after the pilot."""
    if offset < 1 or int(offset) != offset:
        raise ValueError("offset must be an integer >= 1")
    if data_power < 0.0:
        raise ValueError("data_power must be nonnegative")
    rho = slot_snr_ratio(params, pilot_power, data_power, offset)
    return float(_slot_rate_from_ratio(rho, hermite_order, laguerre_order))


def bpsk_frame_rate(
    scheme: TrainingScheme,
    params: ChannelParams,
    hermite_order: int = DEFAULT_HERMITE_ORDER,
    laguerre_order: int = DEFAULT_LAGUERRE_ORDER,
) -> RateResult:
    """Frame-averaged rate of a training scheme; the pilot slot contributes zero."""
    offsets = np.arange(1, scheme.period)
    rho = slot_snr_ratio(params, scheme.pilot_power, scheme.data_powers, offsets)
    rates = np.atleast_1d(_slot_rate_from_ratio(rho, hermite_order, laguerre_order))
    slot_rates = [SlotRate(int(k), float(r)) for k, r in zip(offsets, rates)]
    return RateResult(
        scheme=scheme,
        slot_rates=slot_rates,
        frame_rate_bits=float(rates.sum() / scheme.period),
        method="bpsk",
    )
