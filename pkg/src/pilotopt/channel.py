"""Gauss-Markov fading model and the single-pilot MMSE channel estimator.

The channel gain is a first-order autoregression over complex values,
h_k = alpha * h_{k-1} + z_k, stationary with variance sigma_h_sq.  One pilot
symbol per frame produces a noisy observation from which the gains of the
following data slots are estimated; estimation quality decays geometrically
with the distance from the pilot, which is what makes the training period a
quantity worth optimizing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter


@dataclass(frozen=True)
class ChannelParams:
    """Static description of the link.

    Parameters
    ----------
    alpha : fading correlation between consecutive symbols, in [0, 1]
    sigma_h_sq : variance of the stationary fading gain (linear power)
    sigma_n_sq : additive noise variance (linear power)
    power_budget : average transmit power per symbol (linear)
    """

    alpha: float
    sigma_h_sq: float = 1.0
    sigma_n_sq: float = 1.0
    power_budget: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.sigma_h_sq <= 0.0:
            raise ValueError("sigma_h_sq must be positive")
        if self.sigma_n_sq <= 0.0:
            raise ValueError("sigma_n_sq must be positive")
        if self.power_budget < 0.0:
            raise ValueError("power_budget must be nonnegative")

    @property
    def snr(self) -> float:
        return self.power_budget / self.sigma_n_sq


@dataclass(frozen=True, eq=False)
class TrainingScheme:
    """One pilot followed by period - 1 data symbols and their power split."""

    period: int
    pilot_power: float
    data_powers: np.ndarray

    def __post_init__(self):
        if int(self.period) != self.period or self.period < 2:
            raise ValueError("period must be an integer >= 2")
        object.__setattr__(self, "period", int(self.period))
        pd = np.asarray(self.data_powers, dtype=float)
        object.__setattr__(self, "data_powers", pd)
        if pd.shape != (self.period - 1,):
            raise ValueError("data_powers must have length period - 1")
        if self.pilot_power < 0.0 or np.any(pd < 0.0):
            raise ValueError("powers must be nonnegative")

    @property
    def total_power(self) -> float:
        return float(self.pilot_power + self.data_powers.sum())

    def fits_budget(self, params: ChannelParams, rel_tol: float = 1e-9) -> bool:
        """Whether pilot plus data power stays within period * power_budget."""
        cap = params.power_budget * self.period
        return self.total_power <= cap * (1.0 + rel_tol) + 1e-300


@dataclass(eq=False)
class FadingPath:
    """A sampled realization of the fading process plus the seed that made it."""

    gains: np.ndarray
    seed: int


def estimator_gain(params: ChannelParams, pilot_power) -> float:
    """Coefficient applied to the pilot observation to form the MMSE estimate."""
    if pilot_power < 0.0:
        raise ValueError("pilot_power must be nonnegative")
    num = math.sqrt(pilot_power) * params.sigma_h_sq
    return num / (pilot_power * params.sigma_h_sq + params.sigma_n_sq)


def estimate_variance(params: ChannelParams, pilot_power, offset):
    """Variance of the channel estimate `offset` symbols after the pilot.

    Accepts a scalar or an array of offsets.  The value decays as
    alpha^(2*offset): older pilots tell us less about the current gain.
    """
    if pilot_power < 0.0:
        raise ValueError("pilot_power must be nonnegative")
    off = np.asarray(offset)
    if np.any(off < 0):
        raise ValueError("offset must be nonnegative")
    base = (
        pilot_power
        * params.sigma_h_sq**2
        / (pilot_power * params.sigma_h_sq + params.sigma_n_sq)
    )
    out = base * params.alpha ** (2.0 * off)
    return out if out.ndim else float(out)


def error_variance(params: ChannelParams, pilot_power, offset):
    """Variance of the estimation error, the complement of estimate_variance."""
    out = params.sigma_h_sq - estimate_variance(params, pilot_power, offset)
    return out if isinstance(out, np.ndarray) and out.ndim else float(out)


def slot_snr_ratio(params: ChannelParams, pilot_power, data_power, offset):
    """Mean effective SNR of a data slot: sigma_hhat^2 Pd / (sigma_herr^2 Pd + sigma_n^2).

    This single ratio is the only way a (pilot power, data power, offset)
    triple enters any of the rate expressions.  Vectorized over `offset`
    and/or `data_power`.
    """
    est = estimate_variance(params, pilot_power, offset)
    err = params.sigma_h_sq - est
    pd = np.asarray(data_power, dtype=float)
    if np.any(pd < 0.0):
        raise ValueError("data_power must be nonnegative")
    out = est * pd / (err * pd + params.sigma_n_sq)
    return out if out.ndim else float(out)


def sample_fading_path(params: ChannelParams, length: int, seed) -> FadingPath:
    """Draw one realization of the fading process.

    h_0 comes from the stationary distribution; each later gain follows the
    recursion with innovation variance (1 - alpha^2) * sigma_h_sq.  The same
    seed always reproduces the same path.
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    rng = np.random.default_rng(seed)
    a = params.alpha
    h0_sd = math.sqrt(params.sigma_h_sq / 2.0)
    h0 = complex(rng.normal(scale=h0_sd), rng.normal(scale=h0_sd))
    if length == 1:
        return FadingPath(np.array([h0], dtype=complex), seed)
    innov_sd = math.sqrt((1.0 - a * a) * params.sigma_h_sq / 2.0)
    z = rng.normal(scale=innov_sd, size=(length - 1, 2)) @ np.array([1.0, 1.0j])
    # the AR(1) recursion is an IIR filter with denominator (1, -alpha)
    driven = np.concatenate(([h0], z))
    gains = lfilter([1.0], [1.0, -a], driven)
    return FadingPath(gains, seed)
