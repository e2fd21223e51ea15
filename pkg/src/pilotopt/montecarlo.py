"""Simulation counterparts of the analytic estimator moments and rate formulas.

Everything here is a plain Monte Carlo average with a reported standard
error; callers (the CLI validator and the test suite) compare analytic
values against 3-standard-error bands.  Work is batched and every batch
draws from its own child seed, so accumulation order is deterministic and
the batches could run in parallel without changing a single bit of the
result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    ChannelParams,
    TrainingScheme,
    error_variance,
    estimate_variance,
    estimator_gain,
    slot_snr_ratio,
)

LN2 = math.log(2.0)

_BATCH = 1 << 14


@dataclass(eq=False)
class EstimatorStats:
    """Empirical second moments of the estimator, one row per slot offset.

    per_offset rows are (offset, estimate_variance, error_variance,
    cross_correlation); the cross term is normalized, so MMSE orthogonality
    makes it shrink like 1/sqrt(frames).
    """

    per_offset: list
    frames: int
    seed: object


def _batch_rngs(seed, count):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _batch_sizes(total):
    sizes = [_BATCH] * (total // _BATCH)
    if total % _BATCH:
        sizes.append(total % _BATCH)
    return sizes


def _complex_normal(rng, size, variance):
    sd = math.sqrt(variance / 2.0)
    return rng.normal(scale=sd, size=size) + 1j * rng.normal(scale=sd, size=size)


def _sample_frame_gains(rng, params: ChannelParams, count, period):
    """count independent frames of true gains, shape (count, period)."""
    a = params.alpha
    h = np.empty((count, period), dtype=complex)
    h[:, 0] = _complex_normal(rng, count, params.sigma_h_sq)
    innov_var = (1.0 - a * a) * params.sigma_h_sq
    for d in range(1, period):
        h[:, d] = a * h[:, d - 1] + _complex_normal(rng, count, innov_var)
    return h


def validate_estimator(params: ChannelParams, scheme: TrainingScheme, frames: int, seed) -> EstimatorStats:
    """Simulate pilot frames and accumulate the estimator's second moments."""
    if frames < 1:
        raise ValueError("frames must be at least 1")
    T = scheme.period
    g = estimator_gain(params, scheme.pilot_power)
    decay = params.alpha ** np.arange(T, dtype=float)
    sum_est = np.zeros(T)
    sum_err = np.zeros(T)
    sum_cross = np.zeros(T, dtype=complex)
    sizes = _batch_sizes(frames)
    for rng, m in zip(_batch_rngs(seed, len(sizes)), sizes):
        h = _sample_frame_gains(rng, params, m, T)
        noise0 = _complex_normal(rng, m, params.sigma_n_sq)
        y0 = math.sqrt(scheme.pilot_power) * h[:, 0] + noise0
        h_hat = (g * y0)[:, None] * decay
        h_err = h - h_hat
        sum_est += (np.abs(h_hat) ** 2).sum(axis=0)
        sum_err += (np.abs(h_err) ** 2).sum(axis=0)
        sum_cross += (h_hat * np.conj(h_err)).sum(axis=0)
    per_offset = []
    for d in range(T):
        est = sum_est[d] / frames
        err = sum_err[d] / frames
        denom = math.sqrt(est * err)
        cross = complex(sum_cross[d] / frames / denom) if denom > 0 else 0.0
        per_offset.append((d, float(est), float(err), cross))
    return EstimatorStats(per_offset=per_offset, frames=frames, seed=seed)


def _info_density(llr):
    # 1 - log2(1 + e^(-llr)), kept stable for any llr sign
    return 1.0 - np.logaddexp(0.0, -llr) / LN2


def mc_bpsk_mi(gamma: float, samples: int, seed) -> tuple:
    """Estimate the binary-input mutual information at SNR gamma by sampling.

    Draws equiprobable symbols through y = sqrt(gamma)*x + w with unit
    complex noise and averages the information density of the true
    likelihood ratio.  Returns (estimate, standard_error).
    """
    if samples < 10**3:
        raise ValueError("samples must be at least 1000")
    if not np.isfinite(gamma) or gamma < 0.0:
        raise ValueError("gamma must be finite and nonnegative")
    amp = math.sqrt(gamma)
    total = 0.0
    total_sq = 0.0
    sizes = _batch_sizes(samples)
    for rng, m in zip(_batch_rngs(seed, len(sizes)), sizes):
        x = rng.integers(0, 2, size=m) * 2.0 - 1.0
        w = _complex_normal(rng, m, 1.0)
        y = amp * x + w
        dens = _info_density(4.0 * amp * y.real * x)
        total += dens.sum()
        total_sq += (dens * dens).sum()
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return float(mean), float(math.sqrt(var / samples))


def mc_frame_rate(
    scheme: TrainingScheme,
    params: ChannelParams,
    samples: int,
    seed,
    objective: str = "bpsk",
) -> tuple:
    """Sampled frame rate of a scheme, (estimate, standard_error).

    bpsk: draws the pilot observation, forms the per-slot estimates, then
    runs true gains and noise through each data slot and averages the
    information density of the estimate-based likelihood ratio.
    gaussian-lb: draws the |xi|^2 exponential variate per slot and averages
    log2(1 + rho |xi|^2) with the analytic per-slot ratio rho.
    """
    if samples < 10**3:
        raise ValueError("samples must be at least 1000")
    if objective not in ("bpsk", "gaussian", "gaussian-lb"):
        raise ValueError(f"objective must be bpsk or gaussian-lb, got {objective!r}")
    T = scheme.period
    offsets = np.arange(1, T)
    pd = scheme.data_powers
    total = 0.0
    total_sq = 0.0
    sizes = _batch_sizes(samples)
    if objective == "bpsk":
        g = estimator_gain(params, scheme.pilot_power)
        decay = params.alpha**offsets.astype(float)
        err = error_variance(params, scheme.pilot_power, offsets)
        sigma_w_sq = err * pd + params.sigma_n_sq
        amp = np.sqrt(pd)
        for rng, m in zip(_batch_rngs(seed, len(sizes)), sizes):
            h = _sample_frame_gains(rng, params, m, T)
            y0 = math.sqrt(scheme.pilot_power) * h[:, 0] + _complex_normal(
                rng, m, params.sigma_n_sq
            )
            h_hat = (g * y0)[:, None] * decay
            x = (rng.integers(0, 2, size=(m, T - 1)) * 2.0 - 1.0) * amp
            noise = _complex_normal(rng, (m, T - 1), params.sigma_n_sq)
            y = h[:, 1:] * x + noise
            llr = 4.0 * (np.conj(h_hat * x) * y).real / sigma_w_sq
            frame_vals = _info_density(llr).sum(axis=1) / T
            total += frame_vals.sum()
            total_sq += (frame_vals * frame_vals).sum()
    else:
        rho = np.atleast_1d(slot_snr_ratio(params, scheme.pilot_power, pd, offsets))
        for rng, m in zip(_batch_rngs(seed, len(sizes)), sizes):
            u = rng.exponential(1.0, size=(m, T - 1))
            frame_vals = (np.log1p(rho * u) / LN2).sum(axis=1) / T
            total += frame_vals.sum()
            total_sq += (frame_vals * frame_vals).sum()
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return float(mean), float(math.sqrt(var / samples))
