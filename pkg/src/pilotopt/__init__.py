"""Achievable rates and power allocation for pilot-assisted transmission
over time-correlated (Gauss-Markov) Rayleigh fading channels."""

from .bpsk import RateResult, SlotRate, bpsk_frame_rate, bpsk_mi, bpsk_slot_rate
from .channel import (
    ChannelParams,
    FadingPath,
    TrainingScheme,
    error_variance,
    estimate_variance,
    estimator_gain,
    sample_fading_path,
)
from .energy import SweepCurve, SweepPoint, bit_energy, min_bit_energy, sweep_snr
from .gaussian import (
    EffectiveNoise,
    effective_noise,
    exp_e1_scaled,
    gaussian_frame_rate,
    gaussian_slot_rate,
    jensen_frame_rate,
)
from .montecarlo import (
    EstimatorStats,
    mc_bpsk_mi,
    mc_frame_rate,
    validate_estimator,
)
from .optimize import (
    AllocationResult,
    OptimizationResult,
    default_t_max,
    optimize_allocation,
    optimize_scheme,
    project_onto_budget,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationResult",
    "ChannelParams",
    "EffectiveNoise",
    "EstimatorStats",
    "FadingPath",
    "OptimizationResult",
    "RateResult",
    "SlotRate",
    "SweepCurve",
    "SweepPoint",
    "TrainingScheme",
    "bit_energy",
    "bpsk_frame_rate",
    "bpsk_mi",
    "bpsk_slot_rate",
    "default_t_max",
    "effective_noise",
    "error_variance",
    "estimate_variance",
    "estimator_gain",
    "exp_e1_scaled",
    "gaussian_frame_rate",
    "gaussian_slot_rate",
    "jensen_frame_rate",
    "mc_bpsk_mi",
    "mc_frame_rate",
    "min_bit_energy",
    "optimize_allocation",
    "optimize_scheme",
    "project_onto_budget",
    "sample_fading_path",
    "sweep_snr",
    "validate_estimator",
]
