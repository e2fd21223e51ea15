import math

import pytest

from pilotopt.channel import ChannelParams
from pilotopt.energy import SweepCurve, SweepPoint, bit_energy, min_bit_energy, sweep_snr
from pilotopt.optimize import optimize_scheme


def test_bit_energy_values():
    assert bit_energy(1.0, 1.0) == pytest.approx(1.0)
    assert bit_energy(0.5, 1.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        bit_energy(0.0, 1.0)
    with pytest.raises(ValueError):
        bit_energy(1.0, 0.0)


def _point(snr_db, rate, period=5):
    lin = 10.0 ** (snr_db / 10.0)
    eb = lin / rate
    return SweepPoint(lin, snr_db, rate, 10.0 * math.log10(eb), period)


def test_min_bit_energy_prefers_lower_snr_on_ties():
    # the first two grid points tie for the least bit energy: report the quieter one
    pts = [_point(-6.0, 10.0 ** (-0.6) / 2.0), _point(-3.0, 10.0 ** (-0.3) / 2.0), _point(0.0, 0.4)]
    assert pts[0].bit_energy_db == pytest.approx(pts[1].bit_energy_db)
    assert pts[2].bit_energy_db > pts[0].bit_energy_db
    curve = SweepCurve(points=pts, params=ChannelParams(0.9), objective="bpsk")
    snr_db, eb_db = min_bit_energy(curve)
    assert snr_db == -6.0
    assert eb_db == pytest.approx(pts[0].bit_energy_db)


def test_min_bit_energy_empty_curve():
    curve = SweepCurve(points=[], params=ChannelParams(0.9), objective="bpsk")
    assert min_bit_energy(curve) is None


def test_sweep_grid_validation():
    template = ChannelParams(0.9, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        sweep_snr(template, [], "bpsk", 2, 8)
    with pytest.raises(ValueError):
        sweep_snr(template, [0.0, 0.0], "bpsk", 2, 8)
    with pytest.raises(ValueError):
        sweep_snr(template, [1.0, -1.0], "bpsk", 2, 8)


def test_sweep_single_point():
    template = ChannelParams(0.9, 1.0, 1.0, 0.0)
    curve = sweep_snr(template, [0.0], "bpsk", 2, 8, seed=0)
    assert len(curve.points) == 1
    p = curve.points[0]
    assert p.snr_linear == pytest.approx(1.0)
    assert p.bit_energy_db == pytest.approx(10.0 * math.log10(1.0 / p.best_rate_bits))


def test_sweep_rates_increase_with_snr():
    template = ChannelParams(0.9, 1.0, 1.0, 0.0)
    curve = sweep_snr(template, [-4.0, -2.0, 0.0, 2.0], "bpsk", 2, 16, seed=0)
    rates = [p.best_rate_bits for p in curve.points]
    assert all(b > a for a, b in zip(rates, rates[1:]))
    assert curve.converged


def test_sweep_windowed_search_matches_full_scan():
    # the warm-started window must land on the same winners as a cold scan
    template = ChannelParams(0.9, 1.0, 1.0, 0.0)
    grid = [-3.0, -1.5, 0.0, 1.5]
    curve = sweep_snr(template, grid, "bpsk", 2, 20, seed=0)
    for point in curve.points:
        params = ChannelParams(0.9, 1.0, 1.0, point.snr_linear)
        full = optimize_scheme(params, "bpsk", 2, 20, seed=0)
        assert point.best_period == full.best_period
        assert point.best_rate_bits == pytest.approx(full.best_rate_bits, rel=1e-7)


def test_sweep_skips_zero_rate_points():
    # memoryless channel: nothing is ever decodable, so no point has a bit energy
    template = ChannelParams(0.0, 1.0, 1.0, 0.0)
    curve = sweep_snr(template, [-2.0, 0.0], "bpsk", 2, 6, seed=0)
    assert curve.points == []
    assert min_bit_energy(curve) is None
