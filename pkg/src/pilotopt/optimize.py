"""Joint pilot/data power allocation and the integer search over the period.

For a fixed period T the problem is: maximize the frame rate over the
nonnegative powers (pilot first, then T-1 data slots) that sum to the frame
budget P*T.  The objective is smooth but not concave, so the solver is
projected gradient ascent with central-difference gradients, a backtracking
line search, and several restarts; the outer search then just scans T.

All three objectives share one code path through a per-slot rate function of
the effective SNR ratio.  The binary-input objective is evaluated through a
dense cubic-spline table of that one-dimensional function (built once per
quadrature-order pair, error ~1e-13) because the optimizer calls it a few
million times; final reported rates are always recomputed with the exact
quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import bpsk as _bpsk
from . import gaussian as _gaussian
from .channel import ChannelParams, TrainingScheme, estimate_variance

GRAD_STEP_SCALE = 1e-6
ARMIJO_C = 1e-4
GRAD_PROJ_TOL = 1e-8
MAX_ITERATIONS = 5000
RESTARTS = 8  # uniform, pilot-heavy, geometric decay, 5 Dirichlet draws

_METHOD_TAGS = {
    "bpsk": "bpsk",
    "gaussian": "gaussian-lb",
    "gaussian-lb": "gaussian-lb",
    "jensen": "jensen-ub",
    "jensen-ub": "jensen-ub",
}


def default_t_max(alpha: float) -> int:
    """Default upper end of the period scan; longer coherence earns a longer scan."""
    if alpha >= 1.0:
        return 128
    # the small backoff keeps ceil() from overshooting when 4/(1-alpha)
    # lands a rounding error above an integer (e.g. alpha = 0.9)
    return min(128, max(8, math.ceil(4.0 / (1.0 - alpha) - 1e-9)))


def project_onto_budget(raw_powers, budget: float) -> np.ndarray:
    """Euclidean projection onto {v >= 0, sum(v) = budget}.

    Sort-based exact algorithm; O(n log n).
    """
    if budget <= 0.0:
        raise ValueError("budget must be positive")
    v = np.asarray(raw_powers, dtype=float)
    if v.size == 0 or np.any(~np.isfinite(v)):
        raise ValueError("raw powers must be a nonempty finite vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - budget
    k = np.arange(1, v.size + 1)
    support = np.nonzero(u - css / k > 0.0)[0]
    r = support[-1] + 1
    theta = css[r - 1] / r
    return np.maximum(v - theta, 0.0)


class _SlotRateTable:
    """Spline of the exponential-averaged binary-input slot rate on a log grid."""

    LOG_LO = math.log(1e-12)
    LOG_HI = math.log(1e12)
    KNOTS = 16001

    def __init__(self, hermite_order: int, laguerre_order: int):
        from scipy.interpolate import CubicSpline

        s = np.linspace(self.LOG_LO, self.LOG_HI, self.KNOTS)
        table = np.empty_like(s)
        step = 1000
        for i in range(0, s.size, step):  # chunked to bound the quadrature workspace
            chunk = s[i : i + step]
            table[i : i + step] = _bpsk._slot_rate_from_ratio(
                np.exp(chunk), hermite_order, laguerre_order
            )
        self._grid = s
        self._ds = s[1] - s[0]
        self._coef = CubicSpline(s, table).c
        self._rho_lo = math.exp(self.LOG_LO)
        self._rho_hi = math.exp(self.LOG_HI)
        self._slope0 = table[0] / self._rho_lo  # the rate is linear through the origin
        self._top = table[-1]

    def __call__(self, rho) -> np.ndarray:
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        out = np.empty_like(rho)
        tiny = rho < self._rho_lo
        big = rho > self._rho_hi
        out[tiny] = rho[tiny] * self._slope0
        out[big] = self._top
        mid = ~(tiny | big)
        if mid.any():
            s = np.log(rho[mid])
            idx = np.clip(((s - self.LOG_LO) / self._ds).astype(np.int64), 0, self.KNOTS - 2)
            dx = s - self._grid[idx]
            c = self._coef
            out[mid] = ((c[0, idx] * dx + c[1, idx]) * dx + c[2, idx]) * dx + c[3, idx]
        return out


@lru_cache(maxsize=None)
def _bpsk_table(hermite_order: int, laguerre_order: int) -> _SlotRateTable:
    return _SlotRateTable(hermite_order, laguerre_order)


def _slot_fn_for(method: str, hermite_order: int, laguerre_order: int):
    if method == "bpsk":
        return _bpsk_table(hermite_order, laguerre_order)
    if method == "gaussian-lb":
        return _gaussian._slot_rate_from_ratio
    return lambda rho: np.log1p(np.atleast_1d(np.asarray(rho, dtype=float))) / math.log(2.0)


@dataclass(eq=False)
class AllocationResult:
    """Best allocation found for one period, with solver diagnostics."""

    scheme: TrainingScheme
    rate_bits: float
    method: str
    iterations: int
    restarts_used: int
    converged: bool
    restart_rates: tuple = ()


@dataclass(eq=False)
class OptimizationResult:
    """Per-period solutions of the scan plus the global winner."""

    per_period: dict
    best_period: int
    best_scheme: TrainingScheme
    best_rate_bits: float
    objective: str
    failures: dict = field(default_factory=dict)

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.per_period.values())


def _initial_points(T: int, budget: float, alpha: float, seed) -> list:
    inits = [np.full(T, budget / T)]
    pilot_heavy = np.full(T, budget / (2.0 * (T - 1)))
    pilot_heavy[0] = budget / 2.0
    inits.append(pilot_heavy)
    q = min(max(alpha * alpha, 0.1), 0.99)
    tail = q ** np.arange(T - 1, dtype=float)
    tail = tail / tail.sum() * (0.75 * budget)
    inits.append(np.concatenate(([0.25 * budget], tail)))
    rng = np.random.default_rng(seed)
    for _ in range(RESTARTS - len(inits)):
        inits.append(rng.dirichlet(np.ones(T)) * budget)
    return inits


def _objective(slot_fn, params: ChannelParams, x: np.ndarray) -> float:
    T = x.size
    offsets = np.arange(1, T)
    est = estimate_variance(params, x[0], offsets)
    err = params.sigma_h_sq - est
    rho = est * x[1:] / (err * x[1:] + params.sigma_n_sq)
    return float(slot_fn(rho).sum() / T)


def _gradient(slot_fn, params: ChannelParams, x: np.ndarray) -> np.ndarray:
    T = x.size
    sn2 = params.sigma_n_sq
    d = GRAD_STEP_SCALE * np.maximum(1.0, x)
    g = np.empty(T)
    # pilot power moves every slot's estimate quality: full-frame differences,
    # one-sided when the probe would go negative
    hi = x.copy()
    hi[0] = x[0] + d[0]
    lo = x.copy()
    lo[0] = max(x[0] - d[0], 0.0)
    g[0] = (_objective(slot_fn, params, hi) - _objective(slot_fn, params, lo)) / (hi[0] - lo[0])
    # a data power only moves its own slot; the other terms cancel in the
    # difference, so probe the slots directly
    offsets = np.arange(1, T)
    est = estimate_variance(params, x[0], offsets)
    err = params.sigma_h_sq - est
    pd = x[1:]
    pd_hi = pd + d[1:]
    pd_lo = np.maximum(pd - d[1:], 0.0)
    rho_hi = est * pd_hi / (err * pd_hi + sn2)
    rho_lo = est * pd_lo / (err * pd_lo + sn2)
    g[1:] = (slot_fn(rho_hi) - slot_fn(rho_lo)) / (pd_hi - pd_lo) / T
    return g


def _ascend(slot_fn, params, x0, budget, max_iterations):
    """One restart of projected gradient ascent; returns (x, value, iters, converged)."""
    x = project_onto_budget(x0, budget)
    fx = _objective(slot_fn, params, x)
    eta = 1.0
    converged = False
    it = 0
    for it in range(1, max_iterations + 1):
        g = _gradient(slot_fn, params, x)
        residual = np.max(np.abs(x - project_onto_budget(x + g, budget)))
        if residual <= GRAD_PROJ_TOL:
            converged = True
            break
        eta = min(eta * 2.0, 1e6)
        accepted = False
        xn = x
        while eta >= 1e-14:
            xn = project_onto_budget(x + eta * g, budget)
            fn = _objective(slot_fn, params, xn)
            if fn >= fx + ARMIJO_C * float(np.dot(g, xn - x)):
                accepted = True
                break
            eta *= 0.5
        if not accepted or not np.any(xn != x):
            break  # no representable step makes progress
        x, fx = xn, fn
    return x, fx, it, converged


def optimize_allocation(
    period: int,
    params: ChannelParams,
    objective: str = "bpsk",
    seed=0,
    hermite_order: int = _bpsk.DEFAULT_HERMITE_ORDER,
    laguerre_order: int = _bpsk.DEFAULT_LAGUERRE_ORDER,
    max_iterations=None,
) -> AllocationResult:
    """Solve the power split for one fixed period.

    Runs all restarts, keeps the best, and reports the exact-quadrature rate
    of the winner (the spline table is only used while searching).
    """
    T = int(period)
    if T < 2:
        raise ValueError("period must be at least 2")
    method = _normalize_method(objective)
    if max_iterations is None:
        max_iterations = MAX_ITERATIONS
    budget = params.power_budget * T
    if budget == 0.0:
        scheme = TrainingScheme(T, 0.0, np.zeros(T - 1))
        return AllocationResult(scheme, 0.0, method, 0, 0, True, (0.0,))
    slot_fn = _slot_fn_for(method, hermite_order, laguerre_order)
    best_x, best_val = None, -np.inf
    total_iters = 0
    any_converged = False
    restart_vals = []
    for x0 in _initial_points(T, budget, params.alpha, seed):
        x, val, iters, conv = _ascend(slot_fn, params, x0, budget, max_iterations)
        total_iters += iters
        any_converged = any_converged or conv
        restart_vals.append(val)
        if val > best_val:
            best_x, best_val = x, val
    scheme = TrainingScheme(T, float(best_x[0]), best_x[1:].copy())
    rate = _exact_rate(scheme, params, method, hermite_order, laguerre_order)
    return AllocationResult(
        scheme=scheme,
        rate_bits=rate,
        method=method,
        iterations=total_iters,
        restarts_used=RESTARTS,
        converged=any_converged,
        restart_rates=tuple(restart_vals),
    )


def optimize_scheme(
    params: ChannelParams,
    objective: str = "bpsk",
    t_min: int = 2,
    t_max=None,
    seed=0,
    hermite_order: int = _bpsk.DEFAULT_HERMITE_ORDER,
    laguerre_order: int = _bpsk.DEFAULT_LAGUERRE_ORDER,
    max_iterations=None,
) -> OptimizationResult:
    """Scan periods t_min..t_max and return per-period bests plus the winner.

    Near-exact ties (within 1e-9 relative) go to the smallest period.  A
    failure at one period is recorded and the scan continues.
    """
    method = _normalize_method(objective)
    if t_max is None:
        t_max = default_t_max(params.alpha)
    if not 2 <= t_min <= t_max:
        raise ValueError(f"need 2 <= t_min <= t_max, got [{t_min}, {t_max}]")
    per_period = {}
    failures = {}
    for T in range(int(t_min), int(t_max) + 1):
        try:
            per_period[T] = optimize_allocation(
                T, params, method, seed, hermite_order, laguerre_order, max_iterations
            )
        except Exception as exc:  # keep partial results
            failures[T] = str(exc)
    if not per_period:
        raise RuntimeError(f"every period failed: {failures}")
    best_rate = max(r.rate_bits for r in per_period.values())
    tol = 1e-9 * max(best_rate, 1e-300)
    best_period = min(T for T, r in per_period.items() if r.rate_bits >= best_rate - tol)
    best = per_period[best_period]
    return OptimizationResult(
        per_period=per_period,
        best_period=best_period,
        best_scheme=best.scheme,
        best_rate_bits=best.rate_bits,
        objective=method,
        failures=failures,
    )


def _normalize_method(objective: str) -> str:
    try:
        return _METHOD_TAGS[objective]
    except KeyError:
        raise ValueError(
            f"unknown objective {objective!r}; expected one of {sorted(set(_METHOD_TAGS))}"
        ) from None


def _exact_rate(scheme, params, method, hermite_order, laguerre_order) -> float:
    if method == "bpsk":
        return _bpsk.bpsk_frame_rate(scheme, params, hermite_order, laguerre_order).frame_rate_bits
    if method == "gaussian-lb":
        return _gaussian.gaussian_frame_rate(scheme, params).frame_rate_bits
    return _gaussian.jensen_frame_rate(scheme, params).frame_rate_bits
