"""Effective-rate maximization over the overhead simplex, overhead sweeps,
and the large-system predictions the optimum is expected to track.
"""

import math
from dataclasses import dataclass

from .bounds import EffectiveRate, mimo_capacity_bounds, miso_capacity_bounds
from .channel import OverheadAllocation
from .errors import DomainError
from .rvq import b_star

LN2 = math.log(2.0)
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0

OBJECTIVE_TOL = 1e-8
ARGUMENT_TOL = 1e-7


@dataclass(frozen=True)
class OptimizationResult:
    allocation: OverheadAllocation
    rate: object                 # EffectiveRate
    bound_kind: str
    iterations: int
    tolerance_met: bool
    at_feedback_cap: bool = False


@dataclass(frozen=True)
class AsymptoticPrediction:
    t_bar_pred: float
    b_bar_pred: float
    offset_upper: float          # zeta* (MISO) or xi* (MIMO)
    offset_lower: float          # same minus log(1 + rho)
    data_fraction_pred: float


def _objective_factory(config, channel_kind, bound_kind, c_estimate):
    l_bar, mu = config.l_bar, config.mu

    if channel_kind == "miso":
        def per_symbol(t, b):
            bounds = miso_capacity_bounds(config, t_bar=t, b_bar=b)
            return bounds.lower if bound_kind == "lower" else bounds.upper
    elif channel_kind == "mimo":
        def per_symbol(t, b):
            bounds = mimo_capacity_bounds(
                config, t_bar=t, b_bar=b, c_estimate=c_estimate
            )
            return bounds.lower if bound_kind == "lower" else bounds.upper
    else:
        raise DomainError(f"unknown channel kind {channel_kind!r}")

    def objective(t, b):
        d = l_bar - t - mu * b
        if d < 0.0 or t < 0.0 or b < 0.0:
            return -math.inf
        return (d / l_bar) * per_symbol(t, b)

    return objective


def _golden_max(fn, lo, hi, tol=ARGUMENT_TOL):
    """Deterministic golden-section maximization on [lo, hi]."""
    if hi - lo <= tol:
        x = 0.5 * (lo + hi)
        return x, fn(x)
    span = hi - lo
    steps = max(1, int(math.ceil(math.log(tol / span) / math.log(INV_PHI))))
    c = lo + INV_PHI_SQ * span
    d = lo + INV_PHI * span
    yc, yd = fn(c), fn(d)
    for _ in range(steps):
        if yc > yd:
            hi, d, yd = d, c, yc
            span *= INV_PHI
            c = lo + INV_PHI_SQ * span
            yc = fn(c)
        else:
            lo, c, yc = c, d, yd
            span *= INV_PHI
            d = lo + INV_PHI * span
            yd = fn(d)
    x = 0.5 * (lo + hi)
    return x, fn(x)


def _feedback_cap(config, channel_kind):
    if channel_kind == "mimo":
        return b_star(config.n_r_bar)
    return math.inf


def optimize_allocation(
    config, channel_kind="miso", bound_kind="lower", c_estimate=0.0, grid=200
):
    """Two-phase search: coarse grid over the feasible (t_bar, b_bar)
    triangle, then coordinate descent with golden-section line searches.
    """
    if bound_kind not in ("lower", "upper"):
        raise DomainError(f"unknown bound kind {bound_kind!r}")
    l_bar, mu = config.l_bar, config.mu
    if not l_bar > 0:
        raise DomainError(f"l_bar must be positive, got {l_bar}")
    objective = _objective_factory(config, channel_kind, bound_kind, c_estimate)
    b_cap = _feedback_cap(config, channel_kind)

    best_t = best_b = 0.0
    best_f = objective(0.0, 0.0)
    for i in range(grid + 1):
        t = l_bar * i / grid
        b_hi = min((l_bar - t) / mu, b_cap)
        if b_hi < 0.0:
            continue
        for j in range(grid + 1):
            b = b_hi * j / grid
            f = objective(t, b)
            if f > best_f:
                best_t, best_b, best_f = t, b, f

    t, b, f = best_t, best_b, best_f
    iterations = 0
    tolerance_met = False
    for _ in range(200):
        iterations += 1
        t_prev, b_prev, f_prev = t, b, f
        t_hi = max(l_bar - mu * b, 0.0)
        t, _ = _golden_max(lambda x: objective(x, b), 0.0, t_hi)
        b_hi = min((l_bar - t) / mu, b_cap)
        b, f = _golden_max(lambda x: objective(t, x), 0.0, max(b_hi, 0.0))
        if abs(f - f_prev) < OBJECTIVE_TOL and max(
            abs(t - t_prev), abs(b - b_prev)
        ) < ARGUMENT_TOL:
            tolerance_met = True
            break

    if f <= 0.0:
        # degenerate objective: report the best boundary point found
        t, b, f = best_t, best_b, max(best_f, 0.0)
        tolerance_met = True

    allocation = OverheadAllocation.from_overhead(t, b, l_bar, mu)
    rate = EffectiveRate(value=f, allocation=allocation)
    at_cap = math.isfinite(b_cap) and b > 0.99 * b_cap
    return OptimizationResult(
        allocation=allocation,
        rate=rate,
        bound_kind=bound_kind,
        iterations=iterations,
        tolerance_met=tolerance_met,
        at_feedback_cap=at_cap,
    )


def sweep_overhead(
    config, channel_kind="miso", bound_kind="lower", ratio=1.0, points=101,
    c_estimate=0.0,
):
    """Evaluate the bound along the ray t_bar = ratio * mu * b_bar.

    Returns a list of (total_overhead_fraction, effective_rate) pairs;
    MIMO points beyond the feedback-regime boundary evaluate to NaN.
    """
    if not ratio > 0:
        raise DomainError(f"ratio must be positive, got {ratio}")
    if points < 2:
        raise DomainError(f"points must be >= 2, got {points}")
    l_bar, mu = config.l_bar, config.mu
    objective = _objective_factory(config, channel_kind, bound_kind, c_estimate)
    b_cap = _feedback_cap(config, channel_kind)

    out = []
    for i in range(points):
        frac = i / (points - 1)
        overhead = frac * l_bar
        b = overhead / (mu * (1.0 + ratio))
        t = ratio * mu * b
        if b > b_cap + 1e-12:
            out.append((frac, math.nan))
            continue
        out.append((frac, objective(t, b)))
    return out


def asymptotic_prediction(config, channel_kind="miso"):
    """Limit-law values evaluated at the finite n_t of the config."""
    n_t = config.n_t
    if n_t <= math.e:
        raise DomainError(f"asymptotic predictions need n_t > e, got {n_t}")
    log_nt = math.log(n_t)
    l_bar, mu, rho = config.l_bar, config.mu, config.snr
    t_pred = l_bar / log_nt
    if channel_kind == "miso":
        b_pred = l_bar / (mu * log_nt)
        offset = math.log(l_bar * l_bar * LN2) - math.log(mu * (1.0 + 1.0 / rho)) - 2.0
        data_frac = 1.0 - 2.0 / log_nt
    elif channel_kind == "mimo":
        nrb = config.n_r_bar
        b_pred = l_bar * l_bar * LN2 / (2.0 * mu * mu * nrb * log_nt * log_nt)
        offset = math.log(l_bar * nrb) - math.log(1.0 + 1.0 / rho) - 1.0
        eps1 = 1.0 / log_nt
        eps2 = l_bar * LN2 / (2.0 * nrb * mu) / (log_nt * log_nt)
        data_frac = 1.0 - eps1 - eps2
    else:
        raise DomainError(f"unknown channel kind {channel_kind!r}")
    return AsymptoticPrediction(
        t_bar_pred=t_pred,
        b_bar_pred=b_pred,
        offset_upper=offset,
        offset_lower=offset - math.log(1.0 + rho),
        data_fraction_pred=data_frac,
    )


def convergence_series(config_template, channel_kind, n_t_list):
    """Optimize per n_t and emit the scaled sequences the limit laws govern.

    Rows carry: n_t, t_bar_scaled = t_bar * log n_t, b_bar_scaled
    (mu b_bar log n_t for MISO, b_bar log^2 n_t for MIMO), the feedback
    to training ratio, and the capacity offset against log(rho n_t).
    """
    if list(n_t_list) != sorted(set(int(n) for n in n_t_list)):
        raise DomainError("n_t_list must be strictly increasing integers")
    rows = []
    for n_t in n_t_list:
        if n_t < 3:
            raise DomainError(f"n_t values must be >= 3, got {n_t}")
        config = type(config_template)(
            n_t=int(n_t),
            snr=config_template.snr,
            l_bar=config_template.l_bar,
            mu=config_template.mu,
            n_r=max(1, round(config_template.n_r_bar * n_t)),
        )
        result = optimize_allocation(config, channel_kind, "lower")
        log_nt = math.log(n_t)
        alloc = result.allocation
        if channel_kind == "miso":
            b_scaled = config.mu * alloc.b_bar * log_nt
            k = 2.0
        else:
            b_scaled = alloc.b_bar * log_nt * log_nt
            k = 1.0
        offset = (
            result.rate.value
            - math.log(config.snr * n_t)
            + k * math.log(log_nt)
        )
        rows.append(
            {
                "n_t": int(n_t),
                "t_bar_scaled": alloc.t_bar * log_nt,
                "b_bar_scaled": b_scaled,
                "feedback_training_ratio": (
                    config.mu * alloc.b_bar / alloc.t_bar if alloc.t_bar else math.inf
                ),
                "capacity_offset": offset,
                "result": result,
            }
        )
    return rows
