"""Closed-form per-symbol capacity bounds and effective-rate scaling.

MISO bounds follow the estimation-plus-quantization sandwich; MIMO bounds
use the large-system received power gamma_rvq with the unknown finite-size
correction set to zero.
"""

import math
from dataclasses import dataclass

from .channel import OverheadAllocation, mse_variance
from .errors import DomainError
from .montecarlo import perfect_csi_rate, simulate_genie_rate
from .numerics import EULER_GAMMA
from .rvq import d_factor, gamma_rvq


@dataclass(frozen=True)
class CapacityBounds:
    lower: float            # nats / channel use
    upper: float
    channel_kind: str       # "miso" or "mimo"


@dataclass(frozen=True)
class EffectiveRate:
    value: float            # nats per coherence-block symbol
    allocation: OverheadAllocation


def _resolve_sigma_w2(t_bar, snr, sigma_w2):
    if sigma_w2 is None:
        if t_bar is None:
            raise DomainError("either t_bar or sigma_w2 must be given")
        return mse_variance(t_bar, snr)
    if not 0.0 <= sigma_w2 <= 1.0:
        raise DomainError(f"sigma_w2 must lie in [0, 1], got {sigma_w2}")
    return sigma_w2


def miso_capacity_bounds(config, t_bar=None, b_bar=0.0, sigma_w2=None):
    """Per-symbol rate sandwich for the MISO link.

    sigma_w2 may be injected directly (exogenous estimation error) or
    derived from t_bar via the pilot formula.
    """
    if b_bar < 0:
        raise DomainError(f"b_bar must be nonnegative, got {b_bar}")
    rho = config.snr
    n_t = config.n_t
    s2 = _resolve_sigma_w2(t_bar, rho, sigma_w2)

    two_mb = 2.0 ** (-b_bar)
    gain = 1.0 - two_mb
    if gain <= 0.0 or s2 >= 1.0:
        lower = 0.0
    else:
        d = d_factor(n_t, b_bar)
        log_term = math.log1p(rho * (1.0 - s2) / (1.0 + rho * s2) * gain * n_t)
        lower = max(0.0, (1.0 - d) * log_term)

    nu_upper = gain + (1.0 + (EULER_GAMMA - 1.0) * two_mb + 2.0 ** (-b_bar * n_t)) / (
        n_t - 1
    )
    upper = math.log1p(rho * s2 + rho * (1.0 - s2) * n_t * nu_upper)
    return CapacityBounds(lower=lower, upper=max(lower, upper), channel_kind="miso")


def mimo_capacity_bounds(config, t_bar=None, b_bar=0.0, c_estimate=0.0, sigma_w2=None):
    """Per-symbol rate sandwich for the MIMO link via the gamma_rvq limit.

    c_estimate is the concentration factor multiplying the lower bound:
    0 in asymptotic mode, a Monte Carlo estimate in finite-size mode.
    """
    if not 0.0 <= c_estimate < 1.0:
        raise DomainError(f"c_estimate must lie in [0, 1), got {c_estimate}")
    rho = config.snr
    s2 = _resolve_sigma_w2(t_bar, rho, sigma_w2)
    gamma = gamma_rvq(config.n_r_bar, b_bar).value
    e_eta = (1.0 - s2) * gamma * config.n_t
    upper = math.log1p(rho * s2 + rho * e_eta)
    lower = (1.0 - c_estimate) * math.log1p(rho * e_eta / (1.0 + rho * s2))
    return CapacityBounds(
        lower=max(0.0, lower), upper=max(lower, upper), channel_kind="mimo"
    )


def effective_rate(bound_value, allocation, l_bar):
    """Scale a per-symbol bound by the data fraction of the coherence block."""
    return EffectiveRate(
        value=(allocation.d_bar / l_bar) * bound_value, allocation=allocation
    )


def reference_rates(config, bits, trials, seed):
    """Monte Carlo reference points: perfect CSI at both ends, and RVQ with
    perfect estimation (sigma_w2 = 0) at the given feedback budget."""
    from .montecarlo import SimulationSpec

    spec = SimulationSpec(trials=trials, seed=seed)
    perfect = perfect_csi_rate(config, spec)
    rvq_rate = simulate_genie_rate(config, 0.0, bits, spec)
    return perfect, rvq_rate
