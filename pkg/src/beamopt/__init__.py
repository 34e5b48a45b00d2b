"""Rates, bounds, and overhead optimization for beamforming with
training-based channel estimation and finite-rate feedback over
block-fading links.

The package splits into analytical pieces (``numerics``, ``rvq``,
``bounds``), the estimation model (``channel``), simulation
(``montecarlo``), the overhead optimizer (``optimizer``), and the
command-line front end (``cli``, ``figures``).
"""

from .bounds import (
    CapacityBounds,
    EffectiveRate,
    effective_rate,
    mimo_capacity_bounds,
    miso_capacity_bounds,
    reference_rates,
)
from .channel import (
    ChannelEstimate,
    OverheadAllocation,
    SystemConfig,
    TrainingDesign,
    mse_variance,
    training_matrix,
)
from .errors import CapacityError, DomainError, OutOfRegimeError
from .montecarlo import (
    RateEstimate,
    SimulationSpec,
    simulate_genie_rate,
    simulate_lower_rate,
)
from .optimizer import (
    AsymptoticPrediction,
    OptimizationResult,
    asymptotic_prediction,
    optimize_allocation,
    sweep_overhead,
)
from .rvq import (
    Codebook,
    b_star,
    d_factor,
    expected_nu_bounds,
    expected_nu_exact,
    gamma_rvq,
    generate_codebook,
    select_beamformer,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticPrediction",
    "CapacityBounds",
    "CapacityError",
    "ChannelEstimate",
    "Codebook",
    "DomainError",
    "EffectiveRate",
    "OptimizationResult",
    "OutOfRegimeError",
    "OverheadAllocation",
    "RateEstimate",
    "SimulationSpec",
    "SystemConfig",
    "TrainingDesign",
    "asymptotic_prediction",
    "b_star",
    "d_factor",
    "effective_rate",
    "expected_nu_bounds",
    "expected_nu_exact",
    "gamma_rvq",
    "generate_codebook",
    "mimo_capacity_bounds",
    "miso_capacity_bounds",
    "mse_variance",
    "optimize_allocation",
    "reference_rates",
    "select_beamformer",
    "simulate_genie_rate",
    "simulate_lower_rate",
    "sweep_overhead",
    "training_matrix",
    "__version__",
]
