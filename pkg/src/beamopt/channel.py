"""Block-fading channel and MMSE estimation model.

Welch-bound pilot construction, the linear MMSE filter, the closed-form
estimation-error variance, and direct sampling of the estimate/error
decomposition H = Hhat + w.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class SystemConfig:
    """Link-level parameters.

    n_t, n_r: transmit / receive antenna counts (n_r = 1 for MISO)
    snr: linear background SNR rho > 0
    l_bar: normalized coherence length L / n_t
    mu: feedback conversion factor, symbols per feedback bit
    """

    n_t: int
    snr: float
    l_bar: float = 1.0
    mu: float = 1.0
    n_r: int = 1

    def __post_init__(self):
        if self.n_t < 2:
            raise DomainError(f"n_t must be >= 2, got {self.n_t}")
        if self.n_r < 1:
            raise DomainError(f"n_r must be >= 1, got {self.n_r}")
        if not self.snr > 0:
            raise DomainError(f"snr must be positive, got {self.snr}")
        if not self.l_bar > 0:
            raise DomainError(f"l_bar must be positive, got {self.l_bar}")
        if not self.mu > 0:
            raise DomainError(f"mu must be positive, got {self.mu}")

    @property
    def n_r_bar(self):
        return self.n_r / self.n_t


@dataclass(frozen=True)
class OverheadAllocation:
    """Normalized (training, feedback, data) triple on the overhead simplex."""

    t_bar: float
    b_bar: float
    d_bar: float

    def __post_init__(self):
        if min(self.t_bar, self.b_bar, self.d_bar) < -1e-12:
            raise DomainError(f"allocation components must be nonnegative: {self}")

    @classmethod
    def from_overhead(cls, t_bar, b_bar, l_bar, mu):
        d_bar = l_bar - t_bar - mu * b_bar
        if d_bar < -1e-9:
            raise DomainError(
                f"overhead t_bar={t_bar}, mu*b_bar={mu * b_bar} exceeds l_bar={l_bar}"
            )
        return cls(t_bar, b_bar, max(d_bar, 0.0))

    def constraint_residual(self, l_bar, mu):
        return self.t_bar + mu * self.b_bar + self.d_bar - l_bar


@dataclass(frozen=True)
class TrainingDesign:
    """Welch-bound pilot set: unit-norm columns V_T and unit-modulus symbols."""

    pilot_matrix: np.ndarray    # n_t x T, unit-norm columns
    pilot_symbols: np.ndarray   # T unit-modulus scalars


@dataclass(frozen=True)
class ChannelEstimate:
    estimate: np.ndarray        # n_r x n_t complex
    error_variance: float


def mse_variance(t_bar, snr):
    """Estimation-error variance of the Welch-bound MMSE pilot scheme.

    1 - t_bar / (1 + 1/rho) for t_bar < 1, and 1 / (1 + rho t_bar) for
    t_bar >= 1; continuous at t_bar = 1.
    """
    if t_bar < 0:
        raise DomainError(f"t_bar must be nonnegative, got {t_bar}")
    if not snr > 0:
        raise DomainError(f"snr must be positive, got {snr}")
    if t_bar < 1.0:
        return 1.0 - t_bar / (1.0 + 1.0 / snr)
    return 1.0 / (1.0 + snr * t_bar)


def training_matrix(t, n_t):
    """Pilot design meeting the applicable Welch condition exactly.

    For t <= n_t the columns are the first t standard basis vectors
    (one antenna at a time); for t > n_t column k carries DFT phases
    exp(2*pi*i*n*k/t)/sqrt(n_t), giving V V^H = (t/n_t) I.
    """
    if t < 1:
        raise DomainError(f"pilot count must be >= 1, got {t}")
    if n_t < 2:
        raise DomainError(f"n_t must be >= 2, got {n_t}")
    t = int(t)
    if t <= n_t:
        v = np.zeros((n_t, t), dtype=complex)
        v[np.arange(t), np.arange(t)] = 1.0
    else:
        rows = np.arange(n_t)[:, None]
        cols = np.arange(t)[None, :]
        v = np.exp(2j * np.pi * rows * cols / t) / np.sqrt(n_t)
    return TrainingDesign(pilot_matrix=v, pilot_symbols=np.ones(t, dtype=complex))


def mmse_filter(design, snr):
    """T x n_t linear MMSE filter (V^H V + I/rho)^{-1} (V B)^H."""
    v = design.pilot_matrix
    b = np.diag(design.pilot_symbols)
    t = v.shape[1]
    gram = v.conj().T @ v + (1.0 / snr) * np.eye(t)
    return np.linalg.solve(gram, (v @ b).conj().T)


def mmse_estimate(received, design, snr):
    """Apply the MMSE filter to one row of received training samples."""
    received = np.asarray(received, dtype=complex)
    t = design.pilot_matrix.shape[1]
    if received.shape[-1] != t:
        raise DomainError(
            f"received length {received.shape[-1]} does not match pilot count {t}"
        )
    return received @ mmse_filter(design, snr)


def complex_gaussian(rng, shape, variance=1.0):
    """i.i.d. CN(0, variance) entries; real/imag each variance/2."""
    # a contiguous draw viewed as complex consumes the stream in the same
    # order as an explicit (..., 2) draw, so results stay reproducible
    count = int(np.prod(shape, dtype=np.int64))
    z = rng.standard_normal(2 * count).view(np.complex128).reshape(shape)
    z *= np.sqrt(variance / 2.0)
    return z


def substream(seed, index):
    """Counter-based generator for an independent substream (seed, index)."""
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def synthesize_estimate(n_r, n_t, sigma_w2, seed):
    """Sample H = Hhat + w directly with exogenous error variance sigma_w2."""
    h_hat, w = _synthesize_block(substream(seed, 0), 1, n_r, n_t, sigma_w2)
    est = ChannelEstimate(estimate=h_hat[0], error_variance=float(sigma_w2))
    return h_hat[0] + w[0], est


def _synthesize_block(rng, count, n_r, n_t, sigma_w2):
    """Draw `count` independent (Hhat, w) pairs; returns two (count, n_r, n_t) arrays."""
    if not 0.0 <= sigma_w2 <= 1.0:
        raise DomainError(f"sigma_w2 must lie in [0, 1], got {sigma_w2}")
    h_hat = complex_gaussian(rng, (count, n_r, n_t), 1.0 - sigma_w2)
    w = complex_gaussian(rng, (count, n_r, n_t), sigma_w2)
    return h_hat, w
