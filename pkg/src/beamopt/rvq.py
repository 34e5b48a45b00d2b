"""Random vector quantization: codebooks, beamformer selection, and the
closed-form quantization statistics (E[nu], its bounds, var[nu], the
concentration factor d(N_t), and the large-system fixed point gamma_rvq).
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelEstimate, complex_gaussian, substream
from .errors import CapacityError, DomainError, OutOfRegimeError
from .numerics import EULER_GAMMA, lambert_w_m1, log_beta, log_gamma

LN2 = math.log(2.0)

#: largest feedback codebook kept in memory: 2^24 vectors
MAX_CODEBOOK_BITS = 24


@dataclass(frozen=True)
class Codebook:
    vectors: np.ndarray    # 2^bits x n_t complex, unit-norm rows
    bits: int
    seed: int

    @property
    def n_t(self):
        return self.vectors.shape[1]


@dataclass(frozen=True)
class QuantizationStats:
    e_nu: float
    var_nu: float
    d_factor: float


@dataclass(frozen=True)
class GammaRvq:
    value: float
    n_r_bar: float
    b_bar: float


def generate_codebook(n_t, bits, seed, max_bits=MAX_CODEBOOK_BITS):
    """2^bits independent isotropic unit-norm vectors, deterministic in seed.

    Vectors are drawn sequentially from one stream, so codebooks with the
    same seed are nested: the 2^B codebook is the prefix of the 2^(B+1) one.
    """
    if bits < 0:
        raise DomainError(f"bits must be nonnegative, got {bits}")
    if n_t < 1:
        raise DomainError(f"n_t must be >= 1, got {n_t}")
    if bits > max_bits:
        raise CapacityError(
            f"codebook with 2^{bits} vectors exceeds the cap of 2^{max_bits}"
        )
    rng = substream(seed, 0)
    vecs = complex_gaussian(rng, (2 ** int(bits), n_t))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    return Codebook(vectors=vecs, bits=int(bits), seed=seed)


def select_beamformer(estimate, codebook):
    """argmax_j ||Hhat v_j||^2 over the codebook; ties go to the lowest index."""
    h_hat = estimate.estimate if isinstance(estimate, ChannelEstimate) else estimate
    h_hat = np.atleast_2d(np.asarray(h_hat, dtype=complex))
    if h_hat.shape[1] != codebook.n_t:
        raise DomainError(
            f"estimate has {h_hat.shape[1]} columns, codebook dimension {codebook.n_t}"
        )
    power = np.sum(np.abs(h_hat @ codebook.vectors.T) ** 2, axis=0)
    idx = int(np.argmax(power))
    return idx, codebook.vectors[idx]


def expected_nu_exact(n_t, bits):
    """E[nu] = 1 - 2^B B(2^B, N_t/(N_t-1)), evaluated in the log domain.

    `bits` may be fractional (normalized grids use B = b_bar * n_t).
    """
    if n_t < 2:
        raise DomainError(f"n_t must be >= 2, got {n_t}")
    if bits < 0:
        raise DomainError(f"bits must be nonnegative, got {bits}")
    n = 2.0 ** bits
    return 1.0 - math.exp(bits * LN2 + log_beta(n, 1.0 + 1.0 / (n_t - 1)))


def expected_nu_bounds(n_t, b_bar):
    """Closed-form sandwich for E[nu] at normalized feedback b_bar."""
    if n_t < 2:
        raise DomainError(f"n_t must be >= 2, got {n_t}")
    if b_bar < 0:
        raise DomainError(f"b_bar must be nonnegative, got {b_bar}")
    two_mb = 2.0 ** (-b_bar)
    lower = 1.0 - two_mb
    upper = lower + (1.0 + (EULER_GAMMA - 1.0) * two_mb + 2.0 ** (-b_bar * n_t)) / (
        n_t - 1
    )
    return lower, upper


def var_nu(n_t, bits):
    """var[nu] = n B(n, 1 + 2/(N_t-1)) - n^2 B^2(n, 1 + 1/(N_t-1)), n = 2^B."""
    if n_t < 2:
        raise DomainError(f"n_t must be >= 2, got {n_t}")
    if bits < 0:
        raise DomainError(f"bits must be nonnegative, got {bits}")
    n = 2.0 ** bits
    second = math.exp(bits * LN2 + log_beta(n, 1.0 + 2.0 / (n_t - 1)))
    first = math.exp(bits * LN2 + log_beta(n, 1.0 + 1.0 / (n_t - 1)))
    return second - first * first


def d_factor(n_t, b_bar):
    """Concentration factor d(N_t) multiplying the MISO lower bound."""
    if n_t < 2:
        raise DomainError(f"n_t must be >= 2, got {n_t}")
    if b_bar < 0:
        raise DomainError(f"b_bar must be nonnegative, got {b_bar}")
    g1 = math.exp(log_gamma(1.0 + 1.0 / (n_t - 1)))
    g2 = math.exp(log_gamma(1.0 + 2.0 / (n_t - 1)))
    exponent = b_bar * (1.0 + 1.0 / (n_t - 1)) * LN2
    if exponent > 300.0:
        # denominator ~ 2^(2 exponent) dwarfs the bounded numerator
        ratio = 0.0
    else:
        denom = math.exp(exponent) - g1
        if denom == 0.0:
            raise DomainError(
                f"d_factor singular at n_t={n_t}, b_bar={b_bar}: zero denominator"
            )
        num = g2 - g1 * g1 * (1.0 + 2.0 ** (-b_bar * n_t)) ** (-2.0 / (n_t - 1))
        ratio = num / (denom * denom)
    return 0.5 * math.sqrt(1.0 / n_t + (1.0 + 1.0 / n_t) * ratio)


def b_star(n_r_bar):
    """Feedback level where the gamma_rvq fixed-point expression stops holding."""
    if not n_r_bar > 0:
        raise DomainError(f"n_r_bar must be positive, got {n_r_bar}")
    root = math.sqrt(n_r_bar)
    return (n_r_bar * math.log(root) - n_r_bar * math.log(1.0 + root) + root) / LN2


def gamma_rvq(n_r_bar, b_bar):
    """Asymptotic normalized received power under RVQ, for 0 <= b_bar <= b_star.

    Solves (-g/nrb) e^(-g/nrb) = -(1/e) 2^(-b_bar/nrb) on the lower
    Lambert-W branch.
    """
    if b_bar < 0:
        raise DomainError(f"b_bar must be nonnegative, got {b_bar}")
    cap = b_star(n_r_bar)
    if b_bar > cap + 1e-12:
        raise OutOfRegimeError(
            f"b_bar={b_bar} exceeds the fixed-point validity boundary "
            f"b_star={cap} for n_r_bar={n_r_bar}"
        )
    if b_bar == 0.0:
        return GammaRvq(value=float(n_r_bar), n_r_bar=float(n_r_bar), b_bar=0.0)
    x = -math.exp(-1.0 - b_bar * LN2 / n_r_bar)
    value = -n_r_bar * lambert_w_m1(x)
    return GammaRvq(value=value, n_r_bar=float(n_r_bar), b_bar=float(b_bar))


def gamma_rvq_series(n_r_bar, b_bar):
    """Small-feedback expansion of gamma_rvq, kept to the zeta^(3/2) term.

    Used only as a cross-check of the fixed-point solver.
    """
    zeta = 2.0 * (1.0 - 2.0 ** (-b_bar / n_r_bar))
    root = math.sqrt(zeta)
    return n_r_bar * (1.0 + root + zeta / 3.0 + (11.0 / 72.0) * zeta * root)
