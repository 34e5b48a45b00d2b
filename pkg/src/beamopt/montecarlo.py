"""Monte Carlo estimation of the rates and moments the closed forms predict.

Trials are processed in fixed-size blocks; block b of a run draws from a
counter-based Philox substream keyed by (seed, b), and block results are
combined in index order, so estimates are bit-identical for any worker
count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import (
    complex_gaussian,
    mmse_filter,
    mse_variance,
    substream,
    training_matrix,
    _synthesize_block,
)
from .errors import CapacityError, DomainError
from .rvq import MAX_CODEBOOK_BITS, generate_codebook

#: trials per substream block; part of the reproducibility contract
BLOCK_TRIALS = 512


@dataclass(frozen=True)
class SimulationSpec:
    trials: int = 10_000
    seed: int = 0
    fresh_codebook_per_trial: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class RateEstimate:
    mean: float
    std_err: float
    trials: int


def run_blocks(spec, block_fn, block_trials=BLOCK_TRIALS):
    """Accumulate per-trial samples produced in deterministic blocks.

    block_fn(rng, count) returns a 1-D array of `count` sample values.
    Returns (mean, std_err, sample_std, trials).
    """
    blocks = [
        (i, min(block_trials, spec.trials - start))
        for i, start in enumerate(range(0, spec.trials, block_trials))
    ]

    def one(block):
        i, count = block
        values = block_fn(substream(spec.seed, i), count)
        values = np.asarray(values, dtype=float)
        return i, float(values.sum()), float((values * values).sum()), len(values)

    if spec.workers == 1:
        parts = [one(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            parts = list(pool.map(one, blocks))
    parts.sort(key=lambda p: p[0])

    total = 0.0
    total_sq = 0.0
    n = 0
    for _, s, sq, count in parts:
        total += s
        total_sq += sq
        n += count
    mean = total / n
    if n > 1:
        var = max((total_sq - n * mean * mean) / (n - 1), 0.0)
    else:
        var = 0.0
    std = math.sqrt(var)
    return mean, std / math.sqrt(n), std, n


def _block_limit(bits, n_t, n_r):
    """Shrink blocks when per-trial codebooks would get large."""
    per_trial = max((2 ** bits) * n_t, n_r * n_t, 1)
    return max(1, min(BLOCK_TRIALS, (1 << 21) // per_trial))


def _rvq_powers(rng, count, n_r, n_t, sigma_w2, bits, fixed_codebook=None):
    """Per-trial (||Hhat v||^2, ||H v||^2) with v selected from the codebook."""
    h_hat, w = _synthesize_block(rng, count, n_r, n_t, sigma_w2)
    if fixed_codebook is None:
        vecs = complex_gaussian(rng, (count, 2 ** bits, n_t))
        vecs /= np.linalg.norm(vecs, axis=2, keepdims=True)
        inner = np.einsum("crn,ckn->crk", h_hat, vecs)
    else:
        vecs = fixed_codebook.vectors
        inner = np.einsum("crn,kn->crk", h_hat, vecs)
    p_hat = np.sum(np.abs(inner) ** 2, axis=1)            # (count, 2^B)
    sel = np.argmax(p_hat, axis=1)
    rows = np.arange(count)
    if fixed_codebook is None:
        chosen = vecs[rows, sel]
    else:
        chosen = vecs[sel]
    hv = np.einsum("crn,cn->cr", h_hat + w, chosen)
    return p_hat[rows, sel], np.sum(np.abs(hv) ** 2, axis=1)


def _check_bits(bits):
    if bits < 0:
        raise DomainError(f"bits must be nonnegative, got {bits}")
    if bits > MAX_CODEBOOK_BITS:
        raise CapacityError(f"2^{bits} codebook exceeds the 2^{MAX_CODEBOOK_BITS} cap")


def _codebook_for(spec, config, bits):
    if spec.fresh_codebook_per_trial:
        return None
    return generate_codebook(config.n_t, bits, spec.seed)


def simulate_genie_rate(config, sigma_w2, bits, spec):
    """Mean of log(1 + rho ||H v(Hhat)||^2): the rate a genie receiver attains."""
    _check_bits(bits)
    rho = config.snr
    fixed = _codebook_for(spec, config, bits)

    def block(rng, count):
        _, p_true = _rvq_powers(
            rng, count, config.n_r, config.n_t, sigma_w2, bits, fixed
        )
        return np.log1p(rho * p_true)

    mean, se, _, n = run_blocks(
        spec, block, _block_limit(bits, config.n_t, config.n_r)
    )
    return RateEstimate(mean=mean, std_err=se, trials=n)


def simulate_lower_rate(config, sigma_w2, bits, spec):
    """Mean of log(1 + ||Hhat v(Hhat)||^2 / (sigma_w2 + 1/rho)).

    The worst-case-Gaussian substitute for the residual interference.
    """
    _check_bits(bits)
    sigma_z2 = sigma_w2 + 1.0 / config.snr
    fixed = _codebook_for(spec, config, bits)

    def block(rng, count):
        p_hat, _ = _rvq_powers(
            rng, count, config.n_r, config.n_t, sigma_w2, bits, fixed
        )
        return np.log1p(p_hat / sigma_z2)

    mean, se, _, n = run_blocks(
        spec, block, _block_limit(bits, config.n_t, config.n_r)
    )
    return RateEstimate(mean=mean, std_err=se, trials=n)


def estimate_eta_stats(config, sigma_w2, bits, spec):
    """Sample mean/std of eta = ||Hhat v(Hhat)||^2 and c = sigma_eta / (2 E[eta])."""
    _check_bits(bits)
    fixed = _codebook_for(spec, config, bits)

    def block(rng, count):
        p_hat, _ = _rvq_powers(
            rng, count, config.n_r, config.n_t, sigma_w2, bits, fixed
        )
        return p_hat

    mean, _, std, _ = run_blocks(
        spec, block, _block_limit(bits, config.n_t, config.n_r)
    )
    return mean, std, std / (2.0 * mean)


def validate_mse(n_t, t, snr, spec):
    """Full pilot-path estimate of the per-entry estimation-error variance."""
    if t < 1:
        raise DomainError(f"pilot count must be >= 1, got {t}")
    design = training_matrix(t, n_t)
    filt = mmse_filter(design, snr)
    scaled_pilots = design.pilot_matrix @ np.diag(design.pilot_symbols)

    def block(rng, count):
        h = complex_gaussian(rng, (count, n_t))
        noise = complex_gaussian(rng, (count, int(t)), 1.0 / snr)
        h_hat = (h @ scaled_pilots + noise) @ filt
        return np.mean(np.abs(h - h_hat) ** 2, axis=1)

    mean, se, _, n = run_blocks(spec, block)
    return RateEstimate(mean=mean, std_err=se, trials=n)


def validate_e_nu(n_t, bits, spec):
    """Sample mean of nu = max_j |hhat v_j|^2 / ||hhat||^2 over fresh pairs."""
    _check_bits(bits)

    def block(rng, count):
        h_hat = complex_gaussian(rng, (count, n_t))
        vecs = complex_gaussian(rng, (count, 2 ** bits, n_t))
        inner = np.einsum("cn,ckn->ck", h_hat, vecs)
        # |h (v/||v||)|^2 = |h v|^2 / ||v||^2, so normalization is implicit
        gains = inner.real ** 2 + inner.imag ** 2
        flat = vecs.view(np.float64).reshape(count, 2 ** bits, 2 * n_t)
        gains /= np.einsum("ckn,ckn->ck", flat, flat)
        best = np.max(gains, axis=1)
        return best / np.sum(np.abs(h_hat) ** 2, axis=1)

    mean, se, _, n = run_blocks(spec, block, _block_limit(bits, n_t, 1))
    return RateEstimate(mean=mean, std_err=se, trials=n)


def perfect_csi_rate(config, spec):
    """Mean of log(1 + rho ||h||^2) (MISO) or log(1 + rho lambda_max) (MIMO)."""
    rho = config.snr

    def block(rng, count):
        h = complex_gaussian(rng, (count, config.n_r, config.n_t))
        if config.n_r == 1:
            gain = np.sum(np.abs(h[:, 0, :]) ** 2, axis=1)
        else:
            gram = np.einsum("crm,crn->cmn", h.conj(), h)
            gain = np.linalg.eigvalsh(gram)[:, -1]
        return np.log1p(rho * gain)

    mean, se, _, n = run_blocks(
        spec, block, _block_limit(0, config.n_t, config.n_r)
    )
    return RateEstimate(mean=mean, std_err=se, trials=n)
