import numpy as np
import pytest

from beamopt.channel import (
    SystemConfig,
    OverheadAllocation,
    complex_gaussian,
    mmse_estimate,
    mmse_filter,
    mse_variance,
    substream,
    synthesize_estimate,
    training_matrix,
)
from beamopt.errors import DomainError

RHO = 10.0 ** 0.5


def test_system_config_validation():
    with pytest.raises(DomainError):
        SystemConfig(n_t=1, snr=1.0)
    with pytest.raises(DomainError):
        SystemConfig(n_t=4, snr=0.0)
    with pytest.raises(DomainError):
        SystemConfig(n_t=4, snr=1.0, l_bar=-2.0)
    cfg = SystemConfig(n_t=4, snr=1.0, n_r=8)
    assert cfg.n_r_bar == pytest.approx(2.0)


def test_allocation_simplex():
    a = OverheadAllocation.from_overhead(2.0, 1.0, l_bar=10.0, mu=2.0)
    assert a.d_bar == pytest.approx(6.0)
    assert abs(a.constraint_residual(10.0, 2.0)) < 1e-12
    with pytest.raises(DomainError):
        OverheadAllocation.from_overhead(8.0, 2.0, l_bar=10.0, mu=2.0)


def test_mse_variance_continuity_at_full_training():
    eps = 1e-12
    left = mse_variance(1.0 - eps, RHO)
    right = mse_variance(1.0 + eps, RHO)
    assert left == pytest.approx(right, abs=1e-10)
    assert mse_variance(1.0, RHO) == pytest.approx(1.0 / (1.0 + RHO), rel=1e-14)


def test_mse_variance_monotone():
    grid = np.linspace(0.0, 5.0, 200)
    vals = [mse_variance(t, RHO) for t in grid]
    assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(1.0)
    # better SNR never hurts
    for t in (0.3, 1.0, 2.5):
        assert mse_variance(t, 10.0) <= mse_variance(t, 1.0) + 1e-15


def test_training_matrix_welch_conditions():
    for n_t in (2, 4, 7):
        for t in range(1, n_t + 1):
            v = training_matrix(t, n_t).pilot_matrix
            gram = v.conj().T @ v
            assert np.max(np.abs(gram - np.eye(t))) < 1e-10
        for t in (n_t + 1, 2 * n_t, 3 * n_t + 1):
            v = training_matrix(t, n_t).pilot_matrix
            outer = v @ v.conj().T
            assert np.max(np.abs(outer - (t / n_t) * np.eye(n_t))) < 1e-10


def test_mmse_estimate_noiseless_identity_recovers_channel():
    n_t = 5
    design = training_matrix(n_t, n_t)
    rng = substream(3, 0)
    h = complex_gaussian(rng, (n_t,))
    received = h @ (design.pilot_matrix @ np.diag(design.pilot_symbols))
    est = mmse_estimate(received, design, snr=1e12)
    assert np.max(np.abs(est - h)) < 1e-5


def test_mmse_filter_shape():
    design = training_matrix(9, 4)
    c = mmse_filter(design, RHO)
    assert c.shape == (9, 4)


def test_empirical_mse_matches_formula():
    # both branches of the error-variance formula, checked end to end
    rng = substream(11, 0)
    for n_t, t in ((6, 3), (3, 9)):
        design = training_matrix(t, n_t)
        trials = 4000
        h = complex_gaussian(rng, (trials, n_t))
        noise = complex_gaussian(rng, (trials, t), 1.0 / RHO)
        received = h @ (design.pilot_matrix @ np.diag(design.pilot_symbols)) + noise
        est = received @ mmse_filter(design, RHO)
        err = np.mean(np.abs(est - h) ** 2)
        assert err == pytest.approx(mse_variance(t / n_t, RHO), rel=0.05)


def test_complex_gaussian_moments():
    rng = substream(5, 0)
    z = complex_gaussian(rng, (200_000,), variance=0.7)
    assert abs(z.mean()) < 0.01
    assert np.mean(np.abs(z) ** 2) == pytest.approx(0.7, rel=0.02)
    assert np.var(z.real) == pytest.approx(0.35, rel=0.03)


def test_substream_deterministic_and_distinct():
    a = substream(42, 3).standard_normal(8)
    b = substream(42, 3).standard_normal(8)
    c = substream(42, 4).standard_normal(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_synthesize_estimate_moments():
    s2 = 0.3
    h_hats = []
    hs = []
    for seed in range(3000):
        h, est = synthesize_estimate(1, 4, s2, seed)
        assert est.error_variance == s2
        h_hats.append(est.estimate)
        hs.append(h)
    h_hats = np.array(h_hats)
    hs = np.array(hs)
    assert np.mean(np.abs(h_hats) ** 2) == pytest.approx(1.0 - s2, rel=0.05)
    assert np.mean(np.abs(hs) ** 2) == pytest.approx(1.0, rel=0.05)
    assert np.mean(np.abs(hs - h_hats) ** 2) == pytest.approx(s2, rel=0.05)
