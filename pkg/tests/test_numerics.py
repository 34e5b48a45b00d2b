import math

import pytest
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from beamopt.errors import DomainError
from beamopt.numerics import (
    BRANCH_POINT,
    EULER_GAMMA,
    log_beta,
    log_gamma,
    lambert_w_m1,
)


def test_log_gamma_against_scipy():
    for x in [0.02, 0.5, 1.0, 1.5, 3.0, 12.7, 171.6, 1e4, 1e8]:
        assert log_gamma(x) == pytest.approx(float(sp.gammaln(x)), abs=1e-12, rel=1e-12)


def test_log_gamma_integer_factorials():
    acc = 0.0
    for k in range(1, 20):
        assert log_gamma(k + 1) == pytest.approx(acc + math.log(k), rel=1e-13)
        acc += math.log(k)


@given(st.floats(min_value=1e-3, max_value=1e6))
@settings(max_examples=1000, deadline=None)
def test_log_gamma_recurrence(x):
    # log G(x+1) = log G(x) + log x
    assert log_gamma(x + 1.0) == pytest.approx(log_gamma(x) + math.log(x), rel=1e-10, abs=1e-10)


def test_log_gamma_rejects_nonpositive():
    for x in (0.0, -1.0, -0.5):
        with pytest.raises(DomainError):
            log_gamma(x)


@given(
    st.floats(min_value=1e-2, max_value=1e4),
    st.floats(min_value=1e-2, max_value=1e4),
)
@settings(max_examples=300, deadline=None)
def test_log_beta_symmetry_and_scipy(m, n):
    assert log_beta(m, n) == pytest.approx(log_beta(n, m), rel=1e-13, abs=1e-13)
    assert log_beta(m, n) == pytest.approx(float(sp.betaln(m, n)), rel=1e-10, abs=1e-10)


def test_log_beta_recurrence():
    # B(m+1, n) = B(m, n) * m / (m + n)
    for m, n in [(1.0, 1.0), (3.0, 7.0), (256.0, 1.5), (40.0, 0.2)]:
        lhs = log_beta(m + 1.0, n)
        rhs = log_beta(m, n) + math.log(m / (m + n))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_lambert_branch_constants():
    assert BRANCH_POINT == pytest.approx(-math.exp(-1.0), rel=0)
    assert EULER_GAMMA == pytest.approx(0.57721566490153286, abs=1e-15)
    assert lambert_w_m1(BRANCH_POINT) == pytest.approx(-1.0, abs=1e-9)


@given(st.floats(min_value=-0.36787944117144233, max_value=-1e-12))
@settings(max_examples=1000, deadline=None)
def test_lambert_w_m1_residual(x):
    w = lambert_w_m1(x)
    assert w <= -1.0
    assert w * math.exp(w) == pytest.approx(x, rel=1e-10, abs=1e-13)


def test_lambert_w_m1_against_scipy():
    for x in [-0.3678, -0.36, -0.2, -0.05, -1e-3, -1e-8, -1e-30]:
        ours = lambert_w_m1(x)
        ref = float(sp.lambertw(x, k=-1).real)
        assert ours == pytest.approx(ref, rel=1e-10)


def test_lambert_w_m1_bisection_oracle():
    # independent root bracketing on w e^w - x = 0 over w in [-700, -1]
    def bisect(x):
        lo, hi = -700.0, -1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid * math.exp(mid) - x > 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    for x in [-0.35, -0.1, -0.01, -1e-6]:
        assert lambert_w_m1(x) == pytest.approx(bisect(x), abs=1e-9)


def test_lambert_w_m1_domain():
    for x in (-0.5, 0.0, 0.1):
        with pytest.raises(DomainError):
            lambert_w_m1(x)
