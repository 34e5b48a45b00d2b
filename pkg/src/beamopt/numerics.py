"""Special-function kernels: log-gamma, log-beta, lower-branch Lambert W.

All logarithms are natural; unit conversion happens at the presentation
layer only.
"""

import math
from dataclasses import dataclass

from .errors import DomainError

EULER_GAMMA = 0.5772156649015329

#: abscissa of the Lambert-W branch point, -1/e
BRANCH_POINT = -math.exp(-1.0)


@dataclass(frozen=True)
class BranchPoint:
    abscissa: float = BRANCH_POINT
    euler_gamma: float = EULER_GAMMA


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def log_beta(m, n):
    """ln B(m, n) = ln Gamma(m) + ln Gamma(n) - ln Gamma(m + n).

    Never forms Gamma directly, so m or n may be as large as 2^B for
    codebook sizes far beyond what fits in a float product.
    """
    if not (m > 0.0 and n > 0.0):
        raise DomainError(f"log_beta requires positive arguments, got ({m}, {n})")
    if n > m:
        m, n = n, m
    if m > 1e6:
        # lgamma(m) - lgamma(m+n) cancels catastrophically once m is
        # huge; use the Stirling difference instead (next omitted term
        # is O(1/m^3), far below double rounding at this threshold)
        r = n / m
        diff = n - n * math.log(m) - (m + n - 0.5) * math.log1p(r)
        diff += 1.0 / (12.0 * m) - 1.0 / (12.0 * (m + n))
        return math.lgamma(n) + diff
    return math.lgamma(m) + math.lgamma(n) - math.lgamma(m + n)


def lambert_w_m1(x):
    """Lower branch W_{-1}(x) on [-1/e, 0): the w <= -1 solving w e^w = x.

    Seeded by the square-root series near the branch point (within 1e-3
    of -1/e) or by ln(-x) - ln(-ln(-x)) otherwise, then refined by
    Halley's method until |w e^w - x| <= 1e-14 |x|.
    """
    if not (x < 0.0):
        raise DomainError(f"lambert_w_m1 requires x in [-1/e, 0), got {x}")
    q = 1.0 + math.e * x        # distance above the branch point, scaled
    if q < 0.0:
        if q > -1e-12:          # rounding noise below -1/e
            q = 0.0
        else:
            raise DomainError(f"lambert_w_m1 requires x >= -1/e, got {x}")
    if q == 0.0:
        return -1.0

    if abs(x - BRANCH_POINT) < 1e-3:
        p = math.sqrt(2.0 * q)
        w = -1.0 - p - p * p / 3.0
    else:
        l1 = math.log(-x)
        w = l1 - math.log(-l1)

    tol = 1e-14 * abs(x)
    for _ in range(60):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol:
            break
        wp1 = w + 1.0
        # Halley step; wp1 cannot vanish here since q > 0 keeps w < -1
        denom = ew * wp1 - f * (w + 2.0) / (2.0 * wp1)
        w -= f / denom
    return min(w, -1.0)
