# utils/analysis.py
"""
Closed-form bounds for the scaling construction: route load, transmitter
sets, the resulting throughput floor, the connectivity conditions and the
parameter choices that realize each regime of the radius exponent gamma.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.stats import binom

from utils.errors import ParameterError, RegimeError
from utils.geometry import sample_disk
from utils.propagation import DcParams, ensures_sinr, find_D_for_C, min_power

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Constants:
    a: float = (1.0 - math.log(2.0)) / (2**13 * math.pi)
    c_route: float = 3 * 2**13 * math.pi
    c_thru: float = 27 * 2**14
    mu: float = 1.0 / 512


CONSTANTS = Constants()

# Connectivity multiplier b in C = n^(gamma - 1/2) * b * sqrt(ln n).
DEFAULT_CONNECTIVITY_B = math.sqrt(2.0 / CONSTANTS.a)
# Scale at which the large-C choice of D is computed; it stays valid for all C above it.
LARGE_C_REFERENCE = 1.0
SMALL_GAMMA_C = 0.25


@dataclass(frozen=True)
class ScalingParams:
    n: int
    gamma: float
    C: float
    D: float
    P: float
    W: float = 1.0

    @property
    def dc(self) -> DcParams:
        return DcParams(self.C, self.D)

    def to_dict(self):
        return asdict(self)


def _check_chernoff(n: int, q: float) -> None:
    if n < 1:
        raise ParameterError(f"n must be at least 1, got {n}")
    if not 0 < q < 1:
        raise ParameterError(f"q must lie in (0, 1), got {q}")


def _chernoff(n: int, q: float, nu: float) -> float:
    exponent = -n * q * (nu * math.log(nu / math.e) + 1.0)
    return min(1.0, math.exp(exponent))


def chernoff_upper(n: int, q: float, nu: float) -> float:
    """Bound on Pr(Y > nu*n*q) for Y ~ Binomial(n, q), valid for 1 <= nu < 1/q."""
    _check_chernoff(n, q)
    if not 1 <= nu < 1 / q:
        raise ParameterError(f"upper tail needs 1 <= nu < 1/q, got nu={nu}, q={q}")
    return _chernoff(n, q, nu)


def chernoff_lower(n: int, q: float, nu: float) -> float:
    """Bound on Pr(Y < nu*n*q) for Y ~ Binomial(n, q), valid for 0 < nu <= 1."""
    _check_chernoff(n, q)
    if not 0 < nu <= 1:
        raise ParameterError(f"lower tail needs 0 < nu <= 1, got nu={nu}")
    return _chernoff(n, q, nu)


def binomial_tail_upper(n: int, q: float, threshold: float) -> float:
    """Exact Pr(Y >= threshold)."""
    return float(binom.sf(math.ceil(threshold) - 1, n, q))


def binomial_tail_lower(n: int, q: float, threshold: float) -> float:
    """Exact Pr(Y <= threshold)."""
    return float(binom.cdf(math.floor(threshold), n, q))


def intersect_prob_bound(z: float, n: int, gamma: float) -> float:
    radius = n**gamma
    if not 0 < z <= radius:
        raise ParameterError(f"cell diameter z must lie in (0, n^gamma], got z={z}, n^gamma={radius}")
    return min(1.0, 6.0 * z / radius)


def estimate_intersect_prob(z: float, radius: float, lines: int, seed) -> tuple[float, float]:
    """
    Monte Carlo frequency with which a segment between two uniform disk
    points meets the centered disk of diameter z. Returns (estimate, stderr).
    """
    rng = np.random.default_rng(seed)
    a = sample_disk(radius, lines, rng)
    d = sample_disk(radius, lines, rng) - a
    length2 = np.einsum("ij,ij->i", d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(length2 > 0, -np.einsum("ij,ij->i", a, d) / length2, 0.0)
    closest = a + np.clip(t, 0.0, 1.0)[:, None] * d
    hits = np.hypot(closest[:, 0], closest[:, 1]) <= z / 2.0
    p = float(hits.mean())
    return p, math.sqrt(p * (1.0 - p) / lines)


def load_bound(n: int, gamma: float, C: float) -> float:
    return CONSTANTS.c_route * n**gamma / C + 1.0


def txset_bound(n: int, gamma: float, C: float, D: float) -> float:
    return 18.0 / math.pi * n * (C * (2.0 + D) / n**gamma) ** 2


def throughput_floor(n: int, gamma: float, C: float, D: float, W: float = 1.0) -> float:
    return W / (CONSTANTS.c_thru * n ** (1.0 - gamma) * C * (2.0 + D) ** 2)


def growth_condition(n: int, gamma: float, C: float) -> float:
    """a*n*(C/n^gamma)^2 + ln(C/n^gamma); must grow without bound."""
    ratio = C / n**gamma
    return CONSTANTS.a * n * ratio**2 + math.log(ratio)


def gk_connectivity(n: int, gamma: float, C: float) -> float:
    ratio = C / n**gamma
    return n * ratio**2 - math.log(n)


def gk_reference_params(n: int, gamma: float, connectivity_b: Optional[float] = None) -> float:
    """C = n^(gamma - 1/2) * b * sqrt(ln n)."""
    if n < 2:
        raise ParameterError(f"n must be at least 2, got {n}")
    b = DEFAULT_CONNECTIVITY_B if connectivity_b is None else connectivity_b
    if not b > 0:
        raise ParameterError(f"connectivity multiplier must be positive, got {b}")
    return n ** (gamma - 0.5) * b * math.sqrt(math.log(n))


def theorem_params(
    n: int,
    gamma: float,
    alpha: float,
    beta: float,
    N0: float,
    W: float = 1.0,
    connectivity_b: Optional[float] = None,
) -> ScalingParams:
    """
    (C, D, P) for the construction at size n.

    gamma < 1/2 uses a fixed C = 1/4, so D and P do not depend on n.
    gamma >= 1/2 uses the connectivity-driven C, which grows with n, and a
    D valid for every C at or above a fixed reference scale.
    """
    if not alpha > 2:
        raise ParameterError(f"theorem parameters need alpha > 2, got {alpha}")
    if not (beta > 0 and N0 > 0):
        raise ParameterError(f"theorem parameters need beta > 0 and N0 > 0, got beta={beta}, N0={N0}")

    if gamma < 0.5:
        C = SMALL_GAMMA_C
        D = find_D_for_C(C, alpha, beta)
    else:
        C = gk_reference_params(n, gamma, connectivity_b)
        if C >= n**gamma / 2.0:
            raise RegimeError(
                f"asymptotic regime not yet reached: C={C:.6g} >= n^gamma/2={n**gamma / 2.0:.6g} at n={n}"
            )
        D = find_D_for_C(LARGE_C_REFERENCE, alpha, beta)
        if not ensures_sinr(DcParams(C, D), alpha, beta):
            raise RegimeError(
                f"asymptotic regime not yet reached: D={D:.6g} does not ensure SINR at C={C:.6g}"
            )

    P = min_power(DcParams(C, D), alpha, beta, N0)
    logger.debug("theorem_params n=%d gamma=%.4g -> C=%.6g D=%.6g P=%.6g", n, gamma, C, D, P)
    return ScalingParams(n=n, gamma=gamma, C=C, D=D, P=P, W=W)


def regime_onset(gamma: float, connectivity_b: Optional[float] = None) -> int:
    """Smallest n at which the gamma >= 1/2 choice of C satisfies C/n^gamma < 1/2."""

    def reached(n: int) -> bool:
        return gk_reference_params(n, gamma, connectivity_b) < n**gamma / 2.0

    if reached(2):
        return 2
    failing, hi = 2, 4
    while not reached(hi):
        failing, hi = hi, 2 * hi
    while hi - failing > 1:
        mid = (failing + hi) // 2
        if reached(mid):
            hi = mid
        else:
            failing = mid
    return hi
