"""Normal-approximation channel math for short packets over an AWGN link.

Capacity and dispersion are in bits per channel use (bpcu) and bpcu^2.
Blocklengths ``r`` are real-valued channel uses (Hz*s); rounding is left to
the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

LOG2E = math.log2(math.e)
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ChannelModel:
    snr: float
    capacity_C: float
    dispersion_V: float
    epsilon: float

    @classmethod
    def from_snr(cls, snr: float, epsilon: float) -> "ChannelModel":
        if not 0.0 < epsilon < 1.0:
            raise ValueError(f"epsilon out of (0,1): {epsilon}")
        return cls(snr, capacity(snr), dispersion(snr), epsilon)


def _check_snr(snr: float) -> None:
    if not snr >= 0.0:
        raise ValueError(f"snr must be >= 0, got {snr}")


def capacity(snr: float) -> float:
    """Shannon capacity log2(1 + snr)."""
    _check_snr(snr)
    return math.log1p(snr) / math.log(2.0)


def dispersion(snr: float) -> float:
    """AWGN channel dispersion (log2 e)^2 * (1 - 1/(1+snr)^2)."""
    _check_snr(snr)
    # 1 - 1/(1+x)^2 == x(x+2)/(1+x)^2, exact at small snr
    return LOG2E**2 * snr * (snr + 2.0) / (1.0 + snr) ** 2


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x) = P(Z > x)."""
    return 0.5 * math.erfc(x / _SQRT2)


def q_inverse(p: float) -> float:
    """Inverse of the Gaussian tail, found by bisection on ``erfc``.

    A rational-approximation quantile only seeds the bracket; the returned
    value is the midpoint of a bracket shrunk until it cannot be split in
    double precision.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p out of (0,1): {p}")
    guess = -NormalDist().inv_cdf(p)
    width = 1e-6 * (1.0 + abs(guess))
    lo, hi = guess - width, guess + width
    # Q is decreasing: need Q(lo) >= p >= Q(hi)
    while q_function(lo) < p:
        lo -= width
        width *= 2.0
    while q_function(hi) > p:
        hi += width
        width *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        qm = q_function(mid)
        if qm == p:
            return mid
        if qm > p:
            lo = mid
        else:
            hi = mid
    # pick the endpoint with the smaller residual
    return lo if abs(q_function(lo) - p) <= abs(q_function(hi) - p) else hi


def achievable_rate(snr: float, r: float, epsilon: float) -> float:
    """Normal-approximation rate C - Q^-1(eps) * sqrt(V / r).

    Can be negative for very short blocks; the value is returned as-is so
    callers can detect an infeasible (r, epsilon) pair.
    """
    if not r > 0:
        raise ValueError(f"blocklength must be > 0, got {r}")
    return capacity(snr) - q_inverse(epsilon) * math.sqrt(dispersion(snr) / r)


def required_blocklength(snr: float, payload_L: float, epsilon: float) -> float:
    """Channel uses needed to carry ``payload_L`` bits at error ``epsilon``."""
    if not snr > 0:
        raise ValueError("snr must be > 0: zero capacity cannot carry a payload")
    if not payload_L > 0:
        raise ValueError(f"payload must be > 0 bits, got {payload_L}")
    c = capacity(snr)
    v = dispersion(snr)
    qi = q_inverse(epsilon)
    if qi == 0.0:
        return payload_L / c
    a = qi * qi * v
    # sign keeps the root of C*r - qi*sqrt(V*r) = L correct when epsilon > 0.5
    root = math.copysign(math.sqrt(1.0 + 4.0 * payload_L * c / a), qi)
    return payload_L / c + a / (2.0 * c * c) * (1.0 + root)


def transmission_time(r: float, bandwidth_B: float) -> float:
    """Airtime in milliseconds for ``r`` channel uses over ``bandwidth_B`` Hz."""
    if not r > 0 or not bandwidth_B > 0:
        raise ValueError("blocklength and bandwidth must both be > 0")
    return 1e3 * r / bandwidth_B
