"""Effective capacity of the RLC AM transmission (TX) and retransmission (RETX) buffers.

EC(theta) = -log E[exp(-theta * service)] / theta, reported in bpcu.  The
RETX service over ``n`` attempts is a discrete mixture, so the MGF is a
weighted sum of exponentials.  It is evaluated as ``log1p`` of a sum of
``expm1`` terms near theta = 0, and by log-sum-exp once the bracket is small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .reliability import attempt_probs
from .scenario import Scenario

#: "bracket": the expression inside the RETX EC logarithm, where a
#: first-attempt success is weighted exp(-theta*S).
#: "series": the uniform sum where attempt k+1 success is weighted
#: exp(-theta*(n-k)*S) for every k, including k = 0.
MgfVariant = Literal["bracket", "series"]


@dataclass(frozen=True)
class EcResult:
    theta: float
    n: int
    value: float
    mgf: float
    log_mgf: float


@dataclass(frozen=True)
class StabilityReport:
    lambda_arrival: float
    mu_tx: float
    mu_retx: float
    expected_attempts: float
    stable_tx: bool
    stable_retx: bool


def _fail_prob(p1: float, p2: float) -> float:
    return (1.0 - p1) + p1 * (1.0 - p2)


def service_mixture(p1: float, p2: float, S: float, n: int, variant: MgfVariant = "bracket"):
    """(weight, service multiple of S) pairs making up the RETX MGF.

    The weights sum to one.  The first pair is the discard outcome (no service).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if variant not in ("bracket", "series"):
        raise ValueError(f"unknown MGF variant {variant!r}")
    p = p1 * p2
    q = _fail_prob(p1, p2)
    pairs = [(q**n, 0)]
    for k in range(n):
        mult = 1 if (k == 0 and variant == "bracket") else n - k
        pairs.append((q**k * p, mult))
    return pairs


def log_mgf_retx(p1, p2, S, theta, n, variant: MgfVariant = "bracket") -> float:
    """log E[exp(-theta * S_RETX)]."""
    if not theta >= 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    if not S >= 0:
        raise ValueError(f"service rate must be >= 0, got {S}")
    pairs = [(w, m) for w, m in service_mixture(p1, p2, S, n, variant) if w > 0]
    if theta == 0:
        return 0.0
    # g - 1 = sum w * (exp(-theta*m*S) - 1), exact near theta = 0
    gm1 = math.fsum(w * math.expm1(-theta * m * S) for w, m in pairs)
    if gm1 > -0.5:
        return math.log1p(gm1)
    logs = [math.log(w) - theta * m * S for w, m in pairs]
    top = max(logs)
    return top + math.log(math.fsum(math.exp(x - top) for x in logs))


def ec_mgf_retx(p1, p2, S, theta, n, variant: MgfVariant = "series") -> float:
    """Expected MGF of the RETX service over ``n`` attempts.

    Defaults to the uniform ``series`` form; ``ec_retx`` uses ``bracket``.
    """
    return math.exp(log_mgf_retx(p1, p2, S, theta, n, variant))


def ec_retx(p1, p2, S, theta, n, variant: MgfVariant = "bracket") -> EcResult:
    if not theta > 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    lg = log_mgf_retx(p1, p2, S, theta, n, variant)
    return EcResult(theta=theta, n=n, value=-lg / (n * theta), mgf=math.exp(lg), log_mgf=lg)


def ec_tx(p1, p2, S, theta) -> EcResult:
    if not theta > 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    if not S >= 0:
        raise ValueError(f"service rate must be >= 0, got {S}")
    p = p1 * p2
    gm1 = p * math.expm1(-theta * S)
    if gm1 > -0.5:
        lg = math.log1p(gm1)
    else:
        q = _fail_prob(p1, p2)
        if q == 0.0:
            lg = -theta * S
        else:
            # log(q + p e^{-theta S}) with the discard weight factored out
            lg = math.log(q) + math.log1p(p / q * math.exp(-theta * S))
    return EcResult(theta=theta, n=1, value=-lg / theta, mgf=math.exp(lg), log_mgf=lg)


def ec(s: Scenario, theta: float, n: int, variant: MgfVariant = "bracket") -> float:
    """EC of a scenario's link: the TX form for n = 1, the RETX form otherwise."""
    if n == 1:
        return ec_tx(s.p1, s.p2, s.service_rate_S, theta).value
    return ec_retx(s.p1, s.p2, s.service_rate_S, theta, n, variant).value


def ec_small_theta_limit(p1, p2, S, n, variant: MgfVariant = "bracket") -> float:
    """Analytic theta -> 0 limit: mean service per attempt slot."""
    return math.fsum(w * m * S for w, m in service_mixture(p1, p2, S, n, variant)) / n


def attempt_count_distribution(p1: float, p2: float, p3: float, n_max: int) -> list[float]:
    """P(exactly j attempts) for j = 1..n_max; the last attempt is used on success or exhaustion."""
    ev = attempt_probs(p1, p2, p3)
    dist = [ev.p_fail ** (j - 1) * ev.p_success for j in range(1, n_max)]
    dist.append(ev.p_fail ** (n_max - 1))
    return dist


def stability_check(s: Scenario, lambda_arrival: float) -> StabilityReport:
    """Mean-rate stability of both buffers for a constant arrival rate in bpcu.

    The RETX service rate divides the TX rate by the mean number of
    attempts a packet occupies the RETX buffer for.
    """
    if not lambda_arrival >= 0:
        raise ValueError(f"arrival rate must be >= 0, got {lambda_arrival}")
    dist = attempt_count_distribution(s.p1, s.p2, s.p3, s.n_max)
    expected = math.fsum(j * pj for j, pj in enumerate(dist, start=1))
    mu_tx = s.p_success * s.service_rate_S
    mu_retx = mu_tx / expected
    return StabilityReport(
        lambda_arrival=lambda_arrival,
        mu_tx=mu_tx,
        mu_retx=mu_retx,
        expected_attempts=expected,
        stable_tx=lambda_arrival < mu_tx,
        stable_retx=lambda_arrival < mu_retx,
    )
