"""Delay-exponent operating region [theta_min, theta_max].

theta_min is the smallest theta meeting the reliability threshold (the
constraint is tight at the optimum), found by bisection on the monotone
R(., n).  theta_max is where EC has lost ``rho`` from its supremum, found by
gradient descent on log|EC(theta) - (M - rho)| with a central-difference
gradient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .effective_capacity import ec
from .reliability import reliability, reliability_ceiling, unreliability
from .scenario import Scenario

THETA_FLOOR = 1e-4
THETA_CEILING = 1e3
#: Relative shortfall from the reliability ceiling accepted when R_th is unreachable.
INFEASIBLE_SHORTFALL = 1e-6
DEFAULT_RHO_FRACTION = 0.01
_SEED_POINTS = 141


class ThetaMin(NamedTuple):
    theta: float
    reliability: float
    feasible: bool


class ThetaMax(NamedTuple):
    theta: float
    saturated: bool
    iterations: int
    residual: float


@dataclass(frozen=True)
class OperatingRegion:
    n: int
    theta_min: float
    theta_max: float
    reliability_at_min: float
    ec_at_min: float
    ec_at_max: float
    supremum_M: float
    rho: float
    feasible: bool
    achievable_reliability: float
    empty: bool
    saturated: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "theta_min": self.theta_min,
            "theta_max": self.theta_max,
            "reliability_at_min": self.reliability_at_min,
            "ec_at_min": self.ec_at_min,
            "ec_at_max": self.ec_at_max,
            "supremum_M": self.supremum_M,
            "rho": self.rho,
            "feasible": self.feasible,
            "achievable_reliability": self.achievable_reliability,
            "empty": self.empty,
            "saturated": self.saturated,
        }


def _bisect_log(pred, lo: float, hi: float, iters: int = 400) -> float:
    """Smallest theta in [lo, hi] with pred(theta) true, given pred(lo) false and pred(hi) true."""
    for _ in range(iters):
        mid = math.sqrt(lo * hi)
        if not lo < mid < hi:
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def theta_min(s: Scenario, n: int, r_th: float | None = None) -> ThetaMin:
    """Smallest theta with R(theta, n) >= r_th.

    When r_th exceeds the reliability ceiling the result is flagged
    infeasible and theta is where R first reaches (1 - 1e-6) of the ceiling.
    """
    r_th = s.r_th if r_th is None else r_th
    ceiling = reliability_ceiling(s, n)
    feasible = ceiling >= r_th
    if feasible:
        # compare on the loss scale: 1 - R stays accurate in the many-nines regime
        target_loss = 1.0 - r_th
        ok = lambda th: unreliability(s, th, n) <= target_loss
    else:
        target = (1.0 - INFEASIBLE_SHORTFALL) * ceiling
        ok = lambda th: reliability(s, th, n).value >= target
    lo, hi = THETA_FLOOR, THETA_CEILING
    if ok(lo):
        theta = lo
    else:
        while not ok(hi):
            if hi > 1e15:
                break
            lo, hi = hi, hi * 10.0
        theta = _bisect_log(ok, lo, hi)
    return ThetaMin(theta, reliability(s, theta, n).value, feasible)


def ec_supremum(s: Scenario, n: int) -> float:
    """M = sup EC, the theta -> 0 limit (EC is non-increasing in theta).

    Linear Richardson extrapolation from theta = 1e-8 and 1e-7 removes the
    first-order variance term.
    """
    e8 = ec(s, 1e-8, n)
    e7 = ec(s, 1e-7, n)
    return (10.0 * e8 - e7) / 9.0


def _resolve_rho(s: Scenario, n: int, rho: float | None, m: float) -> float:
    if rho is None:
        rho = s.rho
    if rho is None:
        rho = DEFAULT_RHO_FRACTION * m
    return rho


def theta_max(
    s: Scenario,
    n: int,
    rho: float | None = None,
    *,
    rel_tol: float = 1e-9,
    max_iter: int = 10_000,
) -> ThetaMax:
    """Gradient descent on psi(theta) = log|EC(theta) - (M - rho)|.

    The start point is the best of a log-spaced seed grid over
    [THETA_FLOOR, THETA_CEILING].  Steps use a central difference with
    relative perturbation 1e-4 * theta; rejected steps halve the step size,
    accepted ones double it.
    """
    m = ec_supremum(s, n)
    rho = _resolve_rho(s, n, rho, m)
    if rho >= m:
        raise ValueError(f"rho={rho} is not below the EC supremum {m}")
    target = m - rho
    # the residual must also be small next to rho itself, but not below EC's own precision
    tol = max(min(rel_tol * m, 1e-4 * rho), 1e-14 * m)

    def resid(th):
        return ec(s, th, n) - target

    if resid(THETA_CEILING) > 0:
        return ThetaMax(THETA_CEILING, True, 0, resid(THETA_CEILING))
    if resid(THETA_FLOOR) <= 0:
        return ThetaMax(THETA_FLOOR, False, 0, resid(THETA_FLOOR))

    def psi(th):
        r = abs(resid(th))
        return math.log(r) if r > 0 else -math.inf

    log_lo, log_hi = math.log(THETA_FLOOR), math.log(THETA_CEILING)
    seeds = [math.exp(log_lo + (log_hi - log_lo) * i / (_SEED_POINTS - 1)) for i in range(_SEED_POINTS)]
    theta = min(seeds, key=psi)
    value = psi(theta)
    step = 1e-3 * theta
    it = 0
    while it < max_iter and abs(resid(theta)) > tol:
        it += 1
        delta = 1e-4 * theta
        r0 = resid(theta)
        # a stencil straddling the root sees the log singularity; tighten it
        while delta > 1e-14 * theta and (resid(theta - delta) > 0) != (r0 > 0):
            delta *= 0.1
        while delta > 1e-14 * theta and (resid(theta + delta) > 0) != (r0 > 0):
            delta *= 0.1
        grad = (psi(theta + delta) - psi(theta - delta)) / (2.0 * delta)
        if not math.isfinite(grad) or grad == 0.0:
            break
        cand = theta - step * grad
        cand_value = psi(cand) if cand > 0 else math.inf
        if cand_value < value:
            theta, value = cand, cand_value
            step *= 2.0
        else:
            step *= 0.5
            if step * abs(grad) < 1e-15 * theta:
                break
    return ThetaMax(theta, False, it, resid(theta))


def theta_max_bisection(s: Scenario, n: int, rho: float | None = None) -> float:
    """Reference solution of EC(theta) = M - rho by bisection on the decreasing EC."""
    m = ec_supremum(s, n)
    rho = _resolve_rho(s, n, rho, m)
    target = m - rho
    lo, hi = THETA_FLOOR, THETA_CEILING
    if ec(s, hi, n) > target:
        return hi
    if ec(s, lo, n) <= target:
        return lo
    return _bisect_log(lambda th: ec(s, th, n) <= target, lo, hi)


def solve_region(s: Scenario, n: int | None = None, rho: float | None = None) -> OperatingRegion:
    n = s.n_max if n is None else n
    tmin = theta_min(s, n)
    m = ec_supremum(s, n)
    rho = _resolve_rho(s, n, rho, m)
    tmax = theta_max(s, n, rho)
    return OperatingRegion(
        n=n,
        theta_min=tmin.theta,
        theta_max=tmax.theta,
        reliability_at_min=tmin.reliability,
        ec_at_min=ec(s, tmin.theta, n),
        ec_at_max=ec(s, tmax.theta, n),
        supremum_M=m,
        rho=rho,
        feasible=tmin.feasible,
        achievable_reliability=reliability_ceiling(s, n),
        empty=tmin.theta > tmax.theta,
        saturated=tmax.saturated,
    )
