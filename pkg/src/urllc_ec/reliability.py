"""Analytic packet reliability R(theta, N) for RLC AM with NACK- and timeout-driven retries.

Each attempt ends in exactly one of three outcomes: decoded (PDCCH and PDSCH
succeed), NACK delivered (PDSCH fails, PUCCH succeeds) or timeout (no usable
feedback).  A packet first decoded on attempt ``j`` after ``k`` timeouts and
``j-1-k`` NACKs survives if its queueing delay fits in the remaining slack,
with tail probability ``exp(-theta * slack)``.

``theta`` is per millisecond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .delay_model import slack
from .scenario import Scenario


@dataclass(frozen=True)
class AttemptEventProbs:
    p_success: float
    p_timeout: float
    p_feed: float
    #: 1 - p_success, formed from the failure branches to avoid cancellation
    p_fail: float


@dataclass(frozen=True)
class PathTerm:
    timeouts: int
    feedbacks: int
    probability: float
    slack_ms: float
    dvp_complement: float


@dataclass(frozen=True)
class ReliabilityResult:
    theta: float
    n: int
    value: float
    unreliability: float
    per_attempt_terms: tuple[float, ...]
    per_path_terms: tuple[tuple[PathTerm, ...], ...]


def attempt_probs(p1: float, p2: float, p3: float) -> AttemptEventProbs:
    for name, p in (("p1", p1), ("p2", p2), ("p3", p3)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} out of [0,1]: {p}")
    p_timeout = (1.0 - p1) + p1 * (1.0 - p2) * (1.0 - p3)
    p_feed = p1 * (1.0 - p2) * p3
    return AttemptEventProbs(
        p_success=p1 * p2,
        p_timeout=p_timeout,
        p_feed=p_feed,
        p_fail=(1.0 - p1) + p1 * (1.0 - p2),
    )


def dvp(theta: float, slack_ms: float) -> float:
    """Delay violation probability for the queueing delay given the remaining slack."""
    if not theta > 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    if slack_ms <= 0:
        return 1.0
    return math.exp(-theta * slack_ms)


def _paths(s: Scenario, theta: float | None, n: int) -> list[list[PathTerm]]:
    """Success-terminated path groups, one list per attempt index 1..n.

    ``theta=None`` means the delay tail is ignored on live paths (theta -> inf).
    """
    ev = attempt_probs(s.p1, s.p2, s.p3)
    budget = s.budget
    groups = []
    for j in range(1, n + 1):
        group = []
        for k in range(j):
            prob = math.comb(j - 1, k) * ev.p_feed ** (j - 1 - k) * ev.p_timeout**k * ev.p_success
            sl = slack(s.d_max, budget, j, j - 1 - k, k)
            if theta is None:
                comp = 1.0 if sl > 0 else 0.0
            else:
                comp = -math.expm1(-theta * sl) if sl > 0 else 0.0
            group.append(PathTerm(k, j - 1 - k, prob, sl, comp))
        groups.append(group)
    return groups


def _check_n(s: Scenario, n: int) -> None:
    if not 1 <= n <= s.n_max:
        raise ValueError(f"n={n} outside [1, n_max={s.n_max}]")


def reliability(s: Scenario, theta: float, n: int) -> ReliabilityResult:
    if not theta > 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    _check_n(s, n)
    groups = _paths(s, theta, n)
    increments = tuple(math.fsum(t.probability * t.dvp_complement for t in g) for g in groups)
    value = math.fsum(sorted(increments, reverse=True))
    return ReliabilityResult(
        theta=theta,
        n=n,
        value=min(1.0, value),
        unreliability=_unreliability_from(s, groups, theta),
        per_attempt_terms=increments,
        per_path_terms=tuple(tuple(g) for g in groups),
    )


def _unreliability_from(s: Scenario, groups, theta: float | None) -> float:
    ev = attempt_probs(s.p1, s.p2, s.p3)
    n = len(groups)
    # exhausted retries + decoded-but-late on every success path
    terms = [ev.p_fail**n]
    for g in groups:
        for t in g:
            if t.slack_ms <= 0:
                terms.append(t.probability)
            elif theta is not None:
                terms.append(t.probability * math.exp(-theta * t.slack_ms))
    return math.fsum(sorted(terms))


def unreliability(s: Scenario, theta: float, n: int) -> float:
    """1 - R(theta, n) summed from non-negative loss terms (no cancellation)."""
    if not theta > 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    _check_n(s, n)
    return _unreliability_from(s, _paths(s, theta, n), theta)


def reliability_ceiling(s: Scenario, n: int) -> float:
    """sup over theta of R(theta, n): all live paths, no delay violations."""
    _check_n(s, n)
    groups = _paths(s, None, n)
    return math.fsum(t.probability for g in groups for t in g if t.slack_ms > 0)


def unreliability_floor(s: Scenario, n: int) -> float:
    """inf over theta of 1 - R(theta, n)."""
    _check_n(s, n)
    return _unreliability_from(s, _paths(s, None, n), None)
