"""Independent checks of the analytic model.

* exact enumeration of the attempt-outcome tree,
* Monte-Carlo simulation of the retransmission process with an exponential
  queueing delay per packet,
* Monte-Carlo estimation of the RETX service MGF,
* slotted TX/RETX queue sample paths for empirical stability checks.

Monte-Carlo work is split into fixed-size blocks, each with its own child
seed from ``numpy.random.SeedSequence(seed)``.  Results therefore depend on
the seed only, not on how many worker threads ran the blocks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .scenario import Scenario

MAX_ENUMERATION_ATTEMPTS = 12
BLOCK_TRIALS = 1 << 16


class Outcome(str, Enum):
    SUCCESS = "success"
    NACK_FEEDBACK = "nack_feedback"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class OutcomePath:
    outcomes: tuple[Outcome, ...]
    path_probability: float
    total_deterministic_delay: float

    @property
    def succeeded(self) -> bool:
        return bool(self.outcomes) and self.outcomes[-1] is Outcome.SUCCESS


@dataclass(frozen=True)
class McEstimate:
    mean: float
    standard_error: float | None
    trials: int
    rng_seed: int

    def z_score(self, reference: float) -> float | None:
        if self.standard_error is None:
            return None
        diff = self.mean - reference
        if self.standard_error == 0.0:
            return 0.0 if diff == 0.0 else None
        return diff / self.standard_error


def worker_count() -> int:
    env = os.environ.get("URLLC_EC_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


# -- exact enumeration -------------------------------------------------------

def enumerate_paths(s: Scenario, n: int) -> list[OutcomePath]:
    """Every outcome sequence of up to ``n`` attempts: decoded, or all attempts failed."""
    if n > MAX_ENUMERATION_ATTEMPTS:
        raise ValueError(f"n={n} too large to enumerate (max {MAX_ENUMERATION_ATTEMPTS})")
    p_ok = s.p1 * s.p2
    p_nack = s.p1 * (1.0 - s.p2) * s.p3
    p_to = (1.0 - s.p1) + s.p1 * (1.0 - s.p2) * (1.0 - s.p3)
    attempt_cost = s.d_gnb + s.d_ue + s.t_tx
    paths: list[OutcomePath] = []

    def walk(prefix, prob, delay):
        delay += attempt_cost
        paths.append(OutcomePath(prefix + (Outcome.SUCCESS,), prob * p_ok, delay))
        if len(prefix) + 1 == n:
            paths.append(OutcomePath(prefix + (Outcome.NACK_FEEDBACK,), prob * p_nack, delay + s.d_feed))
            paths.append(OutcomePath(prefix + (Outcome.TIMEOUT,), prob * p_to, delay + s.d_timeout))
            return
        walk(prefix + (Outcome.NACK_FEEDBACK,), prob * p_nack, delay + s.d_feed)
        walk(prefix + (Outcome.TIMEOUT,), prob * p_to, delay + s.d_timeout)

    walk((), 1.0, 0.0)
    return paths


def enumerate_reliability(s: Scenario, theta: float, n: int) -> float:
    """Sum over decoded paths of P(path) * P(queueing delay <= remaining budget)."""
    total = []
    for path in enumerate_paths(s, n):
        if not path.succeeded:
            continue
        room = s.d_max - path.total_deterministic_delay
        if room > 0:
            total.append(path.path_probability * -math.expm1(-theta * room))
    return math.fsum(total)


# -- Monte Carlo -------------------------------------------------------------

def _blocks(trials: int) -> list[int]:
    full, rest = divmod(trials, BLOCK_TRIALS)
    return [BLOCK_TRIALS] * full + ([rest] if rest else [])


def _run_blocks(fn, trials: int, seed: int) -> tuple[float, float]:
    sizes = _blocks(trials)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, children))
    workers = worker_count()
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: fn(job[0], np.random.default_rng(job[1])), jobs))
    else:
        parts = [fn(size, np.random.default_rng(child)) for size, child in jobs]
    return math.fsum(p[0] for p in parts), math.fsum(p[1] for p in parts)


def _estimate(total: float, total_sq: float, trials: int, seed: int) -> McEstimate:
    mean = total / trials
    if trials < 2:
        return McEstimate(mean, None, trials, seed)
    var = max(0.0, (total_sq - trials * mean * mean) / (trials - 1))
    return McEstimate(mean, math.sqrt(var / trials), trials, seed)


def mc_reliability(s: Scenario, theta: float, n: int, trials: int, seed: int) -> McEstimate:
    """Fraction of simulated packets decoded within ``d_max``.

    Each attempt independently draws its outcome; the first decoded attempt
    ends the packet.  The packet's total delay is its deterministic timeline
    plus a single Exp(theta) queueing delay.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not theta > 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    p_ok = s.p1 * s.p2
    p_nack = s.p1 * (1.0 - s.p2) * s.p3
    attempt_cost = s.d_gnb + s.d_ue + s.t_tx

    def block(size, rng):
        u = rng.random((size, n))
        ok = u < p_ok
        nack = (u >= p_ok) & (u < p_ok + p_nack)
        decoded = ok.any(axis=1)
        first = np.where(decoded, ok.argmax(axis=1), n - 1)
        before = np.arange(n)[None, :] < first[:, None]
        n_nack = (nack & before).sum(axis=1)
        n_to = first - n_nack
        det = (first + 1) * attempt_cost + n_nack * s.d_feed + n_to * s.d_timeout
        queueing = rng.exponential(1.0 / theta, size)
        hit = decoded & (det + queueing <= s.d_max)
        c = float(np.count_nonzero(hit))
        return c, c

    total, total_sq = _run_blocks(block, trials, seed)
    return _estimate(total, total_sq, trials, seed)


def mc_mgf_retx(p1, p2, S, theta, n, trials: int, seed: int, variant="bracket") -> McEstimate:
    """Sample mean of exp(-theta * S_RETX).

    Attempts repeat until decoded or ``n`` failures; the service credited to a
    decode on attempt j follows the chosen MGF variant, a discard earns none.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if variant not in ("bracket", "series"):
        raise ValueError(f"unknown MGF variant {variant!r}")
    p = p1 * p2
    # decode on attempt j+1 earns (n - j) * S; "bracket" credits a first-attempt decode with S
    mults = n - np.arange(n, dtype=float)
    if variant == "bracket":
        mults[0] = 1.0

    def block(size, rng):
        ok = rng.random((size, n)) < p
        decoded = ok.any(axis=1)
        first = ok.argmax(axis=1)
        service = np.where(decoded, mults[first] * S, 0.0)
        x = np.exp(-theta * service)
        return float(x.sum()), float((x * x).sum())

    total, total_sq = _run_blocks(block, trials, seed)
    return _estimate(total, total_sq, trials, seed)


# -- queue sample paths ------------------------------------------------------

@dataclass(frozen=True)
class QueueTrace:
    tx: np.ndarray
    retx: np.ndarray
    dropped_bits: float
    busy_fraction: float


def queue_trace(s: Scenario, lambda_arrival: float, slots: int, seed: int) -> QueueTrace:
    """Slotted TX and RETX buffer occupancy in bits.

    Both buffers receive ``lambda_arrival`` bits per slot.  TX serves up to
    ``S`` bits in a slot with probability p1*p2.  RETX attempts its
    head-of-line chunk of up to ``S`` bits once per slot; the chunk leaves on
    success or after ``n_max`` failed attempts (dropped).
    """
    if slots < 1:
        raise ValueError("slots must be >= 1")
    rng = np.random.default_rng(seed)
    p = s.p1 * s.p2
    S = s.service_rate_S
    ok_tx = rng.random(slots) < p
    ok_retx = rng.random(slots) < p
    tx = np.empty(slots)
    retx = np.empty(slots)
    q_tx = q_retx = 0.0
    tries = 0
    dropped = 0.0
    busy = 0
    for t in range(slots):
        q_tx += lambda_arrival
        if ok_tx[t]:
            q_tx -= min(q_tx, S)
        tx[t] = q_tx

        q_retx += lambda_arrival
        if q_retx > 0:
            busy += 1
            chunk = min(q_retx, S)
            if ok_retx[t]:
                q_retx -= chunk
                tries = 0
            else:
                tries += 1
                if tries >= s.n_max:
                    q_retx -= chunk
                    dropped += chunk
                    tries = 0
        retx[t] = q_retx
    return QueueTrace(tx, retx, dropped, busy / slots)


def is_drifting(trace: np.ndarray, lambda_arrival: float) -> bool:
    """Empirical instability: sustained growth over the second half of the path.

    A queue is judged stable when its last-quartile mean stays within 2x of
    its third-quartile mean and its second-half growth rate is below 5% of
    the arrival rate.
    """
    n = len(trace)
    if lambda_arrival <= 0 or n < 8:
        return False
    half = n // 2
    growth = (trace[-1] - trace[half]) / (n - 1 - half)
    q3 = trace[half : 3 * n // 4].mean()
    q4 = trace[3 * n // 4 :].mean()
    return growth > 0.05 * lambda_arrival or q4 > 2.0 * max(q3, lambda_arrival)

