"""Deterministic delay accounting for multi-attempt RLC AM timelines.

All durations are milliseconds.  Propagation delay is not modelled.
"""

from __future__ import annotations

from dataclasses import dataclass

#: Slot length at numerology 1 (30 kHz SCS).
SLOT_MS_NUMEROLOGY1 = 0.5
#: One OFDM symbol at numerology 1 with normal cyclic prefix.
OFDM_SYMBOL_MS = SLOT_MS_NUMEROLOGY1 / 14.0
GNB_PROCESSING_SYMBOLS = 7.0
UE_PROCESSING_SYMBOLS = 4.5
DEFAULT_FEEDBACK_MS = SLOT_MS_NUMEROLOGY1


@dataclass(frozen=True)
class DelayBudget:
    d_gnb: float
    d_ue: float
    t_tx: float
    d_feed: float
    d_timeout: float

    def __post_init__(self):
        for name in ("d_gnb", "d_ue", "t_tx", "d_feed", "d_timeout"):
            v = getattr(self, name)
            if not v >= 0.0:
                raise ValueError(f"{name} must be >= 0 ms, got {v}")

    @property
    def per_attempt(self) -> float:
        """Processing plus airtime paid by every attempt."""
        return self.d_gnb + self.d_ue + self.t_tx


def _check_events(n: int, a1: int, a2: int) -> None:
    if n < 1:
        raise ValueError(f"attempt count must be >= 1, got {n}")
    if a1 < 0 or a2 < 0:
        raise ValueError("event counts must be >= 0")
    if a1 + a2 > n - 1:
        raise ValueError(
            f"{a1} feedback + {a2} timeout events exceed the {n - 1} failed attempts of an {n}-attempt path"
        )


def deterministic_delay(b: DelayBudget, n: int, a1: int, a2: int) -> float:
    """Total fixed delay of ``n`` attempts with ``a1`` NACK and ``a2`` timeout retries."""
    _check_events(n, a1, a2)
    return n * b.per_attempt + a1 * b.d_feed + a2 * b.d_timeout


def slack(d_max: float, b: DelayBudget, n: int, a1: int, a2: int) -> float:
    """Room left for queueing delay under ``d_max``; negative means the path is dead."""
    return d_max - deterministic_delay(b, n, a1, a2)


def default_numerology1_budget(
    t_tx: float,
    d_feed: float = DEFAULT_FEEDBACK_MS,
    d_timeout: float | None = None,
) -> DelayBudget:
    """Budget with 3GPP numerology-1 processing times (7 OS at gNB, 4.5 OS at UE).

    The timeout defaults to the feedback window plus one slot.
    """
    if d_timeout is None:
        d_timeout = d_feed + SLOT_MS_NUMEROLOGY1
    return DelayBudget(
        d_gnb=GNB_PROCESSING_SYMBOLS * OFDM_SYMBOL_MS,
        d_ue=UE_PROCESSING_SYMBOLS * OFDM_SYMBOL_MS,
        t_tx=t_tx,
        d_feed=d_feed,
        d_timeout=d_timeout,
    )
