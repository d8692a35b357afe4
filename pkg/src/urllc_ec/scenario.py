"""Scenario data model, JSON loading and validation.

A scenario file is a flat JSON object using the field names of
:class:`Scenario`.  Two optional sub-objects are accepted:

``mobility``
    ``{"velocity_v": m/s, "carrier_fc": Hz}``
``calibration``
    pins quantities that normally come from PHY simulation:
    ``service_rate_S``, ``p1p2`` (joint PDCCH*PDSCH success), ``p3`` and
    ``rho``.  A quantity may be given at top level or in the calibration
    block, never both.

When ``service_rate_S`` is absent it is derived from ``snr``, ``payload_L``
and ``epsilon`` through the finite-blocklength approximation; ``t_tx`` is
derived as blocklength / bandwidth unless given.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

from . import finite_blocklength as fbl
from .delay_model import (
    DEFAULT_FEEDBACK_MS,
    GNB_PROCESSING_SYMBOLS,
    OFDM_SYMBOL_MS,
    SLOT_MS_NUMEROLOGY1,
    UE_PROCESSING_SYMBOLS,
    DelayBudget,
)

SPEED_OF_LIGHT = 299_792_458.0


class ScenarioError(ValueError):
    """Raised when a scenario document is malformed or violates an invariant."""


@dataclass(frozen=True)
class MobilityParams:
    velocity_v: float
    carrier_fc: float

    def __post_init__(self):
        if not self.velocity_v > 0:
            raise ScenarioError(f"velocity_v must be > 0, got {self.velocity_v}")
        if not self.carrier_fc > 0:
            raise ScenarioError(f"carrier_fc must be > 0, got {self.carrier_fc}")


def coherence_time(m: MobilityParams) -> float:
    """Approximate channel coherence time in milliseconds."""
    return 1e3 * math.sqrt(9.0 / (16.0 * math.pi)) * SPEED_OF_LIGHT / (m.velocity_v * m.carrier_fc)


@dataclass(frozen=True)
class Scenario:
    p1: float
    p2: float
    p3: float
    service_rate_S: float
    d_max: float
    d_gnb: float
    d_ue: float
    d_feed: float
    d_timeout: float
    t_tx: float
    n_max: int
    r_th: float
    rho: float | None
    bandwidth_B: float
    payload_L: float
    snr: float
    epsilon: float
    name: str | None = None
    mobility: MobilityParams | None = None
    calibration: Mapping[str, float] | None = None
    s_source: str = "given"
    t_source: str = "given"
    given: frozenset = field(default_factory=frozenset, repr=False)

    @property
    def p_success(self) -> float:
        return self.p1 * self.p2

    @property
    def budget(self) -> DelayBudget:
        return DelayBudget(self.d_gnb, self.d_ue, self.t_tx, self.d_feed, self.d_timeout)

    @property
    def blocklength(self) -> float:
        return self.payload_L / self.service_rate_S

    def to_dict(self) -> dict[str, Any]:
        """Re-serialise the fields that were given (not derived) at load time."""
        out: dict[str, Any] = {}
        for key in _TOP_LEVEL_KEYS:
            if key in self.given:
                out[key] = getattr(self, key)
        if self.calibration is not None:
            out["calibration"] = dict(self.calibration)
        if self.mobility is not None:
            out["mobility"] = {
                "velocity_v": self.mobility.velocity_v,
                "carrier_fc": self.mobility.carrier_fc,
            }
        return out

    def replace(self, **changes) -> "Scenario":
        """Copy with changed inputs, re-running derivation and validation."""
        doc = self.to_dict()
        calib = doc.get("calibration")
        for key, value in changes.items():
            if calib is not None and (key in calib or key == "p1p2"):
                calib[key] = value
            else:
                doc[key] = value
        return scenario_from_dict(doc)


_NUMERIC_FIELDS = (
    "p1", "p2", "p3", "service_rate_S", "d_max", "d_gnb", "d_ue", "d_feed",
    "d_timeout", "t_tx", "n_max", "r_th", "rho", "bandwidth_B", "payload_L",
    "snr", "epsilon",
)
_TOP_LEVEL_KEYS = ("name",) + _NUMERIC_FIELDS
_CALIBRATION_KEYS = ("service_rate_S", "p1p2", "p3", "rho")
_MOBILITY_KEYS = ("velocity_v", "carrier_fc")

DEFAULTS: dict[str, Any] = {
    "d_gnb": GNB_PROCESSING_SYMBOLS * OFDM_SYMBOL_MS,
    "d_ue": UE_PROCESSING_SYMBOLS * OFDM_SYMBOL_MS,
    "d_feed": DEFAULT_FEEDBACK_MS,
    "n_max": 3,
    "r_th": 0.99999,
    "rho": None,
    "bandwidth_B": 20e6,
    "payload_L": 256.0,
    "snr": 15.0,
    "epsilon": 1e-5,
}


def _number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ScenarioError(f"{key} must be finite, got {value!r}")
    return value


def _prob(key: str, value: float, *, closed_top: bool = True) -> None:
    ok = 0.0 <= value <= 1.0 if closed_top else 0.0 <= value < 1.0
    if not ok:
        raise ScenarioError(f"{key} out of [0,1{']' if closed_top else ')'}: {value}")


def scenario_from_dict(doc: Mapping[str, Any]) -> Scenario:
    if not isinstance(doc, Mapping):
        raise ScenarioError("scenario must be a JSON object")
    unknown = set(doc) - set(_TOP_LEVEL_KEYS) - {"calibration", "mobility"}
    if unknown:
        raise ScenarioError(f"unknown keys: {', '.join(sorted(unknown))}")

    given = frozenset(k for k in _TOP_LEVEL_KEYS if k in doc)
    vals: dict[str, Any] = {}
    for key in _NUMERIC_FIELDS:
        if key in doc and not (key == "rho" and doc[key] is None):
            vals[key] = _number(key, doc[key])

    calib_doc = doc.get("calibration")
    calibration = None
    if calib_doc is not None:
        if not isinstance(calib_doc, Mapping):
            raise ScenarioError("calibration must be an object")
        bad = set(calib_doc) - set(_CALIBRATION_KEYS)
        if bad:
            raise ScenarioError(f"unknown calibration keys: {', '.join(sorted(bad))}")
        calibration = {k: _number(f"calibration.{k}", v) for k, v in calib_doc.items()}
        for key in ("service_rate_S", "p3", "rho"):
            if key in calibration:
                if key in vals:
                    raise ScenarioError(f"{key} given both at top level and in calibration")
                vals[key] = calibration[key]
        if "p1p2" in calibration:
            if "p2" in vals:
                raise ScenarioError("p2 conflicts with calibration.p1p2")
            p1p2 = calibration["p1p2"]
            _prob("calibration.p1p2", p1p2)
            p1 = vals.setdefault("p1", 1.0)
            _prob("p1", p1)
            if p1p2 > p1:
                raise ScenarioError(f"calibration.p1p2={p1p2} exceeds p1={p1}")
            vals["p2"] = p1p2 / p1 if p1 > 0 else 0.0

    for key in ("p1", "p2", "p3"):
        if key not in vals:
            raise ScenarioError(f"missing required field {key}")
        _prob(key, vals[key])
    if "d_max" not in vals:
        raise ScenarioError("missing required field d_max")

    for key, default in DEFAULTS.items():
        vals.setdefault(key, default)
    vals.setdefault("d_timeout", vals["d_feed"] + SLOT_MS_NUMEROLOGY1)

    for key in ("d_gnb", "d_ue", "d_feed", "d_timeout"):
        if not vals[key] >= 0:
            raise ScenarioError(f"{key} must be >= 0 ms, got {vals[key]}")
    if not vals["d_max"] > 0:
        raise ScenarioError(f"d_max must be > 0 ms, got {vals['d_max']}")
    n_max = vals["n_max"]
    if n_max != int(n_max) or n_max < 1:
        raise ScenarioError(f"n_max must be a positive integer, got {n_max}")
    vals["n_max"] = int(n_max)
    _prob("r_th", vals["r_th"], closed_top=False)
    if vals["rho"] is not None and not vals["rho"] > 0:
        raise ScenarioError(f"rho must be > 0, got {vals['rho']}")
    for key in ("bandwidth_B", "payload_L", "snr"):
        if not vals[key] > 0:
            raise ScenarioError(f"{key} must be > 0, got {vals[key]}")
    if not 0 < vals["epsilon"] < 1:
        raise ScenarioError(f"epsilon out of (0,1): {vals['epsilon']}")

    if "service_rate_S" in vals:
        s_source = "calibration" if calibration and "service_rate_S" in calibration else "given"
        if not vals["service_rate_S"] > 0:
            raise ScenarioError(f"service_rate_S must be > 0, got {vals['service_rate_S']}")
        r = vals["payload_L"] / vals["service_rate_S"]
    else:
        s_source = "derived"
        r = fbl.required_blocklength(vals["snr"], vals["payload_L"], vals["epsilon"])
        vals["service_rate_S"] = vals["payload_L"] / r
    if "t_tx" in vals:
        t_source = "given"
        if not vals["t_tx"] >= 0:
            raise ScenarioError(f"t_tx must be >= 0 ms, got {vals['t_tx']}")
    else:
        t_source = "derived"
        vals["t_tx"] = fbl.transmission_time(r, vals["bandwidth_B"])

    first = vals["d_gnb"] + vals["d_ue"] + vals["t_tx"]
    if not vals["d_max"] > first:
        raise ScenarioError(
            f"d_max={vals['d_max']} ms does not exceed the single-attempt delay {first:.6g} ms"
        )

    mobility = None
    mob_doc = doc.get("mobility")
    if mob_doc is not None:
        if not isinstance(mob_doc, Mapping) or set(mob_doc) != set(_MOBILITY_KEYS):
            raise ScenarioError("mobility must be an object with velocity_v and carrier_fc")
        mobility = MobilityParams(
            _number("mobility.velocity_v", mob_doc["velocity_v"]),
            _number("mobility.carrier_fc", mob_doc["carrier_fc"]),
        )

    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ScenarioError("name must be a string")

    kwargs = {f.name: vals[f.name] for f in fields(Scenario) if f.name in vals}
    return Scenario(
        **kwargs,
        name=name,
        mobility=mobility,
        calibration=calibration,
        s_source=s_source,
        t_source=t_source,
        given=given,
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from exc
    return scenario_from_dict(doc)
