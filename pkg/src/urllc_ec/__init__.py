"""Reliability and effective-capacity analysis of URLLC links over RLC acknowledged mode."""

from .delay_model import DelayBudget, default_numerology1_budget, deterministic_delay, slack
from .effective_capacity import ec, ec_mgf_retx, ec_retx, ec_tx, stability_check
from .finite_blocklength import (
    achievable_rate,
    capacity,
    dispersion,
    q_inverse,
    required_blocklength,
    transmission_time,
)
from .operating_region import OperatingRegion, ec_supremum, solve_region, theta_max, theta_min
from .reliability import attempt_probs, dvp, reliability, reliability_ceiling, unreliability
from .scenario import MobilityParams, Scenario, ScenarioError, coherence_time, load_scenario

__version__ = "0.1.0"
