"""Unlicensed LTE / WiFi coexistence: throughput model, proportional-fair
duty cycle, and packet-level simulator for CSAT and LBE."""

from .model import AnalyticReport, InvalidRegimeError, Scenario, Scheme, SlotStats, analyze
from .phy_timing import PhyProfile, WifiTrafficProfile
from .propfair import PropFairResult, solve_toff
from .sim import SimConfig, SimReport, replicate, run

__all__ = [
    "AnalyticReport", "InvalidRegimeError", "PhyProfile", "PropFairResult", "Scenario",
    "Scheme", "SimConfig", "SimReport", "SlotStats", "WifiTrafficProfile", "analyze",
    "replicate", "run", "solve_toff",
]
