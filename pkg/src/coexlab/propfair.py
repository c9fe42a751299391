"""Proportional-fair choice of the mean LTE off time.

With log utilities, the KKT multipliers are all one and the optimum reduces
to a single stationarity condition in z = log(T_off - c1):

    e^z / (T_on + c1 + e^z) = n / (n + 1)

which has the closed form e^z = n (T_on + c1). The root is also found
numerically as a guard on the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .model import Scenario, Scheme, SlotStats, collision_overhead, p_lte, slot_stats


@dataclass(frozen=True)
class PropFairResult:
    scheme: Scheme
    n: int
    t_on: float  # us
    t_off_star: float  # us
    z_star: float  # us, e^z at the optimum
    c1: float  # us
    c2: float  # us
    lte_airtime: float
    wifi_airtime: float
    kkt_residual: float

    CSV_COLUMNS = ("scheme", "n", "t_on_ms", "c1_us", "t_off_star_ms",
                   "wifi_airtime", "lte_airtime", "kkt_residual")

    def csv_row(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "n": self.n,
            "t_on_ms": self.t_on / 1000.0,
            "c1_us": self.c1,
            "t_off_star_ms": self.t_off_star / 1000.0,
            "wifi_airtime": self.wifi_airtime,
            "lte_airtime": self.lte_airtime,
            "kkt_residual": self.kkt_residual,
        }


def overhead_terms(scenario: Scenario, stats: SlotStats | None = None) -> tuple[float, float]:
    """Return ``(c1, c2)`` in us.

    For LBE, c2 keeps the minus sign on the reservation term exactly as
    published; LTE throughput is computed from the model, not from c2.
    """
    stats = stats or slot_stats(scenario)
    t_fra, _, _ = scenario.timings_us()
    t_lte = scenario.t_lte_us
    p = p_lte(scenario, stats)
    if scenario.scheme is Scheme.CSAT:
        c1 = collision_overhead(scenario, stats)
        c2 = math.ceil(t_fra / (2 * t_lte)) * t_lte * p
        return c1, c2
    t_res = t_lte / 2.0
    c2 = max(t_res, math.ceil(t_fra / t_lte) * t_lte) * p - t_res * (1.0 - p)
    return 0.0, c2


def stationarity(z: float, t_on: float, c1: float, n: int) -> float:
    """Left minus right side of the KKT condition, as a function of z = log(T_off - c1)."""
    ez = math.exp(z)
    return ez / (t_on + c1 + ez) - n / (n + 1)


def closed_form_z(t_on: float, c1: float, n: int) -> float:
    return n * (t_on + c1)


def numeric_z(t_on: float, c1: float, n: int) -> float:
    """Bracketed root of the stationarity condition; returns e^z."""
    target = closed_form_z(t_on, c1, n)
    lo, hi = math.log(target) - 10.0, math.log(target) + 10.0
    while stationarity(lo, t_on, c1, n) > 0:
        lo -= 10.0
    while stationarity(hi, t_on, c1, n) < 0:
        hi += 10.0
    z = brentq(stationarity, lo, hi, args=(t_on, c1, n), xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(z)


def solve_toff(scenario: Scenario, stats: SlotStats | None = None) -> PropFairResult:
    n = scenario.n
    if n < 1:
        raise ValueError("proportional-fair T_off needs at least one WiFi station")
    stats = stats or slot_stats(scenario)
    c1, c2 = overhead_terms(scenario, stats)
    t_on = scenario.t_on_us
    if t_on + c1 <= 0:
        raise ValueError("T_on + c1 must be positive")

    ez = closed_form_z(t_on, c1, n)
    ez_num = numeric_z(t_on, c1, n)
    if not math.isclose(ez, ez_num, rel_tol=1e-12):
        raise ArithmeticError(f"closed form {ez} disagrees with numeric root {ez_num}")

    t_off = ez + c1
    wifi, lte = (t_off - c1) / (t_on + t_off), (t_on + c1) / (t_on + t_off)
    residual = abs(ez / (t_on + c1 + ez) - n / (n + 1))
    return PropFairResult(
        scheme=scenario.scheme, n=n, t_on=t_on, t_off_star=t_off, z_star=ez,
        c1=c1, c2=c2, lte_airtime=lte, wifi_airtime=wifi, kkt_residual=residual,
    )


def airtime_fractions(result: PropFairResult, scenario: Scenario | None = None) -> tuple[float, float]:
    """``(wifi, lte)`` airtime fractions at the optimum."""
    t_on = result.t_on if scenario is None else scenario.t_on_us
    cycle = t_on + result.t_off_star
    return (result.t_off_star - result.c1) / cycle, (t_on + result.c1) / cycle


def with_propfair_off(scenario: Scenario) -> tuple[Scenario, PropFairResult]:
    """Copy of ``scenario`` with its mean off time set to the optimum."""
    result = solve_toff(scenario)
    return replace(scenario, t_off_mean=result.t_off_star / 1000.0), result
