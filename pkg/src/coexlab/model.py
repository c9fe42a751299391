"""Closed-form WiFi/LTE throughput under CSAT and LBE duty cycling.

Durations inside this module are float microseconds; throughputs are
returned in bit/s. Scenario fields keep the units of the experiment configs
(LTE times in ms).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from .phy_timing import PhyProfile, WifiTrafficProfile, busy_slot_components


class InvalidRegimeError(ValueError):
    """The configuration leaves a negative effective airtime."""


class Scheme(str, enum.Enum):
    CSAT = "csat"
    LBE = "lbe"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


@dataclass(frozen=True)
class Scenario:
    n: int = 1
    tau: float | Sequence[float] = 1 / 16
    traffic: WifiTrafficProfile = field(default_factory=WifiTrafficProfile)
    phy: PhyProfile = field(default_factory=PhyProfile)
    scheme: Scheme = Scheme.CSAT
    t_on: float = 10.0  # ms
    t_off_mean: float = 10.0  # ms
    t_lte: float = 1.0  # ms, LTE subframe
    lte_rate: float | None = None  # bits/us; defaults to phy.data_rate

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.n < 0:
            raise ValueError("n must be >= 0")
        taus = self.taus
        if len(taus) != self.n:
            raise ValueError(f"expected {self.n} transmission probabilities, got {len(taus)}")
        if any(not 0 < t < 1 for t in taus):
            raise ValueError("tau must lie in (0, 1)")
        if self.t_on <= 0 or self.t_lte <= 0:
            raise ValueError("t_on and t_lte must be positive")
        if self.t_off_mean < 0:
            raise ValueError("t_off_mean must be >= 0")

    @property
    def taus(self) -> tuple[float, ...]:
        if isinstance(self.tau, (int, float)):
            return (float(self.tau),) * self.n
        return tuple(float(t) for t in self.tau)

    @property
    def rate(self) -> float:
        return self.phy.data_rate if self.lte_rate is None else self.lte_rate

    @property
    def t_on_us(self) -> float:
        return self.t_on * 1000.0

    @property
    def t_off_us(self) -> float:
        return self.t_off_mean * 1000.0

    @property
    def t_lte_us(self) -> float:
        return self.t_lte * 1000.0

    def timings_us(self) -> tuple[float, float, float]:
        """``(t_fra, t_ack, t_b)`` in microseconds."""
        t_fra, t_ack, t_b = busy_slot_components(self.phy, self.traffic)
        return t_fra / 1000.0, t_ack / 1000.0, t_b / 1000.0


@dataclass(frozen=True)
class SlotStats:
    p_e: float
    p_s: float
    p_c: float
    p_succ: tuple[float, ...]
    mean_slot: float  # us


@dataclass(frozen=True)
class AnalyticReport:
    scheme: Scheme
    s_wifi: tuple[float, ...]  # bit/s per station
    s_lte: float  # bit/s
    p_lte: float
    eff_off: float  # us
    wifi_airtime_fraction: float
    lte_airtime_fraction: float
    stats: SlotStats

    CSV_COLUMNS = ("scheme", "n", "tau", "n_agg", "t_on_ms", "t_off_ms", "s_wifi_mbps",
                   "s_lte_mbps", "p_lte", "wifi_airtime", "lte_airtime")

    def csv_row(self, scenario: Scenario) -> dict:
        taus = scenario.taus
        return {
            "scheme": self.scheme.value,
            "n": scenario.n,
            "tau": taus[0] if taus else float("nan"),
            "n_agg": scenario.traffic.n_agg,
            "t_on_ms": scenario.t_on,
            "t_off_ms": scenario.t_off_mean,
            "s_wifi_mbps": (self.s_wifi[0] / 1e6) if self.s_wifi else 0.0,
            "s_lte_mbps": self.s_lte / 1e6,
            "p_lte": self.p_lte,
            "wifi_airtime": self.wifi_airtime_fraction,
            "lte_airtime": self.lte_airtime_fraction,
        }


def slot_stats(scenario: Scenario) -> SlotStats:
    taus = scenario.taus
    p_e = math.prod(1.0 - t for t in taus)
    p_succ = tuple(t / (1.0 - t) * p_e for t in taus)
    p_s = math.fsum(p_succ)
    p_c = max(0.0, 1.0 - p_e - p_s)
    _, _, t_b = scenario.timings_us()
    busy = t_b + scenario.phy.difs
    mean_slot = scenario.phy.sigma * p_e + busy * (1.0 - p_e)
    return SlotStats(p_e=p_e, p_s=p_s, p_c=p_c, p_succ=p_succ, mean_slot=mean_slot)


def p_lte_csat(stats: SlotStats, phy: PhyProfile, traffic: WifiTrafficProfile) -> float:
    """Chance that an unsynchronised LTE start lands on a WiFi frame (time-average)."""
    t_fra, _, t_b = busy_slot_components(phy, traffic)
    return (stats.p_s * t_b / 1000.0 + stats.p_c * t_fra / 1000.0) / stats.mean_slot


def p_lte_lbe(stats: SlotStats) -> float:
    return 1.0 - stats.p_e


def p_lte(scenario: Scenario, stats: SlotStats | None = None) -> float:
    stats = stats or slot_stats(scenario)
    if scenario.scheme is Scheme.CSAT:
        return p_lte_csat(stats, scenario.phy, scenario.traffic)
    return p_lte_lbe(stats)


def collision_overhead(scenario: Scenario, stats: SlotStats | None = None) -> float:
    """Mean WiFi airtime (us) lost per burst to a truncated frame; zero for LBE."""
    if scenario.scheme is Scheme.LBE:
        return 0.0
    t_fra, _, _ = scenario.timings_us()
    return t_fra / 2.0 * p_lte(scenario, stats)


def effective_off(scenario: Scenario, stats: SlotStats | None = None) -> float:
    """Mean off-period time (us) covered by full MAC slots."""
    value = scenario.t_off_us - collision_overhead(scenario, stats)
    if value < 0:
        raise InvalidRegimeError(
            f"effective off time {value:.3f} us < 0 (t_off={scenario.t_off_mean} ms too short)"
        )
    return value


def base_rate(scenario: Scenario, stats: SlotStats | None = None) -> tuple[float, ...]:
    """Per-station throughput (bit/s) with no LTE on the channel."""
    stats = stats or slot_stats(scenario)
    bits = scenario.traffic.bits_per_success
    return tuple(p * bits / stats.mean_slot * 1e6 for p in stats.p_succ)


def wifi_throughput(scenario: Scenario, stats: SlotStats | None = None) -> tuple[float, ...]:
    stats = stats or slot_stats(scenario)
    scale = effective_off(scenario, stats) / (scenario.t_on_us + scenario.t_off_us)
    return tuple(s * scale for s in base_rate(scenario, stats))


def lte_loss_per_burst(scenario: Scenario, stats: SlotStats | None = None) -> float:
    """Mean LTE transmit time (us) lost per burst to collisions and reservation."""
    stats = stats or slot_stats(scenario)
    t_fra, _, _ = scenario.timings_us()
    t_lte = scenario.t_lte_us
    p = p_lte(scenario, stats)
    if scenario.scheme is Scheme.CSAT:
        return math.ceil(t_fra / (2 * t_lte)) * t_lte * p
    t_res = t_lte / 2.0
    return max(t_res, math.ceil(t_fra / t_lte) * t_lte) * p + t_res * (1.0 - p)


def lte_throughput(scenario: Scenario, stats: SlotStats | None = None) -> float:
    """LTE throughput in bit/s.

    Assumes ``t_on`` is a whole number of subframes; this is not checked.
    """
    useful = scenario.t_on_us - lte_loss_per_burst(scenario, stats)
    if useful < 0:
        raise InvalidRegimeError(f"LTE useful time {useful:.3f} us < 0 per burst")
    return scenario.rate * useful / (scenario.t_on_us + scenario.t_off_us) * 1e6


def analyze(scenario: Scenario) -> AnalyticReport:
    stats = slot_stats(scenario)
    cycle = scenario.t_on_us + scenario.t_off_us
    eff = effective_off(scenario, stats)
    wifi_air = eff / cycle
    return AnalyticReport(
        scheme=scenario.scheme,
        s_wifi=wifi_throughput(scenario, stats),
        s_lte=lte_throughput(scenario, stats),
        p_lte=p_lte(scenario, stats),
        eff_off=eff,
        wifi_airtime_fraction=wifi_air,
        lte_airtime_fraction=1.0 - wifi_air,
        stats=stats,
    )
