"""802.11ac frame and ACK airtime.

All returned durations are integer nanoseconds. Profile fields are given in
microseconds and bits, as they appear in the 802.11ac parameter tables; every
default value converts to nanoseconds exactly.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

NS_PER_US = 1000


def us_to_ns(value: float) -> int:
    return int(round(value * NS_PER_US))


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class PhyProfile:
    # durations in microseconds
    sigma: float = 9.0
    difs: float = 34.0
    sifs: float = 16.0
    t_plcp: float = 40.0
    # lengths in bits
    l_s: int = 16
    l_del: int = 32
    l_mac_h: int = 288
    l_t: int = 6
    l_ack: int = 256
    n_sym: int = 540
    t_sym: float = 4.0
    # bits per microsecond (= Mb/s)
    data_rate: float = 135.0

    def __post_init__(self):
        for name in ("sigma", "difs", "sifs", "t_plcp", "t_sym"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("l_s", "l_del", "l_mac_h", "l_t", "l_ack"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.n_sym <= 0:
            raise ValueError("n_sym must be positive")
        if not math.isclose(self.n_sym, self.data_rate * self.t_sym, rel_tol=1e-9):
            raise ValueError(
                f"n_sym={self.n_sym} inconsistent with data_rate*t_sym="
                f"{self.data_rate * self.t_sym}"
            )

    @property
    def sigma_ns(self) -> int:
        return us_to_ns(self.sigma)

    @property
    def difs_ns(self) -> int:
        return us_to_ns(self.difs)

    @property
    def sifs_ns(self) -> int:
        return us_to_ns(self.sifs)

    @classmethod
    def from_file(cls, path: str | Path) -> "PhyProfile":
        """Load overrides from a ``key = value`` file (an optional ``[phy]`` header is allowed)."""
        text = Path(path).read_text()
        return cls.from_text(text)

    @classmethod
    def from_text(cls, text: str) -> "PhyProfile":
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        if not text.lstrip().startswith("["):
            text = "[phy]\n" + text
        parser.read_string(text)
        section = parser["phy"] if parser.has_section("phy") else parser[parser.sections()[0]]
        kinds = {f.name: f.type for f in fields(cls)}
        overrides = {}
        for key, raw in section.items():
            if key not in kinds:
                raise KeyError(f"unknown PHY field {key!r}")
            overrides[key] = int(raw) if kinds[key] in (int, "int") else float(raw)
        return replace(cls(), **overrides)


@dataclass(frozen=True)
class WifiTrafficProfile:
    n_agg: int = 1
    payload_d: int = 12000

    def __post_init__(self):
        if self.n_agg < 1:
            raise ValueError("n_agg must be >= 1")
        if self.payload_d < 0:
            raise ValueError("payload_d must be >= 0")

    @property
    def bits_per_success(self) -> int:
        """Payload bits delivered by one successful transmission (headers excluded)."""
        return self.n_agg * self.payload_d


def _symbols_ns(phy: PhyProfile, bits: int) -> int:
    if phy.n_sym == 0:
        raise ValueError("n_sym must be non-zero")
    return _ceil_div(bits, phy.n_sym) * us_to_ns(phy.t_sym)


def frame_duration(phy: PhyProfile, traffic: WifiTrafficProfile) -> int:
    """Data frame (A-MPDU) airtime in ns."""
    bits = phy.l_s + traffic.n_agg * (phy.l_del + phy.l_mac_h + traffic.payload_d) + phy.l_t
    return us_to_ns(phy.t_plcp) + _symbols_ns(phy, bits)


def ack_duration(phy: PhyProfile) -> int:
    """ACK airtime in ns."""
    return us_to_ns(phy.t_plcp) + _symbols_ns(phy, phy.l_s + phy.l_ack + phy.l_t)


def busy_slot_components(phy: PhyProfile, traffic: WifiTrafficProfile) -> tuple[int, int, int]:
    """Return ``(t_fra, t_ack, t_b)`` in ns, with ``t_b = t_fra + SIFS + t_ack``.

    A busy MAC slot lasts ``t_b + DIFS``.
    """
    t_fra = frame_duration(phy, traffic)
    t_ack = ack_duration(phy)
    return t_fra, t_ack, t_fra + phy.sifs_ns + t_ack
