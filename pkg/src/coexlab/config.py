"""Flat ``key = value`` experiment files.

Sections::

    [experiment]   name, schemes, use_propfair, runs, horizon, base_seed, group_by
    [scenario]     base Scenario fields (n, tau, n_agg, payload_d, t_on, t_off_mean, t_lte, lte_rate)
    [phy]          PhyProfile overrides
    [sweep]        one key per swept field, comma-separated values; the grid is
                   the Cartesian product in the order the keys appear
"""

from __future__ import annotations

import configparser
import itertools
from dataclasses import fields, replace
from pathlib import Path

from .model import Scenario, Scheme
from .phy_timing import PhyProfile

TRAFFIC_KEYS = ("n_agg", "payload_d")
SCENARIO_KEYS = ("n", "tau", "scheme", "t_on", "t_off_mean", "t_lte", "lte_rate")
_INT_KEYS = {"n", "n_agg", "payload_d"}


def parse_value(key: str, raw: str):
    raw = raw.strip()
    if key == "scheme":
        return Scheme.parse(raw)
    if key in _INT_KEYS:
        return int(raw)
    if key == "tau" and "/" in raw:
        num, den = raw.split("/")
        return float(num) / float(den)
    return float(raw)


def apply_delta(base: Scenario, delta: dict) -> Scenario:
    """Return ``base`` with Scenario or traffic fields overridden."""
    traffic = {k: v for k, v in delta.items() if k in TRAFFIC_KEYS}
    other = {k: v for k, v in delta.items() if k not in TRAFFIC_KEYS}
    unknown = set(other) - set(SCENARIO_KEYS)
    if unknown:
        raise KeyError(f"unknown scenario fields: {sorted(unknown)}")
    if traffic:
        other["traffic"] = replace(base.traffic, **traffic)
    return replace(base, **other)


def read(path: str | Path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    with open(path) as fh:
        parser.read_file(fh)
    return parser


def scenario_from_section(section, phy: PhyProfile | None = None) -> Scenario:
    values = {k: parse_value(k, v) for k, v in section.items()}
    base = Scenario(phy=phy or PhyProfile())
    return apply_delta(base, values)


def phy_from_section(section) -> PhyProfile:
    kinds = {f.name: f.type for f in fields(PhyProfile)}
    out = {}
    for k, v in section.items():
        if k not in kinds:
            raise KeyError(f"unknown PHY field {k!r}")
        out[k] = int(v) if kinds[k] in (int, "int") else float(v)
    return replace(PhyProfile(), **out)


def sweep_from_section(section) -> list[dict]:
    keys = list(section.keys())
    axes = [[parse_value(k, v) for v in section[k].split(",") if v.strip()] for k in keys]
    return [dict(zip(keys, combo)) for combo in itertools.product(*axes)]


def parse_bool(raw: str) -> bool:
    return raw.strip().lower() in ("1", "true", "yes", "on")
