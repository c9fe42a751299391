"""Packet-level simulation of saturated 802.11 stations sharing a channel
with a duty-cycled LTE network (CSAT or LBE).

Time is kept in integer nanoseconds. Between LTE bursts the channel runs the
slotted 802.11 process: in every MAC slot each station transmits
independently with probability tau. Slot outcomes for a whole off period are
drawn in one batch and then cut at the LTE start (or the horizon), which is
equivalent to processing slot-boundary events one by one: within an off
period the only events are slot boundaries, and an LTE start that coincides
with a boundary is handled before it (no WiFi attempt in that slot).

Random streams
--------------
Every stream is a Philox generator keyed by
``SeedSequence(seed, spawn_key=(k,))``:

* ``k = 0``: LTE off-time draws,
* ``k = 1``: LBE reservation lengths,
* ``k = 2 + j``: transmit decisions of station ``j``.

:func:`replicate` derives the per-run seed of replication ``r`` from
``SeedSequence(base_seed, spawn_key=(r,))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .model import Scenario, Scheme
from .phy_timing import busy_slot_components

_MAX_CHUNK = 1 << 16


class OffDistribution:
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class SimConfig:
    scenario: Scenario
    horizon: float = 50.0  # s
    seed: int = 0
    off_distribution: str = OffDistribution.EXPONENTIAL
    lte_enabled: bool = True
    # LBE: carry the wait for the slot boundary into the next off timer so the
    # realised mean off time equals t_off_mean. False gives the uncompensated timer.
    lbe_compensate_deferral: bool = True

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.off_distribution != OffDistribution.EXPONENTIAL:
            raise ValueError(f"unsupported off distribution {self.off_distribution!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class SimReport:
    horizon_ns: int
    n_agg: int
    payload_d: int
    wifi_success_count: list[int]
    wifi_collision_count: int = 0
    lte_wifi_collision_count: int = 0
    lte_starts: int = 0
    lte_bits: float = 0.0
    idle_time: int = 0
    wifi_busy_time: int = 0
    lte_on_time: int = 0
    truncated_partial_time: int = 0
    off_time_total: int = 0  # summed over off periods that ended in an LTE start
    completion_times: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def n(self) -> int:
        return len(self.wifi_success_count)

    @property
    def horizon_s(self) -> float:
        return self.horizon_ns / 1e9

    @property
    def wifi_bits(self) -> list[int]:
        return [c * self.n_agg * self.payload_d for c in self.wifi_success_count]

    @property
    def s_wifi(self) -> list[float]:
        """Per-station throughput, bit/s."""
        return [b / self.horizon_s for b in self.wifi_bits]

    @property
    def s_wifi_mean(self) -> float:
        return float(np.mean(self.s_wifi)) if self.n else 0.0

    @property
    def s_lte(self) -> float:
        return self.lte_bits / self.horizon_s

    @property
    def lte_airtime(self) -> float:
        return self.lte_on_time / self.horizon_ns

    @property
    def p_lte_hit(self) -> float:
        return self.lte_wifi_collision_count / self.lte_starts if self.lte_starts else float("nan")

    @property
    def realized_off_mean(self) -> float:
        """Mean realised off period in us."""
        return self.off_time_total / self.lte_starts / 1000.0 if self.lte_starts else float("nan")

    @property
    def delay_samples(self) -> np.ndarray:
        """MAC access delays in us, pooled over stations.

        A saturated station's next frame reaches head of line as soon as the
        previous ACK completes, so each delay is the gap between consecutive
        successes (the first frame is at head of line at time zero).
        """
        parts = [np.diff(c, prepend=0) for c in self.completion_times if len(c)]
        if not parts:
            return np.empty(0)
        return np.concatenate(parts) / 1000.0

    def accounted_time(self) -> int:
        return self.idle_time + self.wifi_busy_time + self.lte_on_time + self.truncated_partial_time


class _Slots:
    """Per-station transmit draws, generated in batches."""

    def __init__(self, taus: Sequence[float], streams: list[np.random.Generator],
                 sigma: int, busy: int):
        self.taus = np.asarray(taus, dtype=float)
        self.streams = streams
        self.sigma = sigma
        self.busy = busy

    def draw(self, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n = len(self.streams)
        if n == 0:
            ntx = np.zeros(k, dtype=np.int64)
            winner = np.full(k, -1, dtype=np.int64)
        else:
            tx = np.empty((k, n), dtype=bool)
            for j, g in enumerate(self.streams):
                tx[:, j] = g.random(k) < self.taus[j]
            ntx = tx.sum(axis=1)
            winner = np.where(ntx == 1, tx.argmax(axis=1), -1)
        dur = np.where(ntx > 0, self.busy, self.sigma).astype(np.int64)
        return ntx, winner, dur


class _SlotStream:
    """Slot outcomes consumed in order across off periods.

    Coordinates are relative to the start of the current off period
    (:meth:`begin`); :meth:`consume` marks slots as used.
    """

    def __init__(self, slots: _Slots, mean_slot: float):
        self.slots = slots
        self.mean_slot = mean_slot
        self._ntx = np.empty(0, dtype=np.int64)
        self._winner = np.empty(0, dtype=np.int64)
        self._cum = np.empty(0, dtype=np.int64)
        self._pos = 0
        self._i0 = 0
        self._base = 0

    def begin(self) -> None:
        self._i0 = self._pos
        self._base = int(self._cum[self._pos - 1]) if self._pos else 0

    def consume(self, m: int) -> None:
        self._pos = self._i0 + m

    @property
    def ntx(self) -> np.ndarray:
        return self._ntx[self._i0:]

    @property
    def winner(self) -> np.ndarray:
        return self._winner[self._i0:]

    @property
    def ends(self) -> np.ndarray:
        return self._cum[self._i0:] - self._base

    @property
    def total(self) -> int:
        return int(self._cum[-1]) - self._base if len(self._cum) > self._i0 else 0

    def count(self, x: int, side: str) -> int:
        """Number of slots of this period whose end is ``<= x`` (right) or ``< x`` (left)."""
        return int(np.searchsorted(self._cum, self._base + x, side=side)) - self._i0

    def cover(self, until: int, min_slots: int = 0) -> None:
        """Draw until slot ends exceed ``until`` and at least ``min_slots`` slots exist."""
        while self.total <= until or len(self._cum) - self._i0 < min_slots:
            have = len(self._cum) - self._i0
            k = int(max(until - self.total, 0) / self.mean_slot * 1.1) + 32
            k = min(max(k, min_slots - have, 4096), _MAX_CHUNK)
            ntx, winner, dur = self.slots.draw(k)
            cum = self._cum[self._i0:] - self._base
            last = int(cum[-1]) if have else 0
            self._ntx = np.concatenate([self._ntx[self._i0:], ntx])
            self._winner = np.concatenate([self._winner[self._i0:], winner])
            self._cum = np.concatenate([cum, np.cumsum(dur) + last])
            self._pos -= self._i0
            self._i0 = 0
            self._base = 0

    def start(self, i: int) -> int:
        return int(self._cum[self._i0 + i - 1]) - self._base if i > 0 else 0


def _streams(seed: int, n: int) -> tuple[np.random.Generator, np.random.Generator, list]:
    def gen(k):
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(k,))))
    return gen(0), gen(1), [gen(2 + j) for j in range(n)]


def run(config: SimConfig) -> SimReport:
    sc = config.scenario
    phy = sc.phy
    n = sc.n
    t_fra, _, t_b = busy_slot_components(phy, sc.traffic)
    sigma, busy = phy.sigma_ns, t_b + phy.difs_ns
    horizon = int(round(config.horizon * 1e9))
    t_on = int(round(sc.t_on * 1e6))
    t_off_mean = sc.t_off_mean * 1e6
    t_lte = int(round(sc.t_lte * 1e6))
    rate = sc.rate / 1000.0  # bits per ns
    lbe = sc.scheme is Scheme.LBE
    csat_loss = math.ceil(t_fra / (2 * t_lte)) * t_lte
    lbe_hit_floor = math.ceil(t_fra / t_lte) * t_lte

    timer_rng, res_rng, station_rngs = _streams(config.seed, n)
    taus = sc.taus
    p_e = math.prod(1 - t for t in taus)
    slots = _Slots(taus, station_rngs, sigma, busy)
    off = _SlotStream(slots, sigma * p_e + busy * (1 - p_e))

    rep = SimReport(horizon_ns=horizon, n_agg=sc.traffic.n_agg,
                    payload_d=sc.traffic.payload_d, wifi_success_count=[0] * n)
    completions: list[list[np.ndarray]] = [[] for _ in range(n)]

    def account_full(t0: int, m: int) -> None:
        ntx, winner = off.ntx[:m], off.winner[:m]
        idle = int(np.count_nonzero(ntx == 0))
        rep.idle_time += idle * sigma
        rep.wifi_busy_time += (m - idle) * busy
        rep.wifi_collision_count += int(np.count_nonzero(ntx >= 2))
        if n:
            done = t0 + off.ends[:m] - busy + t_b
            for j in range(n):
                mask = winner == j
                c = int(np.count_nonzero(mask))
                if c:
                    rep.wifi_success_count[j] += c
                    completions[j].append(done[mask])

    def account_partial(t0: int, i: int, elapsed: int) -> None:
        # slot i cut after `elapsed` ns; its ACK may still have completed
        rep.truncated_partial_time += elapsed
        j = int(off.winner[i])
        if j >= 0 and elapsed >= t_b:
            rep.wifi_success_count[j] += 1
            completions[j].append(np.array([t0 + off.start(i) + t_b]))

    def lte_burst(start: int, loss: int) -> int:
        on = min(t_on, horizon - start)
        rep.lte_on_time += on
        rep.lte_bits += rate * max(0, on - loss)
        return start + t_on

    t = 0
    lag = 0  # LBE: how far actual starts trail the nominal timer
    while t < horizon:
        window = horizon - t
        if config.lte_enabled:
            x = int(round(timer_rng.exponential(t_off_mean))) if t_off_mean > 0 else 0
        else:
            x = None
        off.begin()

        if lbe and x is not None:
            if config.lbe_compensate_deferral:
                x_eff, lag = max(0, x - lag), max(0, lag - x)
            else:
                x_eff = x
            res = int(res_rng.integers(0, t_lte))
            if x_eff < window:
                off.cover(x_eff, min_slots=1)
                m = 0 if x_eff == 0 else off.count(x_eff, "left") + 1
                off.cover(0, min_slots=m + 1)
                b = off.start(m)
                if b < window:
                    account_full(t, m)
                    off.consume(m + 1)
                    if config.lbe_compensate_deferral:
                        lag += b - x_eff
                    hit = off.ntx[m] > 0
                    rep.lte_starts += 1
                    rep.off_time_total += b
                    if hit:
                        rep.lte_wifi_collision_count += 1
                    t = lte_burst(t + b, max(res, lbe_hit_floor) if hit else res)
                    continue
            # horizon reached before the claimed boundary
            x = None

        if x is not None and x < window:
            # CSAT start at t + x, regardless of the channel
            off.cover(x)
            m = off.count(x, "right")
            account_full(t, m)
            elapsed = x - off.start(m)
            off.consume(m + 1 if elapsed > 0 else m)
            hit = False
            if elapsed > 0:
                k = int(off.ntx[m])
                vulnerable = t_b if k == 1 else t_fra
                hit = k > 0 and elapsed < vulnerable
                if hit:
                    rep.truncated_partial_time += elapsed
                else:
                    account_partial(t, m, elapsed)
            rep.lte_starts += 1
            rep.off_time_total += x
            if hit:
                rep.lte_wifi_collision_count += 1
            t = lte_burst(t + x, csat_loss if hit else 0)
            continue

        # no LTE start before the horizon
        off.cover(window - 1)
        m = off.count(window, "right")
        account_full(t, m)
        elapsed = window - off.start(m)
        if elapsed > 0:
            account_partial(t, m, elapsed)
        t = horizon

    rep.completion_times = [np.concatenate(c) if c else np.empty(0, dtype=np.int64)
                            for c in completions]
    if rep.accounted_time() != horizon:
        raise AssertionError(f"time accounting {rep.accounted_time()} != horizon {horizon}")
    return rep


def delay_cdf(report: SimReport | np.ndarray, grid: Iterable[float]) -> list[tuple[float, float]]:
    """Empirical CDF of MAC access delay (us) evaluated on ``grid``."""
    samples = report.delay_samples if isinstance(report, SimReport) else np.asarray(report)
    if samples.size == 0:
        raise ValueError("no delay samples")
    ordered = np.sort(samples)
    grid = np.asarray(list(grid), dtype=float)
    frac = np.searchsorted(ordered, grid, side="right") / ordered.size
    return list(zip(grid.tolist(), frac.tolist()))


def derive_seed(base_seed: int, replication: int) -> int:
    ss = np.random.SeedSequence(base_seed, spawn_key=(replication,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


METRICS = ("s_wifi", "s_lte", "lte_airtime", "p_lte_hit", "realized_off_mean", "mean_delay")


def metrics(report: SimReport) -> dict[str, float]:
    delays = report.delay_samples
    return {
        "s_wifi": report.s_wifi_mean,
        "s_lte": report.s_lte,
        "lte_airtime": report.lte_airtime,
        "p_lte_hit": report.p_lte_hit,
        "realized_off_mean": report.realized_off_mean,
        "mean_delay": float(delays.mean()) if delays.size else float("nan"),
    }


@dataclass(frozen=True)
class Summary:
    """Mean and standard error of each metric over replications."""

    runs: int
    mean: dict[str, float]
    stderr: dict[str, float]  # NaN when runs == 1


def summarize(rows: Sequence[dict[str, float]]) -> Summary:
    # fsum is exactly rounded, so the result does not depend on row order
    runs = len(rows)
    mean, se = {}, {}
    for key in rows[0]:
        vals = [r[key] for r in rows]
        mu = math.fsum(vals) / runs
        mean[key] = mu
        if runs > 1:
            var = math.fsum((v - mu) ** 2 for v in vals) / (runs - 1)
            se[key] = math.sqrt(var / runs)
        else:
            se[key] = float("nan")
    return Summary(runs=runs, mean=mean, stderr=se)


def replicate(config: SimConfig, n_runs: int, executor=None,
              keep_reports: bool = False) -> tuple[Summary, list[SimReport]]:
    """Run ``n_runs`` independent replications with seeds derived from ``config.seed``."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    configs = [_with_seed(config, derive_seed(config.seed, r)) for r in range(n_runs)]
    mapper = executor.map if executor is not None else map
    reports = list(mapper(run, configs))
    summary = summarize([metrics(r) for r in reports])
    return summary, (reports if keep_reports else [])


def _with_seed(config: SimConfig, seed: int) -> SimConfig:
    return replace(config, seed=seed)
