"""Sweeps that pair the analytic model with simulation replications."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import config as cfg
from .model import InvalidRegimeError, Scenario, Scheme, analyze
from .propfair import solve_toff
from .sim import SimConfig, delay_cdf, replicate

COLUMNS = (
    "n", "t_on_ms", "n_agg", "tau", "scheme", "t_off_ms", "c1_us",
    "model_s_wifi_mbps", "model_s_lte_mbps", "model_p_lte", "model_wifi_airtime", "model_lte_airtime",
    "sim_s_wifi_mbps", "sim_s_wifi_se", "sim_s_lte_mbps", "sim_s_lte_se",
    "sim_lte_airtime", "sim_p_lte", "sim_off_ms", "sim_mean_delay_ms",
    "runs", "horizon_s", "error",
)
CDF_COLUMNS = ("n", "t_on_ms", "n_agg", "scheme", "delay_ms", "cdf")


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    sweep: list[dict]
    base: Scenario = field(default_factory=Scenario)
    schemes: tuple[Scheme, ...] = (Scheme.CSAT, Scheme.LBE)
    use_propfair: bool = True
    runs: int = 100
    horizon: float = 50.0
    base_seed: int = 1
    group_by: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.sweep:
            raise ValueError("sweep must not be empty")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass
class ExperimentOutput:
    name: str
    rows: list[dict]
    group_by: tuple[str, ...] = ()
    columns: tuple[str, ...] = COLUMNS

    def groups(self) -> dict[tuple, list[dict]]:
        out: dict[tuple, list[dict]] = {}
        for row in self.rows:
            out.setdefault(tuple(row[k] for k in self.group_by), []).append(row)
        return out

    def write(self, out_dir: str | Path) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        for key, rows in self.groups().items():
            suffix = "".join(f"_{k}{_fmt(v)}" for k, v in zip(self.group_by, key))
            path = out_dir / f"{self.name}{suffix}.csv"
            write_rows(path, rows, self.columns)
            paths.append(path)
        return paths


def _fmt(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def write_rows(path: str | Path, rows: list[dict], columns=COLUMNS) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)


def read_rows(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def builtin(name: str) -> ExperimentSpec:
    n_agg = [1, 2, 4, 8, 16, 32, 64]
    if name == "fig2":
        sweep = [{"n": n, "t_on": t, "n_agg": k} for n in (1, 3, 9) for t in (10.0, 50.0) for k in n_agg]
        return ExperimentSpec("fig2", sweep, group_by=("n", "t_on_ms"))
    if name == "fig3":
        sweep = [{"n": 1, "n_agg": 64, "t_on": t} for t in (10.0, 50.0)]
        return ExperimentSpec("fig3", sweep)
    raise KeyError(f"unknown experiment {name!r}")


def load_spec(path: str | Path) -> ExperimentSpec:
    parser = cfg.read(path)
    phy = cfg.phy_from_section(parser["phy"]) if parser.has_section("phy") else None
    base = cfg.scenario_from_section(parser["scenario"], phy) if parser.has_section("scenario") \
        else Scenario(phy=phy) if phy else Scenario()
    sweep = cfg.sweep_from_section(parser["sweep"]) if parser.has_section("sweep") else [{}]
    e = parser["experiment"] if parser.has_section("experiment") else {}
    schemes = tuple(Scheme.parse(s) for s in e.get("schemes", "csat, lbe").split(","))
    group_by = tuple(g.strip() for g in e.get("group_by", "").split(",") if g.strip())
    return ExperimentSpec(
        name=e.get("name", Path(path).stem),
        sweep=sweep,
        base=base,
        schemes=schemes,
        use_propfair=cfg.parse_bool(e.get("use_propfair", "true")),
        runs=int(e.get("runs", 100)),
        horizon=float(e.get("horizon", 50.0)),
        base_seed=int(e.get("base_seed", 1)),
        group_by=group_by,
    )


def resolve(name_or_path: str) -> ExperimentSpec:
    if Path(name_or_path).is_file():
        return load_spec(name_or_path)
    return builtin(name_or_path)


def thread_cap() -> int:
    raw = os.environ.get("COEXLAB_THREADS")
    return max(1, int(raw)) if raw else 1


@contextmanager
def executor_from_env():
    workers = thread_cap()
    if workers <= 1:
        yield None
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield pool


def _point_scenario(spec: ExperimentSpec, delta: dict, scheme: Scheme) -> tuple[Scenario, float]:
    sc = cfg.apply_delta(spec.base, {**delta, "scheme": scheme})
    c1 = float("nan")
    if spec.use_propfair:
        res = solve_toff(sc)
        sc = replace(sc, t_off_mean=res.t_off_star / 1000.0)
        c1 = res.c1
    return sc, c1


def evaluate_point(spec: ExperimentSpec, delta: dict, scheme: Scheme, executor=None,
                   keep_reports: bool = False):
    sc, c1 = _point_scenario(spec, delta, scheme)
    taus = sc.taus
    row = {
        "n": sc.n, "t_on_ms": sc.t_on, "n_agg": sc.traffic.n_agg,
        "tau": taus[0] if taus else float("nan"), "scheme": scheme.value,
        "t_off_ms": sc.t_off_mean, "c1_us": c1, "runs": spec.runs, "horizon_s": spec.horizon,
        "error": "",
    }
    try:
        a = analyze(sc)
    except InvalidRegimeError as exc:
        row["error"] = str(exc)
        return row, []
    row.update({
        "model_s_wifi_mbps": a.s_wifi[0] / 1e6 if a.s_wifi else 0.0,
        "model_s_lte_mbps": a.s_lte / 1e6,
        "model_p_lte": a.p_lte,
        "model_wifi_airtime": a.wifi_airtime_fraction,
        "model_lte_airtime": a.lte_airtime_fraction,
    })
    summary, reports = replicate(SimConfig(sc, horizon=spec.horizon, seed=spec.base_seed),
                                 spec.runs, executor=executor, keep_reports=keep_reports)
    m, se = summary.mean, summary.stderr
    row.update({
        "sim_s_wifi_mbps": m["s_wifi"] / 1e6,
        "sim_s_wifi_se": se["s_wifi"] / 1e6,
        "sim_s_lte_mbps": m["s_lte"] / 1e6,
        "sim_s_lte_se": se["s_lte"] / 1e6,
        "sim_lte_airtime": m["lte_airtime"],
        "sim_p_lte": m["p_lte_hit"],
        "sim_off_ms": m["realized_off_mean"] / 1000.0,
        "sim_mean_delay_ms": m["mean_delay"] / 1000.0,
    })
    return row, reports


def run_experiment(spec: ExperimentSpec, executor=None) -> ExperimentOutput:
    """One row per (sweep point, scheme), in sweep order then scheme order."""
    rows = []
    for delta in spec.sweep:
        for scheme in spec.schemes:
            row, _ = evaluate_point(spec, delta, scheme, executor)
            rows.append(row)
    return ExperimentOutput(spec.name, rows, spec.group_by)


def delay_cdfs(spec: ExperimentSpec, grid_ms=None, executor=None) -> ExperimentOutput:
    """Pooled MAC-delay CDF per (sweep point, scheme)."""
    grid_ms = np.arange(0.0, 200.5, 0.5) if grid_ms is None else np.asarray(grid_ms, dtype=float)
    rows = []
    for delta in spec.sweep:
        for scheme in spec.schemes:
            row, reports = evaluate_point(spec, delta, scheme, executor, keep_reports=True)
            samples = np.concatenate([r.delay_samples for r in reports])
            for d, f in delay_cdf(samples, grid_ms * 1000.0):
                rows.append({"n": row["n"], "t_on_ms": row["t_on_ms"], "n_agg": row["n_agg"],
                             "scheme": row["scheme"], "delay_ms": d / 1000.0, "cdf": f})
    return ExperimentOutput(spec.name + "_cdf", rows, ("t_on_ms", "scheme"), CDF_COLUMNS)


def _num(row: dict, key: str) -> float:
    v = row.get(key, "")
    try:
        return float(v)
    except (TypeError, ValueError):
        return float("nan")


def rel_err(sim: float, model: float) -> float:
    if model == 0:
        return 0.0 if sim == 0 else math.inf
    return abs(sim - model) / abs(model)


@dataclass(frozen=True)
class ValidationRow:
    key: tuple
    wifi_err: float
    lte_err: float
    passed: bool


def validate(output: ExperimentOutput | list[dict], rel_tol: float) -> list[ValidationRow]:
    """Flag rows where simulated WiFi or LTE throughput misses the model by more than ``rel_tol``."""
    rows = output.rows if isinstance(output, ExperimentOutput) else output
    out = []
    for row in rows:
        key = (row.get("n"), row.get("t_on_ms"), row.get("n_agg"), row.get("scheme"))
        we = rel_err(_num(row, "sim_s_wifi_mbps"), _num(row, "model_s_wifi_mbps"))
        le = rel_err(_num(row, "sim_s_lte_mbps"), _num(row, "model_s_lte_mbps"))
        ok = bool(we <= rel_tol and le <= rel_tol)  # NaN compares False
        out.append(ValidationRow(key, we, le, ok))
    return out
