# experiments/runner.py
"""
Monte Carlo sweeps over (gamma, n).

Every trial draws its own seed from the master seed and its grid position,
so records come out identical whatever the worker count.
"""
from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from experiments.io import summary_path, write_csv, write_json
from processing.builder import build_system
from processing.instance import sample_instance
from processing.verify import verify_dc_success, verify_sinr_success
from utils.analysis import load_bound, theorem_params, throughput_floor, txset_bound
from utils.errors import ScalenetError
from utils.propagation import DcParams, PropagationModel, RadioParams, find_D_for_C, min_power

logger = logging.getLogger(__name__)

SEED_RULE = "SeedSequence(master_seed, spawn_key=(gamma_index, n_index, trial)).generate_state(1, uint64)[0]"


@dataclass
class SweepConfig:
    gammas: list[float]
    ns: list[int]
    trials: int
    master_seed: int
    alpha: float = 3.0
    beta: float = 1.0
    N0: float = 1.0
    W: float = 1.0
    model: str = "B"
    mode: str = "theorem"
    C: Optional[float] = None
    D: Optional[float] = None
    P: Optional[float] = None
    out: str = "sweep.csv"
    cell_scale: float = 1.0
    connectivity_b: Optional[float] = None
    workers: Optional[int] = None
    record_timings: bool = False
    monotone_tolerance: float = 2.0
    success_threshold: float = 0.95

    @property
    def worker_count(self) -> int:
        if self.workers is not None:
            return self.workers
        return max(1, int(os.getenv("SCALENET_WORKERS", "1")))

    def to_dict(self):
        return asdict(self)


@dataclass
class ExperimentRecord:
    gamma: float
    n: int
    trial: int
    seed: int
    feasible: bool = False
    L: float = math.inf
    S: int = 0
    M: int = 0
    p: float = math.inf
    lam: float = 0.0
    dc_success: bool = False
    sinr_success: bool = False
    min_slot_sinr: Optional[float] = None
    max_hop_length: float = 0.0
    load_bound: float = math.nan
    txset_bound: float = math.nan
    throughput_floor: float = math.nan
    wall_time: Optional[float] = None
    error: str = ""


RECORD_FIELDS = [f.name for f in fields(ExperimentRecord)]


def trial_seed(master_seed: int, gamma_index: int, n_index: int, trial: int) -> int:
    sequence = np.random.SeedSequence(master_seed, spawn_key=(gamma_index, n_index, trial))
    return int(sequence.generate_state(1, np.uint64)[0])


def resolve_params(config: SweepConfig, n: int, gamma: float) -> tuple[float, float, float]:
    """(C, D, P) for one grid point."""
    if config.mode == "theorem":
        params = theorem_params(n, gamma, config.alpha, config.beta, config.N0, config.W, config.connectivity_b)
        return params.C, params.D, params.P
    model = PropagationModel(config.model, config.alpha)
    C = config.C
    D = config.D if config.D is not None else find_D_for_C(C, config.alpha, config.beta, model)
    P = config.P if config.P is not None else min_power(DcParams(C, D), config.alpha, config.beta, config.N0, None, model)
    return C, D, P


def run_trial(config: SweepConfig, gamma_index: int, n_index: int, trial: int) -> ExperimentRecord:
    gamma, n = config.gammas[gamma_index], config.ns[n_index]
    seed = trial_seed(config.master_seed, gamma_index, n_index, trial)
    record = ExperimentRecord(gamma=gamma, n=n, trial=trial, seed=seed)
    started = time.perf_counter()
    try:
        C, D, P = resolve_params(config, n, gamma)
        record.load_bound = load_bound(n, gamma, C)
        record.txset_bound = txset_bound(n, gamma, C, D)
        record.throughput_floor = throughput_floor(n, gamma, C, D, config.W)

        instance = sample_instance(n, gamma, seed)
        _, _, system, report = build_system(instance, C, D, config.W, config.cell_scale)
        record.feasible = report.feasible
        record.L, record.S, record.M, record.p = report.L, report.S, report.M, report.p
        record.lam = report.lam
        record.max_hop_length = report.max_hop_length
        if system is not None:
            record.dc_success = verify_dc_success(system, instance, DcParams(C, D)).ok
            verdict = verify_sinr_success(
                system, instance, RadioParams(P, config.N0, config.beta), PropagationModel(config.model, config.alpha)
            )
            record.sinr_success = verdict.ok
            record.min_slot_sinr = verdict.min_sinr
    except ScalenetError as e:
        logger.debug("trial gamma=%s n=%s trial=%s failed: %s", gamma, n, trial, e)
        record.error = str(e)
    if config.record_timings:
        record.wall_time = time.perf_counter() - started
    return record


def _run_task(task) -> ExperimentRecord:
    return run_trial(*task)


def run_sweep(config: SweepConfig, progress: bool = True) -> list[ExperimentRecord]:
    """Every trial of the grid, ordered by (gamma, n, trial) regardless of completion order."""
    tasks = [
        (config, gi, ni, trial)
        for gi in range(len(config.gammas))
        for ni in range(len(config.ns))
        for trial in range(config.trials)
    ]
    workers = config.worker_count
    logger.info("sweep: %d trials on %d worker(s)", len(tasks), workers)
    bar = dict(total=len(tasks), disable=not progress, desc="trials")
    if workers == 1:
        return list(tqdm(map(_run_task, tasks), **bar))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(tqdm(executor.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))), **bar))


def record_rows(records: list[ExperimentRecord], record_timings: bool = False) -> list[dict]:
    rows = []
    for record in records:
        row = asdict(record)
        if not record_timings:
            row["wall_time"] = None
        rows.append(row)
    return rows


def _slope(ns, values) -> Optional[float]:
    keep = np.isfinite(values) & (values > 0)
    if keep.sum() < 2:
        return None
    return float(np.polyfit(np.log(ns[keep]), np.log(values[keep]), 1)[0])


def _clean(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return None if not math.isfinite(float(value)) else float(value)
    return value


def summarize(records: list[ExperimentRecord], monotone_tolerance: float = 2.0, success_threshold: float = 0.95) -> dict:
    """Per-(gamma, n) rates and throughput statistics, per-gamma slopes, monotonicity flags."""
    frame = pd.DataFrame([asdict(r) for r in records], columns=RECORD_FIELDS)
    frame["load_ok"] = frame["L"] <= frame["load_bound"]
    frame["txset_ok"] = frame["S"] <= frame["txset_bound"]
    frame["errored"] = frame["error"] != ""

    points = []
    for (gamma, n), group in frame.groupby(["gamma", "n"], sort=True):
        feasible = group[group["feasible"]]
        lam = feasible["lam"]
        points.append({
            "gamma": gamma,
            "n": n,
            "trials": len(group),
            "feasible": int(len(feasible)),
            "feasibility_rate": len(feasible) / len(group),
            "dc_success_rate": feasible["dc_success"].mean() if len(feasible) else None,
            "sinr_success_rate": feasible["sinr_success"].mean() if len(feasible) else None,
            "lam_mean": lam.mean() if len(lam) else None,
            "lam_median": lam.median() if len(lam) else None,
            "lam_min": lam.min() if len(lam) else None,
            "load_bound_rate": feasible["load_ok"].mean() if len(feasible) else None,
            "txset_bound_rate": feasible["txset_ok"].mean() if len(feasible) else None,
            "errors": int(group["errored"].sum()),
        })
        point = points[-1]
        point["bounds_hold"] = all(
            rate is not None and rate >= success_threshold
            for rate in (point["load_bound_rate"], point["txset_bound_rate"])
        )
    table = pd.DataFrame(points)

    slopes, flags = {}, []
    for gamma, rows in table.groupby("gamma", sort=True):
        rows = rows.sort_values("n")
        ns = rows["n"].to_numpy(dtype=float)
        median = rows["lam_median"].to_numpy(dtype=float)
        slopes[str(gamma)] = {
            "lam_slope": _slope(ns, median),
            "lam_slope_log_corrected": _slope(ns, median * np.sqrt(np.log(ns))),
        }
        flags.extend(_monotone_flags(gamma, rows, monotone_tolerance))

    return {
        "points": [{k: _clean(v) for k, v in point.items()} for point in points],
        "slopes": slopes,
        "flags": flags,
    }


def _monotone_flags(gamma, rows: pd.DataFrame, tolerance: float) -> list[str]:
    """Success rates should not drop with n by more than ``tolerance`` standard errors."""
    flags = []
    for column, count_column in (("feasibility_rate", "trials"), ("sinr_success_rate", "feasible")):
        previous = None
        for _, row in rows.iterrows():
            rate, count = row[column], row[count_column]
            if rate is None or pd.isna(rate) or count == 0:
                continue
            if previous is not None:
                prev_rate, prev_count, prev_n = previous
                sigma = math.sqrt(rate * (1 - rate) / count + prev_rate * (1 - prev_rate) / prev_count)
                if rate < prev_rate - max(tolerance * sigma, 1e-12):
                    flags.append(
                        f"gamma={gamma}: {column} fell from {prev_rate:.3g} at n={prev_n} to {rate:.3g} at n={row['n']}"
                    )
            previous = (rate, count, row["n"])
    return flags


def write_sweep(records: list[ExperimentRecord], config: SweepConfig, elapsed: Optional[float] = None) -> dict:
    """CSV of every record at ``config.out`` plus the summary JSON beside it."""
    write_csv(record_rows(records, config.record_timings), config.out, RECORD_FIELDS)
    summary = {"metadata": sweep_metadata(config, elapsed)}
    summary.update(summarize(records, config.monotone_tolerance, config.success_threshold))
    write_json(summary_path(config.out), summary)
    return summary


def sweep_metadata(config: SweepConfig, elapsed: Optional[float] = None) -> dict:
    return {
        "master_seed": config.master_seed,
        "seed_rule": SEED_RULE,
        "mode": config.mode,
        "model": config.model,
        "alpha": config.alpha,
        "beta": config.beta,
        "cell_scale": config.cell_scale,
        "connectivity_b": config.connectivity_b,
        "success_threshold": config.success_threshold,
        "elapsed_seconds": elapsed,
    }


_BOOL_FIELDS = {"feasible", "dc_success", "sinr_success"}
_INT_FIELDS = {"n", "trial", "seed", "S", "M"}


def parse_record(row: dict) -> ExperimentRecord:
    """Record from a CSV row or a stored row; blanks fall back to the field defaults."""
    values = {}
    for name in RECORD_FIELDS:
        raw = row.get(name)
        if name == "error":
            values[name] = raw or ""
        elif raw is None or raw == "":
            continue
        elif name in _BOOL_FIELDS:
            values[name] = raw if isinstance(raw, bool) else str(raw) == "True"
        elif name in _INT_FIELDS:
            values[name] = int(raw)
        else:
            values[name] = float(raw)
    return ExperimentRecord(**values)
