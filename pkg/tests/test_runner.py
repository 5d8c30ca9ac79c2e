# tests/test_runner.py
import json
import math

import pytest

from experiments.io import read_csv, summary_path
from experiments.runner import (
    RECORD_FIELDS,
    ExperimentRecord,
    SweepConfig,
    parse_record,
    resolve_params,
    run_sweep,
    run_trial,
    summarize,
    trial_seed,
    write_sweep,
)


def explicit_config(tmp_path, **overrides):
    values = dict(
        gammas=[0.3],
        ns=[60, 120],
        trials=2,
        master_seed=2024,
        mode="explicit",
        C=1.5,
        cell_scale=16.0,
        out=str(tmp_path / "sweep.csv"),
        workers=1,
    )
    values.update(overrides)
    return SweepConfig(**values)


def test_trial_seeds_are_stable_and_distinct():
    assert trial_seed(7, 0, 1, 2) == trial_seed(7, 0, 1, 2)
    seeds = {trial_seed(7, gi, ni, t) for gi in range(3) for ni in range(3) for t in range(3)}
    assert len(seeds) == 27
    assert trial_seed(8, 0, 0, 0) != trial_seed(7, 0, 0, 0)


def test_worker_count_from_environment(tmp_path, monkeypatch):
    config = explicit_config(tmp_path, workers=None)
    monkeypatch.setenv("SCALENET_WORKERS", "3")
    assert config.worker_count == 3
    monkeypatch.delenv("SCALENET_WORKERS")
    assert config.worker_count == 1


def test_explicit_params_fill_in_D_and_P(tmp_path):
    C, D, P = resolve_params(explicit_config(tmp_path), 60, 0.3)
    assert C == 1.5
    assert D > 0 and P > 0
    assert resolve_params(explicit_config(tmp_path, D=2.0, P=5.0), 60, 0.3) == (1.5, 2.0, 5.0)


def test_trial_records_errors_instead_of_raising(tmp_path):
    # C = 1.5 is too large for the radius-1 disk of gamma = 0
    record = run_trial(explicit_config(tmp_path, gammas=[0.0]), 0, 0, 0)
    assert not record.feasible
    assert "C too large" in record.error
    assert record.wall_time is None


def test_trial_measures_time_on_request(tmp_path):
    record = run_trial(explicit_config(tmp_path, record_timings=True), 0, 0, 0)
    assert record.wall_time is not None and record.wall_time >= 0
    assert record.seed == trial_seed(2024, 0, 0, 0)


@pytest.mark.slow
def test_csv_does_not_depend_on_worker_count(tmp_path):
    serial = explicit_config(tmp_path, out=str(tmp_path / "serial.csv"))
    parallel = explicit_config(tmp_path, out=str(tmp_path / "parallel.csv"), workers=2)
    write_sweep(run_sweep(serial, progress=False), serial)
    write_sweep(run_sweep(parallel, progress=False), parallel)

    with open(serial.out, "rb") as a, open(parallel.out, "rb") as b:
        assert a.read() == b.read()


def test_sweep_files(tmp_path):
    config = explicit_config(tmp_path)
    records = run_sweep(config, progress=False)
    assert [(r.n, r.trial) for r in records] == [(60, 0), (60, 1), (120, 0), (120, 1)]

    summary = write_sweep(records, config, elapsed=1.5)
    rows = read_csv(config.out)
    assert list(rows[0]) == RECORD_FIELDS
    assert len(rows) == 4
    assert all(row["wall_time"] == "" for row in rows)

    with open(summary_path(config.out), encoding="utf-8") as f:
        stored = json.load(f)
    assert stored["metadata"]["master_seed"] == 2024
    assert stored["metadata"]["elapsed_seconds"] == 1.5
    assert "SeedSequence" in stored["metadata"]["seed_rule"]
    assert [(p["gamma"], p["n"]) for p in stored["points"]] == [(0.3, 60), (0.3, 120)]
    assert summary["points"] == stored["points"]

    for r in records:
        if r.feasible:
            assert r.lam * r.p == pytest.approx(config.W)
            assert r.p == r.S * r.L

    parsed = [parse_record(row) for row in rows]
    assert [r.seed for r in parsed] == [r.seed for r in records]
    assert [r.feasible for r in parsed] == [r.feasible for r in records]


def record(n, trial, feasible, lam=0.0, sinr_success=True, L=1.0, S=1):
    return ExperimentRecord(
        gamma=0.3, n=n, trial=trial, seed=trial, feasible=feasible,
        L=L if feasible else math.inf, S=S, lam=lam, dc_success=feasible, sinr_success=sinr_success and feasible,
        load_bound=10.0, txset_bound=10.0, throughput_floor=1e-6,
    )


def test_summary_rates_and_slopes():
    records = [record(100, t, True, lam=0.01) for t in range(4)]
    records += [record(400, t, True, lam=0.005) for t in range(3)] + [record(400, 3, False)]
    summary = summarize(records)

    first, second = summary["points"]
    assert first["feasibility_rate"] == 1.0
    assert second["feasibility_rate"] == 0.75
    assert second["feasible"] == 3
    assert second["lam_median"] == pytest.approx(0.005)
    assert first["bounds_hold"] and second["bounds_hold"]
    # lambda halves when n quadruples
    assert summary["slopes"]["0.3"]["lam_slope"] == pytest.approx(-0.5)


def test_summary_flags_falling_success():
    records = [record(100, t, True, lam=0.01) for t in range(10)]
    records += [record(200, t, False) for t in range(10)]
    summary = summarize(records)
    assert len(summary["flags"]) == 1
    assert "feasibility_rate" in summary["flags"][0]
    assert summary["points"][1]["lam_median"] is None


def test_summary_marks_broken_bounds():
    records = [record(100, t, True, lam=0.01, L=50.0) for t in range(4)]
    point = summarize(records)["points"][0]
    assert point["load_bound_rate"] == 0.0
    assert not point["bounds_hold"]


@pytest.mark.slow
def test_enlarged_cells_show_throughput_falling_as_one_over_n(tmp_path):
    # gamma = 0 and cell_scale 16 leave seven cells on the unit disk, all
    # occupied from n = 200 on; hops then exceed C, so DC is measured, not guaranteed
    C = 0.45
    config = explicit_config(tmp_path, gammas=[0.0], ns=[200, 800], trials=5, C=C)
    records = run_sweep(config, progress=False)

    assert all(r.feasible and r.M == 7 for r in records)
    # C(2+D) spans the disk, so every node gets its own color
    assert all(r.S == r.n for r in records)
    assert any(r.max_hop_length > C for r in records)
    assert all(r.dc_success == (r.max_hop_length <= C) for r in records)

    summary = summarize(records)
    assert [p["feasibility_rate"] for p in summary["points"]] == [1.0, 1.0]
    assert -1.35 <= summary["slopes"]["0.0"]["lam_slope"] <= -0.65
