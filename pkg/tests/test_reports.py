# tests/test_reports.py
import math

import pytest

from experiments.reports import adversarial_report, bounds_table, format_table
from utils.analysis import CONSTANTS, load_bound, throughput_floor


def test_bounds_table_matches_analysis():
    table = bounds_table(1000, 0.3, 0.25, 4.0, W=2.0)
    assert table["load_bound"] == load_bound(1000, 0.3, 0.25)
    assert table["throughput_floor"] == throughput_floor(1000, 0.3, 0.25, 4.0, 2.0)
    assert table["c_route_times_18_over_pi"] == pytest.approx(table["c_thru"])
    assert "regime_onset" not in table
    assert "regime_onset" in bounds_table(1000, 0.5, 2.0, 1.0, connectivity_b=1.0)


def test_throughput_floor_rises_with_gamma():
    floors = [bounds_table(1000, gamma, 0.25, 4.0)["throughput_floor"] for gamma in (0.0, 0.1, 0.2, 0.3, 0.4)]
    assert all(later > earlier for earlier, later in zip(floors, floors[1:]))


def test_dense_packing_violates_beta():
    report = adversarial_report(0.05, 0.05, 3.0, 0.5, 10000)
    assert report["interferers"] == 10000
    assert report["dc_satisfied"]
    assert report["beta"] > report["converse_threshold"]
    assert report["exact_sinr"] < report["beta"]
    assert report["exact_sinr"] <= report["sinr_bound"]
    assert report["violates_beta"]


def test_too_few_interferers_have_no_bound():
    assert adversarial_report(0.05, 0.05, 3.0, 0.5, 62)["sinr_bound"] is None
    assert adversarial_report(0.05, 0.05, 3.0, 0.5, 63)["sinr_bound"] is not None


def test_format_table():
    lines = format_table({"alpha": 3.0, "sinr_bound": None, "feasible": True, "L": math.inf})
    assert lines[0] == "alpha       3"
    assert lines[1] == "sinr_bound  no bound"
    assert lines[2].endswith("True")
    assert lines[3].endswith("inf")
