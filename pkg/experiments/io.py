# experiments/io.py
"""Instance and system JSON files, sweep CSVs."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Optional

from processing.builder import System
from processing.instance import Instance
from schemas import InstanceSchema, SystemSchema


def format_real(value) -> str:
    """Reals with 17 significant digits, so CSVs compare across implementations."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    return str(value)


def write_json(path, data) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2)


def read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def save_instance(instance: Instance, path) -> None:
    write_json(path, instance.to_dict())


def load_instance(path) -> Instance:
    return Instance.from_dict(InstanceSchema().load(read_json(path)))


def save_system(system: System, path, report: Optional[dict] = None) -> None:
    data = system.to_dict()
    if report is not None:
        data["report"] = report
    write_json(path, data)


def load_system(path) -> System:
    return System.from_dict(SystemSchema().load(read_json(path)))


def write_csv(rows: Iterable[dict], path, fieldnames: list[str]) -> int:
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: format_real(row.get(key)) for key in fieldnames})
            count += 1
    return count


def read_csv(path) -> list[dict]:
    with open(path, "r", encoding="utf-8-sig") as f:
        return list(csv.DictReader(f))


def summary_path(csv_path) -> Path:
    path = Path(csv_path)
    return path.with_name(path.stem + ".summary.json")
