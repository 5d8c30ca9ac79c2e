# experiments/reports.py
"""Tables shared by the CLI and the API: bounds at one (n, gamma) point, the adversarial demonstration."""
from __future__ import annotations

import math
from typing import Optional

from utils.analysis import (
    CONSTANTS,
    growth_condition,
    gk_connectivity,
    load_bound,
    regime_onset,
    throughput_floor,
    txset_bound,
)
from utils.propagation import (
    DcParams,
    PropagationModel,
    RadioParams,
    adversarial_config,
    adversarial_sinr_bound,
    converse_threshold,
    dc_satisfied,
    ring_populations,
    sinr,
    small_pair_threshold,
)


def bounds_table(n: int, gamma: float, C: float, D: float, W: float = 1.0, connectivity_b: Optional[float] = None) -> dict:
    table = {
        "n": n,
        "gamma": gamma,
        "C": C,
        "D": D,
        "load_bound": load_bound(n, gamma, C),
        "txset_bound": txset_bound(n, gamma, C, D),
        "throughput_floor": throughput_floor(n, gamma, C, D, W),
        "growth_condition": growth_condition(n, gamma, C),
        "gk_connectivity": gk_connectivity(n, gamma, C),
        "c_route_times_18_over_pi": CONSTANTS.c_route * 18.0 / math.pi,
        "c_thru": CONSTANTS.c_thru,
    }
    if gamma >= 0.5:
        table["regime_onset"] = regime_onset(gamma, connectivity_b)
    return table


def adversarial_report(C: float, D: float, alpha: float, beta: float, m: int) -> dict:
    """Zero-noise SINR of the dense packing next to its upper bound; P cancels, so P = 1."""
    dc = DcParams(C, D)
    cfg = adversarial_config(dc, m)
    exact = sinr(cfg, RadioParams(P=1.0, N0=0.0, beta=beta), PropagationModel("B", alpha))
    bound = adversarial_sinr_bound(dc, alpha, m)
    return {
        "C": C,
        "D": D,
        "alpha": alpha,
        "beta": beta,
        "m": m,
        "interferers": len(cfg.T),
        "rings": len(ring_populations(cfg, dc)),
        "dc_satisfied": dc_satisfied(cfg, dc),
        "exact_sinr": exact,
        "sinr_bound": bound if math.isfinite(bound) else None,
        "converse_threshold": converse_threshold(dc, alpha),
        "small_pair_threshold": small_pair_threshold(alpha),
        "violates_beta": exact < beta,
    }


def format_table(table: dict) -> list[str]:
    width = max(len(key) for key in table)
    lines = []
    for key, value in table.items():
        if value is None:
            shown = "no bound"
        elif isinstance(value, float):
            shown = f"{value:.6g}"
        else:
            shown = str(value)
        lines.append(f"{key.ljust(width)}  {shown}")
    return lines
