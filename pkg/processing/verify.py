# processing/verify.py
"""
Independent audits of a scheduled system. Nothing here trusts the way the
system was built; every check recomputes from node positions and slots.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from processing.builder import System
from processing.instance import Instance
from utils.geometry import min_site_spacing
from utils.propagation import DcParams, PropagationModel, RadioParams, sinr_many

logger = logging.getLogger(__name__)


def verify_compatibility(system: System) -> bool:
    """No node transmits twice in one slot, and every slot lies in 1..p."""
    for route in system.routes:
        if len(route.slots) != len(route.hops):
            return False
        if any(not 1 <= slot <= system.period for slot in route.slots):
            return False
    for slot, hops in enumerate(system.hop_sets, start=1):
        transmitters = [t for _, t, _ in hops]
        if len(transmitters) != len(set(transmitters)):
            logger.debug("slot %d has a repeated transmitter", slot)
            return False
    return True


@dataclass
class DcVerdict:
    slots: list[bool]

    @property
    def ok(self) -> bool:
        return all(self.slots)


def verify_dc_success(system: System, instance: Instance, dc: DcParams) -> DcVerdict:
    nodes = instance.nodes
    verdicts = []
    for hops in system.hop_sets:
        if not hops:
            verdicts.append(True)
            continue
        tx = nodes[[t for _, t, _ in hops]]
        rx = nodes[[r for _, _, r in hops]]
        short = bool(np.all(np.linalg.norm(tx - rx, axis=1) <= dc.C))
        spread = min_site_spacing(tx) >= dc.spacing
        verdicts.append(short and spread)
    return DcVerdict(slots=verdicts)


@dataclass
class SlotSinr:
    slot: int
    min_sinr: float
    failing_hops: list[tuple[int, int, int]] = field(default_factory=list)


@dataclass
class SinrVerdict:
    slots: list[SlotSinr]

    @property
    def ok(self) -> bool:
        return all(not s.failing_hops for s in self.slots)

    @property
    def min_sinr(self) -> float:
        return min((s.min_sinr for s in self.slots), default=math.inf)


def verify_sinr_success(
    system: System,
    instance: Instance,
    radio: RadioParams,
    model: PropagationModel,
) -> SinrVerdict:
    """Exact SINR of every hop with all other hops of its slot interfering."""
    nodes = instance.nodes
    reports = []
    for slot, hops in enumerate(system.hop_sets, start=1):
        if not hops:
            reports.append(SlotSinr(slot=slot, min_sinr=math.inf))
            continue
        values = sinr_many(nodes[[t for _, t, _ in hops]], nodes[[r for _, _, r in hops]], radio, model)
        failing = [hop for hop, value in zip(hops, values) if not value >= radio.beta]
        reports.append(SlotSinr(slot=slot, min_sinr=float(values.min()), failing_hops=failing))
    return SinrVerdict(slots=reports)


def simulate_delivery(system: System, periods: int) -> np.ndarray:
    """
    Packet flow over ``periods`` repetitions of the schedule.

    Each period starts with one new packet at every source. A hop fires in
    its slot when its transmitter holds a packet of that route; packets that
    arrive during a slot move on no earlier than the next one.

    Returns:
        (periods, routes) array of packets delivered per period, routes in
        the order of ``system.routes``
    """
    buffers = [np.zeros(len(route.hops), dtype=np.int64) for route in system.routes]
    by_slot: list[list[tuple[int, int]]] = [[] for _ in range(system.period)]
    for index, route in enumerate(system.routes):
        for j, slot in enumerate(route.slots):
            by_slot[slot - 1].append((index, j))

    delivered = np.zeros((periods, len(system.routes)), dtype=np.int64)
    for period in range(periods):
        for buffer in buffers:
            buffer[0] += 1
        for hops in by_slot:
            ready = [(index, j) for index, j in hops if buffers[index][j] > 0]
            for index, j in ready:
                buffers[index][j] -= 1
                if j + 1 < len(buffers[index]):
                    buffers[index][j + 1] += 1
                else:
                    delivered[period, index] += 1
    return delivered
