# processing/builder.py
"""
Turns an instance into a scheduled system in three steps.

1. Routes follow the straight line from source to destination, one relay
   per cell the line crosses, with relays apportioned so no node carries
   more than ceil(X/Y) routes in its cell.
2. Transmitters are grouped by greedily coloring the graph linking nodes
   within C(2+D) of each other.
3. Hops are scheduled in L rounds of S slots, one slot per color.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Optional

import networkx as nx
import numpy as np
from scipy.spatial import cKDTree

from processing.instance import Instance
from utils.errors import ParameterError, ScheduleError
from utils.geometry import Partition, Segment, build_disk_partition, cells_intersected, cells_of
from utils.propagation import DcParams

logger = logging.getLogger(__name__)

Hop = tuple[int, int]


@dataclass(frozen=True)
class Route:
    pair: int
    hops: tuple[Hop, ...]

    @property
    def source(self) -> int:
        return self.hops[0][0]

    @property
    def destination(self) -> int:
        return self.hops[-1][1]

    @property
    def transmitters(self) -> list[int]:
        return [t for t, _ in self.hops]

    def is_chained(self) -> bool:
        return all(self.hops[j][1] == self.hops[j + 1][0] for j in range(len(self.hops) - 1))

    def is_loop_free(self) -> bool:
        nodes = self.transmitters + [self.destination]
        return len(set(nodes)) == len(nodes)


@dataclass(eq=False)
class RoutePlan:
    """
    Output of route selection.

    ``L`` is infinite and ``feasible`` false when some line crosses a cell
    with no node in it; such pairs are listed in ``blocked_pairs`` and get
    no route.
    """

    routes: list[Route]
    partition: Partition
    z: float
    node_cells: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    loads: np.ndarray
    L: float
    blocked_pairs: list[int] = field(default_factory=list)
    max_hop_length: float = 0.0

    @property
    def feasible(self) -> bool:
        return not self.blocked_pairs

    @property
    def empty_cell_hit(self) -> bool:
        return bool(self.blocked_pairs)

    @property
    def empty_cells(self) -> int:
        return int(np.count_nonzero(self.Y == 0))

    @property
    def diameter_guaranteed(self) -> bool:
        return self.partition.max_cell_diameter <= self.z * (1.0 + 1e-12)


def _route_cells(partition: Partition, nodes: np.ndarray, node_cells: np.ndarray, s: int, d: int) -> list[int]:
    cells = cells_intersected(partition, Segment(nodes[s], nodes[d]))
    last = int(node_cells[d])
    if cells[-1] != last:
        # d on a cell boundary: the walk and the lookup may disagree on the tie
        logger.debug("route %d->%d ends in cell %d, destination owned by %d", s, d, cells[-1], last)
        cells = cells[: cells.index(last) + 1] if last in cells else cells + [last]
    return cells


def build_routes(instance: Instance, C: float, cell_scale: float = 1.0) -> RoutePlan:
    """
    Straight-line routes through a disk partition of scale w = cell_scale * C/16.

    ``cell_scale = 1`` gives cells of diameter at most z = C/2, so every hop
    is at most C long. Larger values trade that guarantee for occupied
    cells at small n; hop lengths are measured either way.
    """
    radius = instance.radius
    if not C > 0:
        raise ParameterError(f"C must be positive, got {C}")
    if C / radius >= 0.5:
        raise ParameterError(f"C too large for region: C={C:.6g}, radius={radius:.6g} (need C/radius < 1/2)")
    if not cell_scale > 0:
        raise ParameterError(f"cell_scale must be positive, got {cell_scale}")

    z = C / 2.0
    partition = build_disk_partition(radius, cell_scale * z / 8.0)
    nodes = instance.nodes
    node_cells = cells_of(partition, nodes)
    M = partition.cell_count
    Y = np.bincount(node_cells, minlength=M)
    X = np.zeros(M, dtype=np.intp)

    cell_paths: dict[int, list[int]] = {}
    blocked = []
    for pair, (s, d) in enumerate(instance.pairs):
        cells = _route_cells(partition, nodes, node_cells, int(s), int(d))
        X[cells] += 1
        if np.any(Y[cells] == 0):
            blocked.append(pair)
        else:
            cell_paths[pair] = cells

    loads = np.zeros(instance.n, dtype=np.intp)
    relays: dict[tuple[int, int], int] = {}
    members = _cell_members(node_cells, M)

    # sources carry their own route out of the first cell
    for pair in cell_paths:
        loads[instance.pairs[pair, 0]] += 1
    for cell, passing in _pass_through(cell_paths).items():
        for pair in passing:
            candidates = members[cell]
            node = int(candidates[np.argmin(loads[candidates])])
            loads[node] += 1
            relays[(pair, cell)] = node

    routes = []
    for pair, cells in cell_paths.items():
        s, d = (int(v) for v in instance.pairs[pair])
        path = [s] + [relays[(pair, c)] for c in cells[1:-1]] + [d]
        routes.append(Route(pair=pair, hops=tuple(zip(path[:-1], path[1:]))))

    if blocked:
        L = math.inf
    else:
        occupied = Y > 0
        L = int(max(np.max(-(-X[occupied] // Y[occupied])), loads.max()))

    plan = RoutePlan(
        routes=routes,
        partition=partition,
        z=z,
        node_cells=node_cells,
        X=X,
        Y=Y,
        loads=loads,
        L=L,
        blocked_pairs=blocked,
        max_hop_length=_max_hop_length(routes, nodes),
    )
    logger.debug(
        "routes n=%d cells=%d L=%s blocked=%d max_hop=%.6g",
        instance.n, M, L, len(blocked), plan.max_hop_length,
    )
    return plan


def _cell_members(node_cells: np.ndarray, M: int) -> list[np.ndarray]:
    order = np.argsort(node_cells, kind="stable")
    bounds = np.searchsorted(node_cells[order], np.arange(M + 1))
    return [order[bounds[c]:bounds[c + 1]] for c in range(M)]


def _pass_through(cell_paths: dict[int, list[int]]) -> dict[int, list[int]]:
    """Pairs needing a relay in each cell, in pair order (first and last cells excluded)."""
    passing: dict[int, list[int]] = {}
    for pair in sorted(cell_paths):
        for cell in cell_paths[pair][1:-1]:
            passing.setdefault(cell, []).append(pair)
    return passing


def _max_hop_length(routes: list[Route], nodes: np.ndarray) -> float:
    hops = np.array([hop for route in routes for hop in route.hops], dtype=np.intp).reshape(-1, 2)
    if len(hops) == 0:
        return 0.0
    return float(np.max(np.linalg.norm(nodes[hops[:, 0]] - nodes[hops[:, 1]], axis=1)))


@dataclass(frozen=True, eq=False)
class TransmitterSets:
    """Color (1..S) of every node; equal colors are more than C(2+D) apart."""

    color_of: np.ndarray
    S: int
    max_degree: int

    def members(self, color: int) -> np.ndarray:
        return np.flatnonzero(self.color_of == color)


def _in_index_order(G, colors):
    return sorted(G)


def color_transmitters(instance: Instance, C: float, D: float) -> TransmitterSets:
    reach = DcParams(C, D).spacing
    graph = nx.Graph()
    graph.add_nodes_from(range(instance.n))
    graph.add_edges_from(cKDTree(instance.nodes).query_pairs(reach))

    coloring = nx.greedy_color(graph, strategy=_in_index_order)
    color_of = np.array([coloring[v] + 1 for v in range(instance.n)], dtype=np.intp)
    max_degree = max((deg for _, deg in graph.degree()), default=0)
    return TransmitterSets(color_of=color_of, S=int(color_of.max()), max_degree=int(max_degree))


@dataclass(frozen=True)
class ScheduledRoute:
    pair: int
    hops: tuple[Hop, ...]
    slots: tuple[int, ...]


@dataclass(eq=False)
class System:
    """Scheduled routes repeating with period p = L*S."""

    routes: list[ScheduledRoute]
    period: int
    L: int
    S: int

    @cached_property
    def hop_sets(self) -> list[list[tuple[int, int, int]]]:
        """Hops of each slot as (pair, transmitter, receiver); index 0 is slot 1."""
        sets: list[list[tuple[int, int, int]]] = [[] for _ in range(self.period)]
        for route in self.routes:
            for (t, r), slot in zip(route.hops, route.slots):
                sets[slot - 1].append((route.pair, t, r))
        return sets

    def to_dict(self):
        return {
            "period": self.period,
            "L": self.L,
            "S": self.S,
            "routes": [
                {"pair": r.pair, "hops": [list(h) for h in r.hops], "slots": list(r.slots)}
                for r in self.routes
            ],
        }

    @classmethod
    def from_dict(cls, data) -> "System":
        routes = [
            ScheduledRoute(
                pair=int(r["pair"]),
                hops=tuple((int(t), int(rx)) for t, rx in r["hops"]),
                slots=tuple(int(s) for s in r["slots"]),
            )
            for r in data["routes"]
        ]
        return cls(routes=routes, period=int(data["period"]), L=int(data["L"]), S=int(data["S"]))


def schedule(routes: list[Route], txsets: TransmitterSets, L: int) -> System:
    """
    Round l, color j runs in slot (l-1)*S + j; in it every node of color j
    sends its l-th pending hop, taking routes in pair order.
    """
    if not math.isfinite(L):
        raise ScheduleError("cannot schedule an infeasible route plan")
    L = int(L)
    ordered = sorted(routes, key=lambda route: route.pair)
    duties: dict[int, list[tuple[int, int]]] = {}
    for position, route in enumerate(ordered):
        for j, (t, _) in enumerate(route.hops):
            duties.setdefault(t, []).append((position, j))

    slots = [[0] * len(route.hops) for route in ordered]
    S = txsets.S
    for node, queue in duties.items():
        if len(queue) > L:
            raise ScheduleError(f"node {node} carries {len(queue)} hops, more than L={L}")
        color = int(txsets.color_of[node])
        for round_index, (position, j) in enumerate(queue):
            slots[position][j] = round_index * S + color

    scheduled = [
        ScheduledRoute(pair=route.pair, hops=route.hops, slots=tuple(slots[position]))
        for position, route in enumerate(ordered)
    ]
    return System(routes=scheduled, period=L * S, L=L, S=S)


def throughput(system: System, W: float = 1.0) -> float:
    return W / system.period


@dataclass
class BuildReport:
    L: float
    S: int
    M: int
    p: float
    lam: float
    feasible: bool
    empty_cell_hit: bool
    max_hop_length: float
    max_degree: int
    diameter_guaranteed: bool
    empty_cells: int
    blocked_pairs: int

    def to_dict(self):
        return asdict(self)


def build_system(
    instance: Instance,
    C: float,
    D: float,
    W: float = 1.0,
    cell_scale: float = 1.0,
) -> tuple[RoutePlan, TransmitterSets, Optional[System], BuildReport]:
    """Route, color and schedule; the system is None when the plan is infeasible."""
    plan = build_routes(instance, C, cell_scale)
    txsets = color_transmitters(instance, C, D)
    system = schedule(plan.routes, txsets, plan.L) if plan.feasible else None
    period = system.period if system else math.inf
    report = BuildReport(
        L=plan.L,
        S=txsets.S,
        M=plan.partition.cell_count,
        p=period,
        lam=throughput(system, W) if system else 0.0,
        feasible=plan.feasible,
        empty_cell_hit=plan.empty_cell_hit,
        max_hop_length=plan.max_hop_length,
        max_degree=txsets.max_degree,
        diameter_guaranteed=plan.diameter_guaranteed,
        empty_cells=plan.empty_cells,
        blocked_pairs=len(plan.blocked_pairs),
    )
    return plan, txsets, system, report
