# processing/instance.py
"""Random network instances: n nodes on a disk of radius n^gamma, one destination per node."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from utils.errors import OutsideRegionError, ParameterError
from utils.geometry import REGION_RTOL, Disk, sample_disk


@dataclass(frozen=True, eq=False)
class Instance:
    """
    Attributes:
        n: node count
        gamma: radius exponent, the disk radius is n^gamma
        nodes: (n, 2) node positions
        pairs: (n, 2) rows of (source index, destination index)
        seed: seed the instance was drawn from, None for hand-built ones
    """

    n: int
    gamma: float
    nodes: np.ndarray
    pairs: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float).reshape(-1, 2)
        pairs = np.array(self.pairs, dtype=np.intp).reshape(-1, 2)
        if self.n < 2:
            raise ParameterError(f"an instance needs n >= 2, got {self.n}")
        if len(nodes) != self.n or len(pairs) != self.n:
            raise ParameterError(f"expected {self.n} nodes and pairs, got {len(nodes)} and {len(pairs)}")
        if np.any(pairs < 0) or np.any(pairs >= self.n):
            raise ParameterError("pair indices must refer to nodes of the instance")
        if np.any(pairs[:, 0] == pairs[:, 1]):
            raise ParameterError("a destination must differ from its source")
        if np.any(np.hypot(nodes[:, 0], nodes[:, 1]) > self.radius * (1.0 + REGION_RTOL)):
            raise OutsideRegionError(f"instance nodes must lie in the disk of radius {self.radius:.6g}")
        nodes.setflags(write=False)
        pairs.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def on_disk(cls, nodes, pairs, radius: float, seed: Optional[int] = None) -> "Instance":
        """Instance on a disk of the given radius; gamma is derived from it."""
        n = len(nodes)
        gamma = math.log(radius) / math.log(n) if n > 1 else 0.0
        return cls(n=n, gamma=gamma, nodes=nodes, pairs=pairs, seed=seed)

    @property
    def radius(self) -> float:
        return float(self.n**self.gamma)

    @property
    def disk(self) -> Disk:
        return Disk(self.radius)

    def to_dict(self):
        return {
            "n": self.n,
            "gamma": self.gamma,
            "seed": self.seed,
            "nodes": self.nodes.tolist(),
            "pairs": self.pairs.tolist(),
        }

    @classmethod
    def from_dict(cls, data) -> "Instance":
        return cls(
            n=int(data["n"]),
            gamma=float(data["gamma"]),
            nodes=data["nodes"],
            pairs=data["pairs"],
            seed=data.get("seed"),
        )


def sample_instance(n: int, gamma: float, seed: int) -> Instance:
    """Uniform nodes on the disk; each destination uniform over the other n-1 nodes."""
    if n < 2:
        raise ParameterError(f"an instance needs n >= 2, got {n}")
    if gamma < 0:
        raise ParameterError(f"gamma must be non-negative, got {gamma}")
    rng = np.random.default_rng(seed)
    nodes = sample_disk(n**gamma, n, rng)
    sources = np.arange(n)
    destinations = rng.integers(0, n - 1, size=n)
    destinations += destinations >= sources
    return Instance(n=n, gamma=gamma, nodes=nodes, pairs=np.column_stack((sources, destinations)), seed=seed)
