# tests/conftest.py
import numpy as np
import pytest

from processing.instance import Instance
from utils.geometry import build_disk_partition


@pytest.fixture
def partition():
    # m = 9 rings, u = 10/9.5
    return build_disk_partition(10.0, 1.0)


@pytest.fixture
def small_partition():
    # m = 2 rings, u = 1.2
    return build_disk_partition(3.0, 1.0)


@pytest.fixture
def make_pair_instance():
    """Two nodes on the unit disk, each the other's destination."""

    def make(left=(-0.1, 0.0), right=(0.1, 0.0)):
        return Instance.on_disk(np.array([left, right]), np.array([[0, 1], [1, 0]]), radius=1.0)

    return make


@pytest.fixture
def pair_instance(make_pair_instance):
    return make_pair_instance()


@pytest.fixture
def site_instance():
    """
    One node on every site of the partition the builder uses for R = 3,
    C = 1.4 at cell_scale 1; node i sends to node i+1.
    """
    C = 1.4
    sites = build_disk_partition(3.0, C / 16.0).sites
    n = len(sites)
    pairs = np.column_stack((np.arange(n), (np.arange(n) + 1) % n))
    return Instance.on_disk(sites, pairs, radius=3.0), C
