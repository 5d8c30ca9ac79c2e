# tests/test_builder.py
import math

import numpy as np
import pytest

from processing.builder import (
    Route,
    build_routes,
    build_system,
    color_transmitters,
    schedule,
    throughput,
)
from processing.instance import Instance, sample_instance
from utils.errors import OutsideRegionError, ParameterError, ScheduleError
from utils.geometry import min_site_spacing

# C = 0.45 at cell_scale 16 gives w = 0.45 on the unit disk: a center cell and six around it.
HAND_C, HAND_D, HAND_SCALE = 0.45, 0.5, 16.0


def test_route_properties():
    route = Route(pair=0, hops=((3, 5), (5, 8), (8, 1)))
    assert route.source == 3
    assert route.destination == 1
    assert route.transmitters == [3, 5, 8]
    assert route.is_chained()
    assert route.is_loop_free()
    assert not Route(pair=0, hops=((3, 5), (6, 1))).is_chained()
    assert not Route(pair=0, hops=((3, 5), (5, 3))).is_loop_free()


def test_instance_validation():
    with pytest.raises(ParameterError):
        Instance(n=2, gamma=0.0, nodes=[(0.0, 0.0), (0.1, 0.0)], pairs=[(0, 0), (1, 0)])
    with pytest.raises(ParameterError):
        Instance(n=2, gamma=0.0, nodes=[(0.0, 0.0), (0.1, 0.0)], pairs=[(0, 2), (1, 0)])
    with pytest.raises(OutsideRegionError):
        Instance(n=2, gamma=0.0, nodes=[(0.0, 0.0), (1.5, 0.0)], pairs=[(0, 1), (1, 0)])
    with pytest.raises(ParameterError):
        sample_instance(1, 0.5, seed=0)


def test_sampled_instance():
    instance = sample_instance(300, 0.4, seed=12)
    assert instance.radius == pytest.approx(300**0.4)
    assert np.all(np.hypot(*instance.nodes.T) <= instance.radius * (1.0 + 1e-12))
    np.testing.assert_array_equal(instance.pairs[:, 0], np.arange(300))
    assert np.all(instance.pairs[:, 1] != instance.pairs[:, 0])
    np.testing.assert_array_equal(sample_instance(300, 0.4, seed=12).nodes, instance.nodes)


def test_two_node_system(pair_instance):
    plan, txsets, system, report = build_system(pair_instance, HAND_C, HAND_D, W=1.0, cell_scale=HAND_SCALE)

    assert plan.partition.cell_count == 7
    assert [route.hops for route in plan.routes] == [((0, 1),), ((1, 0),)]
    assert plan.X[0] == 2 and plan.Y[0] == 2
    assert plan.L == 1
    assert plan.feasible and not plan.empty_cell_hit
    assert plan.empty_cells == 6
    assert plan.max_hop_length == pytest.approx(0.2)
    assert not plan.diameter_guaranteed

    np.testing.assert_array_equal(txsets.color_of, [1, 2])
    assert txsets.S == 2 and txsets.max_degree == 1

    assert system.period == 2
    assert [route.slots for route in system.routes] == [(1,), (2,)]
    assert report.p == 2
    assert report.lam == pytest.approx(0.5)
    assert throughput(system, W=3.0) == pytest.approx(1.5)


def test_far_apart_pair_shares_one_slot(pair_instance):
    _, txsets, system, report = build_system(pair_instance, 0.05, 0.5, cell_scale=144.0)
    assert txsets.S == 1
    assert report.L == 1
    assert system.period == 1
    assert [route.slots for route in system.routes] == [(1,), (1,)]


def test_route_through_empty_cell_is_blocked(make_pair_instance):
    instance = make_pair_instance(left=(-0.8, 0.0), right=(0.8, 0.0))
    plan, _, system, report = build_system(instance, HAND_C, HAND_D, cell_scale=HAND_SCALE)

    assert plan.blocked_pairs == [0, 1]
    assert plan.routes == []
    assert math.isinf(plan.L)
    assert system is None
    assert not report.feasible and report.empty_cell_hit
    assert math.isinf(report.p)
    assert report.lam == 0.0


def test_C_must_be_small_against_region(pair_instance):
    with pytest.raises(ParameterError, match="C too large"):
        build_routes(pair_instance, 0.5)
    with pytest.raises(ParameterError):
        build_routes(pair_instance, 0.1, cell_scale=0.0)


@pytest.mark.slow
def test_routes_over_fully_occupied_partition(site_instance):
    instance, C = site_instance
    plan = build_routes(instance, C)

    assert plan.partition.cell_count == instance.n
    assert plan.feasible
    assert plan.diameter_guaranteed
    np.testing.assert_array_equal(plan.Y, np.ones(instance.n))
    assert plan.L == int(plan.X.max())
    assert plan.max_hop_length <= C

    for route in plan.routes:
        s, d = instance.pairs[route.pair]
        assert route.source == s and route.destination == d
        assert route.is_chained()
        assert route.is_loop_free()


@pytest.fixture
def random_build():
    instance = sample_instance(200, 0.3, seed=3)
    C, D = 2.0, 0.5
    return instance, C, D, build_system(instance, C, D, cell_scale=16.0)


def test_random_instance_builds(random_build):
    instance, C, D, (plan, txsets, system, report) = random_build
    assert plan.feasible
    assert len(plan.routes) == instance.n
    assert plan.loads.max() <= plan.L
    occupied = plan.Y > 0
    assert plan.L >= np.max(-(-plan.X[occupied] // plan.Y[occupied]))
    for route in plan.routes:
        assert route.is_chained() and route.is_loop_free()

    assert system.period == report.L * report.S
    assert report.M == plan.partition.cell_count


def test_transmitter_sets_are_spread(random_build):
    instance, C, D, (_, txsets, _, _) = random_build
    spacing = C * (2.0 + D)
    assert txsets.S <= txsets.max_degree + 1
    assert sorted(set(txsets.color_of.tolist())) == list(range(1, txsets.S + 1))
    for color in range(1, txsets.S + 1):
        assert min_site_spacing(instance.nodes[txsets.members(color)]) > spacing


def test_coloring_is_greedy_in_index_order():
    nodes = np.array([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (5.0, 0.0)])
    instance = Instance.on_disk(nodes, [(0, 1), (1, 2), (2, 3), (3, 0)], radius=6.0)
    txsets = color_transmitters(instance, C=0.4, D=0.6)
    # links of length <= 1.04: 0-1, 1-2
    np.testing.assert_array_equal(txsets.color_of, [1, 2, 1, 1])


def test_schedule_respects_round_length(random_build):
    _, _, _, (plan, txsets, system, _) = random_build
    for route in system.routes:
        for (t, _), slot in zip(route.hops, route.slots):
            assert (slot - 1) % txsets.S + 1 == txsets.color_of[t]
    with pytest.raises(ScheduleError):
        schedule(plan.routes, txsets, 0)
    with pytest.raises(ScheduleError):
        schedule(plan.routes, txsets, math.inf)
