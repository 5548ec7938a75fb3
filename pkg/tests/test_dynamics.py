#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - tests for differential inclusions & solution funnels."""

import math

import numpy as np
import pytest

from sri_lockin.const import SelectionStrategy
from sri_lockin.convexsets import (
    Ball,
    Hull,
    SetValuedMapSpec,
    dilate_map,
    point_set_distance,
)
from sri_lockin.dynamics import (
    ControlSignal,
    Funnel,
    PathGrid,
    euler_grid,
    euler_inclusion_path,
    funnel_refinement_check,
    gronwall_bound,
    ode_controlled_path,
    path_funnel_distance,
    sample_funnel,
)
from sri_lockin.exceptions import ConfigError, HorizonMismatchError
from sri_lockin.problems import (
    PROBLEM_FACTORIES,
    get_problem,
    make_biased_linear,
    make_sign_subgradient,
)


def _constant_path(value: float, horizon: float = 1.0) -> PathGrid:
    return PathGrid([0.0, horizon], [[value], [value]])


def test_euler_grid():
    grid = euler_grid(1.0, 0.3)
    assert len(grid) == 5
    assert grid[-1] == 1.0
    assert np.diff(grid) == pytest.approx(np.full(4, 0.25))
    assert len(euler_grid(1.0, 0.1)) == 11


def test_euler_inclusion_path(contraction):
    path = euler_inclusion_path(contraction, [1.0], 1.0, 1e-3)
    assert path.points[-1, 0] == pytest.approx(math.exp(-1), abs=1e-3)

    still = SetValuedMapSpec(lambda x: Hull([np.zeros(1)]), 1.0, 1, "zero")
    path = euler_inclusion_path(still, [0.4], 1.0, 0.1)
    assert np.all(path.points == 0.4)

    with pytest.raises(ConfigError):
        euler_inclusion_path(contraction, [1.0], 1.0, 2.0)


def test_sign_flow_reaches_zero_and_stays():
    h = 1e-3
    path = euler_inclusion_path(make_sign_subgradient().map, [0.5], 1.0, h)
    late = path.points[path.times >= 0.5 + h, 0]
    assert np.all(np.abs(late) <= h + 1e-12)
    assert path.points[path.times <= 0.4, 0].min() > 0


def test_control_signal_is_validated():
    with pytest.raises(ConfigError):
        ControlSignal([0.0, 1.0], [[1.5]])
    with pytest.raises(ConfigError):
        ControlSignal([0.0, 1.0, 2.0], [[0.5]])
    assert ControlSignal.constant([0.5], 2.0).covers(2.0)


def test_ode_controlled_path(contraction, full_ball):
    path = ode_controlled_path(
        full_ball, [0.3, -0.2], ControlSignal.constant([0.0, 0.0], 1.0), 1.0, 0.1
    )
    assert path.points == pytest.approx(np.tile([0.3, -0.2], (len(path), 1)))

    path = ode_controlled_path(
        contraction, [2.0], ControlSignal.constant([0.6], 1.0), 1.0, 1e-3
    )
    assert path.points[-1, 0] == pytest.approx(2 * math.exp(-1), abs=2e-3)

    grow = SetValuedMapSpec(
        lambda x: Ball(np.zeros(1), 1.0 + np.linalg.norm(x)), 1.0, 1, "grow"
    )
    push = ControlSignal.constant([1.0], 1.0)
    path = ode_controlled_path(grow, [0.0], push, 1.0, 1e-3)
    assert path.points[-1, 0] == pytest.approx(math.e - 1, abs=3e-3)

    short = ControlSignal.constant([0.0], 0.5)
    with pytest.raises(ConfigError):
        ode_controlled_path(contraction, [1.0], short, 1.0, 0.1)


def test_singleton_funnel_collapses(contraction):
    funnel = sample_funnel(contraction, [[1.0], [-0.5]], 1.0, 0.1, n_paths_per_x0=4)
    assert len(funnel) == 2
    assert funnel.origins == [0, 1]


def test_biased_funnel_ends_near_the_bias():
    F = make_biased_linear(eps=0.1).map
    funnel = sample_funnel(F, [[1.0]], 3.0, 0.01, n_paths_per_x0=6, seed=4)
    assert len(funnel) >= 3
    ends = np.array([p.points[-1, 0] for p in funnel.paths])
    assert np.all(np.abs(ends) <= 0.1 + 0.05 + 0.05)


def test_sign_funnel_reaches_the_kink():
    h = 0.01
    Y0 = np.linspace(-1.0, 1.0, 5)[:, None]
    funnel = sample_funnel(make_sign_subgradient().map, Y0, 1.0 + 2 * h, h, seed=1)
    assert set(funnel.origins) == set(range(5))
    for path in funnel.paths:
        assert abs(path.points[-1, 0]) <= h + 1e-9


def test_sample_funnel_is_reproducible():
    F = make_biased_linear(eps=0.2, dim=2).map
    Y0 = [[1.0, 0.0], [0.0, -1.0]]
    one = sample_funnel(F, Y0, 1.0, 0.1, n_paths_per_x0=5, seed=9)
    two = sample_funnel(F, Y0, 1.0, 0.1, n_paths_per_x0=5, seed=9)
    assert len(one) == len(two)
    for p, q in zip(one.paths, two.paths):
        assert np.array_equal(p.points, q.points)


def test_path_funnel_distance(contraction):
    funnel = sample_funnel(contraction, [[1.0]], 1.0, 0.1)
    assert path_funnel_distance(funnel.paths[0], funnel) == 0.0

    zero = Funnel([_constant_path(0.0)], 1.0)
    assert path_funnel_distance(_constant_path(1.0), zero) == pytest.approx(1.0)

    pair = Funnel([_constant_path(0.0), _constant_path(2.0)], 1.0)
    assert path_funnel_distance(_constant_path(0.5), pair) == pytest.approx(0.5)

    with pytest.raises(HorizonMismatchError):
        path_funnel_distance(_constant_path(0.5, 2.0), pair)


def test_gronwall_bound():
    assert gronwall_bound(1.0, 1.0, 1.0) == pytest.approx(2 * math.e)
    assert gronwall_bound(1.5, 0.0, 3.0) == pytest.approx(1.5)
    assert gronwall_bound(0.0, 1.0, 0.0) == 0.0


def test_euler_paths_respect_the_gronwall_bound():
    F = make_biased_linear(eps=0.1, dim=2).map
    h, T = 0.01, 2.0
    rng = np.random.default_rng(0)
    for i, x0 in enumerate(rng.uniform(-2.0, 2.0, size=(5, 2))):
        path = euler_inclusion_path(F, x0, T, h, SelectionStrategy.RANDOM, rng=i)
        bound = gronwall_bound(np.linalg.norm(x0), F.growth_K, T) * (1 + 10 * h)
        assert np.linalg.norm(path.points, axis=1).max() <= bound


def test_funnel_refinement_check(contraction):
    report = funnel_refinement_check(contraction, [1, 2, 3], [[1.0]], 1.0, 0.05)
    assert report.trend == "decreasing"
    assert all(d <= env for d, env in zip(report.distances, report.envelopes))

    constant = SetValuedMapSpec(lambda x: Ball(np.zeros(1), 1.0), 1.0, 1, "unit")
    report = funnel_refinement_check(
        constant, [1, 2], [[0.5]], 1.0, 0.1, n_paths_per_x0=3
    )
    assert report.distances == pytest.approx([0.0, 0.0])

    biased = make_biased_linear(eps=0.1).map
    report = funnel_refinement_check(
        biased, [1, 3], [[1.0]], 1.0, 0.1, n_paths_per_x0=3
    )
    assert report.distances[1] < report.distances[0]

    with pytest.raises(ConfigError):
        funnel_refinement_check(contraction, [2, 1], [[1.0]], 1.0, 0.1)


def test_controlled_path_of_a_singleton_map_is_the_euler_path(contraction):
    h, T = 0.05, 1.5
    times = euler_grid(T, h)
    control = ControlSignal(times, np.full((len(times) - 1, 1), 0.3))

    for F in (contraction, get_problem("local_basin").map):
        euler = euler_inclusion_path(F, [1.2], T, h)
        controlled = ode_controlled_path(F, [1.2], control, T, h)
        assert controlled.times == pytest.approx(euler.times, abs=1e-12)
        assert controlled.points == pytest.approx(euler.points, abs=1e-12)


@pytest.mark.parametrize("level", [1, 2])
@pytest.mark.parametrize("problem_id", sorted(PROBLEM_FACTORIES))
def test_funnel_velocities_are_admissible_for_the_dilation(problem_id, level):
    problem = get_problem(problem_id)
    Y0 = problem.attractor.O_prime_grid(3, closed=True)
    funnel = sample_funnel(problem.map, Y0, 1.0, 0.05, n_paths_per_x0=4, seed=2)
    dilated = dilate_map(problem.map, level)

    for path in funnel.paths:
        for x, v in zip(path.points[:-1], path.velocities):
            assert point_set_distance(v, dilated(x)) <= 1e-8
