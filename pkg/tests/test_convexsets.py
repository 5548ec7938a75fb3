#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - tests for the convex set geometry."""

import math

import numpy as np
import pytest

from sri_lockin.const import DEFAULT_DILATION_SAMPLES
from sri_lockin.convexsets import (
    Ball,
    Hull,
    HullBall,
    SetValuedMapSpec,
    dilate_map,
    dilation_growth_constant,
    dilation_radius,
    growth_check,
    hausdorff,
    parametrized_selection,
    point_set_distance,
    project_pi,
    recover_parameter,
    steiner_point,
    support_function,
)
from sri_lockin.exceptions import (
    ConfigError,
    DimensionMismatchError,
    SelectionError,
    ZeroDirectionError,
)
from sri_lockin.helpers import direction_grid
from sri_lockin.problems import (
    PROBLEM_FACTORIES,
    get_problem,
    make_biased_linear,
    make_sign_subgradient,
)


def _random_hull(rng: np.random.Generator, dim: int) -> Hull:
    return Hull(rng.uniform(-1.0, 1.0, size=(rng.integers(dim + 1, dim + 6), dim)))


def test_support_function():
    assert support_function(Ball([1.0, 0.0], 2.0), [1.0, 0.0]) == pytest.approx(3.0)

    tri = Hull([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert support_function(tri, [0.0, 1.0]) == pytest.approx(1.0)
    assert support_function(tri, np.array([1.0, 1.0]) / math.sqrt(2)) == pytest.approx(
        0.70710678, abs=1e-8
    )

    hb = HullBall([[0.0, 0.0], [1.0, 0.0]], 0.5)
    assert support_function(hb, [2.0, 0.0]) == pytest.approx(3.0)


def test_support_function_is_positively_homogeneous(triangle):
    for u in direction_grid(2, 16):
        assert triangle.support(3.5 * u) == pytest.approx(3.5 * triangle.support(u))


def test_zero_direction_is_rejected(triangle):
    with pytest.raises(ZeroDirectionError):
        support_function(triangle, [0.0, 0.0])
    with pytest.raises(ZeroDirectionError):
        Ball([0.0], 1.0).support([0.0])


def test_point_set_distance(triangle):
    assert point_set_distance([3.0, 0.0], Ball([0.0, 0.0], 1.0)) == pytest.approx(2.0)
    assert point_set_distance([0.5, 0.0], Ball([0.0, 0.0], 1.0)) == 0.0
    far = point_set_distance([2.0, 2.0], triangle)
    assert far == pytest.approx(2.12132034, abs=1e-6)
    assert point_set_distance([0.2, 0.2], triangle) == pytest.approx(0.0, abs=1e-9)

    with pytest.raises(DimensionMismatchError):
        point_set_distance([1.0, 2.0, 3.0], triangle)


def test_hausdorff():
    assert hausdorff(Ball([0.0, 0.0], 1.0), Ball([0.0, 0.0], 2.0)) == pytest.approx(1.0)
    assert hausdorff(Hull([[0.0, 0.0]]), Hull([[3.0, 4.0]])) == pytest.approx(5.0)
    assert hausdorff(Ball([0.0, 0.0], 1.0), Ball([3.0, 0.0], 1.0)) == pytest.approx(3.0)

    short, long = Hull([[0.0, 0.0], [1.0, 0.0]]), Hull([[0.0, 0.0], [2.0, 0.0]])
    assert hausdorff(short, long) == pytest.approx(1.0, abs=1e-9)
    assert hausdorff(Ball([0.0, 0.0], 1.0), short) == pytest.approx(1.0, abs=1e-9)


def test_steiner_point(triangle):
    assert steiner_point(Ball([2.0, -1.0], 3.0)) == pytest.approx([2.0, -1.0])
    assert steiner_point(Hull([[0.7, -0.2]])) == pytest.approx([0.7, -0.2])
    assert steiner_point(triangle) == pytest.approx([0.375, 0.375], abs=1e-9)
    assert steiner_point(Hull([[-1.0], [3.0]])) == pytest.approx([1.0])

    cube = Hull([[i, j, k] for i in (0.0, 1.0) for j in (0.0, 1.0) for k in (0.0, 1.0)])
    assert steiner_point(cube) == pytest.approx([0.5, 0.5, 0.5], abs=1e-9)

    # a triangle in 3-D
    flat = Hull([[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    assert steiner_point(flat) == pytest.approx([0.375, 0.375, 1.0], abs=1e-9)

    with pytest.raises(ConfigError):
        steiner_point(triangle, quad_order=2)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_steiner_point_is_a_lipschitz_selection(dim):
    rng = np.random.default_rng(dim)
    for _ in range(100):
        one, two = _random_hull(rng, dim), _random_hull(rng, dim)
        s_one, s_two = steiner_point(one), steiner_point(two)

        assert point_set_distance(s_one, one) <= 1e-6
        gap = np.linalg.norm(s_one - s_two)
        assert gap <= dim * hausdorff(one, two) * (1 + 1e-6) + 1e-12


def test_project_pi():
    disc = Ball([0.0, 0.0], 1.0)
    inside = project_pi(disc, [0.5, 0.0])
    assert inside.vertices.tolist() == [[0.5, 0.0]]

    segment = project_pi(Hull([[0.0, 0.0], [2.0, 0.0]]), [3.0, 0.0])
    assert hausdorff(segment, Hull([[1.0, 0.0], [2.0, 0.0]])) < 1e-6


def test_project_pi_on_a_disc_matches_the_sampled_cap():
    x = np.array([2.0, 0.0])
    theta = np.linspace(0.0, 2 * math.pi, 720, endpoint=False)
    circle = np.column_stack((np.cos(theta), np.sin(theta)))
    edge = circle[np.linalg.norm(circle - x, axis=1) <= 2.0]
    arc = x + 2.0 * circle
    arc = arc[np.linalg.norm(arc, axis=1) <= 1.0]
    oracle = Hull(np.vstack((edge, arc)))

    assert hausdorff(project_pi(Ball([0.0, 0.0], 1.0), x), oracle) <= 1e-2


def test_project_pi_is_lipschitz():
    rng = np.random.default_rng(5)
    for _ in range(30):
        one, two = _random_hull(rng, 2), _random_hull(rng, 2)
        x_one, x_two = rng.uniform(-2.0, 2.0, size=(2, 2))
        rhs = 5 * (hausdorff(one, two) + np.linalg.norm(x_one - x_two))
        lhs = hausdorff(project_pi(one, x_one), project_pi(two, x_two))
        assert lhs <= 1.05 * rhs


def test_parametrized_selection(full_ball, contraction):
    x, u = np.array([0.5, 0.0]), np.array([0.3, -0.4])
    expected = 1.5 * u  # K (1 + |x|) u lies in F(x)
    assert parametrized_selection(full_ball, x, u) == pytest.approx(expected)

    for u in (-1.0, 0.0, 0.7):
        assert parametrized_selection(contraction, [1.0], [u]) == pytest.approx([-1.0])

    sign = SetValuedMapSpec(make_sign_subgradient().map.evaluate, 2.0, 1, "sign")
    assert parametrized_selection(sign, [0.0], [0.5]) == pytest.approx([1.0])

    with pytest.raises(SelectionError):
        parametrized_selection(full_ball, x, [1.0, 1.0])


def test_recover_parameter(full_ball, contraction):
    assert recover_parameter(contraction, [1.0], [-1.0]) == pytest.approx([-0.5])
    assert recover_parameter(full_ball, [0.0, 0.0], [0.0, 0.0]) == pytest.approx([0, 0])

    u = recover_parameter(full_ball, [0.0, 0.0], [0.3, 0.4])
    assert u == pytest.approx([0.3, 0.4])
    assert parametrized_selection(full_ball, [0.0, 0.0], u) == pytest.approx([0.3, 0.4])

    with pytest.raises(SelectionError):
        recover_parameter(contraction, [1.0], [0.0])


def test_parametrization_is_surjective_in_the_limit():
    F = make_biased_linear(eps=0.1).map
    distances = []
    for count in (11, 41, 161):
        grid = np.linspace(-1, 1, count)
        image = [parametrized_selection(F, [0.0], [u]) for u in grid]
        distances.append(hausdorff(Hull(np.array(image)), F([0.0])))

    assert distances[0] > distances[1] > distances[2]
    assert distances[2] <= 1e-2


def test_dilate_map(contraction):
    x = np.array([0.5])
    lo, hi = dilate_map(contraction, 1)(x).extent()
    assert lo == pytest.approx(-0.5 - 2 / 3)
    assert hi == pytest.approx(-0.5 + 2 / 3)

    constant = SetValuedMapSpec(lambda x: Ball(np.zeros(2), 1.0), 1.0, 2, "unit")
    dilated = dilate_map(constant, 2)
    assert hausdorff(dilated([0.3, -0.1]), Ball([0.0, 0.0], 1.0)) == pytest.approx(0.0)

    sign = make_sign_subgradient().map
    assert dilate_map(sign, 1)([0.1]).extent() == pytest.approx((-1.0, 1.0))

    with pytest.raises(ConfigError):
        dilate_map(contraction, 0)


def test_dilation_containment_chain():
    F = make_biased_linear(eps=0.1, dim=2).map
    one, two = dilate_map(F, 1), dilate_map(F, 2)
    dirs = direction_grid(2, 64)
    rng = np.random.default_rng(0)

    for x in rng.uniform(-3.0, 3.0, size=(10, 2)):
        h_F, h_two, h_one = (G(x).support_many(dirs) for G in (F, two, one))
        assert np.all(h_F <= h_two + 1e-9)
        assert np.all(h_two <= h_one + 1e-6)


@pytest.mark.parametrize("problem_id", sorted(PROBLEM_FACTORIES))
def test_dilation_containment_chain_on_the_catalog(problem_id):
    problem = get_problem(problem_id)
    F, dim = problem.map, problem.dim
    one, two = dilate_map(F, 1), dilate_map(F, 2)
    dirs = direction_grid(dim, 64)
    # the level-1 grid may miss a kink of F by half a grid step
    eps_grid = problem.L * 2 * dilation_radius(1) / (DEFAULT_DILATION_SAMPLES - 1)

    rng = np.random.default_rng(1)
    for x in rng.uniform(-3.0, 3.0, size=(100, dim)):
        h_F, h_two, h_one = (G(x).support_many(dirs) for G in (F, two, one))
        assert np.all(h_F <= h_two + 1e-9)
        assert np.all(h_two <= h_one + eps_grid)


def test_growth_check(contraction):
    assert growth_check(contraction, [[0.0], [1.0], [5.0]]).ok

    blown_up = SetValuedMapSpec(
        lambda x: Ball(np.zeros(1), 3.0 * (1.0 + np.linalg.norm(x))), 1.0, 1, "x3"
    )
    report = growth_check(blown_up, [[0.0], [1.0], [5.0]])
    assert len(report.violations) == 3

    biased = make_biased_linear(eps=0.1).map
    grid = np.linspace(-5.0, 5.0, 41)[:, None]
    assert biased.growth_K == pytest.approx(1.1)
    assert growth_check(biased, grid).ok
    assert growth_check(dilate_map(biased, 1), grid).ok
    assert dilate_map(biased, 1).growth_K == dilation_growth_constant(1.1, 1)

    with pytest.raises(ConfigError):
        growth_check(contraction, [])
