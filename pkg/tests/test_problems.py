#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - tests for the catalog of benchmark problems."""

import numpy as np
import pytest

from sri_lockin.convexsets import growth_check, steiner_point
from sri_lockin.exceptions import ConfigError, UnknownProblemError
from sri_lockin.problems import (
    PROBLEM_FACTORIES,
    attraction_time_check,
    catalog_json,
    get_problem,
    list_problems,
    make_biased_linear,
    make_local_basin,
    make_sign_subgradient,
)

PROBLEM_IDS = ["biased_linear", "sign_subgradient", "local_basin"]


def test_catalog_ids():
    assert list(PROBLEM_FACTORIES) == PROBLEM_IDS
    assert [p.id for p in list_problems()] == PROBLEM_IDS

    catalog = catalog_json()["problems"]
    assert sorted(catalog) == sorted(PROBLEM_IDS)
    for entry in catalog.values():
        assert entry["growth_check_ok"] is True
        assert {"dim", "growth_k", "lipschitz_l", "attractor", "notes"} <= set(entry)


@pytest.mark.parametrize("problem_id", PROBLEM_IDS)
def test_growth_constants_hold(problem_id):
    problem = get_problem(problem_id)
    assert growth_check(problem.map, problem.growth_grid).ok


@pytest.mark.parametrize("problem_id", PROBLEM_IDS)
def test_attraction_time_is_long_enough(problem_id):
    problem = get_problem(problem_id)
    distances = attraction_time_check(problem)
    assert len(distances) == 10
    assert max(distances) <= problem.attractor.eps0


def test_biased_linear():
    problem = make_biased_linear()
    assert problem.attractor.T_A == pytest.approx(2.3)
    assert problem.attractor.O_prime_radius == pytest.approx(2.0)
    assert problem.map.growth_K == pytest.approx(1.1)

    wide = get_problem("biased_linear", eps=0.2, dim=3)
    assert wide.dim == 3 and wide.map.growth_K == pytest.approx(1.2)
    assert steiner_point(wide.map([1.0, 2.0, 3.0])) == pytest.approx([-1.0, -2.0, -3.0])

    with pytest.raises(ConfigError):
        make_biased_linear(eps=0.0)


def test_sign_subgradient():
    problem = make_sign_subgradient()
    assert problem.attractor.T_A == pytest.approx(1.5)

    F = problem.map
    assert F([0.0]).extent() == pytest.approx((-1.0, 1.0))
    assert steiner_point(F([0.0])) == pytest.approx([0.0])
    assert F([0.3]).vertices.tolist() == [[-1.0]]
    assert F([-2.0]).vertices.tolist() == [[1.0]]


def test_local_basin():
    problem = make_local_basin()
    F = problem.map
    assert F([1.0]).vertices.tolist() == [[-1.0]]
    assert F([0.5]).vertices.tolist() == [[-0.5]]
    assert F([3.0]).vertices.tolist() == [[1.0]]
    assert F([-3.0]).vertices.tolist() == [[-1.0]]
    assert problem.basin == (-2.0, 2.0)

    for x in (-2.0, 0.0, 2.0):  # the equilibria
        assert F([x]).vertices[0, 0] == 0.0
    assert np.sign(F([2.5]).vertices[0, 0]) == 1.0  # +2 repels

    with pytest.raises(ConfigError):
        make_local_basin(dim=2)


def test_unknown_problem():
    with pytest.raises(UnknownProblemError):
        get_problem("nope")
    with pytest.raises(ConfigError):
        get_problem("nope")


def test_problem_args_must_fit_the_factory():
    assert get_problem("local_basin", dim=1).dim == 1
    with pytest.raises(ConfigError):
        get_problem("sign_subgradient", eps=0.1)
    with pytest.raises(ConfigError):
        get_problem("local_basin", eps=0.1)
