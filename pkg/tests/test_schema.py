#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - tests for the run-config loader."""

import pytest

from sri_lockin.const import MIN_TRIALS, NoiseKind, RadiusKind
from sri_lockin.exceptions import ConfigError, UnknownProblemError
from sri_lockin.schema import (
    LOCKIN,
    NOISE,
    SCHEDULE,
    SSRI,
    load_run_config,
    parse_radius,
)


def test_defaults():
    config = load_run_config("simulate")

    assert config["command"] == "simulate"
    assert config["problem"] == "biased_linear"
    assert (config["seed"], config["trials"]) == (0, MIN_TRIALS)
    assert config[SCHEDULE]["a0"] == 0.5 and config[SCHEDULE]["gamma"] == 1.0
    assert config[NOISE] == {"kind": NoiseKind.SPHERE.value, "k": 0.5}
    assert config[SSRI]["radius"] == "geometric:2"
    assert config[SSRI]["r0"] == 1.0
    assert config[LOCKIN]["n0"] == [10, 100, 1000]
    assert config["x0"] is None


def test_problem_defaults_fill_partial_sections():
    config = load_run_config("simulate", overrides={NOISE: {"k": 0.0}})
    assert config[NOISE] == {"kind": NoiseKind.SPHERE.value, "k": 0.0}

    config = load_run_config("simulate", {SCHEDULE: {"gamma": 0.75}})
    assert config[SCHEDULE]["a0"] == 0.5 and config[SCHEDULE]["gamma"] == 0.75


def test_overrides_win_over_the_file():
    file_config = {"seed": 1, "horizon": 50, SSRI: {"r0": 3.0, "tw": 2.0}}
    config = load_run_config("ssri", file_config, {"seed": 2, SSRI: {"r0": 4.0}})
    assert config["seed"] == 2 and config["horizon"] == 50
    assert config[SSRI]["r0"] == 4.0 and config[SSRI]["tw"] == 2.0


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigError):
        load_run_config("simulate", {"bogus": 1})
    with pytest.raises(ConfigError):
        load_run_config("ssri", {SSRI: {"bogus": 1}})
    with pytest.raises(ConfigError):
        load_run_config("simulate", {"problem_args": {"bogus": 1}})


def test_out_of_range_values_are_rejected():
    with pytest.raises(ConfigError):
        load_run_config("simulate", {SCHEDULE: {"gamma": 0.5}})
    with pytest.raises(ConfigError):
        load_run_config("simulate", {SCHEDULE: {"a0": 0.0}})
    with pytest.raises(ConfigError):
        load_run_config("simulate", {NOISE: {"kind": "pink"}})
    with pytest.raises(ConfigError):
        load_run_config("simulate", {"trials": 0})
    with pytest.raises(ConfigError):
        load_run_config("simulate", ["not", "a", "dict"])


def test_radius_schedules():
    assert parse_radius("arithmetic:0.5") == (RadiusKind.ARITHMETIC, 0.5)

    config = load_run_config("ssri", {SSRI: {"radius": "arithmetic:0.5"}})
    assert config[SSRI]["radius"] == "arithmetic:0.5"

    for radius in ("geometric:1", "arithmetic:0", "spiral:2", "geometric"):
        with pytest.raises(ConfigError):
            load_run_config("ssri", {SSRI: {"radius": radius}})


def test_points_are_checked_against_the_problem():
    assert load_run_config("simulate", {"x0": 1.5})["x0"] == [1.5]

    config = load_run_config(
        "simulate", {"problem_args": {"dim": 2}, "x0": [1.0, -1.0]}
    )
    assert config["x0"] == [1.0, -1.0]

    with pytest.raises(ConfigError):
        load_run_config("simulate", {"problem_args": {"dim": 2}, "x0": [1.0]})
    with pytest.raises(ConfigError):
        load_run_config("ssri", {SSRI: {"x_start": [1.0, 2.0]}})


def test_unknown_problem():
    with pytest.raises(UnknownProblemError):
        load_run_config("simulate", {"problem": "nope"})


@pytest.mark.parametrize(
    "problem, args",
    [
        ("sign_subgradient", {"eps": 0.1}),
        ("sign_subgradient", {"dim": 1}),
        ("local_basin", {"eps": 0.1}),
    ],
)
def test_problem_args_are_checked_per_problem(problem, args):
    with pytest.raises(ConfigError):
        load_run_config("simulate", {"problem": problem, "problem_args": args})


def test_problem_args_accepted_per_problem():
    config = load_run_config("simulate", {"problem": "local_basin"})
    assert config["problem_args"] == {}
    config = load_run_config(
        "simulate", {"problem": "biased_linear", "problem_args": {"eps": 0.2}}
    )
    assert config["problem_args"] == {"eps": 0.2}
