#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - configuration schemas & the run-config loader."""

import copy
import logging
from typing import Optional, Tuple

import voluptuous as vol

from .const import (
    DEFAULT_RADIUS_FACTOR,
    DEFAULT_SEED,
    DEFAULT_T_W,
    DEFAULT_TAIL_FRACTION,
    MIN_TRIALS,
    InitRule,
    NoiseKind,
    RadiusKind,
    SelectionStrategy,
    __dev_mode__,
)
from .exceptions import ConfigError
from .problems import BIASED_LINEAR, LOCAL_BASIN, SIGN_SUBGRADIENT, get_problem

# top-level attrs
PROBLEM = "problem"
PROBLEM_ARGS = "problem_args"
SEED = "seed"
TRIALS = "trials"
HORIZON = "horizon"
OUT_DIR = "out"
STRATEGY = "strategy"
WORKERS = "workers"
X0 = "x0"

SCHEDULE = "schedule"
NOISE = "noise"
SSRI = "ssri"
LOCKIN = "lockin"
BOUND = "bound"
DIAGNOSE = "diagnose"
FUNNEL = "funnel"
RECURRENCE = "recurrence"
LOG = "log"

# section attrs
A0 = "a0"
GAMMA = "gamma"
NOISE_KIND = "kind"
NOISE_K = "k"
R0 = "r0"
RADIUS = "radius"
T_W = "tw"
X_START = "x_start"
EXPERIMENT = "experiment"
N0_LIST = "n0"
INIT_RULE = "init_rule"
GRID_SIZE = "grid_size"
TAIL_FRACTION = "tail_fraction"
X_INIT = "x_init"
N_MAX = "n_max"
LEVEL = "level"
LEVELS = "levels"
N_WINDOWS = "n_windows"
STEP_H = "h"
PATHS_PER_X0 = "n_paths_per_x0"
T_HORIZON = "t"
LATE_FRACTION = "late_fraction"

LOG_FILE_NAME = "file_name"
LOG_ROTATE_BYTES = "rotate_bytes"
LOG_ROTATE_COUNT = "rotate_backups"

DEFAULT_PROBLEM = "biased_linear"

DEV_MODE = __dev_mode__ and False

_LOGGER = logging.getLogger(__name__)
if DEV_MODE:
    _LOGGER.setLevel(logging.DEBUG)


def parse_radius(value: str) -> Tuple[RadiusKind, float]:
    """Parse a radius schedule such as "geometric:2" or "arithmetic:0.5"."""

    try:
        kind, factor = str(value).split(":")
        return RadiusKind(kind), float(factor)
    except ValueError:
        raise vol.Invalid(f"radius must be '<geometric|arithmetic>:<c>', not {value!r}")


def _radius(value: str) -> str:
    kind, factor = parse_radius(value)
    if not factor > (1 if kind == RadiusKind.GEOMETRIC else 0):
        raise vol.Invalid(f"radius factor out of range for {kind.value}: {factor}")
    return f"{kind.value}:{factor:g}"


def _point(value) -> list:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [float(value)]
    return [float(v) for v in vol.Schema([vol.Coerce(float)])(value)]


POINT = vol.All(_point, vol.Length(min=1))
POS_INT = vol.All(vol.Coerce(int), vol.Range(min=1))
POS_FLOAT = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))
FRACTION = vol.All(vol.Coerce(float), vol.Range(min=0, max=1, min_included=False))
N0 = vol.All(vol.Coerce(int), vol.Range(min=0))


# 1/2: section schemas
SCHEDULE_SCHEMA = vol.Schema(
    {
        vol.Required(A0): vol.All(
            vol.Coerce(float), vol.Range(min=0, max=1, min_included=False)
        ),
        vol.Required(GAMMA): vol.All(
            vol.Coerce(float), vol.Range(min=0.5, max=1, min_included=False)
        ),
        vol.Optional("kind", default="polynomial"): "polynomial",
    },
    extra=vol.PREVENT_EXTRA,
)

NOISE_SCHEMA = vol.Schema(
    {
        vol.Required(NOISE_KIND): vol.In([k.value for k in NoiseKind]),
        vol.Required(NOISE_K): vol.All(vol.Coerce(float), vol.Range(min=0)),
    },
    extra=vol.PREVENT_EXTRA,
)

SSRI_SCHEMA = vol.Schema(
    {
        vol.Optional(X0, default=None): vol.Any(None, POINT),
        vol.Optional(X_START, default=None): vol.Any(None, POINT),
        vol.Optional(R0, default=1.0): POS_FLOAT,
        vol.Optional(RADIUS, default=f"geometric:{DEFAULT_RADIUS_FACTOR:g}"): _radius,
        vol.Optional(T_W, default=DEFAULT_T_W): POS_FLOAT,
        vol.Optional(EXPERIMENT, default=False): bool,
    },
    extra=vol.PREVENT_EXTRA,
)

LOCKIN_SCHEMA = vol.Schema(
    {
        vol.Optional(N0_LIST, default=[10, 100, 1000]): vol.All(
            [N0], vol.Length(min=1)
        ),
        vol.Optional(INIT_RULE, default=InitRule.GRID.value): vol.In(
            [r.value for r in InitRule]
        ),
        vol.Optional(GRID_SIZE, default=10): POS_INT,
        vol.Optional(TAIL_FRACTION, default=DEFAULT_TAIL_FRACTION): FRACTION,
        vol.Optional(X_INIT, default=None): vol.Any(None, POINT),
    },
    extra=vol.PREVENT_EXTRA,
)

BOUND_SCHEMA = vol.Schema(
    {
        vol.Optional(N0_LIST, default=[1, 10, 100, 1000, 10000, 100000]): vol.All(
            [N0], vol.Length(min=1)
        ),
        vol.Optional(N_MAX, default=10**7): POS_INT,
    },
    extra=vol.PREVENT_EXTRA,
)

FUNNEL_SCHEMA = vol.Schema(
    {
        vol.Optional(STEP_H, default=0.05): POS_FLOAT,
        vol.Optional(GRID_SIZE, default=5): POS_INT,
        vol.Optional(PATHS_PER_X0, default=4): POS_INT,
        vol.Optional(LEVELS, default=[1, 2, 3]): vol.All([POS_INT], vol.Length(min=1)),
        vol.Optional(T_HORIZON, default=None): vol.Any(None, POS_FLOAT),
    },
    extra=vol.PREVENT_EXTRA,
)

DIAGNOSE_SCHEMA = vol.Schema(
    {
        vol.Optional(N0_LIST, default=100): N0,
        vol.Optional(N_WINDOWS, default=5): POS_INT,
        vol.Optional(LEVEL, default=0): vol.All(vol.Coerce(int), vol.Range(min=0)),
        vol.Optional(STEP_H, default=0.05): POS_FLOAT,
        vol.Optional(GRID_SIZE, default=5): POS_INT,
        vol.Optional(PATHS_PER_X0, default=4): POS_INT,
    },
    extra=vol.PREVENT_EXTRA,
)

RECURRENCE_SCHEMA = vol.Schema(
    {
        vol.Optional(LATE_FRACTION, default=0.5): FRACTION,
        vol.Optional(TAIL_FRACTION, default=DEFAULT_TAIL_FRACTION): FRACTION,
    },
    extra=vol.PREVENT_EXTRA,
)

LOG_SCHEMA = vol.Schema(
    {
        vol.Optional(LOG_FILE_NAME, default=None): vol.Any(None, str),
        vol.Optional(LOG_ROTATE_BYTES, default=None): vol.Any(None, int),
        vol.Optional(LOG_ROTATE_COUNT, default=None): vol.Any(None, int),
    },
    extra=vol.PREVENT_EXTRA,
)

SECTION_SCHEMAS = {
    SSRI: SSRI_SCHEMA,
    LOCKIN: LOCKIN_SCHEMA,
    BOUND: BOUND_SCHEMA,
    DIAGNOSE: DIAGNOSE_SCHEMA,
    FUNNEL: FUNNEL_SCHEMA,
    RECURRENCE: RECURRENCE_SCHEMA,
    LOG: LOG_SCHEMA,
}

# 2/2: the run config
PROBLEM_ARGS_SCHEMA = vol.Schema(
    {vol.Optional("eps"): POS_FLOAT, vol.Optional("dim"): POS_INT},
    extra=vol.PREVENT_EXTRA,
)

# each factory takes only some of the args
PROBLEM_ARGS_SCHEMAS = {
    BIASED_LINEAR: PROBLEM_ARGS_SCHEMA,
    SIGN_SUBGRADIENT: vol.Schema({}, extra=vol.PREVENT_EXTRA),
    LOCAL_BASIN: vol.Schema({vol.Optional("dim"): POS_INT}, extra=vol.PREVENT_EXTRA),
}

RUN_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional(PROBLEM, default=DEFAULT_PROBLEM): str,
        vol.Optional(PROBLEM_ARGS, default={}): PROBLEM_ARGS_SCHEMA,
        vol.Optional(SEED, default=DEFAULT_SEED): vol.All(
            vol.Coerce(int), vol.Range(min=0)
        ),
        vol.Optional(TRIALS, default=MIN_TRIALS): POS_INT,
        vol.Optional(HORIZON, default=10_000): POS_INT,
        vol.Optional(OUT_DIR, default="."): str,
        vol.Optional(STRATEGY, default=SelectionStrategy.STEINER.value): vol.In(
            [s.value for s in SelectionStrategy]
        ),
        vol.Optional(WORKERS, default=1): POS_INT,
        vol.Optional(X0, default=None): vol.Any(None, POINT),
        vol.Required(SCHEDULE): SCHEDULE_SCHEMA,
        vol.Required(NOISE): NOISE_SCHEMA,
        **{vol.Optional(k): v for k, v in SECTION_SCHEMAS.items()},
    },
    extra=vol.PREVENT_EXTRA,
)


def _merge(base: dict, extra: dict) -> dict:
    """Return base updated by extra, recursing into sub-dicts (None values skipped)."""

    result = copy.deepcopy(base)
    for key, value in extra.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = _merge(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


def _problem_defaults(raw: dict):
    problem_id = str(raw.get(PROBLEM, DEFAULT_PROBLEM))
    schema = PROBLEM_ARGS_SCHEMAS.get(problem_id, PROBLEM_ARGS_SCHEMA)
    try:
        args = schema(raw.get(PROBLEM_ARGS) or {})
    except vol.Invalid as err:
        raise ConfigError(f"{PROBLEM_ARGS} of {problem_id}: {err}") from err
    return get_problem(problem_id, **args)


def load_run_config(
    command: str, file_config: Optional[dict] = None, overrides: Optional[dict] = None
) -> dict:
    """Merge a config file with command-line overrides, validate & resolve defaults.

    Overrides win over the file. The problem's schedule and noise fill whatever the
    user left out of those sections. The result is what every output file embeds.
    """

    if file_config is not None and not isinstance(file_config, dict):
        raise ConfigError("the config file must hold a JSON object")

    raw = _merge(file_config or {}, overrides or {})
    problem = _problem_defaults(raw)
    for section, default in (
        (SCHEDULE, problem.schedule.to_dict()),
        (NOISE, problem.noise.to_dict()),
    ):
        if isinstance(raw.get(section, {}), dict):
            raw[section] = _merge(default, raw.get(section, {}))
    for section in SECTION_SCHEMAS:
        raw.setdefault(section, {})

    try:
        config = RUN_CONFIG_SCHEMA(raw)
    except vol.Invalid as err:
        raise ConfigError(str(err)) from err

    points = {
        X0: config[X0],
        f"{SSRI}.{X0}": config[SSRI][X0],
        f"{SSRI}.{X_START}": config[SSRI][X_START],
        f"{LOCKIN}.{X_INIT}": config[LOCKIN][X_INIT],
    }
    for name, point in points.items():
        if point is not None and len(point) != problem.dim:
            raise ConfigError(
                f"{name} has d={len(point)}, {problem.id} has d={problem.dim}"
            )

    config["command"] = command
    _LOGGER.debug("load_run_config(%s): %s", command, config)
    return config
