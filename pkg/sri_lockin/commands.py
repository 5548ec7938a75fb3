#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - the subcommands, as library functions.

Each cmd_* takes a resolved run config (see schema.load_run_config), writes its files
under config["out"] and returns a summary dict. Every JSON output embeds the config.
"""

import logging
import os
from typing import Tuple

import numpy as np

from .analysis import (
    FunnelConfig,
    discretization_threshold,
    finite_reset_experiment,
    growth_envelope_check,
    k0,
    k_tilde,
    lipschitz_radius,
    lock_in_empirical,
    recurrence_experiment,
    rho_diagnostics,
    theoretical_lockin_bound,
)
from .const import InitRule, SelectionStrategy, __dev_mode__
from .dynamics import funnel_refinement_check, sample_funnel
from .engine import (
    NoiseModel,
    StepSchedule,
    b_tail,
    run_inclusion,
    window_subsequence,
)
from .exceptions import EmptyConditioningError
from .helpers import coord_names, write_csv, write_json
from .problems import ProblemSpec, catalog_json, get_problem
from .resetter import SsriConfig, reset_summary, run_ssri
from .schema import (
    A0,
    BOUND,
    DIAGNOSE,
    EXPERIMENT,
    FUNNEL,
    GAMMA,
    GRID_SIZE,
    HORIZON,
    INIT_RULE,
    LATE_FRACTION,
    LEVEL,
    LEVELS,
    LOCKIN,
    N0_LIST,
    N_MAX,
    N_WINDOWS,
    NOISE,
    NOISE_K,
    NOISE_KIND,
    OUT_DIR,
    PATHS_PER_X0,
    PROBLEM,
    PROBLEM_ARGS,
    R0,
    RADIUS,
    RECURRENCE,
    SCHEDULE,
    SEED,
    SSRI,
    STEP_H,
    STRATEGY,
    T_HORIZON,
    T_W,
    TAIL_FRACTION,
    TRIALS,
    WORKERS,
    X0,
    X_INIT,
    X_START,
    parse_radius,
)

DEV_MODE = __dev_mode__ and False

_LOGGER = logging.getLogger(__name__)
if DEV_MODE:
    _LOGGER.setLevel(logging.DEBUG)

BOUND_COLUMNS = ["n0", "b", "bound", "vacuous"]
LOCKIN_COLUMNS = [
    "n0",
    "empirical",
    "ci_lo",
    "ci_hi",
    "bound",
    "vacuous",
    "trials",
    "successes",
    "divergent",
    "horizon",
]
DIAGNOSE_COLUMNS = [
    "n_lo",
    "n_hi",
    "gap",
    "rho",
    "rho1",
    "rho2",
    "slack",
    "zeta",
    "triangle_ok",
]


def _setup(config: dict) -> Tuple[ProblemSpec, StepSchedule, NoiseModel]:
    problem = get_problem(config[PROBLEM], **config[PROBLEM_ARGS])
    s = StepSchedule(config[SCHEDULE][A0], config[SCHEDULE][GAMMA])
    noise = NoiseModel(config[NOISE][NOISE_KIND], config[NOISE][NOISE_K])
    return problem, s, noise


def _path(config: dict, name: str) -> str:
    return os.path.join(config[OUT_DIR], name)


def _start(config: dict, problem: ProblemSpec) -> np.ndarray:
    """Return x0 if configured, else halfway from A's centre to the edge of O'."""
    if config[X0] is not None:
        return np.array(config[X0])
    attractor = problem.attractor
    return attractor.center + attractor.O_prime_radius / 2 * np.eye(problem.dim)[0]


def cmd_simulate(config: dict) -> dict:
    """Run the recursion once; write the trajectory CSV & a JSON header."""

    problem, s, noise = _setup(config)
    traj = run_inclusion(
        problem.map,
        _start(config, problem),
        s,
        noise,
        config[HORIZON],
        SelectionStrategy(config[STRATEGY]),
        config[SEED],
    )
    envelope = growth_envelope_check(
        traj, s, max(problem.map.growth_K, noise.K_noise), problem.attractor.T_u
    )

    csv_path, json_path = _path(config, "simulate.csv"), _path(config, "simulate.json")
    rows = write_csv(traj.rows(), csv_path, traj.columns())
    write_json(
        {
            "config": config,
            "trajectory": traj.header(),
            "growth_envelope": envelope.to_dict(),
        },
        json_path,
    )
    _LOGGER.info("simulate: %s rows written to %s", rows, csv_path)
    return {"files": [csv_path, json_path], "rows": rows, "divergent": traj.divergent}


def cmd_ssri(config: dict) -> dict:
    """Run SSRI once (and, optionally, the finite-reset experiment)."""

    problem, s, noise = _setup(config)
    section = config[SSRI]
    kind, factor = parse_radius(section[RADIUS])
    x0 = problem.attractor.center if section[X0] is None else section[X0]
    cfg = SsriConfig(x0, section[R0], kind, factor, section[T_W])
    x_start = section[X_START] if section[X_START] is not None else config[X0]
    strategy = SelectionStrategy(config[STRATEGY])

    traj, trace = run_ssri(
        problem.map,
        cfg,
        s,
        noise,
        config[HORIZON],
        strategy,
        config[SEED],
        x_start=x_start,
    )
    summary = reset_summary(trace, traj)

    csv_path, json_path = _path(config, "ssri.csv"), _path(config, "ssri.json")
    rows = write_csv(traj.rows(), csv_path, traj.columns())
    write_json(
        {
            "config": config,
            "trajectory": traj.header(),
            "trace": trace.to_dict(),
            "summary": summary.to_dict(),
        },
        json_path,
    )
    result = {
        "files": [csv_path, json_path],
        "rows": rows,
        "resets": summary.performed_resets,
        "audit_passed": summary.audit_passed,
    }

    if section[EXPERIMENT]:
        report = finite_reset_experiment(
            problem.map,
            cfg,
            problem.attractor,
            s,
            noise,
            config[TRIALS],
            config[HORIZON],
            config[SEED],
            strategy,
            x_start=x_start,
            workers=config[WORKERS],
        )
        exp_path = _path(config, "ssri_experiment.json")
        write_json({"config": config, "report": report.to_dict()}, exp_path)
        result["files"].append(exp_path)
        result["late_reset_fraction"] = report.late_fraction

    return result


def cmd_lockin(config: dict) -> dict:
    """Estimate the lock-in probability per n0; write the report JSON & curve CSV."""

    problem, s, noise = _setup(config)
    section = config[LOCKIN]
    report = lock_in_empirical(
        problem.map,
        problem.attractor,
        s,
        noise,
        section[N0_LIST],
        config[TRIALS],
        config[HORIZON],
        InitRule(section[INIT_RULE]),
        config[SEED],
        SelectionStrategy(config[STRATEGY]),
        bound_inputs=problem.bound_inputs(noise),
        x_init=section[X_INIT],
        tail_fraction=section[TAIL_FRACTION],
        grid_size=section[GRID_SIZE],
        workers=config[WORKERS],
    )

    csv_path, json_path = _path(config, "lockin.csv"), _path(config, "lockin.json")
    write_csv(report.csv_rows(), csv_path, LOCKIN_COLUMNS)
    write_json({"config": config, "report": report.to_dict()}, json_path)
    return {
        "files": [csv_path, json_path],
        "probabilities": [row.probability for row in report.rows],
        "nondecreasing_within_ci": report.nondecreasing_within_ci,
    }


def cmd_bound(config: dict) -> dict:
    """Tabulate the theoretical lock-in bound against n0."""

    problem, s, noise = _setup(config)
    section = config[BOUND]
    inputs = problem.bound_inputs(noise)

    rows = []
    for n0 in sorted(section[N0_LIST]):
        bound = theoretical_lockin_bound(inputs, s, n0)
        rows.append(
            {"n0": n0, "b": b_tail(s, n0), "bound": bound, "vacuous": bound <= 0}
        )

    csv_path, json_path = _path(config, "bound.csv"), _path(config, "bound.json")
    write_csv(rows, csv_path, BOUND_COLUMNS)
    write_json(
        {
            "config": config,
            "bound_inputs": inputs.to_dict(),
            "k_tilde": k_tilde(inputs),
            "k0": k0(inputs),
            "lipschitz_radius": lipschitz_radius(inputs),
            "discretization_threshold": discretization_threshold(
                inputs, s, section[N_MAX]
            ),
            "rows": rows,
        },
        json_path,
    )
    return {"files": [csv_path, json_path], "bounds": [row["bound"] for row in rows]}


def cmd_diagnose(config: dict) -> dict:
    """Run from n0 inside O'; report rho, rho1, rho2 & zeta for each window."""

    problem, s, noise = _setup(config)
    section = config[DIAGNOSE]
    attractor = problem.attractor
    n0 = section[N0_LIST]

    chain = window_subsequence(s, n0, attractor.T_A, section[N_WINDOWS])
    traj = run_inclusion(
        problem.map,
        _start(config, problem),
        s,
        noise,
        max(config[HORIZON], chain[-1]) - n0,
        SelectionStrategy(config[STRATEGY]),
        config[SEED],
        n_start=n0,
    )
    funnel_cfg = FunnelConfig(
        h=section[STEP_H],
        grid_size=section[GRID_SIZE],
        n_paths_per_x0=section[PATHS_PER_X0],
        seed=config[SEED],
    )

    rows, skipped = [], []
    for window in zip(chain, chain[1:]):
        if window[1] > traj.n_end:
            break
        try:
            result = rho_diagnostics(
                traj, problem.map, window, attractor, section[LEVEL], funnel_cfg
            )
        except EmptyConditioningError as err:
            _LOGGER.warning("diagnose: window %s skipped: %s", window, err)
            skipped.append(list(window))
            continue
        rows.append(result.to_row())

    csv_path, json_path = _path(config, "diagnose.csv"), _path(config, "diagnose.json")
    write_csv(rows, csv_path, DIAGNOSE_COLUMNS)
    write_json(
        {
            "config": config,
            "trajectory": traj.header(),
            "windows": chain,
            "skipped": skipped,
            "funnel": funnel_cfg.to_dict(),
        },
        json_path,
    )
    return {
        "files": [csv_path, json_path],
        "windows": len(rows),
        "triangle_ok": all(row["triangle_ok"] for row in rows),
    }


def cmd_funnel(config: dict) -> dict:
    """Sample the funnel from a grid of closure O'; check its dilation refinement."""

    problem, _, _ = _setup(config)
    section = config[FUNNEL]
    Y0 = problem.attractor.O_prime_grid(section[GRID_SIZE], closed=True)
    horizon = section[T_HORIZON] or problem.attractor.T_A
    h = min(section[STEP_H], horizon)

    funnel = sample_funnel(
        problem.map, Y0, horizon, h, section[PATHS_PER_X0], config[SEED]
    )
    refinement = funnel_refinement_check(
        problem.map,
        section[LEVELS],
        Y0,
        horizon,
        h,
        config[SEED],
        section[PATHS_PER_X0],
    )

    x_cols = coord_names("x", problem.dim)

    def rows():
        for idx, (path, origin) in enumerate(zip(funnel.paths, funnel.origins)):
            for t, point in zip(path.times, path.points):
                coords = dict(zip(x_cols, point))
                yield {"path": idx, "origin": origin, "t": t, **coords}

    csv_path, json_path = _path(config, "funnel.csv"), _path(config, "funnel.json")
    count = write_csv(rows(), csv_path, ["path", "origin", "t", *x_cols])
    write_json(
        {
            "config": config,
            "horizon": horizon,
            "h": h,
            "paths": len(funnel),
            "refinement": refinement.to_dict(),
        },
        json_path,
    )
    return {"files": [csv_path, json_path], "rows": count, "trend": refinement.trend}


def cmd_problems(config: dict) -> dict:
    """Write the catalog metadata."""
    json_path = _path(config, "problems.json")
    catalog = catalog_json()
    write_json(catalog, json_path)
    return {"files": [json_path], "problems": sorted(catalog["problems"])}


def cmd_recurrence(config: dict) -> dict:
    """Relate late visits to O' with convergence, from an unconditioned start."""

    problem, s, noise = _setup(config)
    section = config[RECURRENCE]
    attractor = problem.attractor
    if config[X0] is not None:
        x0 = np.array(config[X0])
    else:
        x0 = attractor.center + attractor.O_radius * np.eye(problem.dim)[0]

    report = recurrence_experiment(
        problem.map,
        attractor,
        s,
        noise,
        x0,
        config[TRIALS],
        config[HORIZON],
        section[LATE_FRACTION],
        config[SEED],
        SelectionStrategy(config[STRATEGY]),
        tail_fraction=section[TAIL_FRACTION],
        workers=config[WORKERS],
    )
    json_path = _path(config, "recurrence.json")
    write_json({"config": config, "x0": x0, "report": report.to_dict()}, json_path)
    return {"files": [json_path], **report.to_dict()}


COMMANDS = {
    "simulate": cmd_simulate,
    "ssri": cmd_ssri,
    "lockin": cmd_lockin,
    "bound": cmd_bound,
    "diagnose": cmd_diagnose,
    "funnel": cmd_funnel,
    "problems": cmd_problems,
    "recurrence": cmd_recurrence,
}
