#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""A CLI for the sri_lockin library.

sri_lockin simulates stochastic recursive inclusions, with & without resets, and
measures their lock-in probabilities against the theoretical bound.
"""

import json
import logging
import sys
from typing import Optional

import click

from sri_lockin.commands import COMMANDS
from sri_lockin.const import InitRule, NoiseKind, SelectionStrategy
from sri_lockin.exceptions import ConfigError, NumericalError, SriError
from sri_lockin.helpers import to_jsonable
from sri_lockin.logger import set_logging
from sri_lockin.schema import (
    BOUND,
    DIAGNOSE,
    EXPERIMENT,
    FUNNEL,
    HORIZON,
    INIT_RULE,
    LATE_FRACTION,
    LEVEL,
    LEVELS,
    LOCKIN,
    LOG,
    N0_LIST,
    N_WINDOWS,
    NOISE,
    NOISE_K,
    NOISE_KIND,
    OUT_DIR,
    PROBLEM,
    R0,
    RADIUS,
    RECURRENCE,
    SEED,
    SSRI,
    STRATEGY,
    T_HORIZON,
    T_W,
    TRIALS,
    WORKERS,
    X0,
    X_START,
    load_run_config,
)

DEBUG_MODE = "debug_mode"
DEBUG_ADDR = "0.0.0.0"
DEBUG_PORT = 5679

EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

CONTEXT_SETTINGS = dict(help_option_names=["-h", "--help"])

# the options shared by every subcommand, and where they land in the run config
TOP_KEYS = (SEED, TRIALS, HORIZON, OUT_DIR, PROBLEM, STRATEGY, WORKERS, X0)
NOISE_KEYS = {"noise_k": NOISE_K, "noise_kind": NOISE_KIND}


def _arg_split(ctx, param, value) -> Optional[list]:  # callback=_arg_split
    if value is None:
        return None
    try:
        return [float(x.strip()) for x in value.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"{value!r} is not a comma-separated list of numbers")


def _proc_kwargs(kwargs: dict, section: Optional[str] = None, keys=None) -> dict:
    """Map the flat command-line kwargs onto the (nested) run config."""

    def given(value) -> bool:
        return value is not None and value != ()

    overrides = {k: kwargs[k] for k in TOP_KEYS if given(kwargs.get(k))}
    noise = {v: kwargs[k] for k, v in NOISE_KEYS.items() if given(kwargs.get(k))}
    if noise:
        overrides[NOISE] = noise
    if section:
        values = {v: kwargs[k] for k, v in (keys or {}).items() if given(kwargs.get(k))}
        overrides[section] = {
            k: list(v) if isinstance(v, tuple) else v for k, v in values.items()
        }
    return overrides


@click.group(context_settings=CONTEXT_SETTINGS)
@click.option("-z", "--debug-mode", count=True, help="enable debugger")
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG")
@click.option("-c", "--config", "config_file", type=click.File("r"))
@click.pass_context
def cli(ctx, config_file=None, **kwargs):
    """A CLI for the sri_lockin library."""

    if 0 < kwargs[DEBUG_MODE] < 3:
        import debugpy

        debugpy.listen(address=(DEBUG_ADDR, DEBUG_PORT))
        print(f"Debugging is enabled, listening on: {DEBUG_ADDR}:{DEBUG_PORT}.")
        print(" - execution paused, waiting for debugger to attach...")

        if kwargs[DEBUG_MODE] == 1:
            debugpy.wait_for_client()
            print(" - debugger is now attached, continuing execution.")

    file_config = None
    if config_file is not None:
        try:
            file_config = json.load(config_file)
        except json.JSONDecodeError as err:
            click.echo(f"Invalid config file: {err}", err=True)
            sys.exit(EXIT_CONFIG_ERROR)

    ctx.obj = {"file_config": file_config, "verbose": kwargs["verbose"]}


class RunCommand(click.Command):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        shared = [
            click.Option(("--problem",), type=click.STRING, help="a catalog id"),
            click.Option(("--seed",), type=click.INT, help="the base seed"),
            click.Option(("--trials",), type=click.INT, help="Monte Carlo trials"),
            click.Option(
                ("--horizon", "--n", HORIZON), type=click.INT, help="iterations"
            ),
            click.Option(("--out",), type=click.Path(), help="output directory"),
            click.Option(
                ("--x0",), callback=_arg_split, help="start point, e.g. '1.0,0.5'"
            ),
            click.Option(("--noise-k",), type=click.FLOAT, help="noise bound K"),
            click.Option(
                ("--noise-kind",), type=click.Choice([k.value for k in NoiseKind])
            ),
            click.Option(
                ("--strategy",), type=click.Choice([s.value for s in SelectionStrategy])
            ),
            click.Option(("--workers",), type=click.INT, help="threads for trials"),
        ]
        for idx, param in enumerate(shared):
            self.params.insert(idx, param)


def _run(obj: dict, command: str, overrides: dict) -> None:
    try:
        config = load_run_config(command, obj["file_config"], overrides)
        level = {0: logging.WARNING, 1: logging.INFO}.get(obj["verbose"], logging.DEBUG)
        set_logging(level=level, cc_stdout=obj["verbose"] > 0, **config[LOG])
        result = COMMANDS[command](config)

    except ConfigError as err:
        click.echo(str(err), err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except NumericalError as err:
        click.echo(str(err), err=True)
        sys.exit(EXIT_NUMERICAL_ERROR)
    except SriError as err:
        click.echo(str(err), err=True)
        sys.exit(1)

    click.echo(json.dumps(to_jsonable(result)))


@click.command(cls=RunCommand)
@click.pass_obj
def simulate(obj, **kwargs):
    """Run the recursion once and write the trajectory."""
    _run(obj, "simulate", _proc_kwargs(kwargs))


@click.command(cls=RunCommand)
@click.option("--tw", type=click.FLOAT, help="the window length T_W")
@click.option("--r0", type=click.FLOAT, help="the first radius")
@click.option("--radius", type=click.STRING, help="e.g. 'geometric:2'")
@click.option("--reset-to", callback=_arg_split, help="the reset target x0")
@click.option("--x-start", callback=_arg_split, help="X_0, if not the reset target")
@click.option("--experiment/--no-experiment", default=None, help="also run trials")
@click.pass_obj
def ssri(obj, **kwargs):
    """Run the recursion with resets and write the trajectory & reset trace."""
    keys = {
        "tw": T_W,
        "r0": R0,
        "radius": RADIUS,
        "reset_to": X0,
        "x_start": X_START,
        "experiment": EXPERIMENT,
    }
    _run(obj, "ssri", _proc_kwargs(kwargs, SSRI, keys))


@click.command(cls=RunCommand)
@click.option("--n0", multiple=True, type=click.INT, help="repeat for each n0")
@click.option("--init-rule", type=click.Choice([r.value for r in InitRule]))
@click.pass_obj
def lockin(obj, **kwargs):
    """Estimate the lock-in probability for each n0."""
    keys = {"n0": N0_LIST, "init_rule": INIT_RULE}
    _run(obj, "lockin", _proc_kwargs(kwargs, LOCKIN, keys))


@click.command(cls=RunCommand)
@click.option("--n0", multiple=True, type=click.INT, help="repeat for each n0")
@click.pass_obj
def bound(obj, **kwargs):
    """Tabulate the theoretical lock-in bound."""
    _run(obj, "bound", _proc_kwargs(kwargs, BOUND, {"n0": N0_LIST}))


@click.command(cls=RunCommand)
@click.option("--n0", type=click.INT, help="the first window starts here")
@click.option("--windows", type=click.INT, help="the number of windows")
@click.option("--level", type=click.INT, help="0 for F, l >= 1 for F^(l)")
@click.pass_obj
def diagnose(obj, **kwargs):
    """Report rho, rho1, rho2 & the noise fluctuation per window."""
    keys = {"n0": N0_LIST, "windows": N_WINDOWS, "level": LEVEL}
    _run(obj, "diagnose", _proc_kwargs(kwargs, DIAGNOSE, keys))


@click.command(cls=RunCommand)
@click.option("--levels", multiple=True, type=click.INT, help="dilation levels")
@click.option("--t", "t_horizon", type=click.FLOAT, help="the funnel horizon T")
@click.pass_obj
def funnel(obj, **kwargs):
    """Sample a solution funnel and check its dilation refinement."""
    keys = {"levels": LEVELS, "t_horizon": T_HORIZON}
    _run(obj, "funnel", _proc_kwargs(kwargs, FUNNEL, keys))


@click.command(cls=RunCommand)
@click.pass_obj
def problems(obj, **kwargs):
    """Write the catalog of benchmark problems."""
    _run(obj, "problems", _proc_kwargs(kwargs))


@click.command(cls=RunCommand)
@click.option("--late-fraction", type=click.FLOAT, help="the late part of the run")
@click.pass_obj
def recurrence(obj, **kwargs):
    """Relate late visits to O' with convergence."""
    keys = {"late_fraction": LATE_FRACTION}
    _run(obj, "recurrence", _proc_kwargs(kwargs, RECURRENCE, keys))


cli.add_command(simulate)
cli.add_command(ssri)
cli.add_command(lockin)
cli.add_command(bound)
cli.add_command(diagnose)
cli.add_command(funnel)
cli.add_command(problems)
cli.add_command(recurrence)

if __name__ == "__main__":
    cli()
