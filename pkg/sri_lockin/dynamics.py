#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - differential inclusions, controlled ODEs & solution funnels."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from .const import (
    DEFAULT_DILATION_SAMPLES,
    DEFAULT_N_DIRS,
    DEFAULT_QUAD_ORDER,
    PARAMETER_TOL,
    SelectionStrategy,
    __dev_mode__,
)
from .convexsets import (
    SetValuedMapSpec,
    dilate_map,
    dilation_radius,
    parametrized_selection,
    select_velocity,
)
from .exceptions import ConfigError, DivergenceError, HorizonMismatchError
from .helpers import as_point, substream_rng

DEV_MODE = __dev_mode__ and False

_LOGGER = logging.getLogger(__name__)
if DEV_MODE:
    _LOGGER.setLevel(logging.DEBUG)

Seed = Union[int, np.random.Generator, None]


@dataclass
class PathGrid:
    """A path sampled on an increasing time grid that starts at 0."""

    times: np.ndarray
    points: np.ndarray
    velocities: Optional[np.ndarray] = None  # v_k used on [t_k, t_k+1), if recorded

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[0] != len(self.times):
            raise ConfigError("a path needs one point per time")
        if self.times[0] != 0 or np.any(np.diff(self.times) <= 0):
            raise ConfigError("path times must start at 0 and strictly increase")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def at(self, times) -> np.ndarray:
        """Return the piecewise-linear interpolant at the given times."""
        times = np.asarray(times, dtype=float)
        return np.column_stack(
            [np.interp(times, self.times, self.points[:, i]) for i in range(self.dim)]
        )


@dataclass
class Funnel:
    """A finite sample of the solution funnel S(T, Y0), on a common time grid."""

    paths: List[PathGrid]
    horizon: float
    origins: List[int] = field(default_factory=list)  # index into Y0, per path

    def __post_init__(self) -> None:
        if not self.paths:
            raise ConfigError("a funnel needs at least one path")
        grid = self.paths[0].times
        if any(not np.array_equal(p.times, grid) for p in self.paths[1:]):
            raise ConfigError("funnel paths must share a time grid")

    @property
    def times(self) -> np.ndarray:
        return self.paths[0].times

    def __len__(self) -> int:
        return len(self.paths)


@dataclass
class ControlSignal:
    """A piecewise-constant parameter signal: values[i] on [breakpoints[i], [i+1])."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.breakpoints = np.asarray(self.breakpoints, dtype=float)
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if len(self.breakpoints) != len(self.values) + 1:
            raise ConfigError("a control needs one more breakpoint than values")
        if self.breakpoints[0] != 0 or np.any(np.diff(self.breakpoints) <= 0):
            raise ConfigError("control breakpoints must start at 0 and increase")
        if np.any(np.linalg.norm(self.values, axis=1) > 1.0 + PARAMETER_TOL):
            raise ConfigError("control values must lie in the unit ball")

    @classmethod
    def constant(cls, value, horizon: float) -> "ControlSignal":
        return cls([0.0, horizon], [as_point(value)])

    def covers(self, horizon: float) -> bool:
        return self.breakpoints[-1] >= horizon * (1 - 1e-12)


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return substream_rng(seed)


def euler_grid(horizon: float, h: float) -> np.ndarray:
    """Return 0 = t_0 < ... < t_n = T with n = ceil(T / h) equal steps (each <= h)."""
    count = max(1, math.ceil(horizon / h - 1e-9))
    return np.linspace(0.0, horizon, count + 1)


def _check_horizon(horizon: float, h: float) -> None:
    if not horizon > 0:
        raise ConfigError(f"horizon T must be > 0, not {horizon}")
    if not 0 < h <= horizon:
        raise ConfigError(f"step h must be in (0, T], not {h}")


def euler_inclusion_path(
    F: SetValuedMapSpec,
    x0,
    horizon: float,
    h: float,
    strategy: SelectionStrategy = SelectionStrategy.STEINER,
    rng: Seed = None,
    direction=None,
    quad_order: int = DEFAULT_QUAD_ORDER,
) -> PathGrid:
    """Return an explicit Euler path of dx/dt in F(x): x_k+1 = x_k + h_k v_k."""

    _check_horizon(horizon, h)
    rng = _rng(rng)
    x = as_point(x0, F.dimension)
    times = euler_grid(horizon, h)

    points = np.empty((len(times), F.dimension))
    velocities = np.empty((len(times) - 1, F.dimension))
    points[0] = x
    for k, step in enumerate(np.diff(times)):
        velocities[k] = select_velocity(F(x), strategy, rng, direction, quad_order)
        x = x + step * velocities[k]
        if not np.all(np.isfinite(x)):
            raise DivergenceError(f"{F.name}: x(t={times[k + 1]:.6g}) is not finite")
        points[k + 1] = x

    return PathGrid(times, points, velocities)


def ode_controlled_path(
    F: SetValuedMapSpec,
    x0,
    control: ControlSignal,
    horizon: float,
    h: float,
    n_dirs: int = DEFAULT_N_DIRS,
    quad_order: int = DEFAULT_QUAD_ORDER,
) -> PathGrid:
    """Return the Euler path of dx/dt = f(x, u(t)), f the parametrized selection of F.

    Each control interval is cut into ceil(length / h) equal substeps, so the control is
    constant on every substep.
    """

    _check_horizon(horizon, h)
    if not control.covers(horizon):
        raise ConfigError(f"control ends at {control.breakpoints[-1]} < T={horizon}")

    x = as_point(x0, F.dimension)
    times, points = [0.0], [x]
    for i, u in enumerate(control.values):
        start, end = control.breakpoints[i], min(control.breakpoints[i + 1], horizon)
        if end <= start:
            break
        count = max(1, math.ceil((end - start) / h - 1e-9))
        grid = np.linspace(start, end, count + 1)
        grid[-1] = end
        for t_prev, t_next in zip(grid[:-1], grid[1:]):
            v = parametrized_selection(F, x, u, n_dirs, quad_order)
            x = x + (t_next - t_prev) * v
            if not np.all(np.isfinite(x)):
                raise DivergenceError(f"{F.name}: x(t={t_next:.6g}) is not finite")
            times.append(t_next)
            points.append(x)

    return PathGrid(np.array(times), np.array(points))


def _funnel_strategy(j: int, direction: np.ndarray) -> tuple:
    """Path j of each initial point: Steiner, then the two extremes, then random."""
    if j == 0:
        return SelectionStrategy.STEINER, None
    if j == 1:
        return SelectionStrategy.EXTREME, direction
    if j == 2:
        return SelectionStrategy.EXTREME, -direction
    return SelectionStrategy.RANDOM, None


def sample_funnel(
    F: SetValuedMapSpec,
    Y0: Sequence,
    horizon: float,
    h: float,
    n_paths_per_x0: int = 4,
    seed: Optional[int] = 0,
    quad_order: int = DEFAULT_QUAD_ORDER,
) -> Funnel:
    """Return a seeded sample of S(T, Y0) with mixed selection strategies.

    Path (i, j) draws from substream (seed, i, j); bitwise-identical paths from the
    same initial point are kept once.
    """

    if len(Y0) == 0:
        raise ConfigError("Y0 must be nonempty")
    if n_paths_per_x0 < 1:
        raise ConfigError("n_paths_per_x0 must be >= 1")

    paths, origins = [], []
    for i, x0 in enumerate(Y0):
        direction = substream_rng(seed, i).standard_normal(F.dimension)
        direction /= np.linalg.norm(direction)

        kept: List[PathGrid] = []
        for j in range(n_paths_per_x0):
            strategy, towards = _funnel_strategy(j, direction)
            rng = substream_rng(seed, i, j)
            path = euler_inclusion_path(
                F, x0, horizon, h, strategy, rng, towards, quad_order
            )
            if not any(np.array_equal(path.points, p.points) for p in kept):
                kept.append(path)
        paths += kept
        origins += [i] * len(kept)

    _LOGGER.debug(
        "sample_funnel(%s): %s paths from %s initial points, T=%s, h=%s",
        F.name,
        len(paths),
        len(Y0),
        horizon,
        h,
    )
    return Funnel(paths, float(horizon), origins)


def path_funnel_distance(path: PathGrid, funnel: Funnel) -> float:
    """Return min over funnel paths of max over the funnel grid of |p(t) - x(t)|."""

    if abs(path.horizon - funnel.horizon) > 1e-9 * (1.0 + funnel.horizon):
        raise HorizonMismatchError(f"path T={path.horizon}, funnel T={funnel.horizon}")

    sampled = path.at(funnel.times)
    return min(
        float(np.linalg.norm(sampled - p.points, axis=1).max()) for p in funnel.paths
    )


def gronwall_bound(r: float, growth_K: float, horizon: float) -> float:
    """Return (r + K T) e^(K T), a bound on |x(t)|, t <= T, for |x(0)| <= r."""
    if min(r, growth_K, horizon) < 0:
        raise ConfigError("gronwall_bound needs r, K, T >= 0")
    return (r + growth_K * horizon) * math.exp(growth_K * horizon)


@dataclass
class RefinementReport:
    levels: List[int]
    distances: List[float]
    envelopes: List[float]  # 2 eps_l T e^T, the shrinking-dilation reference

    @property
    def trend(self) -> str:
        diffs = np.diff(self.distances)
        if np.all(diffs < 0):
            return "decreasing"
        if np.all(diffs <= 0):
            return "nonincreasing"
        return "non-monotone"

    def to_dict(self) -> dict:
        return {
            "levels": self.levels,
            "distances": self.distances,
            "envelopes": self.envelopes,
            "trend": self.trend,
        }


def funnel_refinement_check(
    F: SetValuedMapSpec,
    levels: Sequence[int],
    Y0: Sequence,
    horizon: float,
    h: float,
    seed: Optional[int] = 0,
    n_paths_per_x0: int = 4,
    n_samples: int = DEFAULT_DILATION_SAMPLES,
) -> RefinementReport:
    """Measure how far sampled funnels of F^(l) stray from the sampled funnel of F."""

    levels = [int(lvl) for lvl in levels]
    if not levels or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError(f"levels must be nonempty & increasing, not {levels}")

    base = sample_funnel(F, Y0, horizon, h, n_paths_per_x0, seed)
    distances, envelopes = [], []
    for level in levels:
        dilated = sample_funnel(
            dilate_map(F, level, max(n_samples, 2 * F.dimension)),
            Y0,
            horizon,
            h,
            n_paths_per_x0,
            seed,
        )
        distances.append(max(path_funnel_distance(p, base) for p in dilated.paths))
        envelopes.append(dilation_radius(level) * horizon * math.exp(horizon))
        _LOGGER.info(
            "funnel refinement of %s: l=%s, distance=%.6g", F.name, level, distances[-1]
        )

    report = RefinementReport(levels, distances, envelopes)
    if report.trend == "non-monotone":
        _LOGGER.warning(
            "funnel refinement of %s is non-monotone: %s", F.name, distances
        )
    return report
