#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - the benchmark catalog.

Each entry bundles a set-valued map with its attracting set, a recommended schedule
and noise, and constants derived by hand (the derivations are kept in `notes`).
"""

import inspect
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from .analysis import AttractorSpec, BoundInputs, derive_bound_inputs
from .const import SIGN_SNAP_TOL, NoiseKind, SelectionStrategy, __dev_mode__
from .convexsets import Ball, Hull, SetValuedMapSpec, growth_check, point_set_distance
from .dynamics import euler_inclusion_path
from .engine import NoiseModel, StepSchedule
from .exceptions import ConfigError, UnknownProblemError

DEV_MODE = __dev_mode__ and False

_LOGGER = logging.getLogger(__name__)
if DEV_MODE:
    _LOGGER.setLevel(logging.DEBUG)

BIASED_LINEAR = "biased_linear"
SIGN_SUBGRADIENT = "sign_subgradient"
LOCAL_BASIN = "local_basin"


@dataclass
class ProblemSpec:
    id: str
    map: SetValuedMapSpec
    attractor: AttractorSpec
    schedule: StepSchedule
    noise: NoiseModel
    L: float  # Lipschitz constant of F in the Hausdorff metric (see notes)
    growth_grid: np.ndarray
    basin: Optional[tuple] = None
    notes: Dict[str, str] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.map.dimension

    def bound_inputs(self, noise: Optional[NoiseModel] = None) -> BoundInputs:
        noise = noise or self.noise
        return derive_bound_inputs(self.map, self.attractor, noise, self.L)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dim": self.dim,
            "growth_k": self.map.growth_K,
            "lipschitz_l": self.L,
            "attractor": self.attractor.to_dict(),
            "basin": self.basin,
            "schedule": self.schedule.to_dict(),
            "noise": self.noise.to_dict(),
            "notes": self.notes,
        }


def _radial_grid(dim: int, radius: float = 10.0, count: int = 41) -> np.ndarray:
    if dim == 1:
        return np.linspace(-radius, radius, count)[:, None]
    rng = np.random.default_rng(dim)
    dirs = rng.standard_normal((count, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return np.vstack((np.zeros(dim), dirs * np.linspace(0, radius, count)[:, None]))


def make_biased_linear(eps: float = 0.1, dim: int = 1) -> ProblemSpec:
    """F(x) = B(-x, eps): the linear contraction blurred by a bias of size eps."""

    if not eps > 0:
        raise ConfigError(f"eps must be > 0, not {eps}")
    if dim < 1:
        raise ConfigError(f"dim must be >= 1, not {dim}")

    F = SetValuedMapSpec(
        evaluate=lambda x: Ball(-x, eps),
        growth_K=1.0 + eps,
        dimension=dim,
        name=BIASED_LINEAR,
    )
    eps0 = 0.3
    r_O = 2.9 + eps
    T_A = math.ceil(10 * math.log((r_O - eps) / eps0)) / 10
    attractor = AttractorSpec(
        A=Ball(np.zeros(dim), eps),
        O_prime_radius=1.9 + eps,
        O_radius=r_O,
        eps0=eps0,
        T_A=T_A,
    )
    return ProblemSpec(
        id=BIASED_LINEAR,
        map=F,
        attractor=attractor,
        schedule=StepSchedule(0.5, 1.0),
        noise=NoiseModel(NoiseKind.SPHERE, 0.5),
        L=1.0,
        growth_grid=_radial_grid(dim),
        basin=None,
        notes={
            "growth_k": "sup |y| over B(-x, eps) is |x| + eps <= (1 + eps)(1 + |x|)",
            "attractor": "B(0, eps) attracts globally: |x| - eps decays like e^(-t)",
            "t_a": f"ln(({r_O:g} - eps) / eps0) = {math.log((r_O - eps) / eps0):.4f}"
            f" rounded up to {T_A}",
            "lipschitz_l": "H(B(-x, eps), B(-y, eps)) = |x - y|",
        },
    )


def make_sign_subgradient() -> ProblemSpec:
    """F(x) = {-sign(x)}, with F(0) = [-1, 1]: the subdifferential flow of -|x|."""

    def evaluate(x: np.ndarray):
        if abs(x[0]) <= SIGN_SNAP_TOL:
            return Hull([[-1.0], [1.0]])
        return Hull([[-np.sign(x[0])]])

    F = SetValuedMapSpec(evaluate, growth_K=1.0, dimension=1, name=SIGN_SUBGRADIENT)
    attractor = AttractorSpec(
        A=Hull([[0.0]]), O_prime_radius=1.0, O_radius=1.5, eps0=0.25, T_A=1.5
    )
    return ProblemSpec(
        id=SIGN_SUBGRADIENT,
        map=F,
        attractor=attractor,
        schedule=StepSchedule(0.5, 1.0),
        noise=NoiseModel(NoiseKind.SPHERE, 0.5),
        L=3.0,
        growth_grid=_radial_grid(1),
        basin=None,
        notes={
            "snap": f"|x| <= {SIGN_SNAP_TOL:g} is treated as 0, where F(0) = [-1, 1]",
            "t_a": "dx/dt = -sign(x) reaches 0 from |x| <= 1.5 by t = 1.5",
            "lipschitz_l": "F jumps at 0, so no global L exists; 3 is the slope of its"
            " level-1 smoothing (a jump of 2 spread over 2 * 3^-1)",
        },
    )


def _local_basin_drift(x: float) -> float:
    if x > 1:
        return x - 2.0
    if x < -1:
        return x + 2.0
    return -x


def make_local_basin(dim: int = 1) -> ProblemSpec:
    """A singleton map with a stable point at 0 and unstable points at +-2."""

    if dim != 1:
        raise ConfigError(f"local_basin is one-dimensional, not d={dim}")

    F = SetValuedMapSpec(
        evaluate=lambda x: Hull([[_local_basin_drift(x[0])]]),
        growth_K=3.0,
        dimension=1,
        name=LOCAL_BASIN,
    )
    attractor = AttractorSpec(
        A=Hull([[0.0]]), O_prime_radius=1.5, O_radius=1.9, eps0=0.2, T_A=2.3
    )
    return ProblemSpec(
        id=LOCAL_BASIN,
        map=F,
        attractor=attractor,
        schedule=StepSchedule(0.5, 1.0),
        noise=NoiseModel(NoiseKind.SPHERE, 0.5),
        L=1.0,
        growth_grid=_radial_grid(1),
        basin=(-2.0, 2.0),
        notes={
            "drift": "f(x) = -x on [-1, 1], x - 2 for x > 1, x + 2 for x < -1",
            "t_a": "ln(1.9 / 0.2) = 2.2513 for the contraction piece, rounded to 2.3;"
            " verified by Euler flow from the open O' grid",
            "lipschitz_l": "every piece has slope +-1",
        },
    )


PROBLEM_FACTORIES: Dict[str, Callable[..., ProblemSpec]] = {
    BIASED_LINEAR: make_biased_linear,
    SIGN_SUBGRADIENT: make_sign_subgradient,
    LOCAL_BASIN: make_local_basin,
}


def get_problem(problem_id: str, **kwargs) -> ProblemSpec:
    try:
        factory = PROBLEM_FACTORIES[problem_id]
    except KeyError:
        raise UnknownProblemError(
            f"{problem_id!r} is not one of {sorted(PROBLEM_FACTORIES)}"
        ) from None
    try:
        inspect.signature(factory).bind(**kwargs)
    except TypeError as err:
        raise ConfigError(f"{problem_id}: {err}") from None
    return factory(**kwargs)


def list_problems() -> List[ProblemSpec]:
    return [factory() for factory in PROBLEM_FACTORIES.values()]


def catalog_json() -> dict:
    """Return the catalog as JSON-ready metadata, with each entry's growth check."""

    catalog = {}
    for problem in list_problems():
        entry = problem.to_dict()
        entry["growth_check_ok"] = growth_check(problem.map, problem.growth_grid).ok
        catalog[problem.id] = entry
    return {"problems": catalog}


def attraction_time_check(
    problem: ProblemSpec, count: int = 10, h: float = 0.01
) -> List[float]:
    """Return d(x(T_A), A) for noise-free Steiner Euler flows from an open O' grid.

    T_A is valid on the grid when every distance is at most eps0.
    """

    attractor = problem.attractor
    distances = []
    for x0 in attractor.O_prime_grid(count, closed=False):
        path = euler_inclusion_path(
            problem.map, x0, attractor.T_A, h, SelectionStrategy.STEINER
        )
        distances.append(point_set_distance(path.points[-1], attractor.A))

    _LOGGER.debug("attraction_time_check(%s): %s", problem.id, distances)
    return distances
