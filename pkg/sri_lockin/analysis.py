#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - lock-in probabilities, concentration bounds & window diagnostics.

Conditioning on {X_n0 in O'} is realised by starting the recursion at index n0 from a
point of O' (a grid, or one fixed point): the bound holds for every event of that form,
and nothing before n0 enters the argument.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from multiprocessing.pool import ThreadPool
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from .const import (
    DEFAULT_DILATION_SAMPLES,
    DEFAULT_N_DIRS,
    DEFAULT_QUAD_ORDER,
    DEFAULT_TAIL_FRACTION,
    MIN_TRIALS,
    WILSON_CONFIDENCE,
    InitRule,
    SelectionStrategy,
    __dev_mode__,
)
from .convexsets import (
    Ball,
    ConvexSet,
    SetValuedMapSpec,
    dilate_map,
    map_lipschitz_estimate,
    recover_parameter,
    steiner_point,
)
from .dynamics import (
    ControlSignal,
    PathGrid,
    gronwall_bound,
    ode_controlled_path,
    path_funnel_distance,
    sample_funnel,
)
from .engine import (
    NoiseModel,
    StepSchedule,
    Trajectory,
    b_tail,
    run_inclusion,
    tau,
    zeta_fluctuation,
)
from .exceptions import AttractorSpecError, ConfigError, EmptyConditioningError
from .helpers import as_point, ball_grid, direction_grid
from .resetter import SsriConfig, run_ssri

DEV_MODE = __dev_mode__ and False

_LOGGER = logging.getLogger(__name__)
if DEV_MODE:
    _LOGGER.setLevel(logging.DEBUG)


# Attractors & bound inputs


@dataclass
class AttractorSpec:
    """An attracting set A with O' = B(c, r'), O = B(c, r) around its Steiner point c.

    The chain N^(2 eps0)(A) c O' and N^(eps0)(closure O') c O is verified on
    construction by comparing support functions over a direction grid.
    """

    A: ConvexSet
    O_prime_radius: float
    O_radius: float
    eps0: float
    T_A: float
    T_u: Optional[float] = None
    center: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if min(self.O_prime_radius, self.O_radius, self.eps0, self.T_A) <= 0:
            raise AttractorSpecError("O', O, eps0 & T_A must all be positive")
        if self.T_u is None:
            self.T_u = self.T_A + 1.0
        if self.T_u < self.T_A:
            raise AttractorSpecError(f"T_u={self.T_u} < T_A={self.T_A}")

        self.center = steiner_point(self.A)
        dirs = direction_grid(self.A.dim)
        h_A = self.A.support_many(dirs)
        h_O_prime = dirs @ self.center + self.O_prime_radius
        if np.any(h_A + 2 * self.eps0 >= h_O_prime):
            raise AttractorSpecError(
                f"N^(2 eps0)(A) is not inside O'"
                f" (eps0={self.eps0}, r'={self.O_prime_radius})"
            )
        if not self.O_prime_radius + self.eps0 < self.O_radius:
            raise AttractorSpecError(
                f"N^(eps0)(O') is not inside O: {self.O_prime_radius} + {self.eps0}"
                f" >= {self.O_radius}"
            )

    @property
    def dim(self) -> int:
        return self.A.dim

    @property
    def O_prime(self) -> Ball:
        return Ball(self.center, self.O_prime_radius)

    def in_O_prime(self, x, closed: bool = False) -> bool:
        gap = np.linalg.norm(as_point(x, self.dim) - self.center)
        if closed:
            return bool(gap <= self.O_prime_radius * (1 + 1e-12))
        return bool(gap < self.O_prime_radius)

    def O_prime_grid(self, count: int = 10, closed: bool = False) -> np.ndarray:
        """Return a deterministic grid of (the open, or the closed) O'."""

        if self.dim == 1:
            c, r = self.center[0], self.O_prime_radius
            if closed:
                return np.linspace(c - r, c + r, count)[:, None]
            return np.linspace(c - r, c + r, count + 2)[1:-1, None]

        radius = self.O_prime_radius * (1.0 if closed else 1.0 - 1e-9)
        return ball_grid(self.center, radius, count)

    def to_dict(self) -> dict:
        return {
            "A": self.A.to_dict(),
            "center": self.center.tolist(),
            "o_prime_radius": self.O_prime_radius,
            "o_radius": self.O_radius,
            "eps0": self.eps0,
            "t_a": self.T_A,
            "t_u": self.T_u,
        }


@dataclass(frozen=True)
class BoundInputs:
    """The constants of the lock-in bound (C bounds |x| over O')."""

    d: int
    eps0: float
    K: float
    T_u: float
    C: float
    L: float

    def __post_init__(self) -> None:
        if self.d < 1 or min(self.eps0, self.K, self.T_u, self.C) <= 0:
            raise ConfigError(f"bound inputs must be positive: {self}")
        if self.L < 0:
            raise ConfigError(f"L must be >= 0, not {self.L}")

    def to_dict(self) -> dict:
        return asdict(self)


def k0(inputs: BoundInputs) -> float:
    """Return K0(T_u) = e^(L T_u)."""
    return math.exp(inputs.L * inputs.T_u)


def k_tilde(inputs: BoundInputs) -> float:
    """Return eps0^2 / (32 K0^2 d K (1 + e^(2 K T_u) (1 + 2 K T_u C)))."""
    d, K, T_u, C = inputs.d, inputs.K, inputs.T_u, inputs.C
    growth = 1.0 + math.exp(2 * K * T_u) * (1.0 + 2 * K * T_u * C)
    return inputs.eps0**2 / (32.0 * k0(inputs) ** 2 * d * K * growth)


def _azuma_term(inputs: BoundInputs, tail: float) -> float:
    if tail <= 0:
        return 0.0
    return 2.0 * inputs.d * math.exp(-k_tilde(inputs) / tail)


def theoretical_lockin_bound(inputs: BoundInputs, s: StepSchedule, n0: int) -> float:
    """Return max(0, 1 - 2d e^(-K~ / b(n0)))."""
    return max(0.0, 1.0 - _azuma_term(inputs, b_tail(s, n0)))


def per_window_azuma(
    inputs: BoundInputs, s: StepSchedule, windows: Sequence[Tuple[int, int]]
) -> List[float]:
    """Return 2d e^(-K~ / (b(n_m) - b(n_m+1))) for each window (n_m, n_m+1)."""
    tails = [max(0.0, b_tail(s, lo) - b_tail(s, hi)) for lo, hi in windows]
    return [_azuma_term(inputs, tail) for tail in tails]


def lipschitz_radius(inputs: BoundInputs) -> float:
    """Return the radius that holds every window's iterates & DI solutions from O'."""
    K, T_u, C = inputs.K, inputs.T_u, inputs.C
    return max(gronwall_bound(C, K, T_u), math.exp(2 * K * T_u) * (C + 2 * K * T_u))


def discretization_threshold(
    inputs: BoundInputs, s: StepSchedule, n_max: int = 10**7
) -> Optional[int]:
    """Return the least n0 <= n_max whose interpolation error terms sum below eps0 / 2.

    The terms (C + K T_u) e^(2 L T_u) L b(n0) and (C + K T_u) e^(L T_u) a(n0) both
    decrease in n0, so the search bisects. None when n_max is not enough.
    """

    scale = inputs.C + inputs.K * inputs.T_u
    grow = math.exp(inputs.L * inputs.T_u)

    def small_enough(n: int) -> bool:
        error = scale * grow**2 * inputs.L * b_tail(s, n) + scale * grow * float(s.a(n))
        return error < inputs.eps0 / 2

    if not small_enough(n_max):
        return None
    lo, hi = 0, n_max
    while lo < hi:
        mid = (lo + hi) // 2
        if small_enough(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def derive_bound_inputs(
    F: SetValuedMapSpec,
    attractor: AttractorSpec,
    noise: NoiseModel,
    L: Optional[float] = None,
    seed: int = 0,
) -> BoundInputs:
    """Fill BoundInputs from a map, its attractor and the noise.

    K is the larger of the map's and the noise's growth constants; C = |c| + r'. When no
    analytic L is given it is estimated over B(0, lipschitz_radius).
    """

    inputs = BoundInputs(
        d=F.dimension,
        eps0=attractor.eps0,
        K=max(F.growth_K, noise.K_noise),
        T_u=attractor.T_u,
        C=float(np.linalg.norm(attractor.center)) + attractor.O_prime_radius,
        L=0.0 if L is None else float(L),
    )
    if L is None:
        radius = lipschitz_radius(inputs)
        estimate = map_lipschitz_estimate(F, np.zeros(F.dimension), radius, seed=seed)
        _LOGGER.warning(
            "%s: no analytic L, using the sampled estimate %.6g (radius %.4g)",
            F.name,
            estimate,
            radius,
        )
        inputs = replace(inputs, L=estimate)
    return inputs


def wilson_interval(
    successes: int, trials: int, confidence: float = WILSON_CONFIDENCE
) -> Tuple[float, float]:
    """Return the Wilson score interval for a binomial proportion."""

    if trials < 1:
        raise ConfigError(f"trials must be >= 1, not {trials}")
    if not 0 <= successes <= trials:
        raise ConfigError(f"successes must be in [0, {trials}], not {successes}")
    if not 0 < confidence < 1:
        raise ConfigError(f"confidence must be in (0, 1), not {confidence}")

    z = float(norm.ppf(1 - (1 - confidence) / 2))
    p_hat = successes / trials
    denom = 1 + z**2 / trials
    centre = (p_hat + z**2 / (2 * trials)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / trials + z**2 / (4 * trials**2)) / denom
    return max(0.0, min(centre - half, p_hat)), min(1.0, max(centre + half, p_hat))


# Convergence criterion


def _distances(points: np.ndarray, A: ConvexSet) -> np.ndarray:
    if len(A.vertices) == 1:
        gaps = np.linalg.norm(points - A.vertices[0], axis=1) - A.radius
        return np.maximum(gaps, 0.0)
    return np.array([np.linalg.norm(x - A.nearest_point(x)) for x in points])


def convergence_to_set(
    traj: Trajectory,
    A: ConvexSet,
    eps: float,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
) -> bool:
    """Return True iff every iterate of the final tail_fraction lies within eps of A."""

    if not 0 < tail_fraction <= 1:
        raise ConfigError(f"tail_fraction must be in (0, 1], not {tail_fraction}")
    if traj.divergent:
        return False
    count = max(1, math.ceil(tail_fraction * len(traj)))
    return bool(np.all(_distances(traj.X[-count:], A) <= eps))


def _run_trials(trial: Callable[[int], object], count: int, workers: int) -> list:
    """Run trial(0..count-1), in order, on a pool of threads when workers > 1."""
    if workers <= 1:
        return [trial(i) for i in range(count)]
    with ThreadPool(processes=workers) as pool:
        return pool.map(trial, range(count))


# Lock-in


@dataclass
class LockInRow:
    n0: int
    trials: int
    successes: int
    divergent: int
    horizon: int
    ci_lo: float
    ci_hi: float
    bound: float

    @property
    def probability(self) -> float:
        return self.successes / self.trials

    @property
    def vacuous(self) -> bool:
        return self.bound <= 0

    @property
    def consistent_with_bound(self) -> bool:
        return self.probability >= self.bound - (self.ci_hi - self.ci_lo) / 2

    def to_dict(self) -> dict:
        return {
            "n0": self.n0,
            "empirical": self.probability,
            "ci_lo": self.ci_lo,
            "ci_hi": self.ci_hi,
            "bound": self.bound,
            "vacuous": self.vacuous,
            "trials": self.trials,
            "successes": self.successes,
            "divergent": self.divergent,
            "horizon": self.horizon,
        }


@dataclass
class LockInReport:
    rows: List[LockInRow]
    inputs: BoundInputs
    k_tilde: float
    init_rule: InitRule
    n_init_points: int
    threshold: Optional[int] = None

    @property
    def nondecreasing_within_ci(self) -> bool:
        return all(
            b.probability >= a.probability or b.ci_hi >= a.ci_lo
            for a, b in zip(self.rows, self.rows[1:])
        )

    def to_dict(self) -> dict:
        return {
            "bound_inputs": self.inputs.to_dict(),
            "k_tilde": self.k_tilde,
            "k0": k0(self.inputs),
            "discretization_threshold": self.threshold,
            "init_rule": self.init_rule.value,
            "n_init_points": self.n_init_points,
            "nondecreasing_within_ci": self.nondecreasing_within_ci,
            "rows": [row.to_dict() for row in self.rows],
        }

    def csv_rows(self) -> List[dict]:
        return [row.to_dict() for row in self.rows]


def _initial_points(
    attractor: AttractorSpec, init_rule: InitRule, x_init, grid_size: int
) -> np.ndarray:
    if init_rule == InitRule.FIXED:
        point = attractor.center if x_init is None else as_point(x_init, attractor.dim)
        points = point[None, :]
    else:
        points = attractor.O_prime_grid(grid_size, closed=False)

    points = np.array([x for x in points if attractor.in_O_prime(x)])
    if not len(points):
        raise EmptyConditioningError(f"no {init_rule.value} initial point lies in O'")
    return points


def lock_in_empirical(
    F: SetValuedMapSpec,
    attractor: AttractorSpec,
    s: StepSchedule,
    noise: NoiseModel,
    n0_list: Sequence[int],
    trials: int,
    horizon: int,
    init_rule: InitRule = InitRule.GRID,
    seed: Optional[int] = 0,
    strategy: SelectionStrategy = SelectionStrategy.STEINER,
    bound_inputs: Optional[BoundInputs] = None,
    x_init=None,
    eps: Optional[float] = None,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    grid_size: int = 10,
    workers: int = 1,
) -> LockInReport:
    """Estimate P(X_n -> A | X_n0 in O') for each n0, next to the theoretical bound.

    Trial i at n0 starts from initial point i (cycling through the grid) and draws from
    substream (seed, n0, i); success is convergence_to_set within eps (default eps0).
    """

    init_rule = InitRule(init_rule)
    if trials < MIN_TRIALS:
        raise ConfigError(f"trials must be >= {MIN_TRIALS}, not {trials}")
    if not n0_list or any(not 0 <= n0 < horizon for n0 in n0_list):
        raise ConfigError(f"every n0 must be in [0, horizon={horizon}): {n0_list}")

    eps = attractor.eps0 if eps is None else eps
    if bound_inputs is None:
        bound_inputs = derive_bound_inputs(F, attractor, noise, seed=seed or 0)
    starts = _initial_points(attractor, init_rule, x_init, grid_size)

    rows = []
    for n0 in sorted(int(n) for n in n0_list):

        def trial(i: int, n0=n0) -> tuple:
            traj = run_inclusion(
                F,
                starts[i % len(starts)],
                s,
                noise,
                horizon - n0,
                strategy,
                seed,
                n_start=n0,
                stream=(n0, i),
                record_parameters=False,
            )
            ok = convergence_to_set(traj, attractor.A, eps, tail_fraction)
            return ok, traj.divergent

        outcomes = _run_trials(trial, trials, workers)
        successes = sum(ok for ok, _ in outcomes)
        ci_lo, ci_hi = wilson_interval(successes, trials)
        rows.append(
            LockInRow(
                n0=n0,
                trials=trials,
                successes=successes,
                divergent=sum(div for _, div in outcomes),
                horizon=horizon,
                ci_lo=ci_lo,
                ci_hi=ci_hi,
                bound=theoretical_lockin_bound(bound_inputs, s, n0),
            )
        )
        _LOGGER.info(
            "lock-in %s: n0=%s, %s/%s converged, bound=%.6g",
            F.name,
            n0,
            successes,
            trials,
            rows[-1].bound,
        )
        if rows[-1].vacuous:
            _LOGGER.warning("lock-in %s: the bound is vacuous at n0=%s", F.name, n0)

    return LockInReport(
        rows=rows,
        inputs=bound_inputs,
        k_tilde=k_tilde(bound_inputs),
        init_rule=init_rule,
        n_init_points=len(starts),
        threshold=discretization_threshold(bound_inputs, s),
    )


# Window diagnostics


@dataclass
class FunnelConfig:
    """How the solution funnel S(T, closure O') is sampled for the diagnostics."""

    h: float = 0.05
    grid_size: int = 5
    n_paths_per_x0: int = 4
    seed: int = 0
    n_dirs: int = DEFAULT_N_DIRS
    quad_order: int = DEFAULT_QUAD_ORDER
    n_samples: int = DEFAULT_DILATION_SAMPLES

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RhoDiagnostics:
    n_lo: int
    n_hi: int
    gap: float  # t(n_hi) - t(n_lo)
    rho: float
    rho1: float
    rho2: float
    slack: float
    zeta: float

    @property
    def triangle_ok(self) -> bool:
        return self.rho <= self.rho1 + self.rho2 + self.slack

    def to_row(self) -> dict:
        return {**asdict(self), "triangle_ok": self.triangle_ok}


def rho_diagnostics(
    traj: Trajectory,
    F: SetValuedMapSpec,
    window: Tuple[int, int],
    attractor: AttractorSpec,
    level: int = 0,
    funnel_cfg: Optional[FunnelConfig] = None,
) -> RhoDiagnostics:
    """Return rho, rho1 & rho2 for the iterates on window [n_lo, n_hi].

    rho is the distance of the interpolated segment to a sampled S(T, closure O'), rho2
    that of the controlled path driven by the recovered parameters u_n, and rho1 the sup
    distance between the two (taken over every grid involved, so rho <= rho1 + rho2).
    Level l >= 1 uses the dilated map F^(l) throughout.
    """

    cfg = funnel_cfg or FunnelConfig()
    n_lo, n_hi = (int(n) for n in window)
    if not n_lo < n_hi:
        raise ConfigError(f"window must have n_lo < n_hi, not {window}")
    lo, hi = traj.row(n_lo), traj.row(n_hi)
    start = traj.X_post[lo]
    if not attractor.in_O_prime(start, closed=True):
        raise EmptyConditioningError(
            f"X_{n_lo} = {start.tolist()} is outside closure O'"
        )

    Fl = F if level == 0 else dilate_map(F, level, max(cfg.n_samples, 2 * F.dimension))
    times = traj.times[lo : hi + 1] - traj.times[lo]
    horizon = float(times[-1])
    segment = PathGrid(times, traj.X[lo : hi + 1])

    values = [recover_parameter(Fl, traj.X_post[k], traj.v[k]) for k in range(lo, hi)]
    controlled = ode_controlled_path(
        Fl,
        start,
        ControlSignal(times, values),
        horizon,
        min(cfg.h, horizon),
        cfg.n_dirs,
        cfg.quad_order,
    )

    Y0 = np.vstack((attractor.O_prime_grid(cfg.grid_size, closed=True), start))
    h = min(cfg.h, horizon)
    funnel = sample_funnel(
        Fl, Y0, horizon, h, cfg.n_paths_per_x0, cfg.seed, cfg.quad_order
    )

    grid = np.unique(np.concatenate((times, controlled.times, funnel.times)))
    rho1 = float(np.linalg.norm(segment.at(grid) - controlled.at(grid), axis=1).max())
    scale = max(np.abs(segment.points).max(), np.abs(controlled.points).max())

    result = RhoDiagnostics(
        n_lo=n_lo,
        n_hi=n_hi,
        gap=horizon,
        rho=path_funnel_distance(segment, funnel),
        rho1=rho1,
        rho2=path_funnel_distance(controlled, funnel),
        slack=1e-12 * (1.0 + scale),
        zeta=zeta_fluctuation(traj, n_lo, n_hi),
    )
    _LOGGER.debug("rho_diagnostics(%s): %s", F.name, result)
    return result


# Experiments


@dataclass
class FiniteResetReport:
    reset_counts: List[int]
    late_reset: List[bool]
    converged: List[bool]
    divergent: int
    horizon: int

    @property
    def trials(self) -> int:
        return len(self.reset_counts)

    @property
    def late_fraction(self) -> float:
        return sum(self.late_reset) / self.trials

    @property
    def converged_fraction(self) -> float:
        return sum(self.converged) / self.trials

    def histogram(self) -> dict:
        counts, freq = np.unique(self.reset_counts, return_counts=True)
        return {int(c): int(f) for c, f in zip(counts, freq)}

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "horizon": self.horizon,
            "max_resets": int(max(self.reset_counts)),
            "mean_resets": float(np.mean(self.reset_counts)),
            "reset_histogram": self.histogram(),
            "late_reset_fraction": self.late_fraction,
            "converged_fraction": self.converged_fraction,
            "divergent": self.divergent,
        }


def finite_reset_experiment(
    F: SetValuedMapSpec,
    cfg: SsriConfig,
    attractor: AttractorSpec,
    s: StepSchedule,
    noise: NoiseModel,
    trials: int,
    horizon: int,
    seed: Optional[int] = 0,
    strategy: SelectionStrategy = SelectionStrategy.STEINER,
    x_start=None,
    eps: Optional[float] = None,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    workers: int = 1,
) -> FiniteResetReport:
    """Run SSRI trials and tally resets, late resets (final half) & convergence."""

    if trials < MIN_TRIALS:
        raise ConfigError(f"trials must be >= {MIN_TRIALS}, not {trials}")
    eps = attractor.eps0 if eps is None else eps

    def trial(i: int) -> tuple:
        traj, trace = run_ssri(
            F,
            cfg,
            s,
            noise,
            horizon,
            strategy,
            seed,
            stream=(i,),
            record_parameters=False,
            x_start=x_start,
        )
        late = any(n >= horizon / 2 for n in trace.reset_indices)
        ok = convergence_to_set(traj, attractor.A, eps, tail_fraction)
        return len(trace.reset_indices), late, ok, traj.divergent

    outcomes = _run_trials(trial, trials, workers)
    report = FiniteResetReport(
        reset_counts=[o[0] for o in outcomes],
        late_reset=[o[1] for o in outcomes],
        converged=[o[2] for o in outcomes],
        divergent=sum(o[3] for o in outcomes),
        horizon=horizon,
    )
    _LOGGER.info(
        "finite resets %s: max %s resets, %.3g late, %.3g converged",
        F.name,
        max(report.reset_counts),
        report.late_fraction,
        report.converged_fraction,
    )
    return report


@dataclass
class RecurrenceReport:
    trials: int
    late_visitors: int
    converged_visitors: int
    converged: int
    divergent: int
    late_fraction: float

    @property
    def p_converge_given_visit(self) -> Optional[float]:
        if not self.late_visitors:
            return None
        return self.converged_visitors / self.late_visitors

    def to_dict(self) -> dict:
        result = {
            **asdict(self),
            "p_converge_given_visit": self.p_converge_given_visit,
            "nonconverged_visitors": self.late_visitors - self.converged_visitors,
        }
        if self.late_visitors:
            result["ci"] = wilson_interval(self.converged_visitors, self.late_visitors)
        return result


def recurrence_experiment(
    F: SetValuedMapSpec,
    attractor: AttractorSpec,
    s: StepSchedule,
    noise: NoiseModel,
    x0,
    trials: int,
    horizon: int,
    late_fraction: float = 0.5,
    seed: Optional[int] = 0,
    strategy: SelectionStrategy = SelectionStrategy.STEINER,
    eps: Optional[float] = None,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    workers: int = 1,
) -> RecurrenceReport:
    """Run unconditioned trials from x0; relate late visits to O' with convergence.

    A visit to O' during the final late_fraction of the horizon stands in for "O' is
    visited infinitely often", after which convergence to A should be almost sure.
    """

    if trials < 1:
        raise ConfigError(f"trials must be >= 1, not {trials}")
    if not 0 < late_fraction <= 1:
        raise ConfigError(f"late_fraction must be in (0, 1], not {late_fraction}")
    eps = attractor.eps0 if eps is None else eps

    def trial(i: int) -> tuple:
        traj = run_inclusion(
            F,
            x0,
            s,
            noise,
            horizon,
            strategy,
            seed,
            stream=(i,),
            record_parameters=False,
        )
        late = traj.X[-max(1, math.ceil(late_fraction * len(traj))) :]
        gaps = np.linalg.norm(late - attractor.center, axis=1)
        visited = not traj.divergent and bool(np.any(gaps < attractor.O_prime_radius))
        ok = convergence_to_set(traj, attractor.A, eps, tail_fraction)
        return visited, ok, traj.divergent

    outcomes = _run_trials(trial, trials, workers)
    report = RecurrenceReport(
        trials=trials,
        late_visitors=sum(v for v, _, _ in outcomes),
        converged_visitors=sum(v and c for v, c, _ in outcomes),
        converged=sum(c for _, c, _ in outcomes),
        divergent=sum(d for _, _, d in outcomes),
        late_fraction=late_fraction,
    )
    _LOGGER.info("recurrence %s: %s", F.name, report)
    return report


@dataclass
class GrowthEnvelopeReport:
    windows: int
    violations: List[dict]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"windows": self.windows, "violations": self.violations, "ok": self.ok}


def growth_envelope_check(
    traj: Trajectory, s: StepSchedule, K: float, T_u: float
) -> GrowthEnvelopeReport:
    """Check max |X_j| <= e^(2 K T_u) (|X_n_m| + 2 K T_u) on every complete window.

    The windows chain n_m+1 = tau(n_m, T_u - 1) from n_start, so each spans a DI time of
    at most T_u. K must cover both the map and the noise.
    """

    if not T_u > 1:
        raise ConfigError(f"T_u must be > 1, not {T_u}")
    factor = math.exp(2 * K * T_u)
    norms = np.linalg.norm(traj.X, axis=1)

    violations, count, n_m = [], 0, traj.n_start
    while True:
        n_next = tau(s, n_m, T_u - 1)
        if n_next > traj.n_end or n_next == n_m:
            break
        lo, hi = traj.row(n_m), traj.row(n_next)
        bound = factor * (norms[lo] + 2 * K * T_u)
        peak = float(norms[lo : hi + 1].max())
        if peak > bound * (1 + 1e-12):
            violations.append(
                {"n_lo": n_m, "n_hi": n_next, "peak": peak, "bound": bound}
            )
        count += 1
        n_m = n_next

    if violations:
        _LOGGER.warning(
            "growth envelope: %s of %s windows violated", len(violations), count
        )
    return GrowthEnvelopeReport(count, violations)
