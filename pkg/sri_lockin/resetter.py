#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - SSRI, the recursion stabilised by resets.

The DI clock is cut into windows of length T_W. After n_W windows the iterate is
checked against the radius r_k: if |X_n+1| > r_k it is reset to x0 and k grows. Every
check re-arms n_W = 2^k, so checks thin out exponentially as resets accumulate.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .const import (
    DEFAULT_RADIUS_FACTOR,
    DEFAULT_T_W,
    RadiusKind,
    SelectionStrategy,
    __dev_mode__,
)
from .convexsets import SetValuedMapSpec, recover_parameter
from .engine import (
    NoiseModel,
    StepSchedule,
    Trajectory,
    _Recorder,
    advance,
    is_divergent,
)
from .exceptions import ConfigError, TrajectoryMismatchError
from .helpers import as_point, substream_rng

DEV_MODE = __dev_mode__ and False

_LOGGER = logging.getLogger(__name__)
if DEV_MODE:
    _LOGGER.setLevel(logging.DEBUG)


@dataclass
class SsriConfig:
    """The reset target x0, the radii r_k and the window length T_W."""

    x0: np.ndarray
    r0: float = 1.0
    radius_kind: RadiusKind = RadiusKind.GEOMETRIC
    c: float = DEFAULT_RADIUS_FACTOR
    T_W: float = DEFAULT_T_W

    def __post_init__(self) -> None:
        self.x0 = as_point(self.x0)
        self.radius_kind = RadiusKind(self.radius_kind)
        if not self.r0 > 0:
            raise ConfigError(f"r0 must be > 0, not {self.r0}")
        if not np.linalg.norm(self.x0) < self.r0:
            raise ConfigError(f"need |x0| < r0, not |x0|={np.linalg.norm(self.x0)}")
        if self.radius_kind == RadiusKind.GEOMETRIC and not self.c > 1:
            raise ConfigError(f"geometric radii need c > 1, not {self.c}")
        if self.radius_kind == RadiusKind.ARITHMETIC and not self.c > 0:
            raise ConfigError(f"arithmetic radii need c > 0, not {self.c}")
        if not self.T_W > 0:
            raise ConfigError(f"T_W must be > 0, not {self.T_W}")

    def radius(self, k: int) -> float:
        """Return r_k."""
        if self.radius_kind == RadiusKind.GEOMETRIC:
            return self.r0 * self.c**k
        return self.r0 + self.c * k

    def to_dict(self) -> dict:
        return {
            "x0": self.x0.tolist(),
            "r0": self.r0,
            "radius": f"{self.radius_kind.value}:{self.c:g}",
            "tw": self.T_W,
        }


@dataclass
class ResetTrace:
    """The control flow of one SSRI run (indices are iteration indices n)."""

    T_W: float
    n_start: int = 0
    check_indices: List[int] = field(default_factory=list)
    reset_indices: List[int] = field(default_factory=list)
    k_at_check: List[int] = field(default_factory=list)  # k after the check
    radius_at_check: List[float] = field(default_factory=list)
    windows_assigned: List[int] = field(default_factory=list)  # n_W set by the check
    window_end_indices: List[int] = field(default_factory=list)
    window_counts: List[int] = field(default_factory=list)  # n_W after step n -> n+1
    coincidences: List[int] = field(default_factory=list)  # resets with X_n = x0

    def to_dict(self) -> dict:
        return {
            "tw": self.T_W,
            "n_start": self.n_start,
            "check_indices": self.check_indices,
            "reset_indices": self.reset_indices,
            "k_at_check": self.k_at_check,
            "radius_at_check": self.radius_at_check,
            "windows_assigned": self.windows_assigned,
            "window_end_indices": self.window_end_indices,
            "coincidences": self.coincidences,
        }


def run_ssri(
    F: SetValuedMapSpec,
    cfg: SsriConfig,
    s: StepSchedule,
    noise: NoiseModel,
    N: int,
    strategy: SelectionStrategy = SelectionStrategy.STEINER,
    seed: Optional[int] = 0,
    stream: Sequence[int] = (),
    direction=None,
    record_parameters: bool = True,
    meta: Optional[dict] = None,
    x_start=None,
):
    """Run N steps of SSRI; return (Trajectory, ResetTrace).

    X_0 is x_start when given (it may lie outside B(0, r0)), else the reset target x0.
    The noise bound, the selection and the step all use the post-check state X'_n.
    """

    if N < 1:
        raise ConfigError(f"N must be >= 1, not {N}")
    if cfg.x0.shape[0] != F.dimension:
        raise ConfigError(f"x0 has d={cfg.x0.shape[0]}, F has d={F.dimension}")

    strategy = SelectionStrategy(strategy)
    rng = substream_rng(seed, *stream)
    steps = s.steps(0, N)
    x_post = cfg.x0 if x_start is None else as_point(x_start, F.dimension)
    rec = _Recorder(x_post, s.times(N + 1), steps)
    trace = ResetTrace(T_W=cfg.T_W)

    k, t_e, n_w = 0, 0.0, 1
    for n in range(N):
        x_next, v, m = advance(F, x_post, steps[n], noise, rng, strategy, direction)
        rec.v.append(v)
        rec.M.append(m)
        if record_parameters:
            rec.u.append(recover_parameter(F, x_post, v))
        if is_divergent(x_next):
            rec.divergent = True
            _LOGGER.warning(
                "run_ssri(%s): divergent at n=%s (seed=%s)", F.name, n + 1, seed
            )
            break

        new_post, performed = x_next, False
        t_e += steps[n]
        if t_e >= cfg.T_W:
            trace.window_end_indices.append(n + 1)
            if n_w == 1:
                radius = cfg.radius(k)
                trace.check_indices.append(n + 1)
                trace.radius_at_check.append(radius)
                if np.linalg.norm(x_next) > radius:
                    new_post, performed = cfg.x0, True
                    k += 1
                    trace.reset_indices.append(n + 1)
                n_w = 2**k
                trace.k_at_check.append(k)
                trace.windows_assigned.append(n_w)
            else:
                n_w -= 1
            t_e = 0.0

        chi = int(not np.array_equal(x_next, new_post))
        if performed and not chi:
            trace.coincidences.append(n + 1)
        trace.window_counts.append(n_w)

        x_post = new_post
        rec.X.append(x_next)
        rec.X_post.append(new_post)
        rec.chi.append(chi)
        rec.performed.append(performed)

    if trace.reset_indices:
        _LOGGER.debug(
            "run_ssri(%s): %s resets, last at n=%s",
            F.name,
            len(trace.reset_indices),
            trace.reset_indices[-1],
        )

    meta = {
        "schedule": s.to_dict(),
        "noise": noise.to_dict(),
        "strategy": strategy.value,
        "stream": list(stream),
        "problem": F.name,
        "ssri": cfg.to_dict(),
        **(meta or {}),
    }
    return rec.finish(seed, 0, record_parameters, meta), trace


@dataclass
class ResetSummary:
    total_resets: int  # sum of chi_n (state inequality)
    performed_resets: int
    last_reset_index: Optional[int]
    coincidences: int
    audit: List[dict]

    @property
    def audit_passed(self) -> bool:
        return all(row["passed"] for row in self.audit)

    def to_dict(self) -> dict:
        return {
            "total_resets": self.total_resets,
            "performed_resets": self.performed_resets,
            "last_reset_index": self.last_reset_index,
            "coincidences": self.coincidences,
            "audit_passed": self.audit_passed,
            "audit": self.audit,
        }


def reset_summary(trace: ResetTrace, traj: Trajectory) -> ResetSummary:
    """Count the resets and audit the window arithmetic between consecutive checks.

    Between two checks there must be exactly n_W windows (n_W as set by the earlier
    check, 1 before the first) and each window spans a DI time in [T_W, T_W + 1].
    """

    if trace.n_start != traj.n_start or len(trace.window_counts) != len(traj) - 1:
        raise TrajectoryMismatchError(
            f"trace covers {len(trace.window_counts)} steps, trajectory {len(traj) - 1}"
        )

    def time_at(n: int) -> float:
        return float(traj.times[traj.row(n)])

    slack = 1e-12 * (1.0 + time_at(traj.n_end))
    ends = np.array(trace.window_end_indices, dtype=int)
    audit = []
    prev, assigned = traj.n_start, 1
    for i, check in enumerate(trace.check_indices):
        inside = ends[(ends > prev) & (ends <= check)]
        spans = np.diff([time_at(n) for n in (prev, *inside)])
        windows_ok = bool(np.all(spans >= trace.T_W - slack)) and bool(
            np.all(spans <= trace.T_W + 1 + slack)
        )
        gap = time_at(check) - time_at(prev)
        lo, hi = assigned * trace.T_W, assigned * (trace.T_W + 1)
        audit.append(
            {
                "check_index": check,
                "k": trace.k_at_check[i],
                "radius": trace.radius_at_check[i],
                "windows_expected": assigned,
                "windows_observed": len(inside),
                "gap_time": gap,
                "gap_lo": lo,
                "gap_hi": hi,
                "passed": bool(
                    len(inside) == assigned
                    and windows_ok
                    and lo - slack <= gap <= hi + slack
                ),
            }
        )
        prev, assigned = check, trace.windows_assigned[i]

    summary = ResetSummary(
        total_resets=int(traj.chi.sum()),
        performed_resets=int(traj.reset_performed.sum()),
        last_reset_index=trace.reset_indices[-1] if trace.reset_indices else None,
        coincidences=len(trace.coincidences),
        audit=audit,
    )
    if not summary.audit_passed:
        _LOGGER.warning("reset_summary: the window audit failed")
    return summary
