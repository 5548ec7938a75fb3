#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - the stochastic recursive inclusion.

    X_n+1 = X'_n + a(n) (v_n + M_n+1),    v_n in F(X'_n)

with X' = X when there are no resets (see resetter.py for SSRI).
"""

import logging
import threading
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import zeta

from .const import (
    DEFAULT_QUAD_ORDER,
    DIVERGENCE_NORM,
    NoiseKind,
    ScheduleKind,
    SelectionStrategy,
    __dev_mode__,
)
from .convexsets import SetValuedMapSpec, recover_parameter, select_velocity
from .exceptions import ConfigError
from .helpers import as_point, coord_names, substream_rng

DEV_MODE = __dev_mode__ and False

_LOGGER = logging.getLogger(__name__)
if DEV_MODE:
    _LOGGER.setLevel(logging.DEBUG)


class StepSchedule:
    """The step sizes a(n) = a0 / (n + 1)^gamma, with 0 < a0 <= 1 & 1/2 < gamma <= 1.

    The DI clock t(n) = a(0) + ... + a(n-1) is accumulated once, sequentially, and
    cached; every index/time conversion reads the same array.
    """

    def __init__(
        self, a0: float = 1.0, gamma: float = 1.0, kind=ScheduleKind.POLYNOMIAL
    ) -> None:
        self.kind = ScheduleKind(kind)
        self.a0 = float(a0)
        self.gamma = float(gamma)
        if not 0 < self.a0 <= 1:
            raise ConfigError(f"a0 must be in (0, 1], not {a0}")
        if not 0.5 < self.gamma <= 1:
            raise ConfigError(f"gamma must be in (1/2, 1], not {gamma}")

        self._lock = threading.Lock()
        self._times = np.zeros(1)

    def __repr__(self) -> str:
        return f"StepSchedule(a0={self.a0}, gamma={self.gamma})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepSchedule):
            return NotImplemented
        return (self.kind, self.a0, self.gamma) == (other.kind, other.a0, other.gamma)

    def a(self, n):
        """Return a(n) (n may be an array)."""
        return self.a0 / (np.asarray(n, dtype=float) + 1.0) ** self.gamma

    def steps(self, start: int, stop: int) -> np.ndarray:
        return self.a(np.arange(start, stop))

    def _grow(self, count: int) -> np.ndarray:
        with self._lock:
            have = len(self._times)
            if have < count:
                size = max(count, 2 * have)
                steps = self.steps(have - 1, size - 1)
                tail = np.concatenate(([self._times[-1]], steps))
                self._times = np.concatenate((self._times, np.cumsum(tail)[1:]))
            return self._times

    def times(self, count: int) -> np.ndarray:
        """Return t(0), ..., t(count - 1) (a read-only view)."""
        view = self._grow(count)[:count]
        view.flags.writeable = False
        return view

    def t(self, n: int) -> float:
        return float(self._grow(n + 1)[n])

    def time_after(self, n: int, horizon: float) -> int:
        """Return the least k >= n with t(k) >= t(n) + horizon."""
        target = self.t(n) + horizon
        times = self._grow(n + 2)
        while times[-1] < target:
            times = self._grow(2 * len(times))
        return max(n, int(np.searchsorted(times, target, side="left")))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "a0": self.a0, "gamma": self.gamma}


def step_size(s: StepSchedule, n: int) -> float:
    if n < 0:
        raise ConfigError(f"n must be >= 0, not {n}")
    return float(s.a(n))


def time_grid(s: StepSchedule, N: int) -> np.ndarray:
    """Return the DI times (t(0), ..., t(N - 1)); a single t(0) = 0 when N <= 1."""
    if N < 0:
        raise ConfigError(f"N must be >= 0, not {N}")
    return np.array(s.times(max(N, 1)))


def tau(s: StepSchedule, n: int, horizon: float) -> int:
    """Return min{k >= n: t(k) >= t(n) + T}."""
    if not horizon > 0:
        raise ConfigError(f"T must be > 0, not {horizon}")
    return s.time_after(n, horizon)


def delta(s: StepSchedule, n: int, horizon: float) -> float:
    """Return t(tau(n, T)) - t(n), which lies in [T, T + 1] since a(n) <= 1."""
    return s.t(tau(s, n, horizon)) - s.t(n)


def b_tail(s: StepSchedule, n: int) -> float:
    """Return b(n) = sum over k >= n of a(k)^2 = a0^2 * zeta(2 gamma, n + 1).

    The Hurwitz zeta function gives the tail exactly, in place of a partial sum plus an
    integral remainder.
    """
    if n < 0:
        raise ConfigError(f"n must be >= 0, not {n}")
    return float(s.a0**2 * zeta(2 * s.gamma, n + 1))


def window_subsequence(
    s: StepSchedule, n0: int, T_A: float, count: int
) -> List[int]:
    """Return [n_0, ..., n_count] with n_m+1 = tau(n_m, T_A)."""
    if not T_A > 0:
        raise ConfigError(f"T_A must be > 0, not {T_A}")
    if count < 1:
        raise ConfigError(f"count must be >= 1, not {count}")
    chain = [int(n0)]
    for _ in range(count):
        chain.append(tau(s, chain[-1], T_A))
    return chain


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean noise with |M_n+1| <= K_noise (1 + |X'_n|) surely."""

    kind: NoiseKind = NoiseKind.SPHERE
    K_noise: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not self.K_noise >= 0:
            raise ConfigError(f"K_noise must be >= 0, not {self.K_noise}")

    def bound(self, x_norm: float) -> float:
        return self.K_noise * (1.0 + x_norm)

    def sample(self, rng: np.random.Generator, x_norm: float, dim: int) -> np.ndarray:
        """Draw M_n+1 given |X'_n| (no draws are consumed when K_noise is 0).

        sphere-uniform: uniform on the sphere of radius K(1 + |x|)
        truncated-gaussian: N(0, (K(1 + |x|) / 2)^2 I / d), redrawn until in the ball
        rademacher-coordinates: independent +-K(1 + |x|) / sqrt(d) per coordinate
        """

        if self.K_noise == 0:
            return np.zeros(dim)

        scale = self.bound(x_norm)
        if self.kind == NoiseKind.SPHERE:
            draw = rng.standard_normal(dim)
            while not np.any(draw):
                draw = rng.standard_normal(dim)
            return scale * draw / np.linalg.norm(draw)

        if self.kind == NoiseKind.GAUSSIAN:
            while True:
                draw = rng.standard_normal(dim) * 0.5 / np.sqrt(dim)
                if np.linalg.norm(draw) <= 1.0:
                    return scale * draw

        signs = rng.integers(0, 2, size=dim) * 2 - 1
        return scale * signs / np.sqrt(dim)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "k": self.K_noise}


@dataclass
class Trajectory:
    """A run of the recursion from index n_start.

    Row i of X, X_post & times holds index n = n_start + i; row i of v, u, M & steps
    holds v_n, u_n, M_n+1 and a(n) (the step from n to n + 1).
    """

    X: np.ndarray
    X_post: np.ndarray
    M: np.ndarray
    v: np.ndarray
    u: Optional[np.ndarray]
    chi: np.ndarray
    reset_performed: np.ndarray
    times: np.ndarray
    steps: np.ndarray
    seed: Optional[int]
    n_start: int = 0
    divergent: bool = False
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.X)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def n_end(self) -> int:
        return self.n_start + len(self.X) - 1

    def row(self, n: int) -> int:
        if not self.n_start <= n <= self.n_end:
            raise ConfigError(f"index {n} not in [{self.n_start}, {self.n_end}]")
        return n - self.n_start

    def header(self) -> dict:
        return {
            "seed": self.seed,
            "n_start": self.n_start,
            "n_end": self.n_end,
            "divergent": self.divergent,
            **self.meta,
        }

    def rows(self):
        """Yield CSV rows: n, t(n), X coords, X' coords, chi, |M_n|."""
        x_cols, p_cols = coord_names("x", self.dim), coord_names("xpost", self.dim)
        m_norms = np.concatenate(([0.0], np.linalg.norm(self.M, axis=1)))
        for i in range(len(self.X)):
            yield {
                "n": self.n_start + i,
                "t": self.times[i],
                **dict(zip(x_cols, self.X[i])),
                **dict(zip(p_cols, self.X_post[i])),
                "chi": int(self.chi[i]),
                "m_norm": m_norms[i],
            }

    def columns(self) -> List[str]:
        return [
            "n",
            "t",
            *coord_names("x", self.dim),
            *coord_names("xpost", self.dim),
            "chi",
            "m_norm",
        ]


class _Recorder:
    """Accumulates a trajectory row by row (shared with the SSRI loop)."""

    def __init__(self, x0: np.ndarray, times: np.ndarray, steps: np.ndarray) -> None:
        self.steps = steps
        self.X, self.X_post = [x0], [x0]
        self.M, self.v, self.u = [], [], []
        self.chi, self.performed = [0], [False]
        self.times = times
        self.divergent = False

    def finish(
        self, seed, n_start: int, record_parameters: bool, meta: dict
    ) -> Trajectory:
        dim = len(self.X[0])
        steps = len(self.X) - 1

        def stack(rows) -> np.ndarray:
            return np.array(rows).reshape(len(rows), dim)

        return Trajectory(
            X=stack(self.X),
            X_post=stack(self.X_post),
            M=stack(self.M[:steps]),
            v=stack(self.v[:steps]),
            u=stack(self.u[:steps]) if record_parameters else None,
            chi=np.array(self.chi, dtype=np.int8),
            reset_performed=np.array(self.performed, dtype=bool),
            times=np.array(self.times[: len(self.X)]),
            steps=np.array(self.steps[:steps]),
            seed=seed,
            n_start=n_start,
            divergent=self.divergent,
            meta=meta,
        )


def advance(
    F: SetValuedMapSpec,
    x_post: np.ndarray,
    step: float,
    noise: NoiseModel,
    rng: np.random.Generator,
    strategy: SelectionStrategy,
    direction=None,
    quad_order: int = DEFAULT_QUAD_ORDER,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (X_n+1, v_n, M_n+1) for one step from X'_n."""
    v = select_velocity(F(x_post), strategy, rng, direction, quad_order)
    m = noise.sample(rng, float(np.linalg.norm(x_post)), F.dimension)
    return x_post + step * (v + m), v, m


def is_divergent(x: np.ndarray) -> bool:
    return not np.all(np.isfinite(x)) or np.linalg.norm(x) > DIVERGENCE_NORM


def run_inclusion(
    F: SetValuedMapSpec,
    x0,
    s: StepSchedule,
    noise: NoiseModel,
    N: int,
    strategy: SelectionStrategy = SelectionStrategy.STEINER,
    seed: Optional[int] = 0,
    n_start: int = 0,
    stream: Sequence[int] = (),
    direction=None,
    record_parameters: bool = True,
    meta: Optional[dict] = None,
) -> Trajectory:
    """Run N steps of X_n+1 = X_n + a(n) (v_n + M_n+1) from X_n_start = x0.

    Draws come from substream (seed, *stream). A non-finite (or astronomically large)
    iterate ends the run early with divergent=True.
    """

    if N < 1:
        raise ConfigError(f"N must be >= 1, not {N}")
    strategy = SelectionStrategy(strategy)
    rng = substream_rng(seed, *stream)
    x = as_point(x0, F.dimension)
    steps = s.steps(n_start, n_start + N)
    rec = _Recorder(x, s.times(n_start + N + 1)[n_start:], steps)

    for i in range(N):
        x_next, v, m = advance(F, x, steps[i], noise, rng, strategy, direction)
        rec.v.append(v)
        rec.M.append(m)
        if record_parameters:
            rec.u.append(recover_parameter(F, x, v))
        if is_divergent(x_next):
            rec.divergent = True
            _LOGGER.warning(
                "run_inclusion(%s): divergent at n=%s (seed=%s, stream=%s)",
                F.name,
                n_start + i + 1,
                seed,
                tuple(stream),
            )
            break
        x = x_next
        rec.X.append(x)
        rec.X_post.append(x)
        rec.chi.append(0)
        rec.performed.append(False)

    meta = {
        "schedule": s.to_dict(),
        "noise": noise.to_dict(),
        "strategy": strategy.value,
        "stream": list(stream),
        "problem": F.name,
        **(meta or {}),
    }
    return rec.finish(seed, n_start, record_parameters, meta)


def replay(traj: Trajectory) -> np.ndarray:
    """Recompute X_n+1 = X'_n + a(n) (v_n + M_n+1) from the stored a(n), v & M."""
    rebuilt = [traj.X[0]]
    for i in range(len(traj.X) - 1):
        rebuilt.append(traj.X_post[i] + traj.steps[i] * (traj.v[i] + traj.M[i]))
    return np.array(rebuilt)


def interpolate(traj: Trajectory, t: float) -> np.ndarray:
    """Return the linear interpolation of the iterates at DI time t."""

    times = traj.times
    if not times[0] <= t <= times[-1]:
        raise ConfigError(f"t={t} not in [{times[0]}, {times[-1]}]")
    idx = int(np.searchsorted(times, t, side="right")) - 1
    if idx >= len(times) - 1:
        return traj.X[-1].copy()
    weight = (t - times[idx]) / (times[idx + 1] - times[idx])
    return (1.0 - weight) * traj.X[idx] + weight * traj.X[idx + 1]


def zeta_fluctuation(traj: Trajectory, n_lo: int, n_hi: int) -> float:
    """Return max |zeta_j - zeta_n_lo| over n_lo <= j <= n_hi.

    zeta_j is the noise sum a(0) M_1 + ... + a(j-1) M_j.
    """

    if not n_lo <= n_hi:
        raise ConfigError(f"need n_lo <= n_hi, not {n_lo} > {n_hi}")
    lo, hi = traj.row(n_lo), traj.row(n_hi)
    if hi == lo:
        return 0.0
    increments = traj.steps[lo:hi, None] * traj.M[lo:hi]
    return float(np.linalg.norm(np.cumsum(increments, axis=0), axis=1).max())
