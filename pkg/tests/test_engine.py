#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - tests for the step schedule, the noise & the recursion."""

import math

import numpy as np
import pytest

from sri_lockin.const import NoiseKind, SelectionStrategy
from sri_lockin.convexsets import Hull, SetValuedMapSpec
from sri_lockin.engine import (
    NoiseModel,
    StepSchedule,
    b_tail,
    delta,
    interpolate,
    replay,
    run_inclusion,
    step_size,
    tau,
    time_grid,
    window_subsequence,
    zeta_fluctuation,
)
from sri_lockin.exceptions import ConfigError
from sri_lockin.helpers import substream_rng
from sri_lockin.problems import make_biased_linear

QUIET = NoiseModel(NoiseKind.SPHERE, 0.0)


def test_schedule_is_validated():
    with pytest.raises(ConfigError):
        StepSchedule(0.0, 1.0)
    with pytest.raises(ConfigError):
        StepSchedule(1.5, 1.0)
    with pytest.raises(ConfigError):
        StepSchedule(1.0, 0.5)
    assert StepSchedule(0.5, 1.0) == StepSchedule(0.5, 1.0)


def test_time_grid(harmonic):
    assert time_grid(harmonic, 4) == pytest.approx([0.0, 1.0, 1.5, 1.8333333333])
    assert time_grid(harmonic, 0).tolist() == [0.0]
    assert time_grid(StepSchedule(0.5, 1.0), 2) == pytest.approx([0.0, 0.5])


def test_tau_and_delta(harmonic):
    assert tau(harmonic, 0, 2.0) == 4
    assert tau(harmonic, 0, 1.0) == 1
    assert tau(harmonic, 10, 1e-3) == 11

    rng = np.random.default_rng(1)
    for n, T in zip(rng.integers(0, 5000, 200), rng.uniform(0.05, 5.0, 200)):
        assert T - 1e-9 <= delta(harmonic, int(n), float(T)) <= T + 1

    with pytest.raises(ConfigError):
        tau(harmonic, 0, 0.0)


def test_b_tail(harmonic):
    assert b_tail(harmonic, 0) == pytest.approx(math.pi**2 / 6, abs=1e-9)
    assert b_tail(harmonic, 1) == pytest.approx(math.pi**2 / 6 - 1, abs=1e-9)

    s = StepSchedule(0.5, 0.75)
    for n in (0, 7, 100, 12345):
        gap = b_tail(s, n) - b_tail(s, n + 1)
        assert gap == pytest.approx(float(s.a(n)) ** 2, rel=1e-9)

    with pytest.raises(ConfigError):
        b_tail(harmonic, -1)


def test_window_subsequence(harmonic):
    assert window_subsequence(harmonic, 0, 1.0, 2) == [0, 1, 4]
    assert window_subsequence(harmonic, 3, 1.0, 1) == [3, tau(harmonic, 3, 1.0)]

    chain = window_subsequence(StepSchedule(0.5, 1.0), 10, 2.0, 5)
    s = StepSchedule(0.5, 1.0)
    for lo, hi in zip(chain, chain[1:]):
        assert 2.0 - 1e-9 <= s.t(hi) - s.t(lo) <= 3.0


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("kind", list(NoiseKind))
def test_noise_is_admissible(kind, dim):
    noise = NoiseModel(kind, 0.5)
    rng = substream_rng(3, dim)
    count, x_norm = 10_000, 1.0

    draws = np.array([noise.sample(rng, x_norm, dim) for _ in range(count)])
    norms = np.linalg.norm(draws, axis=1)
    assert np.all(norms <= noise.bound(x_norm) * (1 + 1e-12))

    spread = math.sqrt(draws.var(axis=0, ddof=1).sum())
    assert np.linalg.norm(draws.mean(axis=0)) <= 3 * spread / math.sqrt(count)

    if kind == NoiseKind.SPHERE:
        assert norms == pytest.approx(np.full(count, noise.bound(x_norm)))


@pytest.mark.parametrize("kind", list(NoiseKind))
def test_quiet_noise_draws_nothing(kind):
    rng = substream_rng(7)
    assert NoiseModel(kind, 0.0).sample(rng, 5.0, 2).tolist() == [0.0, 0.0]
    assert rng.random() == substream_rng(7).random()


def test_run_inclusion_matches_the_product_recursion(contraction):
    s = StepSchedule(0.5, 1.0)
    traj = run_inclusion(contraction, [1.0], s, QUIET, 50)

    expected = np.cumprod(np.concatenate(([1.0], 1.0 - s.steps(0, 50))))
    assert len(traj) == 51
    assert traj.X[:, 0] == pytest.approx(expected, rel=1e-12)
    assert np.all(np.diff(traj.X[:, 0]) < 0) and traj.X[-1, 0] > 0
    assert traj.times == pytest.approx(time_grid(s, 51))


def test_steiner_ignores_the_bias():
    s = StepSchedule(0.5, 1.0)
    biased = make_biased_linear(eps=0.1).map
    neg = SetValuedMapSpec(lambda x: Hull([-x]), 1.0, 1, "neg")
    one = run_inclusion(biased, [2.0], s, QUIET, 30)
    two = run_inclusion(neg, [2.0], s, QUIET, 30)
    assert one.X == pytest.approx(two.X)


def test_run_inclusion_is_reproducible():
    problem = make_biased_linear(eps=0.1, dim=2)
    args = (problem.map, [1.0, -1.0], problem.schedule, problem.noise, 200)

    one = run_inclusion(*args, strategy=SelectionStrategy.RANDOM, seed=11)
    two = run_inclusion(*args, strategy=SelectionStrategy.RANDOM, seed=11)
    other = run_inclusion(*args, strategy=SelectionStrategy.RANDOM, seed=12)

    assert np.array_equal(one.X, two.X)
    assert not np.array_equal(one.X, other.X)
    assert replay(one) == pytest.approx(one.X)
    assert one.u.shape == (200, 2)
    assert np.all(np.linalg.norm(one.u, axis=1) <= 1 + 1e-12)


def test_run_inclusion_from_a_later_index():
    problem = make_biased_linear()
    traj = run_inclusion(
        problem.map, [1.0], problem.schedule, problem.noise, 20, n_start=100
    )
    assert (traj.n_start, traj.n_end) == (100, 120)
    assert traj.steps == pytest.approx(problem.schedule.steps(100, 120))
    assert traj.times[0] == pytest.approx(problem.schedule.t(100))


def test_run_inclusion_divergence():
    blow_up = SetValuedMapSpec(lambda x: Hull([1e80 * x]), 1.0, 1, "blow_up")
    traj = run_inclusion(
        blow_up, [1.0], StepSchedule(), QUIET, 10, record_parameters=False
    )
    assert traj.divergent
    assert len(traj) == 2
    assert traj.header()["divergent"] is True


def test_trajectory_rows(contraction):
    traj = run_inclusion(contraction, [1.0], StepSchedule(0.5, 1.0), QUIET, 10)
    rows = list(traj.rows())
    assert len(rows) == 11
    assert list(rows[0]) == traj.columns()
    assert [row["n"] for row in rows] == list(range(11))


def test_interpolate():
    problem = make_biased_linear()
    traj = run_inclusion(problem.map, [1.0], problem.schedule, problem.noise, 20)
    t, a = traj.times, traj.steps

    assert interpolate(traj, t[5]) == pytest.approx(traj.X[5])
    assert interpolate(traj, (t[5] + t[6]) / 2) == pytest.approx(
        (traj.X[5] + traj.X[6]) / 2
    )
    assert interpolate(traj, t[5] + 0.25 * a[5]) == pytest.approx(
        0.75 * traj.X[5] + 0.25 * traj.X[6]
    )
    with pytest.raises(ConfigError):
        interpolate(traj, t[-1] + 1.0)


def test_zeta_fluctuation(contraction):
    quiet = run_inclusion(contraction, [1.0], StepSchedule(0.5, 1.0), QUIET, 20)
    assert zeta_fluctuation(quiet, 0, 20) == 0.0

    problem = make_biased_linear()
    traj = run_inclusion(problem.map, [1.0], problem.schedule, problem.noise, 20)
    assert zeta_fluctuation(traj, 0, 1) == pytest.approx(
        traj.steps[0] * np.linalg.norm(traj.M[0])
    )
    surely = np.sum(
        traj.steps[3:12] * problem.noise.K_noise * (1 + np.abs(traj.X[3:12, 0]))
    )
    assert zeta_fluctuation(traj, 3, 12) <= surely + 1e-12


def test_step_size(harmonic):
    assert step_size(harmonic, 0) == 1.0
    assert step_size(StepSchedule(0.5, 1.0), 3) == pytest.approx(0.125)
    with pytest.raises(ConfigError):
        step_size(harmonic, -1)
