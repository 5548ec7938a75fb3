#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - shared test fixtures."""

import logging

import numpy as np
import pytest

from sri_lockin.convexsets import Ball, Hull, SetValuedMapSpec
from sri_lockin.engine import StepSchedule


@pytest.fixture(autouse=True)
def reset_package_logger():
    """set_logging() detaches the package logger from root; undo that per test."""
    yield
    logger = logging.getLogger("sri_lockin")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.propagate = True
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def harmonic() -> StepSchedule:
    return StepSchedule(1.0, 1.0)


@pytest.fixture
def contraction() -> SetValuedMapSpec:
    """F(x) = {-x}, in one dimension."""
    return SetValuedMapSpec(lambda x: Hull([-x]), growth_K=1.0, dimension=1, name="neg")


@pytest.fixture
def full_ball() -> SetValuedMapSpec:
    """F(x) = B(0, 1 + |x|) in two dimensions: every parameter target is reachable."""
    return SetValuedMapSpec(
        lambda x: Ball(np.zeros(2), 1.0 + np.linalg.norm(x)),
        growth_K=1.0,
        dimension=2,
        name="full_ball",
    )


@pytest.fixture
def triangle() -> Hull:
    return Hull([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
