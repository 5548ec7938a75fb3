#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - constants, enums & numerical tolerances."""

from enum import Enum

__dev_mode__ = False

DEFAULT_SEED = 0

# membership & comparison slack (absolute, scaled by 1 + a characteristic size)
MEMBERSHIP_TOL = 1e-6
HAUSDORFF_GRID_TOL = 1e-3  # relative
SNAP_TOL = 1e-10  # d(x, Y) below this counts as x in Y
PARAMETER_TOL = 1e-12  # ||u|| <= 1 + PARAMETER_TOL
SIGN_SNAP_TOL = 1e-12  # |x| below this is treated as the kink of the sign map

# sphere quadrature for the Steiner point
MIN_QUAD_ORDER = 4
DEFAULT_QUAD_ORDER = 16
QUAD_RESIDUAL_TOL = 1e-9  # relative to 1 + the set's circumradius
MC_STEINER_DIRS = 20_000  # per quad_order unit, for d > 3
MC_STEINER_TOL = 5e-2

# direction grids
DEFAULT_N_DIRS = 64
HAUSDORFF_DIRS_2D = 720
HAUSDORFF_DIRS_3D = 2_000
HAUSDORFF_DIRS_ND = 4_000
PI_BISECT_ITERS = 60

# dilation sampling
DEFAULT_DILATION_SAMPLES = 9

# recursion
DIVERGENCE_NORM = 1e100

# experiments
MIN_TRIALS = 100
DEFAULT_TAIL_FRACTION = 0.2
WILSON_CONFIDENCE = 0.95
DEFAULT_T_W = 1.0
DEFAULT_RADIUS_FACTOR = 2.0


class SelectionStrategy(str, Enum):
    STEINER = "steiner"
    RANDOM = "random-support-direction"
    EXTREME = "extreme-toward-fixed-direction"


class NoiseKind(str, Enum):
    SPHERE = "sphere-uniform"
    GAUSSIAN = "truncated-gaussian"
    RADEMACHER = "rademacher-coordinates"


class RadiusKind(str, Enum):
    GEOMETRIC = "geometric"
    ARITHMETIC = "arithmetic"


class InitRule(str, Enum):
    GRID = "grid-in-Oprime"
    FIXED = "fixed-point"


class ScheduleKind(str, Enum):
    POLYNOMIAL = "polynomial"
