#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - stochastic recursive inclusions & their lock-in probabilities.

Covers:
- compact convex sets, the Steiner selection and the parametrized selection of a
  set-valued map
- differential inclusions, controlled ODEs and sampled solution funnels
- the stochastic recursion, with (SSRI) and without resets
- lock-in probability estimates, the concentration bound and window diagnostics
"""

import logging

from .analysis import (  # noqa: F401
    AttractorSpec,
    BoundInputs,
    convergence_to_set,
    finite_reset_experiment,
    lock_in_empirical,
    per_window_azuma,
    recurrence_experiment,
    rho_diagnostics,
    theoretical_lockin_bound,
    wilson_interval,
)
from .const import __dev_mode__
from .convexsets import (  # noqa: F401
    Ball,
    Hull,
    HullBall,
    SetValuedMapSpec,
    dilate_map,
    hausdorff,
    parametrized_selection,
    project_pi,
    steiner_point,
    support_function,
)
from .dynamics import (  # noqa: F401
    euler_inclusion_path,
    ode_controlled_path,
    path_funnel_distance,
    sample_funnel,
)
from .engine import NoiseModel, StepSchedule, run_inclusion  # noqa: F401
from .problems import get_problem, list_problems  # noqa: F401
from .resetter import SsriConfig, run_ssri  # noqa: F401
from .version import __version__  # noqa: F401

DEV_MODE = __dev_mode__ and False
VERSION = __version__

_LOGGER = logging.getLogger(__name__)
if DEV_MODE:
    _LOGGER.setLevel(logging.DEBUG)
