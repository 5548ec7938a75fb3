#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - exceptions."""


class SriError(Exception):
    """Base class for exceptions in this module."""

    err_msg = "Unspecified error"
    err_tip = "(no hint)"

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.message = args[0] if args else None

    def __str__(self) -> str:
        if self.message:
            return f"{self.err_msg}: {self.message} {self.err_tip}"
        return f"{self.err_msg} {self.err_tip}"


class ConfigError(SriError):
    """Raised when a configuration, or a constructor argument, is invalid."""

    err_msg = "Invalid configuration"
    err_tip = "(check the config file/command line)"


class AttractorSpecError(ConfigError):
    """Raised when the neighbourhood chain of an attractor does not hold."""

    err_msg = "Invalid attractor neighbourhoods"
    err_tip = "(need N^2eps0(A) in O' and N^eps0(cl O') in O)"


class UnknownProblemError(ConfigError):
    """Raised when a problem id is not in the catalog."""

    err_msg = "Unknown problem"
    err_tip = "(see: client.py problems)"


class GeometryError(SriError):
    """Base class for invalid geometric arguments."""

    err_msg = "Invalid geometry"


class ZeroDirectionError(GeometryError):
    """Raised when a support direction is the zero vector."""

    err_msg = "Zero direction"
    err_tip = "(a support direction must be nonzero)"


class DimensionMismatchError(GeometryError):
    """Raised when points/sets of different dimensions are combined."""

    err_msg = "Dimension mismatch"


class SelectionError(GeometryError):
    """Raised when a velocity is not in F(x), or a parameter is not in U."""

    err_msg = "Invalid selection"
    err_tip = "(the point must lie in F(x) within tolerance)"


class HorizonMismatchError(GeometryError):
    """Raised when a path and a funnel do not share a horizon."""

    err_msg = "Horizon mismatch"


class TrajectoryMismatchError(GeometryError):
    """Raised when a trajectory and a reset trace are not from the same run."""

    err_msg = "Trajectory/trace mismatch"


class EmptyConditioningError(GeometryError):
    """Raised when no valid initial state exists for a conditioning event."""

    err_msg = "Empty conditioning event"
    err_tip = "(no initial point lies inside O')"


class NumericalError(SriError):
    """Base class for numerical failures."""

    err_msg = "Numerical failure"


class DivergenceError(NumericalError):
    """Raised when a path integrator reaches a non-finite state."""

    err_msg = "Non-finite state"
    err_tip = "(reduce the step size or the horizon)"


class QuadratureError(NumericalError):
    """Raised when a Steiner quadrature fails to converge."""

    err_msg = "Quadrature did not converge"
    err_tip = "(increase quad_order)"
