"""Qubit worldlines parametrized by proper time."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .cavity import CavityConfig

UNBOUNDED = math.inf

# relative slack on the wall position, so a worldline evaluated exactly at its
# exit time is not rejected over rounding
_WALL_SLACK = 1e-12


class CavityExitError(ValueError):
    def __init__(self, tau: float, exit_time: float):
        self.tau = tau
        self.exit_time = exit_time
        super().__init__(
            f"accelerated worldline leaves the cavity at proper time {exit_time:.12g} "
            f"(requested tau={tau:.12g})"
        )


@dataclass(frozen=True)
class Static:
    position: float

    def coordinates(self, tau):
        tau = np.asarray(tau, dtype=float)
        return tau, np.full_like(tau, self.position)

    def velocity(self, tau):
        tau = np.asarray(tau, dtype=float)
        return np.ones_like(tau), np.zeros_like(tau)


@dataclass(frozen=True)
class UniformAcceleration:
    """Starts at rest at x = 0, t = 0 and accelerates towards +x."""

    acceleration: float

    def __post_init__(self):
        if not self.acceleration > 0:
            raise ValueError(f"proper acceleration must be positive, got {self.acceleration}")

    def coordinates(self, tau):
        a = self.acceleration
        tau = np.asarray(tau, dtype=float)
        # cosh(a tau) - 1 = 2 sinh^2(a tau / 2) keeps the a -> 0 limit accurate
        return np.sinh(a * tau) / a, 2.0 * np.sinh(0.5 * a * tau) ** 2 / a

    def velocity(self, tau):
        a = self.acceleration
        tau = np.asarray(tau, dtype=float)
        return np.cosh(a * tau), np.sinh(a * tau)

    def lightcone(self, tau):
        """Null coordinates ``(t + x, t - x)`` along the worldline."""
        a = self.acceleration
        tau = np.asarray(tau, dtype=float)
        return np.expm1(a * tau) / a, -np.expm1(-a * tau) / a


Trajectory = Union[Static, UniformAcceleration]


def max_proper_time(trajectory: Trajectory, cavity: CavityConfig) -> float:
    """
    Proper time at which the worldline reaches the far wall.

    Returns ``UNBOUNDED`` for static detectors and for periodic cavities, where
    the coordinate simply wraps around.
    """
    if isinstance(trajectory, Static) or cavity.boundary == "periodic":
        return UNBOUNDED
    a = trajectory.acceleration
    y = a * cavity.length
    # arccosh(1 + y) without cancellation for small y
    return math.log1p(y + math.sqrt(y * (y + 2.0))) / a


def check_inside(trajectory: Trajectory, tau: float, cavity: CavityConfig) -> None:
    if isinstance(trajectory, Static):
        if cavity.boundary == "dirichlet" and not 0.0 <= trajectory.position <= cavity.length:
            raise ValueError(
                f"static position {trajectory.position} outside the cavity [0, {cavity.length}]"
            )
        return
    exit_time = max_proper_time(trajectory, cavity)
    if tau > exit_time * (1.0 + _WALL_SLACK):
        raise CavityExitError(tau, exit_time)


def evaluate(trajectory: Trajectory, tau: float, cavity: CavityConfig | None = None):
    """
    Coordinates ``(t, x)`` at proper time ``tau``.

    With a Dirichlet ``cavity`` given, an accelerated worldline past the far
    wall raises :class:`CavityExitError`.
    """
    if tau < 0:
        raise ValueError(f"proper time must be non-negative, got {tau}")
    if cavity is not None:
        check_inside(trajectory, tau, cavity)
    t, x = trajectory.coordinates(tau)
    return float(t), float(x)
