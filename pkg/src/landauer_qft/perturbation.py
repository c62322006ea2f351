"""
Second-order (lambda^2) corrections to the detector and field states.

The joint state starts as ``[(1-p)|g><g| + p|e><e|] x rho_field`` with a
diagonal field state (vacuum or thermal). First-order terms produce only
off-diagonal entries and are not represented. The Fock sums over the thermal
distribution are done in closed form:
``sum_n P(n) (n + 1) = nbar + 1`` and ``sum_n P(n) n = nbar``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .integrals import ModeIntegrals

PERTURBATIVE_FRACTION = 0.1


class PerturbativeRegimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DetectorState:
    """Diagonal qubit state with excited population ``p`` and gap ``omega_d``."""

    p: float
    omega_d: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"excited population must lie in [0, 1], got {self.p}")
        if not self.omega_d > 0:
            raise ValueError(f"detector gap must be positive, got {self.omega_d}")


@dataclass(frozen=True)
class FieldState:
    temperature: float = 0.0

    @classmethod
    def vacuum(cls) -> "FieldState":
        return cls(0.0)

    @classmethod
    def thermal(cls, temperature: float) -> "FieldState":
        if not temperature > 0:
            raise ValueError(f"reservoir temperature must be positive, got {temperature}")
        return cls(float(temperature))

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("reservoir temperature cannot be negative")

    @property
    def is_vacuum(self) -> bool:
        return self.temperature == 0.0

    @property
    def kind(self) -> str:
        return "vacuum" if self.is_vacuum else "thermal"

    def occupancy(self, omegas) -> np.ndarray:
        """Bose occupancies ``1/(exp(omega/T_R) - 1)``; zeros for the vacuum."""
        omegas = np.asarray(omegas, dtype=float)
        if self.is_vacuum:
            return np.zeros_like(omegas)
        with np.errstate(over="ignore"):
            return 1.0 / np.expm1(omegas / self.temperature)


@dataclass
class ReducedCorrections:
    """
    lambda^2 shifts of the reduced states.

    ``raising`` and ``lowering`` are the per-mode probabilities moved into
    ``|n_j + 1>`` and ``|n_j - 1>``; for the vacuum ``raising`` is the
    single-excitation weight and ``lowering`` vanishes. ``added`` and
    ``removed`` are the totals gained by the new diagonal entries and lost by
    the initial ones.
    """

    coupling: float
    delta_p: float | np.ndarray
    raising: np.ndarray
    lowering: np.ndarray
    added: float | np.ndarray
    removed: float | np.ndarray
    field_kind: str
    perturbative: bool | np.ndarray = True

    @property
    def trace_defect(self):
        return self.added - self.removed

    @property
    def scale(self):
        return np.abs(self.added) + np.abs(self.removed)

    @property
    def excitation(self) -> np.ndarray:
        """Vacuum single-excitation weights ``delta f_j``."""
        return self.raising


def _check_regime(p, delta_p, warn=True):
    limit = PERTURBATIVE_FRACTION * min(p, 1.0 - p)
    ok = np.abs(delta_p) <= limit
    if warn and not np.all(ok):
        warnings.warn(
            f"|delta p| exceeds {PERTURBATIVE_FRACTION:g} min(p, 1-p); "
            "second-order results are untrusted",
            PerturbativeRegimeWarning,
            stacklevel=3,
        )
    return ok


def vacuum_corrections(detector: DetectorState, integrals: ModeIntegrals, coupling: float,
                       warn: bool = True) -> ReducedCorrections:
    if not coupling > 0:
        raise ValueError("coupling must be positive")
    p = detector.p
    lam2 = coupling ** 2
    ip2, im2 = integrals.plus_sq, integrals.minus_sq
    # U1 rho U1^dagger: |g>|0> -> |e>|1_j> and |e>|0> -> |g>|1_j>
    to_e = lam2 * (1 - p) * ip2
    to_g = lam2 * p * im2
    excitation = to_e + to_g
    # U2 rho + rho U2^dagger depletes |g>|0> and |e>|0>
    from_g = lam2 * (1 - p) * ip2.sum(axis=-1)
    from_e = lam2 * p * im2.sum(axis=-1)
    delta_p = to_e.sum(axis=-1) - from_e
    added = to_e.sum(axis=-1) + to_g.sum(axis=-1)
    removed = from_g + from_e
    ok = _check_regime(p, delta_p, warn)
    return ReducedCorrections(coupling, delta_p, excitation, np.zeros_like(excitation),
                              added, removed, "vacuum", ok)


def thermal_corrections(detector: DetectorState, field: FieldState, integrals: ModeIntegrals,
                        coupling: float, warn: bool = True) -> ReducedCorrections:
    if field.is_vacuum:
        raise ValueError("thermal_corrections needs a thermal field; use vacuum_corrections")
    if not coupling > 0:
        raise ValueError("coupling must be positive")
    p = detector.p
    lam2 = coupling ** 2
    nbar = field.occupancy(integrals.omegas)
    ip2, im2 = integrals.plus_sq, integrals.minus_sq
    raising = lam2 * (nbar + 1) * ((1 - p) * ip2 + p * im2)
    lowering = lam2 * nbar * ((1 - p) * im2 + p * ip2)
    # probability arriving in |e>: from |g> by emission or absorption
    into_e = lam2 * (1 - p) * ((nbar + 1) * ip2 + nbar * im2)
    # depletion of the initial diagonal by U2 rho + rho U2^dagger
    out_of_g = lam2 * (1 - p) * (nbar * im2 + (nbar + 1) * ip2)
    out_of_e = lam2 * p * (nbar * ip2 + (nbar + 1) * im2)
    delta_p = into_e.sum(axis=-1) - out_of_e.sum(axis=-1)
    added = raising.sum(axis=-1) + lowering.sum(axis=-1)
    removed = out_of_g.sum(axis=-1) + out_of_e.sum(axis=-1)
    ok = _check_regime(p, delta_p, warn)
    return ReducedCorrections(coupling, delta_p, raising, lowering, added, removed, "thermal", ok)


def corrections(detector, field, integrals, coupling, warn=True) -> ReducedCorrections:
    if field.is_vacuum:
        return vacuum_corrections(detector, integrals, coupling, warn)
    return thermal_corrections(detector, field, integrals, coupling, warn)


def check_trace(corrections: ReducedCorrections):
    """Signed probability gained minus probability lost; zero at this order."""
    return corrections.trace_defect


def reachable_occupations(n_j: int, order: int) -> set[int]:
    """
    Diagonal Fock states ``|m><m|`` produced from ``|n_j><n_j|`` by the
    lambda^(2 order) terms: every ``m`` from ``n_j - order`` to
    ``n_j + order``, clamped at the vacuum.
    """
    if int(n_j) != n_j or n_j < 0:
        raise ValueError(f"occupation must be a non-negative integer, got {n_j}")
    if int(order) != order or order < 1:
        raise ValueError(f"perturbative order must be a positive integer, got {order}")
    return set(range(max(0, n_j - order), n_j + order + 1))


def thermal_distribution(nbar: float, n_max: int) -> np.ndarray:
    """``P(n) = nbar^n / (1 + nbar)^(n + 1)`` for ``n = 0..n_max``."""
    n = np.arange(n_max + 1)
    if nbar == 0:
        return (n == 0).astype(float)
    return np.exp(n * math.log(nbar) - (n + 1) * math.log1p(nbar))
