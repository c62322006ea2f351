"""
Entropy change of the qubit, heat dissipated into the field, and the
Landauer residual ``Delta Q - T_R Delta S``.

Sign convention: ``Delta S = S(initial) - S(final)``, so a positive value
means the qubit lost entropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .integrals import ModeIntegrals
from .perturbation import DetectorState, FieldState, ReducedCorrections

BOUND_RTOL = 1e-10
BOUND_FLOOR = 1e-30
# relative width of the detailed-balance tie in sign_condition
_TIE_RTOL = 1e-12


@dataclass
class LandauerReport:
    delta_S: float
    delta_Q: float
    delta_Q_over_TR: float | None
    residual: float
    temperature: float
    delta_p: float
    mode_delta_S: np.ndarray
    mode_delta_Q: np.ndarray
    entropy_method: str
    j_max: int
    max_quad_error: float
    perturbative: bool
    flags: list = field(default_factory=list)


def binary_entropy(p):
    """Shannon entropy in nats of a two-outcome distribution; 0 at the ends."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(p > 0, p * np.log(p), 0.0) + np.where(p < 1, (1 - p) * np.log1p(-p), 0.0))
    return h if h.ndim else float(h)


def _log_odds(p):
    if p <= 0.0 or p >= 1.0:
        raise ValueError(f"linearized entropy needs 0 < p < 1, got p={p}")
    return math.log((1 - p) / p)


def _entropy(p, delta_p, mode_terms, method):
    if method == "linearized":
        return float(np.sum(mode_terms)), mode_terms
    if method == "exact":
        final = p + float(delta_p)
        if not 0.0 <= final <= 1.0:
            raise ValueError(f"final population {final} left [0, 1]; coupling too strong")
        return float(binary_entropy(p) - binary_entropy(final)), mode_terms
    raise ValueError(f"unknown entropy method {method!r}")


def _report(detector, corrections, integrals, delta_S, terms_S, terms_Q, delta_Q, over_TR,
            temperature, method):
    return LandauerReport(
        delta_S=delta_S,
        delta_Q=delta_Q,
        delta_Q_over_TR=over_TR,
        residual=delta_Q - temperature * delta_S,
        temperature=temperature,
        delta_p=float(corrections.delta_p),
        mode_delta_S=terms_S,
        mode_delta_Q=terms_Q,
        entropy_method=method,
        j_max=integrals.n_modes,
        max_quad_error=float(integrals.max_error),
        perturbative=bool(np.all(corrections.perturbative)),
    )


def mode_terms(detector: DetectorState, field: FieldState, integrals: ModeIntegrals,
               coupling: float):
    """
    Per-mode contributions ``(delta_p_j, heat_j)`` with ``heat_j`` the field
    energy gain divided by ``omega_j``. Works on gridded integrals too.
    """
    p = detector.p
    lam2 = coupling ** 2
    ip2, im2 = integrals.plus_sq, integrals.minus_sq
    if field.is_vacuum:
        return lam2 * ((1 - p) * ip2 - p * im2), lam2 * (p * im2 + (1 - p) * ip2)
    nbar = field.occupancy(integrals.omegas)
    down = (nbar + 1) * p - nbar * (1 - p)
    up = (nbar + 1) * (1 - p) - nbar * p
    return lam2 * (up * ip2 - down * im2), lam2 * (down * im2 + up * ip2)


def vacuum_entropy_and_heat(detector: DetectorState, corrections: ReducedCorrections,
                            integrals: ModeIntegrals, method: str = "linearized") -> LandauerReport:
    p = detector.p
    lam2 = corrections.coupling ** 2
    ip2, im2 = integrals.plus_sq, integrals.minus_sq
    if method == "linearized" or 0 < p < 1:
        terms_S = _log_odds(p) * lam2 * (p * im2 - (1 - p) * ip2)
    else:
        terms_S = np.zeros_like(ip2)
    terms_Q = lam2 * (p * im2 + (1 - p) * ip2) * integrals.omegas
    delta_S, terms_S = _entropy(p, corrections.delta_p, terms_S, method)
    return _report(detector, corrections, integrals, delta_S, terms_S, terms_Q,
                   float(np.sum(terms_Q)), None, 0.0, method)


def log_occupancy_weight(nbar):
    """``ln((nbar + 1)/nbar)``; infinite where the occupancy underflows to 0."""
    nbar = np.asarray(nbar, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log1p(1.0 / nbar)


def thermal_entropy_and_heat(detector: DetectorState, field: FieldState,
                             corrections: ReducedCorrections, integrals: ModeIntegrals,
                             method: str = "linearized") -> LandauerReport:
    """
    Thermal-reservoir report. ``Delta Q`` is the frequency-weighted sum and
    ``Delta Q / T_R`` is summed separately with log-occupancy weights. Modes
    whose occupancy underflows to zero take the weight's analytic value
    ``omega_j / T_R``.
    """
    if field.is_vacuum or not field.temperature > 0:
        raise ValueError("thermal report needs a reservoir temperature T_R > 0")
    p = detector.p
    T_R = field.temperature
    lam2 = corrections.coupling ** 2
    nbar = field.occupancy(integrals.omegas)
    ip2, im2 = integrals.plus_sq, integrals.minus_sq
    down = (nbar + 1) * p - nbar * (1 - p)
    up = (nbar + 1) * (1 - p) - nbar * p
    if method == "linearized" or 0 < p < 1:
        terms_S = lam2 * _log_odds(p) * (down * im2 - up * ip2)
    else:
        terms_S = np.zeros_like(ip2)
    heat = lam2 * (down * im2 + up * ip2)
    terms_Q = heat * integrals.omegas
    weight = log_occupancy_weight(nbar)
    exact_weight = np.where(np.isfinite(weight), weight, integrals.omegas / T_R)
    over_TR = float(np.sum(exact_weight * heat))
    delta_S, terms_S = _entropy(p, corrections.delta_p, terms_S, method)
    return _report(detector, corrections, integrals, delta_S, terms_S, terms_Q,
                   float(np.sum(terms_Q)), over_TR, T_R, method)


def entropy_and_heat(detector, field, corrections, integrals, method="linearized"):
    if field.is_vacuum:
        return vacuum_entropy_and_heat(detector, corrections, integrals, method)
    return thermal_entropy_and_heat(detector, field, corrections, integrals, method)


def landauer_residual(report: LandauerReport) -> float:
    return report.delta_Q - report.temperature * report.delta_S


def bound_tolerance(report: LandauerReport) -> float:
    return BOUND_RTOL * (abs(report.delta_Q) + abs(report.temperature * report.delta_S) + BOUND_FLOOR)


def bound_satisfied(report: LandauerReport) -> bool:
    return landauer_residual(report) >= -bound_tolerance(report)


def effective_detector_temperature(p: float, omega_d: float) -> float:
    """
    ``T_d`` with ``p = 1/(exp(omega_d/T_d) + 1)``. Infinite at ``p = 1/2`` and
    negative for population-inverted qubits.
    """
    if p <= 0.0 or p >= 1.0:
        raise ValueError(f"effective temperature needs 0 < p < 1, got {p}")
    odds = math.log((1 - p) / p)
    if odds == 0.0:
        return math.inf
    return omega_d / odds


def sign_condition(detector: DetectorState, field: FieldState, omega_j: float) -> bool:
    """
    Whether mode ``omega_j`` lies on the side of detailed balance where the
    resonant contributions to ``Delta S`` and ``Delta Q`` are positive:
    ``(nbar + 1)/nbar > (1 - p)/p``, i.e. ``T_R/omega_j < T_d/omega_d``.
    Exact balance (within a relative 1e-12) counts as ``False``.
    """
    if field.is_vacuum:
        nbar = 0.0
    else:
        nbar = float(field.occupancy(omega_j))
    p = detector.p
    lhs = (nbar + 1) * p
    rhs = nbar * (1 - p)
    return lhs - rhs > _TIE_RTOL * max(lhs, rhs)
