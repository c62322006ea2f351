"""
Proper-time sweeps: one LandauerReport per grid point, reduced to SweepRows.

Integrals come from a single cumulative quadrature pass per mode over the
whole grid. Modes are added an octave at a time until every row passes the
tail test or the mode cap is reached.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cavity import (CavityConfig, cutoff_ladder, mode_function, nearest_mode_index,
                     octave_change)
from .config import RunConfig, parse_config
from .integrals import ModeIntegrals, compute_grid
from .perturbation import corrections
from .thermodynamics import entropy_and_heat, log_occupancy_weight, mode_terms
from .trajectories import Static, UniformAcceleration, max_proper_time

log = logging.getLogger(__name__)

ZERO_PROFILE_THRESHOLD = 1e-6

TAU_CLAMPED = "tau_clamped"
CUTOFF_NOT_CONVERGED = "cutoff_not_converged"
QUADRATURE_NOT_CONVERGED = "quadrature_not_converged"
PERTURBATIVE_REGIME = "perturbative_regime"
POINT_ERROR = "error"
NON_CONVERGENCE_FLAGS = frozenset({CUTOFF_NOT_CONVERGED, QUADRATURE_NOT_CONVERGED, POINT_ERROR})


class NodalPositionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SweepRow:
    tau: float
    delta_S: float
    delta_Q: float
    delta_Q_over_TR: float | None
    residual: float
    delta_p: float
    j_max: int
    quad_err: float
    flags: tuple = ()

    def as_dict(self) -> dict:
        return {
            "tau": self.tau, "delta_S": self.delta_S, "delta_Q": self.delta_Q,
            "delta_Q_over_TR": self.delta_Q_over_TR, "residual": self.residual,
            "delta_p": self.delta_p, "j_max": self.j_max, "quad_err": self.quad_err,
            "flags": list(self.flags),
        }


@dataclass
class Resolved:
    """Domain objects and the clamped grid derived from a RunConfig."""

    config: RunConfig
    cavity: CavityConfig
    trajectory: Static | UniformAcceleration
    gap: float
    resonant_index: int
    taus: np.ndarray
    clamped: np.ndarray
    exit_time: float
    warnings: list = field(default_factory=list)


def tau_grid(config: RunConfig) -> np.ndarray:
    g = config.tau_grid
    return np.linspace(g.start, g.stop, g.count)


def resolve(config: RunConfig) -> Resolved:
    cavity = config.cavity_config()
    trajectory = config.trajectory_obj()
    gap = config.gap()
    r = config.detector.resonant_mode or nearest_mode_index(gap, cavity)
    exit_time = max_proper_time(trajectory, cavity)
    requested = tau_grid(config)
    clamped = requested > exit_time
    taus = np.minimum(requested, exit_time)
    notes = []
    if np.any(clamped):
        notes.append(f"{int(clamped.sum())} grid points clamped to the cavity exit time {exit_time:.6g}")
    if isinstance(trajectory, Static):
        u = abs(mode_function(r, trajectory.position, cavity))
        if u < ZERO_PROFILE_THRESHOLD:
            msg = (f"|u_{r}(x0)| = {u:.3e} < {ZERO_PROFILE_THRESHOLD:g}: the detector sits "
                   "near a node of its resonant mode")
            warnings.warn(msg, NodalPositionWarning, stacklevel=2)
            notes.append(msg)
    return Resolved(config, cavity, trajectory, gap, r, taus, clamped, exit_time, notes)


def _aggregate_terms(config: RunConfig, integrals: ModeIntegrals) -> np.ndarray:
    """Per-mode terms of every reported aggregate, shape (n_agg, n_tau, n_modes)."""
    detector, fld = config.detector_state(), config.field_state()
    dp, heat = mode_terms(detector, fld, integrals, config.coupling)
    rows = [dp, heat * integrals.omegas]
    if not fld.is_vacuum:
        w = log_occupancy_weight(fld.occupancy(integrals.omegas))
        rows.append(heat * np.where(np.isfinite(w), w, integrals.omegas / fld.temperature))
    return np.stack(rows)


def sweep_integrals(resolved: Resolved):
    """
    Integrals on the grid with enough modes for every row.

    Returns ``(integrals, cutoffs, converged)`` where ``cutoffs[i]`` is the
    mode count used for row ``i`` and ``converged[i]`` says whether its tail
    test passed.
    """
    config, cavity = resolved.config, resolved.cavity
    tol = config.tolerances.quadrature
    taus = resolved.taus
    ladder = cutoff_ladder(cavity, resolved.resonant_index)
    n = len(taus)

    def compute(lo, hi):
        return compute_grid(cavity, resolved.trajectory, resolved.gap, taus, tol, range(lo, hi + 1))

    if not ladder:
        j = cavity.j_max
        return compute(1, j), np.full(n, j), np.zeros(n, dtype=bool)

    grid = compute(1, 2 * ladder[0])
    cutoffs = np.zeros(n, dtype=int)
    pending = np.ones(n, dtype=bool)
    for j in ladder:
        if grid.n_modes < 2 * j:
            grid = grid.concat(compute(grid.n_modes + 1, 2 * j))
        change = octave_change(_aggregate_terms(config, grid.truncate(2 * j)), j).max(axis=0)
        passed = pending & (change <= cavity.tail_tolerance)
        cutoffs[passed] = j
        pending &= ~passed
        log.debug("cutoff %d: %d rows still open", j, int(pending.sum()))
        if not pending.any():
            break
    cutoffs[pending] = grid.n_modes
    return grid, cutoffs, ~pending


def _row(resolved: Resolved, integrals: ModeIntegrals, i: int, j: int, tail_ok: bool) -> SweepRow:
    config = resolved.config
    tau = float(resolved.taus[i])
    flags = []
    if resolved.clamped[i]:
        flags.append(TAU_CLAMPED)
    if not tail_ok:
        flags.append(CUTOFF_NOT_CONVERGED)
    point = integrals.truncate(j).at(i)
    quad_err = float(point.max_error)
    if quad_err > config.tolerances.quadrature or not point.converged:
        flags.append(QUADRATURE_NOT_CONVERGED)
    detector, fld = config.detector_state(), config.field_state()
    try:
        corr = corrections(detector, fld, point, config.coupling, warn=False)
        report = entropy_and_heat(detector, fld, corr, point, config.entropy)
    except (ValueError, ArithmeticError) as exc:
        log.warning("tau=%g: %s", tau, exc)
        nan = math.nan
        return SweepRow(tau, nan, nan, None if fld.is_vacuum else nan, nan, nan, j, quad_err,
                        tuple(flags + [POINT_ERROR]))
    if not report.perturbative:
        flags.append(PERTURBATIVE_REGIME)
    return SweepRow(tau, report.delta_S, report.delta_Q, report.delta_Q_over_TR,
                    report.residual, report.delta_p, j, quad_err, tuple(flags))


def run_sweep(config: RunConfig, resolved: Resolved | None = None) -> list[SweepRow]:
    """One row per grid point, ordered by proper time."""
    resolved = resolved or resolve(config)
    integrals, cutoffs, converged = sweep_integrals(resolved)
    return [_row(resolved, integrals, i, int(cutoffs[i]), bool(converged[i]))
            for i in range(len(resolved.taus))]


def resolved_cutoff(config: RunConfig) -> tuple[int, bool]:
    """Mode cutoff needed at the end of the grid and whether its tail test passed."""
    resolved = resolve(config)
    resolved.taus = resolved.taus[-1:]
    resolved.clamped = resolved.clamped[-1:]
    _, cutoffs, converged = sweep_integrals(resolved)
    return int(cutoffs[0]), bool(converged[0])


PRESET_NAMES = ("fig1", "fig2", "fig4a", "fig4b")


def figure_preset(name: str) -> RunConfig:
    """Figure parameter sets with a 200-point grid starting at zero."""
    common = {"detector": {"p": 0.05}, "coupling": 0.01}
    if name == "fig1":
        doc = {"cavity": {"length": 1.56789},
               "detector": {"p": 0.05, "resonant_mode": 10},
               "trajectory": {"kind": "static", "position": 0.212345},
               "field": {"kind": "vacuum"},
               "tau_grid": {"start": 0.0, "stop": 2.0, "count": 200}}
    elif name == "fig2":
        stop = max_proper_time(UniformAcceleration(50.0), CavityConfig(3.0))
        doc = {"cavity": {"length": 3.0},
               "detector": {"p": 0.05, "resonant_mode": 15},
               "trajectory": {"kind": "accelerated", "acceleration": 50.0},
               "field": {"kind": "vacuum"},
               "tau_grid": {"start": 0.0, "stop": stop, "count": 200}}
    elif name in ("fig4a", "fig4b"):
        doc = {"cavity": {"length": 1.234},
               "detector": {"p": 0.05, "resonant_mode": 15},
               "trajectory": {"kind": "static", "position": 0.52345},
               "field": {"kind": "thermal", "temperature": 1.0 if name == "fig4a" else 100.0},
               "tau_grid": {"start": 0.0, "stop": 2.0, "count": 200}}
    else:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return parse_config({**common, **doc, "name": name})
