"""
Invariant suite behind ``landauer-qft check`` and the brute-force ladder
oracle it shares with the tests.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .cavity import CavityConfig, mode_frequency
from .integrals import compute_grid
from .perturbation import (DetectorState, FieldState, check_trace, corrections,
                           reachable_occupations)
from .sweep import figure_preset, run_sweep
from .thermodynamics import bound_satisfied, bound_tolerance, entropy_and_heat, landauer_residual
from .trajectories import Static

TRACE_RTOL = 1e-12
LIMIT_RTOL = 1e-6
BOUND_RTOL = 1e-10
BOUND_FLOOR = 1e-30


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    is_bound: bool = False
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _apply(word, n: int) -> int | None:
    """Occupation after applying ``word`` (rightmost letter first); None if killed."""
    for op in reversed(word):
        if op == "a":
            if n == 0:
                return None
            n -= 1
        else:
            n += 1
    return n


def ladder_oracle(n_j: int, order: int) -> set[int]:
    """
    Diagonal occupations at order lambda^(2 order) by enumerating every ket word
    of length m and bra word of length 2 order - m over {a, a+} and keeping
    pairs that land on the same occupation.
    """
    found = set()
    total = 2 * order
    for m in range(total + 1):
        kets = {_apply(w, n_j) for w in itertools.product("aA", repeat=m)} - {None}
        bras = {_apply(w, n_j) for w in itertools.product("aA", repeat=total - m)} - {None}
        found |= kets & bras
    return found


def random_static_case(rng, n_modes=64, thermal=False):
    """A random static configuration with its integrals at one interaction time."""
    length = rng.uniform(0.5, 3.0)
    cavity = CavityConfig(length)
    x0 = rng.uniform(0.05, 0.95) * length
    r = int(rng.integers(1, 20))
    gap = mode_frequency(r, cavity) * (1.0 if rng.random() < 0.5 else rng.uniform(0.5, 1.5))
    T = rng.uniform(0.0, 5.0)
    p = rng.uniform(0.01, 0.49)
    integrals = compute_grid(cavity, Static(x0), gap, [T], modes=range(1, n_modes + 1)).at(0)
    fld = FieldState.thermal(10 ** rng.uniform(-2, 2)) if thermal else FieldState.vacuum()
    return DetectorState(p, gap), fld, integrals


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        result = fn(*args, **kw)
        result.seconds = time.perf_counter() - t0
        return result
    wrapper.__name__ = fn.__name__
    return wrapper


@_timed
def check_ladder() -> CheckResult:
    bad = [(n, k) for n in range(7) for k in range(1, 4)
           if reachable_occupations(n, k) != ladder_oracle(n, k)]
    return CheckResult("ladder rule vs word enumeration", not bad,
                       "n_j <= 6, order <= 3" if not bad else f"mismatch at {bad}")


@_timed
def check_trace_defect(n_cases=50, seed=7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for thermal in (False, True):
        for _ in range(n_cases):
            det, fld, ints = random_static_case(rng, thermal=thermal)
            c = corrections(det, fld, ints, 0.01, warn=False)
            scale = float(c.scale)
            if scale > 0:
                worst = max(worst, abs(float(check_trace(c))) / scale)
    return CheckResult("trace preservation", worst < TRACE_RTOL,
                       f"worst |defect|/scale = {worst:.2e} on {2 * n_cases} configs")


@_timed
def check_thermal_limit(n_cases=20, seed=11) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        det, _, ints = random_static_case(rng)
        cold = FieldState.thermal(1e-6)
        vac = entropy_and_heat(det, FieldState.vacuum(),
                               corrections(det, FieldState.vacuum(), ints, 0.01, warn=False), ints)
        th = entropy_and_heat(det, cold, corrections(det, cold, ints, 0.01, warn=False), ints)
        for a, b in ((th.delta_S, vac.delta_S), (th.delta_Q, vac.delta_Q), (th.delta_p, vac.delta_p)):
            if b != 0:
                worst = max(worst, abs(a - b) / abs(b))
    return CheckResult("thermal T_R=1e-6 matches vacuum", worst < LIMIT_RTOL,
                       f"worst relative gap {worst:.2e}")


@_timed
def check_preset_bound(name: str) -> CheckResult:
    config = figure_preset(name)
    rows = run_sweep(config)
    T_R = config.field.temperature or 0.0
    bad = [r.tau for r in rows
           if not r.residual >= -BOUND_RTOL * (abs(r.delta_Q) + abs(T_R * r.delta_S) + BOUND_FLOOR)]
    flagged = sum(1 for r in rows if r.flags)
    detail = f"{len(rows)} rows, min residual {min(r.residual for r in rows):.3e}"
    if flagged:
        detail += f", {flagged} flagged rows"
    if bad:
        detail += f", violations at tau={bad[:5]}"
    return CheckResult(f"Landauer bound on {name}", not bad, detail, is_bound=True)


@_timed
def check_bound_grid(n=10, n_tau=20) -> CheckResult:
    base = figure_preset("fig4a")
    cavity = base.cavity_config()
    gap = base.gap()
    taus = np.linspace(0.0, base.tau_grid.stop, n_tau)
    grid = compute_grid(cavity, base.trajectory_obj(), gap, taus, modes=range(1, cavity.j_max + 1))
    violations = 0
    worst = np.inf
    for p in np.linspace(0.01, 0.49, n):
        det = DetectorState(float(p), gap)
        for T_R in np.geomspace(1e-2, 1e2, n):
            fld = FieldState.thermal(float(T_R))
            for i in range(n_tau):
                ints = grid.at(i)
                rep = entropy_and_heat(det, fld, corrections(det, fld, ints, 0.01, warn=False), ints)
                worst = min(worst, landauer_residual(rep) / (bound_tolerance(rep) / BOUND_RTOL))
                violations += not bound_satisfied(rep)
    return CheckResult(f"Landauer bound on {n}x{n} (p, T_R) grid", violations == 0,
                       f"{violations} violations over {n * n * n_tau} points, "
                       f"min residual/scale {worst:.2e}", is_bound=True)


def run_checks(include_accelerated: bool = True) -> list[CheckResult]:
    presets = ["fig1", "fig4a", "fig4b"] + (["fig2"] if include_accelerated else [])
    results = [check_ladder(), check_trace_defect(), check_thermal_limit()]
    results += [check_preset_bound(name) for name in presets]
    results.append(check_bound_grid())
    return results
