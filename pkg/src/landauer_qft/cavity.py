"""
One-dimensional cavity: spectrum, mode functions and mode-sum truncation.

Modes are normalized as ``N_j = 1 / sqrt(omega_j * L)`` for both boundary
conditions. Periodic modes come in +/- momentum pairs: indices ``(2n-1, 2n)``
carry ``k = +2 pi n / L`` and ``k = -2 pi n / L``; the zero mode is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

Boundary = Literal["dirichlet", "periodic"]

HARD_MODE_CAP = 4096
CUTOFF_FLOOR = 64
NORMALIZATION_TAG = "N_j = 1/sqrt(omega_j * L)"


class CutoffNotConverged(RuntimeError):
    """The mode-sum tail test failed at the hard cap."""

    def __init__(self, j_max: int, tail_change: float, tolerance: float):
        self.j_max = j_max
        self.tail_change = tail_change
        self.tolerance = tolerance
        super().__init__(
            f"mode sum not converged at j_max={j_max}: relative octave change "
            f"{tail_change:.3e} > tail tolerance {tolerance:.3e}"
        )


@dataclass(frozen=True)
class CavityConfig:
    length: float
    boundary: Boundary = "dirichlet"
    j_max: int = HARD_MODE_CAP
    tail_tolerance: float = 1e-2

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"cavity length must be positive, got {self.length}")
        if self.boundary not in ("dirichlet", "periodic"):
            raise ValueError(f"unknown boundary condition {self.boundary!r}")
        if not 1 <= self.j_max <= HARD_MODE_CAP:
            raise ValueError(f"j_max must lie in [1, {HARD_MODE_CAP}], got {self.j_max}")
        if not 0 < self.tail_tolerance <= 1:
            raise ValueError(f"tail tolerance must lie in (0, 1], got {self.tail_tolerance}")


@dataclass(frozen=True)
class Mode:
    index: int
    wavenumber: float
    omega: float
    norm: float
    boundary: Boundary
    length: float

    def profile(self, x):
        """Mode function at ``x`` (no domain check; see :func:`mode_function`)."""
        if self.boundary == "dirichlet":
            return self.norm * _sin_pi(self.index * np.asarray(x, dtype=float) / self.length)
        return self.norm * np.exp(1j * self.wavenumber * np.asarray(x, dtype=float))


def _sin_pi(q):
    """``sin(pi q)`` reduced to ``[-1, 1]`` first, so integer ``q`` gives exactly 0."""
    return np.sin(math.pi * (q - 2.0 * np.round(0.5 * q)))


def _check_index(j):
    if isinstance(j, (bool, np.bool_)) or int(j) != j or j < 1:
        raise ValueError(f"mode index must be a positive integer, got {j!r}")
    return int(j)


def wavenumbers(n_modes: int, cavity: CavityConfig) -> np.ndarray:
    """Signed wavenumbers k_j for j = 1..n_modes."""
    j = np.arange(1, n_modes + 1)
    if cavity.boundary == "dirichlet":
        return j * (math.pi / cavity.length)
    n = (j + 1) // 2
    sign = np.where(j % 2 == 1, 1.0, -1.0)
    return sign * n * (2 * math.pi / cavity.length)


def mode_frequency(j: int, cavity: CavityConfig) -> float:
    j = _check_index(j)
    if cavity.boundary == "dirichlet":
        return j * math.pi / cavity.length
    return ((j + 1) // 2) * 2 * math.pi / cavity.length


def mode(j: int, cavity: CavityConfig) -> Mode:
    j = _check_index(j)
    omega = mode_frequency(j, cavity)
    k = omega if (cavity.boundary == "dirichlet" or j % 2 == 1) else -omega
    return Mode(j, k, omega, 1.0 / math.sqrt(omega * cavity.length), cavity.boundary, cavity.length)


def mode_function(j: int, x: float, cavity: CavityConfig) -> complex:
    """Amplitude ``u_j(x)``; Dirichlet positions must lie on ``[0, L]``."""
    if cavity.boundary == "dirichlet" and not 0.0 <= x <= cavity.length:
        raise ValueError(f"position {x} outside the Dirichlet cavity [0, {cavity.length}]")
    return complex(mode(j, cavity).profile(x))


@dataclass(frozen=True)
class Spectrum:
    """Frequencies, signed wavenumbers and norms for modes 1..n as arrays."""

    wavenumber: np.ndarray
    omega: np.ndarray
    norm: np.ndarray
    boundary: Boundary
    length: float

    def __len__(self):
        return len(self.omega)

    def profile(self, x):
        x = np.asarray(x, dtype=float)[..., None]
        if self.boundary == "dirichlet":
            j = np.arange(1, len(self.omega) + 1)
            return self.norm * _sin_pi(j * x / self.length)
        return self.norm * np.exp(1j * self.wavenumber * x)


def spectrum(n_modes: int, cavity: CavityConfig) -> Spectrum:
    k = wavenumbers(n_modes, cavity)
    omega = np.abs(k)
    return Spectrum(k, omega, 1.0 / np.sqrt(omega * cavity.length), cavity.boundary, cavity.length)


def nearest_mode_index(omega: float, cavity: CavityConfig) -> int:
    """Index of the mode whose frequency is closest to ``omega`` (at least 1)."""
    spacing = math.pi / cavity.length if cavity.boundary == "dirichlet" else 2 * math.pi / cavity.length
    n = max(1, round(omega / spacing))
    return n if cavity.boundary == "dirichlet" else 2 * n - 1


def cutoff_ladder(cavity: CavityConfig, resonant_index: int) -> list[int]:
    """Candidate cutoffs J0, 2 J0, ... whose octave extension fits under the cap."""
    resonant_index = _check_index(resonant_index)
    start = max(4 * resonant_index, CUTOFF_FLOOR)
    ladder = []
    j = start
    while 2 * j <= cavity.j_max:
        ladder.append(j)
        j *= 2
    return ladder


def octave_change(contributions: np.ndarray, j: int) -> np.ndarray:
    """
    Relative change of each aggregate when the sum over modes 1..j is extended
    to 1..2j. ``contributions`` holds per-mode terms on its last axis; the change
    is measured against the sum of absolute terms, so signed aggregates that
    cross zero do not blow up the ratio.
    """
    c = np.asarray(contributions)
    tail = np.abs(c[..., j:2 * j].sum(axis=-1))
    scale = np.abs(c[..., :2 * j]).sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(scale > 0, tail / np.where(scale > 0, scale, 1.0), 0.0)


def effective_cutoff(
    cavity: CavityConfig,
    resonant_index: int,
    contributions: Callable[[int], np.ndarray],
) -> int:
    """
    Smallest cutoff on the octave ladder whose extension by one more octave
    changes every aggregate by at most the tail tolerance.

    Parameters
    ----------
    cavity : CavityConfig
    resonant_index : int
        Mode the detector is tuned to; sets the floor ``max(4 r, 64)``.
    contributions : callable
        ``contributions(n)`` returns per-mode terms of every aggregate for
        modes ``1..n``, shape ``(n_aggregates, n)``.

    Raises
    ------
    CutoffNotConverged
        When the last octave that fits under ``cavity.j_max`` still fails.
    """
    ladder = cutoff_ladder(cavity, resonant_index)
    if not ladder:
        raise CutoffNotConverged(cavity.j_max, math.inf, cavity.tail_tolerance)
    change = math.inf
    for j in ladder:
        change = float(np.max(octave_change(contributions(2 * j), j)))
        if change <= cavity.tail_tolerance:
            return j
    raise CutoffNotConverged(cavity.j_max, change, cavity.tail_tolerance)
