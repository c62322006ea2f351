"""
Response integrals

    I_{+/-, j}(T) = int_0^T dtau exp(i [+/- Omega_d tau + omega_j t(tau)]) u_j[x(tau)]

for a rectangular switching window on [0, T].

Static detectors use the exact antiderivative ``u (e^{i D T} - 1) / (i D)``,
written as ``u T e^{i D T/2} sinc(D T / 2)`` so nothing cancels near
resonance, with ``D = +/- Omega_d + omega_j``.

Accelerated detectors go through quadrature. Along the hyperbola the null
coordinates are ``t + x = (e^{a tau} - 1)/a`` and ``t - x = (1 - e^{-a tau})/a``,
so ``e^{i omega t} sin(k x)`` splits into a fast piece with phase
``k (e^{a tau} - 1)/a`` and a slow piece with phase ``k (1 - e^{-a tau})/a``.
Both are integrated with phase-keyed Gauss-Kronrod panels; for ``k >> a`` the
fast piece is instead summed from its integration-by-parts expansion, whose
remainder has the rigorous bound ``|(alpha)_M| a^{M-1} / (M k^M)`` with
``alpha = +/- i Omega_d / a - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .cavity import CavityConfig, Mode, mode as make_mode, spectrum
from .trajectories import Static, Trajectory, UniformAcceleration, check_inside, max_proper_time

DEFAULT_TOLERANCE = 1e-10
RESONANCE_EPS = 1e-9
_MAX_SERIES_TERMS = 120


class QuadratureNotConverged(RuntimeError):
    pass


@dataclass(frozen=True)
class CouplingWindow:
    """Coupling ``lambda`` switched on with unit strength over ``[0, duration]``."""

    coupling: float
    duration: float

    def __post_init__(self):
        if not self.coupling > 0:
            raise ValueError(f"coupling must be positive, got {self.coupling}")
        if not self.duration >= 0:
            raise ValueError(f"interaction duration must be non-negative, got {self.duration}")

    def switching(self, tau):
        tau = np.asarray(tau, dtype=float)
        return ((tau >= 0) & (tau <= self.duration)).astype(float)


@dataclass
class ModeIntegrals:
    """
    Response integrals for modes ``1..J`` along the last axis.

    A leading axis, when present, indexes the interaction times in ``taus``.
    """

    omega_d: float
    omegas: np.ndarray
    i_plus: np.ndarray
    i_minus: np.ndarray
    err_plus: np.ndarray
    err_minus: np.ndarray
    method: tuple
    tolerance: float
    taus: np.ndarray | None = None
    converged: bool = True
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        shapes = {self.i_plus.shape, self.i_minus.shape, self.err_plus.shape, self.err_minus.shape}
        if len(shapes) != 1:
            raise ValueError(f"integral and error arrays disagree in shape: {shapes}")
        if self.i_plus.shape[-1] != len(self.omegas) or len(self.method) != len(self.omegas):
            raise ValueError("per-mode arrays must all have one entry per mode")

    @property
    def n_modes(self) -> int:
        return len(self.omegas)

    @property
    def plus_sq(self):
        return np.abs(self.i_plus) ** 2

    @property
    def minus_sq(self):
        return np.abs(self.i_minus) ** 2

    @property
    def max_error(self):
        return np.maximum(self.err_plus, self.err_minus).max(axis=-1, initial=0.0)

    def truncate(self, n_modes: int) -> "ModeIntegrals":
        return ModeIntegrals(
            self.omega_d, self.omegas[:n_modes], self.i_plus[..., :n_modes],
            self.i_minus[..., :n_modes], self.err_plus[..., :n_modes],
            self.err_minus[..., :n_modes], self.method[:n_modes], self.tolerance,
            self.taus, self.converged, dict(self.notes),
        )

    def at(self, row: int) -> "ModeIntegrals":
        """Single-time slice of a gridded set."""
        if self.i_plus.ndim != 2:
            raise ValueError("integrals are not on a time grid")
        return ModeIntegrals(
            self.omega_d, self.omegas, self.i_plus[row], self.i_minus[row],
            self.err_plus[row], self.err_minus[row], self.method, self.tolerance,
            None if self.taus is None else self.taus[row:row + 1], self.converged,
            dict(self.notes),
        )

    def concat(self, other: "ModeIntegrals") -> "ModeIntegrals":
        """Append the modes of ``other`` (same times) after ours."""
        return ModeIntegrals(
            self.omega_d, np.concatenate([self.omegas, other.omegas]),
            np.concatenate([self.i_plus, other.i_plus], axis=-1),
            np.concatenate([self.i_minus, other.i_minus], axis=-1),
            np.concatenate([self.err_plus, other.err_plus], axis=-1),
            np.concatenate([self.err_minus, other.err_minus], axis=-1),
            self.method + other.method, self.tolerance, self.taus,
            self.converged and other.converged,
            {k: self.notes.get(k, 0) + other.notes.get(k, 0)
             for k in set(self.notes) | set(other.notes)},
        )


def _sign(sign) -> int:
    if sign in (+1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be + or -, got {sign!r}")


def _static_factor(delta, T, eps):
    """(e^{i D T} - 1)/(i D), with the second-order series for |D| <= eps."""
    delta = np.asarray(delta, dtype=float)
    T = np.asarray(T, dtype=float)
    dT = delta * T
    closed = T * np.exp(0.5j * dT) * np.sinc(dT / (2 * math.pi))
    series = T * (1 + 0.5j * dT - dT * dT / 6)
    return np.where(np.abs(delta) <= eps, series, closed)


def integral_static(sign, mode: Mode, x0: float, omega_d: float, T: float) -> complex:
    if T < 0:
        raise ValueError(f"interaction duration must be non-negative, got {T}")
    s = _sign(sign)
    delta = s * omega_d + mode.omega
    return complex(mode.profile(x0) * _static_factor(delta, T, RESONANCE_EPS * mode.omega))


def _static_grid(cavity, x0, omega_d, taus, modes):
    sp = spectrum(modes.stop - 1, cavity)
    sl = slice(modes.start - 1, modes.stop - 1)
    omega, u = sp.omega[sl], sp.profile(x0)[sl]
    T = np.asarray(taus, dtype=float)[:, None]
    eps = RESONANCE_EPS * omega
    ip = u * _static_factor(omega + omega_d, T, eps)
    im = u * _static_factor(omega - omega_d, T, eps)
    zeros = np.zeros(ip.shape)
    return omega, ip, im, zeros, zeros.copy(), ("closed-form",) * len(omega), {}


# --- accelerated worldline: null-coordinate pieces --------------------------

def _series_terms(alpha_abs_steps, a, k, tol):
    """Smallest number of expansion terms whose remainder bound is <= tol."""
    log_bound = -math.log(a)
    best = (math.inf, None)
    for m, step in enumerate(alpha_abs_steps, start=1):
        log_bound += math.log(step) + math.log(a / k)
        b = log_bound - math.log(m)
        if b < best[0]:
            best = (b, m)
        if b <= math.log(tol):
            return m, math.exp(b)
    return None, math.exp(best[0])


def _fast_piece_series(k, a, omega_d, taus, tol):
    """
    Fast null piece ``int_0^T exp(i[+/- Omega tau + k (e^{a tau}-1)/a]) dtau``
    from its endpoint expansion; ``None`` when the bound cannot reach ``tol``.
    """
    steps = [abs(complex(-1 - m, omega_d / a)) for m in range(_MAX_SERIES_TERMS)]
    n_terms, bound = _series_terms(steps, a, k, tol)
    if n_terms is None:
        return None
    T = np.concatenate([[0.0], np.asarray(taus, dtype=float)])
    decay = np.exp(-a * T)
    z = 1j * a * decay / k
    out = []
    for s in (1, -1):
        alpha = complex(-1.0, s * omega_d / a)
        coeff = 1.0 + 0j
        acc = np.ones_like(z)
        zm = np.ones_like(z)
        for m in range(1, n_terms):
            coeff *= alpha - (m - 1)
            zm = zm * z
            acc = acc + coeff * zm
        phase = k * np.expm1(a * T) / a + s * omega_d * T
        F = np.exp(1j * phase) * decay / (1j * k) * acc
        out.append(F[1:] - F[0])
    return np.stack(out), np.full(len(taus), bound)


def _null_piece_panels(k, a, omega_d, taus, tol, fast, max_panels):
    if fast:
        def null(tau):
            return k * np.expm1(a * tau) / a
    else:
        def null(tau):
            return -k * np.expm1(-a * tau) / a

    def f(tau):
        base = null(tau)
        return np.stack([np.exp(1j * (base + omega_d * tau)), np.exp(1j * (base - omega_d * tau))])

    def psi(tau):
        return abs(omega_d) * tau + null(tau)

    return quadrature.cumulative(f, taus, psi, tol, max_panels)


def _fast_piece(k, a, omega_d, taus, tol, method, max_panels):
    if method in ("auto", "asymptotic"):
        res = _fast_piece_series(k, a, omega_d, taus, tol)
        if res is not None:
            return res[0], res[1], True, "asymptotic"
        if method == "asymptotic":
            raise QuadratureNotConverged(f"endpoint expansion cannot reach tol={tol} for k={k}, a={a}")
    vals, errs, ok = _null_piece_panels(k, a, omega_d, taus, tol, True, max_panels)
    return vals, errs, ok, "panels"


def _accelerated_mode(mode: Mode, a, omega_d, taus, tol, method, max_panels):
    k = mode.omega
    piece_tol = tol / mode.norm
    counts = {"asymptotic": 0, "panels": 0}
    if mode.boundary == "periodic" and mode.wavenumber < 0:
        vals, errs, ok = _null_piece_panels(k, a, omega_d, taus, piece_tol, False, max_panels)
        counts["panels"] += 1
        return mode.norm * vals, mode.norm * errs, ok, counts
    fast, ferr, fok, route = _fast_piece(k, a, omega_d, taus, piece_tol, method, max_panels)
    counts[route] += 1
    if mode.boundary == "periodic":
        return mode.norm * fast, mode.norm * ferr, fok, counts
    slow, serr, sok, = _null_piece_panels(k, a, omega_d, taus, piece_tol, False, max_panels)
    counts["panels"] += 1
    vals = mode.norm * (fast - slow) / 2j
    return vals, 0.5 * mode.norm * (ferr + serr), fok and sok, counts


def _direct_panels(mode: Mode, trajectory, omega_d, taus, tol, max_panels):
    x_start = trajectory.coordinates(0.0)[1]

    def f(tau):
        t, x = trajectory.coordinates(tau)
        base = np.exp(1j * mode.omega * t) * mode.profile(x)
        return np.stack([base * np.exp(1j * omega_d * tau), base * np.exp(-1j * omega_d * tau)])

    def psi(tau):
        t, x = trajectory.coordinates(tau)
        return abs(omega_d) * tau + mode.omega * t + abs(mode.wavenumber) * np.abs(x - x_start)

    return quadrature.cumulative(f, taus, psi, tol, max_panels)


def integral_quadrature(
    sign,
    mode: Mode,
    trajectory: Trajectory,
    omega_d: float,
    T: float,
    tolerance: float = DEFAULT_TOLERANCE,
    cavity: CavityConfig | None = None,
    method: str = "auto",
    max_panels: int = quadrature.DEFAULT_MAX_PANELS,
):
    """
    ``(value, error_bound)`` for one response integral by quadrature.

    ``method="panels"`` integrates the raw integrand in proper time;
    ``"auto"`` uses the null-coordinate split for accelerated worldlines.

    Raises
    ------
    QuadratureNotConverged
        If the error bound still exceeds ``tolerance`` at the panel cap.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    if T < 0:
        raise ValueError(f"interaction duration must be non-negative, got {T}")
    if cavity is not None:
        check_inside(trajectory, T, cavity)
    s = _sign(sign)
    if T == 0:
        return 0j, 0.0
    taus = np.array([float(T)])
    if isinstance(trajectory, UniformAcceleration) and method != "panels":
        vals, errs, ok, _ = _accelerated_mode(
            mode, trajectory.acceleration, omega_d, taus, tolerance, method, max_panels)
    else:
        vals, errs, ok = _direct_panels(mode, trajectory, omega_d, taus, tolerance, max_panels)
    value = complex(vals[0 if s == 1 else 1, 0])
    err = float(errs[0])
    if not ok or err > tolerance:
        raise QuadratureNotConverged(
            f"mode {mode.index}: error bound {err:.3e} exceeds tolerance {tolerance:.3e}")
    return value, err


def compute_grid(
    cavity: CavityConfig,
    trajectory: Trajectory,
    omega_d: float,
    taus,
    tolerance: float = DEFAULT_TOLERANCE,
    modes: range | None = None,
    max_panels: int = quadrature.DEFAULT_MAX_PANELS,
) -> ModeIntegrals:
    """
    Integrals for every mode in ``modes`` (default ``1..64``) at each
    interaction time of the sorted grid ``taus``.

    Quadrature non-convergence is recorded on the result, not raised.
    """
    taus = np.asarray(taus, dtype=float)
    if taus.ndim != 1 or np.any(taus < 0) or np.any(np.diff(taus) < 0):
        raise ValueError("interaction times must be a sorted, non-negative 1-d grid")
    modes = modes or range(1, 65)
    if len(taus):
        check_inside(trajectory, float(taus[-1]), cavity)
    if isinstance(trajectory, Static):
        omega, ip, im, ep, em, method, notes = _static_grid(
            cavity, trajectory.position, omega_d, taus, modes)
        return ModeIntegrals(omega_d, omega, ip, im, ep, em, method, tolerance, taus, True, notes)

    a = trajectory.acceleration
    n = len(modes)
    ip = np.zeros((len(taus), n), dtype=complex)
    im = np.zeros_like(ip)
    ep = np.zeros(ip.shape)
    converged = True
    notes = {"asymptotic": 0, "panels": 0}
    omegas = np.empty(n)
    for col, j in enumerate(modes):
        m = make_mode(j, cavity)
        omegas[col] = m.omega
        vals, errs, ok, counts = _accelerated_mode(m, a, omega_d, taus, tolerance, "auto", max_panels)
        ip[:, col], im[:, col], ep[:, col] = vals[0], vals[1], errs
        converged = converged and ok and bool(np.all(errs <= tolerance))
        for key, c in counts.items():
            notes[key] += c
    return ModeIntegrals(omega_d, omegas, ip, im, ep, ep.copy(), ("quadrature",) * n,
                         tolerance, taus, converged, notes)


def compute_all(
    cavity: CavityConfig,
    trajectory: Trajectory,
    omega_d: float,
    window: CouplingWindow,
    tolerance: float = DEFAULT_TOLERANCE,
    n_modes: int = 64,
) -> ModeIntegrals:
    """
    Integrals for modes ``1..n_modes`` at the window's duration.

    Raises ``CavityExitError`` when the window outlasts the worldline's stay
    inside the cavity.
    """
    if window.duration > max_proper_time(trajectory, cavity):
        check_inside(trajectory, window.duration, cavity)
    grid = compute_grid(cavity, trajectory, omega_d, [window.duration], tolerance,
                        range(1, n_modes + 1))
    return grid.at(0)
