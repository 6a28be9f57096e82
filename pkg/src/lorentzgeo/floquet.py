"""Jacobi fields along the node orbits of the standing wave, and Floquet theory.

Along the spatially constant orbits ``x = n pi / omega`` (with ``P_z = 0``)
the x-component of the Jacobi field obeys the Hill equation

    d2J/dT2 + c(T) J = 0,   c(T) = (2 pi eta sin 2 pi T)^2 / (1 + P_y^2)

in optical cycles ``T = omega t / 2 pi``. The coefficient has period 1/2,
so the monodromy matrix is the fundamental matrix at ``T = 1/2`` and the
characteristic function is ``phi = tr(M) / 2``; ``|phi| < 1`` iff every
solution is bounded.

Growth rates are quoted per optical cycle: ``mu = 2 ln |rho|`` for the
dominant multiplier ``rho``, because one optical cycle spans two periods.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import integrate
from ._validation import check_nonnegative, check_pair, check_positive
from .exceptions import DegenerateMonodromy, UnsupportedOrbitClass, WrongModelKind
from .fields import FieldKind, ScalarField2D

PERIOD = 0.5
MONODROMY_RTOL = 1e-12
MONODROMY_ATOL = 1e-14
PARABOLIC_TOL = 1e-9
SCAN_CHUNK = 256
THREADS_ENV = "LORENTZGEO_THREADS"
TWO_SQRT2_OVER_PI = 2 * np.sqrt(2) / np.pi  # lower bound on the first zone edge


@dataclass(frozen=True)
class HillSystem:
    """``J'' + c(T) J = 0`` with ``c(T) = (2 pi eta sin 2 pi T)^2 / (1 + P_y^2)``."""

    eta: float
    p_y: float = 0.0
    period: float = PERIOD

    def coefficient(self, T):
        return (2 * np.pi * self.eta * np.sin(2 * np.pi * np.asarray(T))) ** 2 / (1.0 + self.p_y**2)

    def rhs(self, T, y):
        return _hill_rhs(T, y, self.eta**2 / (1.0 + self.p_y**2))


def _hill_rhs(T, y, strength):
    """RHS for states shaped ``(2k, ...)``: pairs ``(J, dJ/dT)`` stacked on axis 0."""
    c = strength * (2 * np.pi * np.sin(2 * np.pi * T)) ** 2
    out = np.empty_like(y)
    out[0::2] = y[1::2]
    out[1::2] = -c * y[0::2]
    return out


@dataclass(frozen=True)
class MonodromyResult:
    """Fundamental matrix at one period and the derived Floquet data.

    ``matrix`` is ``[[J1, J2], [J1', J2']]`` at ``T = 1/2`` for the solutions
    with ``J1(0) = J2'(0) = 1``, ``J1'(0) = J2(0) = 0``.
    """

    eta: float
    p_y: float
    matrix: np.ndarray
    phi: float
    multipliers: tuple
    mu: float

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    @property
    def stable(self) -> bool:
        return abs(self.phi) < 1.0


def _multipliers(phi):
    root = np.sqrt(complex(phi * phi - 1.0))
    return complex(phi + root), complex(phi - root)


def floquet_exponent(phi: float) -> float:
    """Growth rate per optical cycle, ``2 ln(|phi| + sqrt(phi^2 - 1))``, or 0 if ``|phi| <= 1``."""
    a = abs(phi)
    return 2.0 * float(np.log(a + np.sqrt(a * a - 1.0))) if a > 1.0 else 0.0


def _fundamental_batch(strength, T_end, rtol, atol, T_eval=None):
    """Integrate both fundamental solutions for every entry of ``strength``."""
    strength = np.asarray(strength, dtype=float)
    y0 = np.zeros((4,) + strength.shape)
    y0[0] = 1.0
    y0[3] = 1.0
    return integrate.solve(lambda T, y: _hill_rhs(T, y, strength), (0.0, T_end), y0, t_eval=T_eval, rtol=rtol, atol=atol)


def monodromy_batch(etas, p_y: float = 0.0, tol: float = MONODROMY_RTOL):
    """Monodromy matrices for many ``eta`` at once.

    Returns ``(matrices, phi)`` with shapes ``(n, 2, 2)`` and ``(n,)``. The
    whole batch shares one adaptive step sequence, so results for a given
    eta depend (within tolerance) on the other members of the batch.
    """
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    sol = _fundamental_batch(etas**2 / (1.0 + p_y**2), PERIOD, tol, MONODROMY_ATOL * tol / MONODROMY_RTOL)
    y = sol.y[-1]
    M = np.empty((etas.size, 2, 2))
    M[:, 0, 0], M[:, 1, 0], M[:, 0, 1], M[:, 1, 1] = y[0], y[1], y[2], y[3]
    return M, 0.5 * (M[:, 0, 0] + M[:, 1, 1])


def monodromy(eta: float, p_y: float = 0.0, tol: float = MONODROMY_RTOL) -> MonodromyResult:
    """Characteristic function and Floquet data of the Hill equation at ``eta``.

    Raises
    ------
    StepFailure
        Propagated from the integrator.
    """
    check_nonnegative(eta, "eta")
    M, phi = monodromy_batch([eta], p_y, tol)
    phi = float(phi[0])
    return MonodromyResult(float(eta), float(p_y), M[0], phi, _multipliers(phi), floquet_exponent(phi))


def characteristic_function(etas, p_y: float = 0.0, tol: float = MONODROMY_RTOL, n_jobs: int | None = None):
    """``phi(eta)`` over an array of eta, evaluated in fixed-size chunks.

    Chunks are the same whatever ``n_jobs`` is, so the output does not depend
    on the thread count. ``n_jobs`` defaults to ``$LORENTZGEO_THREADS`` or 1.
    """
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    if n_jobs is None:
        n_jobs = int(os.environ.get(THREADS_ENV, "1") or 1)
    chunks = [etas[i : i + SCAN_CHUNK] for i in range(0, etas.size, SCAN_CHUNK)]
    work = lambda chunk: monodromy_batch(chunk, p_y, tol)[1]  # noqa: E731
    if n_jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return np.concatenate(parts) if parts else np.empty(0)


@dataclass(frozen=True)
class Zone:
    kind: str  # "stable" or "unstable"
    left: float
    right: float
    right_open_ended: bool = False  # zone continues past the scanned range

    @property
    def midpoint(self):
        return 0.5 * (self.left + self.right)


@dataclass(frozen=True)
class StabilityZones:
    """Alternating stable/unstable eta intervals found by a scan."""

    zones: list
    boundaries: list
    eta_grid: np.ndarray = field(repr=False)
    phi_grid: np.ndarray = field(repr=False)

    @property
    def stable(self):
        return [z for z in self.zones if z.kind == "stable"]

    @property
    def unstable(self):
        return [z for z in self.zones if z.kind == "unstable"]

    @property
    def first_boundary(self):
        return self.boundaries[0] if self.boundaries else None


def _refine_boundary(lo, hi, lo_stable, p_y, tol, refine_tol):
    while hi - lo > refine_tol:
        mid = 0.5 * (lo + hi)
        if (abs(monodromy(mid, p_y, tol).phi) < 1.0) == lo_stable:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_zones(
    eta_max: float,
    resolution: float = 1e-3,
    refine_tol: float = 1e-8,
    p_y: float = 0.0,
    tol: float = MONODROMY_RTOL,
    n_jobs: int | None = None,
    eta_min: float = 0.0,
) -> StabilityZones:
    """Locate stability and instability zones on ``[0, eta_max]``.

    ``phi`` is sampled every ``resolution``; each change of sign of
    ``|phi| - 1`` between neighbouring samples is refined by bisection to
    ``refine_tol``. Zones narrower than the grid spacing can be missed.
    ``eta = 0`` (where ``phi = 1``) opens the first stability zone. With
    ``eta_min > 0`` the scan starts there and the first zone takes the kind
    found at ``eta_min``.
    """
    check_positive(eta_max, "eta_max")
    check_positive(resolution, "resolution")
    check_nonnegative(eta_min, "eta_min")
    if eta_min >= eta_max:
        raise ValueError("eta_min must be below eta_max")
    n = int(np.floor((eta_max - eta_min) / resolution + 1e-9))
    grid = eta_min + resolution * np.arange(n + 1)
    if eta_max - grid[-1] > 1e-12:
        grid = np.append(grid, eta_max)
    phi = characteristic_function(grid, p_y, tol, n_jobs)
    stable = np.abs(phi) < 1.0
    if eta_min == 0.0:
        stable[0] = True

    boundaries = []
    for i in np.flatnonzero(stable[1:] != stable[:-1]):
        boundaries.append(_refine_boundary(grid[i], grid[i + 1], bool(stable[i]), p_y, tol, refine_tol))

    zones = []
    edges = [float(grid[0])] + boundaries + [float(grid[-1])]
    kind = "stable" if stable[0] else "unstable"
    for k in range(len(edges) - 1):
        zones.append(Zone(kind, float(edges[k]), float(edges[k + 1]), k == len(edges) - 2))
        kind = "unstable" if kind == "stable" else "stable"
    return StabilityZones(zones, [float(b) for b in boundaries], grid, phi)


@dataclass(frozen=True)
class FloquetModes:
    """Bloch-Floquet factorisation ``J_i(T) = e^{+-nu T} K_i(T)`` over one optical cycle.

    In the hyperbolic case ``nu = mu`` (real) and ``K_i`` are real; ``K_i``
    has period 1/2 when the multipliers are positive and period 1 (sign flip
    every half cycle) when they are negative. In the elliptic case ``nu`` is
    imaginary, ``mu = 0`` and the factors are complex with period 1/2.
    """

    T: np.ndarray
    K1: np.ndarray
    K2: np.ndarray
    exponent: complex  # per optical cycle
    mu: float
    multipliers: tuple
    eigenvectors: np.ndarray
    hyperbolic: bool

    @property
    def half_cycle_exponents(self):
        """``(+mu/2, -mu/2)``: exponents per half cycle, i.e. per period."""
        return 0.5 * self.mu, -0.5 * self.mu


def floquet_modes(result: MonodromyResult, samples_per_cycle: int = 256, tol: float = MONODROMY_RTOL) -> FloquetModes:
    """Eigen-decompose the monodromy matrix and sample the periodic factors.

    Raises
    ------
    DegenerateMonodromy
        If ``| |phi| - 1 | < 1e-9`` (parabolic case).
    """
    if abs(abs(result.phi) - 1.0) < PARABOLIC_TOL:
        raise DegenerateMonodromy(f"|phi| = 1 within {PARABOLIC_TOL:g} at eta = {result.eta}")
    evals, evecs = np.linalg.eig(result.matrix.astype(complex))
    order = np.argsort(-np.abs(evals))
    evals, evecs = evals[order], evecs[:, order]
    hyperbolic = abs(result.phi) > 1.0
    if hyperbolic:
        evals, evecs = evals.real, evecs.real
        exponent = complex(result.mu)
    else:
        # multiplier e^{i theta} per half cycle
        exponent = complex(0.0, 2.0 * float(np.angle(evals[0])))

    T = np.linspace(0.0, 1.0, samples_per_cycle + 1)
    sol = _fundamental_batch(np.array([result.eta**2 / (1.0 + result.p_y**2)]), 1.0, tol, MONODROMY_ATOL, T_eval=T)
    J1, J2 = sol.y[:, 0, 0], sol.y[:, 2, 0]
    modes = [evecs[0, i] * J1 + evecs[1, i] * J2 for i in range(2)]
    K1 = np.exp(-exponent * T) * modes[0]
    K2 = np.exp(exponent * T) * modes[1]
    if hyperbolic:
        K1, K2 = K1.real, K2.real
    return FloquetModes(T, K1, K2, exponent, result.mu, tuple(evals), evecs, hyperbolic)


@dataclass(frozen=True)
class JacobiSeries:
    T: np.ndarray
    J: np.ndarray
    dJ: np.ndarray


def _uniform_T(T_end, samples_per_cycle):
    n = int(round(T_end * samples_per_cycle))
    if n > 0 and abs(n / samples_per_cycle - T_end) < 1e-12:
        return np.arange(n + 1) / samples_per_cycle
    grid = np.arange(int(np.floor(T_end * samples_per_cycle)) + 1) / samples_per_cycle
    return np.append(grid, T_end) if T_end > grid[-1] else grid


def integrate_jacobi(
    eta: float,
    p_y: float = 0.0,
    initial=(1.0, 0.0),
    T_end: float = 10.0,
    samples_per_cycle: int = 256,
    tol: float = MONODROMY_RTOL,
) -> JacobiSeries:
    """Solve the Hill equation from ``(J, dJ/dT)`` at ``T = 0`` to ``T_end``."""
    check_nonnegative(eta, "eta")
    j0 = check_pair(initial, "initial")
    T = _uniform_T(T_end, samples_per_cycle)
    hill = HillSystem(eta, p_y)
    sol = integrate.solve(hill.rhs, (0.0, float(T_end)), np.array(j0), t_eval=T, rtol=tol, atol=MONODROMY_ATOL)
    return JacobiSeries(T, sol.y[:, 0], sol.y[:, 1])


def count_sign_changes(values) -> int:
    s = np.sign(np.asarray(values))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


# -- Jacobi equation along a node orbit, in the three parametrisations --------

PARAMETRIZATIONS = ("lab", "proper", "affine")


@dataclass(frozen=True)
class JacobiSystem:
    """Linear ODE ``J'' + damping(p) J' + stiffness(p) J = 0`` for ``J = (J^t, J^x)``.

    ``p`` is the chosen parameter (lab time ``t``, proper time ``tau`` or
    affine ``s``), starting at 0 where the lab time is ``t0``; ``lab_time(p)``
    maps it back to ``t``.
    """

    parametrization: str
    orbit_x: float
    damping: Callable
    stiffness: Callable
    lab_time: Callable

    def rhs(self, p, state):
        J, dJ = state[:2], state[2:]
        return np.concatenate([dJ, -self.damping(p) * dJ - self.stiffness(p) @ J])


def jacobi_equation_on_orbit(field: ScalarField2D, orbit_x: float, parametrization: str = "lab", t0: float = 0.0) -> JacobiSystem:
    """Jacobi equations along the spatially constant orbit at ``x = orbit_x``.

    Only node orbits ``x = n pi / omega`` of the standing wave with
    ``P_z = 0`` are supported. On them ``sigma`` is constant in time, so

    * lab time:    J'' + sigma_t J' + sigma_AB J = 0
    * proper time: J'' + e^{2 sigma} sigma_AB J = 0,   dt/dtau = e^{sigma}
    * affine:      J'' + 2 dsigma/ds J' + e^{-2 sigma} sigma_AB J = 0,  dt/ds = e^{-sigma}

    Raises
    ------
    UnsupportedOrbitClass
        For the antinode orbits ``x = (n + 1/2) pi / omega`` or any other x.
    """
    if field.model.kind is not FieldKind.STANDING_WAVE_LINEAR:
        raise WrongModelKind("spatially constant orbits are defined for the standing wave")
    if field.momenta.p_z != 0.0:
        raise ValueError("spatially constant orbits require P_z = 0")
    if parametrization not in PARAMETRIZATIONS:
        raise ValueError(f"parametrization must be one of {PARAMETRIZATIONS}")
    w = field.model.params.omega
    k = orbit_x * w / np.pi
    if abs(k - round(k)) > 1e-9:
        if abs(k - 0.5 - round(k - 0.5)) <= 1e-9:
            raise UnsupportedOrbitClass("antinode orbits x = (n + 1/2) pi / omega are not supported")
        raise UnsupportedOrbitClass(f"x = {orbit_x} is not a spatially constant orbit")

    sigma0 = float(field.sigma(t0, orbit_x))  # constant along the orbit
    rate = {"lab": 1.0, "proper": np.exp(sigma0), "affine": np.exp(-sigma0)}[parametrization]
    scale = {"lab": 1.0, "proper": np.exp(2 * sigma0), "affine": np.exp(-2 * sigma0)}[parametrization]
    damp = {"lab": 1.0, "proper": 0.0, "affine": 2.0}[parametrization]

    def lab_time(p):
        return t0 + rate * np.asarray(p)

    def hessian(p):
        s = field.sigma_jet(lab_time(p), orbit_x)
        return s, np.array([[s.tt, s.tx], [s.tx, s.xx]])

    def damping(p):
        s, _ = hessian(p)
        return damp * float(s.t) * rate

    def stiffness(p):
        return scale * hessian(p)[1]

    return JacobiSystem(parametrization, float(orbit_x), damping, stiffness, lab_time)
