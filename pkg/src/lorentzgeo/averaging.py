"""Averaging, the Landau decomposition and the ponderomotive approximation.

Everything here concerns the Hill equation ``J'' = -4 pi^2 eta^2 sin^2(2 pi T) J``
(``P_y = 0``, ``T`` in optical cycles). Its Landau split ``J = X + xi`` obeys

    X''  = -2 pi^2 eta^2 (X + 2 sin^2(2 pi T) xi)
    xi'' =  2 pi^2 eta^2 cos(4 pi T) X

with ``xi(0) = xi'(0) = 0``. Scaled vectors used by the error bounds:

    J = (J^x, J^x' / (2 pi eta))
    K = (X, X' / (sqrt2 pi eta), xi, xi' / (sqrt2 pi eta))
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import integrate
from ._validation import check_nonnegative, check_pair
from .exceptions import DecompositionIdentityViolated, InsufficientData
from .floquet import MONODROMY_RTOL, _uniform_T

SQRT2 = np.sqrt(2.0)
EPSILONS = (0.1, 0.5, 1.0)
MIN_CYCLES = 20
MIN_FIT_CYCLES = 10
FIT_TOL_FRACTION = 0.05


def _sin_over(omega, T):
    """``sin(omega T) / omega`` with the ``omega -> 0`` limit ``T``."""
    return T * np.sinc(omega * T / np.pi)


def _scale(value):
    return value if value > 0 else 1.0


# -- closed forms ------------------------------------------------------------


@dataclass(frozen=True)
class AveragedJacobi:
    T: np.ndarray
    J1: np.ndarray
    J2: np.ndarray


def averaged_jacobi(eta: float, initial=(1.0, 0.0), T=0.0) -> AveragedJacobi:
    """Solution ``exp(2 pi eta Abar T) Jbar(0)`` of the averaged Jacobi system.

    ``initial`` holds the scaled components ``(Jbar_1, Jbar_2)`` at ``T = 0``;
    use :func:`jacobi_vector` to convert from ``(J^x, dJ^x/dT)``.
    """
    check_nonnegative(eta, "eta")
    j10, j20 = check_pair(initial, "initial")
    T = np.asarray(T, dtype=float)
    w = SQRT2 * np.pi * eta
    c, s = np.cos(w * T), np.sin(w * T)
    return AveragedJacobi(T, j10 * c + SQRT2 * j20 * s, -j10 * s / SQRT2 + j20 * c)


def jacobi_vector(eta: float, J, dJ):
    """Scaled Jacobi vector ``(J, dJ / (2 pi eta))``; unscaled when ``eta = 0``."""
    return np.asarray(J), np.asarray(dJ) / _scale(2 * np.pi * eta)


def averaged_landau(eta: float, initial=(1.0, 0.0), T=0.0) -> np.ndarray:
    """Averaged oscillation centre ``Xbar(T)`` from ``(X(0), dX/dT(0))``.

    The oscillatory components of the averaged system are pinned to zero, so
    ``Xbar`` coincides with the x-component of :func:`averaged_jacobi` for the
    same initial data. Both routes are evaluated and compared.

    Raises
    ------
    DecompositionIdentityViolated
        If the two closed forms disagree (coefficients or values).
    """
    check_nonnegative(eta, "eta")
    x0, dx0 = check_pair(initial, "initial")
    T = np.asarray(T, dtype=float)
    w = SQRT2 * np.pi * eta
    xbar = x0 * np.cos(w * T) + dx0 * _sin_over(w, T)
    if eta > 0:
        # sin coefficient of Jbar^x is sqrt2 * Jbar_20 = sqrt2 * dX0 / (2 pi eta)
        coeff_j = SQRT2 * (dx0 / (2 * np.pi * eta))
        coeff_x = dx0 / w
        if abs(coeff_j - coeff_x) > 1e-14 * max(1.0, abs(coeff_x)):
            raise DecompositionIdentityViolated("averaged Landau and averaged Jacobi coefficients differ")
        jbar = averaged_jacobi(eta, (x0, dx0 / (2 * np.pi * eta)), T).J1
        if np.any(np.abs(jbar - xbar) > 1e-14 * np.maximum(1.0, np.abs(xbar))):
            raise DecompositionIdentityViolated("Xbar differs from Jbar^x")
    return xbar


def ponderomotive_frequency(eta: float) -> float:
    """Angular frequency ``sqrt(2 + eta^2/8) pi eta`` of ``X_p`` per unit ``T``."""
    return float(np.sqrt(2.0 + eta * eta / 8.0) * np.pi * eta)


def ponderomotive_x(eta: float, initial=(1.0, 0.0), T=0.0) -> np.ndarray:
    """Ponderomotive oscillation centre ``X_p(T)``."""
    x0, dx0 = check_pair(initial, "initial")
    T = np.asarray(T, dtype=float)
    om = ponderomotive_frequency(eta)
    return x0 * np.cos(om * T) + dx0 * _sin_over(om, T)


def ponderomotive_amplitude(eta: float, initial=(1.0, 0.0)) -> float:
    """Bound ``sqrt(X0^2 + (X0'/Omega)^2)`` on ``|X_p|`` (``inf`` when ``eta = 0`` and ``X0' != 0``)."""
    x0, dx0 = check_pair(initial, "initial")
    om = ponderomotive_frequency(eta)
    if om == 0:
        return abs(x0) if dx0 == 0 else np.inf
    return float(np.hypot(x0, dx0 / om))


def ponderomotive_xi(eta: float, T, X) -> np.ndarray:
    """``xi_p = -(eta^2/8) cos(4 pi T) X``."""
    return -(eta * eta / 8.0) * np.cos(4 * np.pi * np.asarray(T)) * np.asarray(X)


def cross_term_average(n: int = 64) -> float:
    """Cycle average of ``cos(4 pi T) sin^2(2 pi T)`` (exactly ``-1/4``).

    Uses the rectangle rule on a uniform periodic grid, which is exact for
    trigonometric polynomials of degree below ``n``.
    """
    T = np.arange(n) / n
    return float(np.mean(np.cos(4 * np.pi * T) * np.sin(2 * np.pi * T) ** 2))


def ponderomotive_stiffness(eta: float) -> float:
    """Effective stiffness ``2 pi^2 eta^2 + pi^2 eta^4 / 8`` of the averaged ``X_p`` equation.

    Built from the averaged cross term, not from the closed form, so it
    independently confirms ``Omega^2``.
    """
    xi_coeff = -(eta * eta / 8.0)
    return 2 * np.pi**2 * eta**2 + 4 * np.pi**2 * eta**2 * xi_coeff * cross_term_average()


# -- error bounds ------------------------------------------------------------


@dataclass(frozen=True)
class Envelopes:
    T: np.ndarray
    jacobi: np.ndarray  # bound on ||J - Jbar||
    landau: np.ndarray  # bound on ||K - Kbar||
    pondero: np.ndarray  # bound on |Xbar - X_p|


def error_envelopes(eta: float, initial=(1.0, 0.0), T=0.0) -> Envelopes:
    """Gronwall and mean-value bounds as functions of ``T`` for identified initial data.

    With ``(J0, dJ0)`` shared by ``J``, ``Jbar``, ``X``, ``Xbar`` and ``X_p``:

    * ``||J - Jbar||  <= (|J0| + sqrt2 |dJ0/(2 pi eta)|) / 2 (e^{2 pi eta T} - 1)``
    * ``||K - Kbar||  <= (|J0| + |dJ0/(sqrt2 pi eta)|) / 2 (e^{2 sqrt2 pi eta T} - 1)``
    * ``|Xbar - X_p| <= 2 (sqrt(2 + eta^2/8) |J0| + |dJ0|/(pi eta)) pi eta T``
    """
    check_nonnegative(eta, "eta")
    j0, dj0 = check_pair(initial, "initial")
    T = np.asarray(T, dtype=float)
    a = 2 * np.pi * eta
    b = SQRT2 * np.pi * eta
    if eta == 0:
        zero = np.zeros_like(T)
        return Envelopes(T, zero, zero.copy(), 2 * abs(dj0) * T)
    with np.errstate(over="ignore"):
        vb7 = 0.5 * (abs(j0) + SQRT2 * abs(dj0 / a)) * np.expm1(a * T)
        vd9 = 0.5 * (abs(j0) + abs(dj0 / b)) * np.expm1(2 * b * T)
    ve4 = 2 * (np.sqrt(2 + eta * eta / 8) * np.pi * eta * abs(j0) + abs(dj0)) * T
    return Envelopes(T, vb7, vd9, ve4)


def epsilon_windows(eta: float, eps: float) -> dict:
    """End of the validity window in ``T`` for each epsilon statement."""
    if eta == 0:
        return dict.fromkeys(("jacobi", "landau", "xi", "pondero", "center"), np.inf)
    w_j = np.log1p(eps) / (2 * np.pi * eta)
    w_k = np.log1p(eps) / (2 * SQRT2 * np.pi * eta)
    w_p = eps / (2 * np.pi * eta)
    return {"jacobi": w_j, "landau": w_k, "xi": w_k, "pondero": w_p, "center": min(w_k, w_p)}


def epsilon_bounds(eta: float, initial, eps: float) -> dict:
    """Right-hand sides of the epsilon statements (constant on their windows)."""
    j0, dj0 = check_pair(initial, "initial")
    pe = np.pi * eta
    r = np.sqrt(2 + eta * eta / 8)
    return {
        "jacobi": 0.5 * (abs(j0) + SQRT2 * abs(dj0 / (2 * pe))) * eps,
        "landau": 0.5 * (abs(j0) + abs(dj0 / (SQRT2 * pe))) * eps,
        "xi": (abs(j0) + abs(dj0) / (SQRT2 * pe)) * eps,
        "pondero": (r * abs(j0) + abs(dj0) / pe) * eps,
        "center": ((0.5 + r) * abs(j0) + (1 / (2 * SQRT2) + 1) * abs(dj0) / pe) * eps,
    }


# -- Landau decomposition ----------------------------------------------------


@dataclass(frozen=True)
class DecompositionTrace:
    """Samples of the Hill solution, its Landau split and the approximations."""

    eta: float
    initial: tuple
    tol: float
    T: np.ndarray
    J: np.ndarray
    dJ: np.ndarray
    X: np.ndarray
    dX: np.ndarray
    xi: np.ndarray
    dxi: np.ndarray
    Xbar: np.ndarray
    Xp: np.ndarray
    xip: np.ndarray
    envelopes: Envelopes = field(repr=False)

    def __len__(self):
        return len(self.T)

    @property
    def columns(self) -> dict:
        return {
            "T": self.T, "Jx": self.J, "dJx": self.dJ, "X": self.X, "dX": self.dX,
            "xi": self.xi, "dxi": self.dxi, "Xbar": self.Xbar, "Xp": self.Xp, "xip": self.xip,
            "env_VB7": self.envelopes.jacobi, "env_VD9": self.envelopes.landau, "env_VE4": self.envelopes.pondero,
        }

    @property
    def xip_from_Xp(self) -> np.ndarray:
        """``xi_p`` paired with ``X_p`` instead of the Landau ``X``."""
        return ponderomotive_xi(self.eta, self.T, self.Xp)

    # measured counterparts of the envelopes
    def error_J(self) -> np.ndarray:
        """``||J - Jbar||`` in the scaled norm."""
        jb = averaged_jacobi(self.eta, jacobi_vector(self.eta, *self.initial), self.T)
        j1, j2 = jacobi_vector(self.eta, self.J, self.dJ)
        return np.hypot(j1 - jb.J1, j2 - jb.J2)

    def error_K(self) -> np.ndarray:
        """``||K - Kbar||`` with ``Kbar = (Xbar, Xbar'/(sqrt2 pi eta), 0, 0)``."""
        b = _scale(SQRT2 * np.pi * self.eta)
        x0, dx0 = self.initial
        w = SQRT2 * np.pi * self.eta
        dxbar = -x0 * w * np.sin(w * self.T) + dx0 * np.cos(w * self.T)
        return np.sqrt((self.X - self.Xbar) ** 2 + ((self.dX - dxbar) / b) ** 2 + self.xi**2 + (self.dxi / b) ** 2)

    def error_pondero(self) -> np.ndarray:
        """``|Xbar - X_p|``."""
        return np.abs(self.Xbar - self.Xp)


def _landau_rhs(eta):
    k = 2 * math.pi**2 * eta**2
    two_pi = 2 * math.pi

    def rhs(T, y):
        s = math.sin(two_pi * T)
        s2 = s * s
        c4 = 1.0 - 2.0 * s2  # cos(4 pi T)
        X, dX, xi, dxi, J, dJ = y.tolist()
        return np.array([dX, -k * (X + 2 * s2 * xi), dxi, k * c4 * X, dJ, -2 * k * s2 * J])

    return rhs


def integrate_landau(
    eta: float,
    initial=(1.0, 0.0),
    T_end: float = 10.0,
    tol: float = MONODROMY_RTOL,
    samples_per_cycle: int = 256,
    T_eval=None,
) -> DecompositionTrace:
    """Integrate the Landau system together with the raw Hill equation.

    ``X`` starts from ``(J(0), dJ/dT(0))`` and ``xi`` from rest. The identity
    ``J = X + xi`` is checked at every sample relative to the size of the
    terms, ``|J - X - xi| <= 100 tol max(1, |J|, |X|, |xi|)``.

    Raises
    ------
    DecompositionIdentityViolated
        When the identity check fails.
    StepFailure
        Propagated from the integrator.
    """
    check_nonnegative(eta, "eta")
    check_nonnegative(T_end, "T_end")
    j0, dj0 = check_pair(initial, "initial")
    if T_eval is None:
        T = _uniform_T(T_end, samples_per_cycle) if T_end > 0 else np.empty(0)
    else:
        T = np.asarray(T_eval, dtype=float)
        T_end = float(T[-1]) if T.size else 0.0
    y0 = np.array([j0, dj0, 0.0, 0.0, j0, dj0])
    if T.size == 0:
        y = np.empty((0, 6))
    elif T_end == 0:
        y = np.tile(y0, (T.size, 1))
    else:
        y = integrate.solve(_landau_rhs(eta), (0.0, T_end), y0, t_eval=T, rtol=tol, atol=1e-2 * tol).y
    X, dX, xi, dxi, J, dJ = y.T
    scale = np.maximum.reduce([np.ones_like(J), np.abs(J), np.abs(X), np.abs(xi)]) if J.size else J
    bad = np.abs(J - X - xi) > 100 * tol * scale
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DecompositionIdentityViolated(f"|J - X - xi| = {abs(J[i] - X[i] - xi[i]):.3g} at T = {T[i]:.6g}")
    return DecompositionTrace(
        eta=float(eta), initial=(j0, dj0), tol=tol, T=T, J=J, dJ=dJ, X=X, dX=dX, xi=xi, dxi=dxi,
        Xbar=averaged_landau(eta, (j0, dj0), T),
        Xp=ponderomotive_x(eta, (j0, dj0), T),
        xip=ponderomotive_xi(eta, T, X),
        envelopes=error_envelopes(eta, (j0, dj0), T),
    )


@dataclass(frozen=True)
class PonderomotiveSeries:
    T: np.ndarray
    Xp: np.ndarray
    xip: np.ndarray  # paired with the Landau X
    xip_from_Xp: np.ndarray


def ponderomotive_center(eta: float, initial=(1.0, 0.0), T_end: float = 10.0, tol: float = MONODROMY_RTOL,
                         samples_per_cycle: int = 256) -> PonderomotiveSeries:
    """``X_p`` and both pairings of ``xi_p`` (with the Landau ``X`` and with ``X_p``)."""
    tr = integrate_landau(eta, initial, T_end, tol, samples_per_cycle)
    return PonderomotiveSeries(tr.T, tr.Xp, tr.xip, tr.xip_from_Xp)


@dataclass(frozen=True)
class EnvelopeCheck:
    name: str
    eps: float
    window: float
    samples: int
    max_measured: float
    max_bound: float
    violations: int


def check_envelopes(eta: float, initial=(1.0, 0.0), eps_values=EPSILONS, n: int = 200, tol: float = MONODROMY_RTOL):
    """Compare measured errors with the bounds on each epsilon window.

    For every epsilon the trace is sampled at ``n`` points in
    ``(0, window]``; both the pointwise envelopes and the constant
    epsilon bounds are checked. A sample counts as a violation when the
    measured error exceeds the bound by more than ``10 tol``, the size of
    the integration error.
    """
    out = []
    for eps in eps_values:
        win = epsilon_windows(eta, eps)
        const = epsilon_bounds(eta, initial, eps)
        end = max(win["jacobi"], win["landau"], win["pondero"])
        tr = integrate_landau(eta, initial, tol=tol, T_eval=np.linspace(end / n, end, n))
        env = tr.envelopes
        err_j, err_k, err_p = tr.error_J(), tr.error_K(), tr.error_pondero()
        ones = np.ones(len(tr))
        pairs = [
            ("jacobi_gronwall", err_j, env.jacobi, win["jacobi"]),
            ("jacobi_eps", err_j, const["jacobi"] * ones, win["jacobi"]),
            ("landau_gronwall", err_k, env.landau, win["landau"]),
            ("landau_eps", err_k, const["landau"] * ones, win["landau"]),
            ("xi_eps", np.abs(tr.xi), const["xi"] * ones, win["xi"]),
            ("pondero_mean_value", err_p, env.pondero, win["pondero"]),
            ("pondero_eps", err_p, const["pondero"] * ones, win["pondero"]),
            ("center_eps", np.abs(tr.X - tr.Xp), const["center"] * ones, win["center"]),
        ]
        for name, m, b, w in pairs:
            sel = tr.T <= w * (1 + 1e-12)
            out.append(EnvelopeCheck(
                name, eps, float(w), int(sel.sum()), float(m[sel].max(initial=0.0)), float(b[sel].max(initial=0.0)),
                int(np.count_nonzero(m[sel] > b[sel] + 10 * tol)),
            ))
    return out


# -- growth-rate diagnostics -------------------------------------------------


def per_cycle_max(T, values) -> np.ndarray:
    """``max |values|`` over each whole optical cycle ``[k, k+1]``."""
    T = np.asarray(T)
    n = int(np.floor(T[-1] + 1e-9)) if T.size else 0
    idx = np.searchsorted(T, np.arange(n + 1) - 1e-12)
    a = np.abs(np.asarray(values))
    return np.array([a[idx[k] : idx[k + 1] + 1].max() for k in range(n)])


def fit_log_slope(maxima) -> float:
    """Least-squares slope of ``ln(maxima)`` against cycle index over the trailing half."""
    n = len(maxima)
    start = n - max(MIN_FIT_CYCLES, n // 2)
    k = np.arange(start, n)
    return float(np.polyfit(k, np.log(maxima[start:]), 1)[0])


@dataclass(frozen=True)
class DivergenceRates:
    J: float
    X: float
    xi: float
    dX: float
    dxi: float
    cycles: int
    fit_tol: float

    def landau_not_slower(self) -> bool:
        """``X`` and ``xi`` grow at least as fast as ``J`` up to ``fit_tol``."""
        return self.X >= self.J - self.fit_tol and self.xi >= self.J - self.fit_tol


def divergence_rate(trace: DecompositionTrace) -> DivergenceRates:
    """Growth rates per optical cycle of ``J``, ``X``, ``xi`` and their derivatives.

    Each rate is the slope of ``ln`` of per-cycle maxima over the trailing
    half of the trace (at least 10 cycles). ``fit_tol`` is 5% of ``|rate_J|``.

    Raises
    ------
    InsufficientData
        For traces shorter than 20 optical cycles.
    """
    if len(trace) == 0 or trace.T[-1] < MIN_CYCLES - 1e-9:
        raise InsufficientData(f"need at least {MIN_CYCLES} optical cycles")
    rates = {name: fit_log_slope(per_cycle_max(trace.T, getattr(trace, name))) for name in ("J", "X", "xi", "dX", "dxi")}
    n = int(np.floor(trace.T[-1] + 1e-9))
    return DivergenceRates(**rates, cycles=n, fit_tol=FIT_TOL_FRACTION * abs(rates["J"]))


@dataclass(frozen=True)
class ResonanceReport:
    rates: DivergenceRates
    mu: float
    X_minus_Xp: np.ndarray  # per-cycle max |X - X_p|
    monotone_after: int
    Xp_bound: float
    Xp_max: float

    @property
    def rate_matches_mu(self) -> bool:
        return abs(self.rates.J - self.mu) <= FIT_TOL_FRACTION * self.mu

    @property
    def breakdown_monotone(self) -> bool:
        d = self.X_minus_Xp[self.monotone_after :]
        return bool(d.size > 1 and np.all(np.diff(d) > 0))

    @property
    def Xp_bounded(self) -> bool:
        return self.Xp_max <= self.Xp_bound * (1 + 1e-12)


def resonance_report(trace: DecompositionTrace, mu: float, monotone_after: int = 5) -> ResonanceReport:
    """Growth rates, per-cycle ``max |X - X_p|`` and the bound on ``X_p``."""
    return ResonanceReport(
        rates=divergence_rate(trace),
        mu=float(mu),
        X_minus_Xp=per_cycle_max(trace.T, trace.X - trace.Xp),
        monotone_after=monotone_after,
        Xp_bound=ponderomotive_amplitude(trace.eta, trace.initial),
        Xp_max=float(np.abs(trace.Xp).max(initial=0.0)),
    )


def zero_crossings(T, values) -> np.ndarray:
    """Linearly interpolated zeros of a sampled signal."""
    T, v = np.asarray(T), np.asarray(values)
    i = np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)
    return T[i] - v[i] * (T[i + 1] - T[i]) / (v[i + 1] - v[i])


def oscillation_period(T, values) -> float:
    """Mean period from the spacing of zero crossings (two per period)."""
    z = zero_crossings(T, values)
    if z.size < 2:
        raise InsufficientData("fewer than two zero crossings")
    return float(2 * (z[-1] - z[0]) / (z.size - 1))
