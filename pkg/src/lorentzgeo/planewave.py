"""Closed-form (quadrature) orbits in plane-wave fields.

For a plane wave everything depends on ``u = t - x`` alone, so
``sigma(u, v) = U(u)`` and the tx-plane is flat. The geodesic equations
decouple, ``e^{2U} du/ds`` and ``dv/ds`` are conserved, and in proper time

    du/dtau = a                      (constant null momentum)
    dv/dtau = (1 + 2 Phi(u)) / a

which integrates to ``v(u) = v0 + a^{-2} int_{u0}^{u} (1 + 2 Phi) du'``.
The affine parameter is normalised so ``ds/dtau = e^{2 sigma}``, giving
``s(u) = a (v(u) - v0)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import SAMPLES_PER_CYCLE, LongitudinalState, WorldLine, _sample_grid
from .exceptions import NonTimelikeInitial, WrongModelKind
from .fields import FieldKind, FieldModel, FieldParams, ScalarField2D, TransverseMomenta

QUAD_TOL = 1e-12
_G_LO = np.polynomial.legendre.leggauss(10)
_G_HI = np.polynomial.legendre.leggauss(20)


def _interval_rule(f, a, b, rule):
    x, w = rule
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = mid[None, :] + half[None, :] * x[:, None]  # (n, m)
    vals = f(nodes)  # (c, n, m)
    return np.einsum("n,cnm->cm", w, vals) * half


def adaptive_interval_integrals(f, grid, tol=QUAD_TOL, max_depth=40):
    """Integrals of a vector integrand over each cell of ``grid``.

    Each cell is integrated with 20-point Gauss-Legendre and accepted when the
    embedded 10-point estimate agrees to ``tol`` (relative, floored at 1);
    otherwise it is bisected. All cells are processed as one batch. ``f``
    maps an array of abscissae to an array with a leading component axis.
    """
    grid = np.asarray(grid, dtype=float)
    a, b = grid[:-1], grid[1:]
    owner = np.arange(a.size)
    ncomp = np.asarray(f(grid[:1])).shape[0]
    total = np.zeros((ncomp, a.size))
    for _ in range(max_depth):
        if a.size == 0:
            return total
        hi = _interval_rule(f, a, b, _G_HI)
        lo = _interval_rule(f, a, b, _G_LO)
        ok = np.all(np.abs(hi - lo) <= tol * np.maximum(1.0, np.abs(hi)), axis=0)
        for c in range(ncomp):
            np.add.at(total[c], owner[ok], hi[c, ok])
        mid = 0.5 * (a + b)
        bad = ~ok
        a, b, owner = (
            np.concatenate([a[bad], mid[bad]]),
            np.concatenate([mid[bad], b[bad]]),
            np.concatenate([owner[bad], owner[bad]]),
        )
    raise RuntimeError("adaptive quadrature did not converge")


@dataclass(frozen=True)
class QuadratureSolution:
    """Tabulated monotone maps ``u -> v`` and ``u -> s`` plus the null momentum."""

    u: np.ndarray
    v: np.ndarray
    s: np.ndarray
    y: np.ndarray
    z: np.ndarray
    null_momentum: float


def _as_plane_wave(model_or_params) -> FieldModel:
    if isinstance(model_or_params, FieldParams):
        return FieldModel.plane_wave(model_or_params)
    if model_or_params.kind is not FieldKind.PLANE_WAVE_ELLIPTIC:
        raise WrongModelKind(f"expected a plane-wave model, got {model_or_params.kind.name}")
    return model_or_params


def plane_wave_quadrature(model_or_params, P: TransverseMomenta, initial: LongitudinalState, u_grid) -> QuadratureSolution:
    """Evaluate the quadrature solution on a monotone grid of ``u`` values.

    ``u_grid[0]`` must equal the initial ``t - x``.
    """
    model = _as_plane_wave(model_or_params)
    field = ScalarField2D(model, P)
    a = initial.dt_dtau - initial.dx_dtau
    if a <= 0 or initial.dt_dtau + initial.dx_dtau <= 0:
        raise NonTimelikeInitial("initial state must be timelike and future directed")
    u_grid = np.asarray(u_grid, dtype=float)
    u0 = initial.t - initial.x
    if not np.isclose(u_grid[0], u0, rtol=0, atol=1e-12 * max(1.0, abs(u0))):
        raise ValueError("u_grid must start at the initial u = t - x")

    def integrand(u):
        # potentials depend on u only; evaluate on the ray x = 0 where t = u
        w = field.transverse_velocity(u, np.zeros_like(u))
        return np.stack([1.0 + w[0] ** 2 + w[1] ** 2, w[0], w[1]])

    cells = adaptive_interval_integrals(integrand, u_grid)
    cumulative = np.concatenate([np.zeros((3, 1)), np.cumsum(cells, axis=1)], axis=1)
    v = initial.t + initial.x + cumulative[0] / (a * a)
    return QuadratureSolution(
        u=u_grid,
        v=v,
        s=cumulative[0] / a,
        y=cumulative[1] / a,
        z=cumulative[2] / a,
        null_momentum=a,
    )


def plane_wave_orbit(
    model_or_params,
    P: TransverseMomenta,
    initial: LongitudinalState,
    u_end: float | None = None,
    tau_end: float | None = None,
    samples_per_cycle: int = SAMPLES_PER_CYCLE,
    tau_eval=None,
) -> WorldLine:
    """World line (with transverse motion) from the quadrature solution.

    Give the end point as ``u_end`` or ``tau_end``; samples use the same
    proper-time cadence as :func:`lorentzgeo.dynamics.integrate_longitudinal`
    so the two can be compared sample by sample.
    """
    model = _as_plane_wave(model_or_params)
    field = ScalarField2D(model, P)
    a = initial.dt_dtau - initial.dx_dtau
    if a <= 0:
        raise NonTimelikeInitial("initial state must be timelike and future directed")
    u0 = initial.t - initial.x
    if tau_eval is None:
        if (u_end is None) == (tau_end is None):
            raise ValueError("give exactly one of u_end, tau_end")
        if tau_end is None:
            tau_end = initial.tau + (u_end - u0) / a
        tau_eval = _sample_grid(initial.tau, tau_end, model.params.optical_cycle / samples_per_cycle)
    tau = np.asarray(tau_eval, dtype=float)
    u = u0 + a * (tau - initial.tau)
    sol = plane_wave_quadrature(model, P, initial, u)
    g = 1.0 + 2.0 * field.phi(u, 0.0)
    dv_dtau = g / a
    return WorldLine(
        tau=tau,
        t=0.5 * (u + sol.v),
        x=0.5 * (sol.v - u),
        dt_dtau=0.5 * (a + dv_dtau),
        dx_dtau=0.5 * (dv_dtau - a),
        model=model,
        momenta=P,
        y=sol.y,
        z=sol.z,
        meta={"source": "quadrature", "null_momentum": a},
    )


def verify_flatness(model_or_params, P: TransverseMomenta = TransverseMomenta(), sample_count: int = 100) -> float:
    """Maximum ``|K|`` over a ``sample_count x sample_count`` grid.

    The grid spans one wavelength in ``u = t - x`` and one in ``x``.

    Raises
    ------
    WrongModelKind
        If given a model that is not a plane wave.
    """
    model = _as_plane_wave(model_or_params)
    field = ScalarField2D(model, P)
    lam = model.params.optical_cycle
    u = np.linspace(0.0, lam, sample_count, endpoint=False)
    x = np.linspace(0.0, lam, sample_count, endpoint=False)
    U, X = np.meshgrid(u, x, indexing="ij")
    return float(np.max(np.abs(field.curvature(U + X, X))))
