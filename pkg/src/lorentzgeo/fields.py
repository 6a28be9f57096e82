"""Planar-symmetric field models and the scalar fields derived from them.

A planar-symmetric vector potential has ``A_t = A_x = 0`` and transverse
components ``A_y(t, x)``, ``A_z(t, x)``. After eliminating the cyclic
transverse coordinates, the longitudinal motion is driven by the scalar
potential

    Phi = 1/2 [(P_y - q/m A_y)^2 + (P_z - q/m A_z)^2]

and is geodesic in the conformally flat metric ``e^{2 sigma} diag(-1, 1)``
with ``sigma = 1/2 ln(1 + 2 Phi)``.

Lab time is measured in length units (``t = c t_conv``), so ``omega`` is an
inverse length. Everything downstream depends on the field only through the
reduced potential ``a = (q/m) A``, whose amplitude is the impulse factor
``eta = q E / (m omega)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from ._validation import check_finite, check_positive
from .exceptions import InvalidPolarization


class FieldKind(enum.Enum):
    PLANE_WAVE_ELLIPTIC = "plane_wave"
    STANDING_WAVE_LINEAR = "standing_wave"
    CUSTOM_PLANAR = "custom"


@dataclass(frozen=True)
class FieldParams:
    """Amplitude, frequency, polarization and charge-to-mass ratio.

    ``eta`` is always recomputed from its factors.
    """

    amplitude: float = 0.0
    omega: float = 1.0
    delta: float = 1.0
    charge_mass_ratio: float = 1.0

    def __post_init__(self):
        check_positive(self.omega, "omega")
        check_finite(self.amplitude, "amplitude")
        check_finite(self.charge_mass_ratio, "charge_mass_ratio")
        check_finite(self.delta, "delta")
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")

    @property
    def eta(self) -> float:
        return self.charge_mass_ratio * self.amplitude / self.omega

    @property
    def optical_cycle(self) -> float:
        """Period ``2 pi / omega`` in lab-time (length) units."""
        return 2 * np.pi / self.omega

    @classmethod
    def from_eta(cls, eta, omega=1.0, delta=1.0, charge_mass_ratio=1.0):
        """Build parameters with the amplitude chosen to give ``eta``."""
        check_positive(omega, "omega")
        if charge_mass_ratio == 0:
            raise ValueError("charge_mass_ratio must be nonzero to realise eta")
        amplitude = eta * omega / charge_mass_ratio
        if amplitude < 0:
            # keep the amplitude non-negative; the sign lives in q/m
            amplitude, charge_mass_ratio = -amplitude, -charge_mass_ratio
        return cls(amplitude, omega, delta, charge_mass_ratio)


@dataclass(frozen=True)
class TransverseMomenta:
    p_y: float = 0.0
    p_z: float = 0.0

    def __post_init__(self):
        check_finite(self.p_y, "p_y")
        check_finite(self.p_z, "p_z")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_y, self.p_z])


class PotentialJet(NamedTuple):
    """Reduced potential ``a = (q/m)(A_y, A_z)`` and its partial derivatives.

    Each entry has shape ``(2,) + broadcast(t, x).shape``; axis 0 indexes
    the transverse component (y, z).
    """

    a: np.ndarray
    a_t: np.ndarray
    a_x: np.ndarray
    a_tt: np.ndarray
    a_tx: np.ndarray
    a_xx: np.ndarray


# A custom component returns (A, A_t, A_x, A_tt, A_tx, A_xx) at (t, x).
ComponentJet = Callable[[np.ndarray, np.ndarray], tuple]


@dataclass(frozen=True)
class FieldModel:
    """A planar-symmetric vector potential.

    Use the :meth:`plane_wave`, :meth:`standing_wave` or :meth:`custom`
    constructors. For custom models the caller supplies, for each of A_y and
    A_z, a callable returning the potential together with its analytic first
    and second partial derivatives.
    """

    kind: FieldKind
    params: FieldParams
    custom_y: ComponentJet | None = None
    custom_z: ComponentJet | None = None

    def __post_init__(self):
        if self.kind is FieldKind.PLANE_WAVE_ELLIPTIC and abs(self.params.delta) > 1:
            raise InvalidPolarization(f"|delta| must be <= 1, got {self.params.delta}")
        if self.kind is FieldKind.CUSTOM_PLANAR and (self.custom_y is None or self.custom_z is None):
            raise ValueError("custom models need derivative evaluators for A_y and A_z")

    @classmethod
    def plane_wave(cls, params: FieldParams) -> "FieldModel":
        """Elliptically polarised wave travelling along +x.

        ``A_y = (E delta / omega) cos(omega u)``,
        ``A_z = (E sqrt(1 - delta^2) / omega) sin(omega u)``, ``u = t - x``.
        """
        return cls(FieldKind.PLANE_WAVE_ELLIPTIC, params)

    @classmethod
    def standing_wave(cls, params: FieldParams) -> "FieldModel":
        """Linearly polarised standing wave ``A_z = (E/omega) sin(omega t) sin(omega x)``."""
        return cls(FieldKind.STANDING_WAVE_LINEAR, params)

    @classmethod
    def custom(cls, params: FieldParams, a_y: ComponentJet, a_z: ComponentJet) -> "FieldModel":
        return cls(FieldKind.CUSTOM_PLANAR, params, a_y, a_z)

    @property
    def eta(self) -> float:
        return self.params.eta

    def jet(self, t, x) -> PotentialJet:
        """Evaluate the reduced potential and its derivatives at ``(t, x)``."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        if self.kind is FieldKind.PLANE_WAVE_ELLIPTIC:
            return self._plane_wave_jet(t, x)
        if self.kind is FieldKind.STANDING_WAVE_LINEAR:
            return self._standing_wave_jet(t, x)
        qm = self.params.charge_mass_ratio
        comps = [np.broadcast_arrays(t, x, *fn(t, x))[2:] for fn in (self.custom_y, self.custom_z)]
        return PotentialJet(*(qm * np.stack([cy, cz]) for cy, cz in zip(*comps)))

    def first_jet_scalar(self, t: float, x: float):
        """Fast scalar path: ``(a_y, a_z, a_y_t, a_z_t, a_y_x, a_z_x)`` as floats."""
        p = self.params
        w, eta = p.omega, p.eta
        if self.kind is FieldKind.PLANE_WAVE_ELLIPTIC:
            amp_y = eta * p.delta
            amp_z = eta * math.sqrt(1.0 - p.delta * p.delta)
            c, s = math.cos(w * (t - x)), math.sin(w * (t - x))
            dy, dz = -amp_y * w * s, amp_z * w * c
            return amp_y * c, amp_z * s, dy, dz, -dy, -dz
        if self.kind is FieldKind.STANDING_WAVE_LINEAR:
            st, ct = math.sin(w * t), math.cos(w * t)
            sx, cx = math.sin(w * x), math.cos(w * x)
            return 0.0, eta * st * sx, 0.0, eta * w * ct * sx, 0.0, eta * w * st * cx
        j = self.jet(t, x)
        return (float(j.a[0]), float(j.a[1]), float(j.a_t[0]), float(j.a_t[1]), float(j.a_x[0]), float(j.a_x[1]))

    def _plane_wave_jet(self, t, x):
        p = self.params
        w = p.omega
        amp_y = p.eta * p.delta
        amp_z = p.eta * np.sqrt(1.0 - p.delta**2)
        u = t - x
        c, s = np.cos(w * u), np.sin(w * u)
        a = np.stack([amp_y * c, amp_z * s])
        da = np.stack([-amp_y * w * s, amp_z * w * c])  # d/du
        dda = np.stack([-amp_y * w * w * c, -amp_z * w * w * s])  # d2/du2
        # d/dt = d/du, d/dx = -d/du
        return PotentialJet(a, da, -da, dda, -dda, dda)

    def _standing_wave_jet(self, t, x):
        p = self.params
        w, eta = p.omega, p.eta
        st, ct = np.sin(w * t), np.cos(w * t)
        sx, cx = np.sin(w * x), np.cos(w * x)
        zero = np.zeros(np.broadcast(t, x).shape)
        az = eta * st * sx
        return PotentialJet(
            np.stack([zero, az]),
            np.stack([zero, eta * w * ct * sx]),
            np.stack([zero, eta * w * st * cx]),
            np.stack([zero, -eta * w * w * st * sx]),
            np.stack([zero, eta * w * w * ct * cx]),
            np.stack([zero, -eta * w * w * st * sx]),
        )


class SigmaJet(NamedTuple):
    sigma: np.ndarray
    t: np.ndarray
    x: np.ndarray
    tt: np.ndarray
    tx: np.ndarray
    xx: np.ndarray


def _momenta_column(P: TransverseMomenta, ndim: int) -> np.ndarray:
    return P.as_array().reshape((2,) + (1,) * ndim)


@dataclass(frozen=True)
class ScalarField2D:
    """Phi, sigma and the Gaussian curvature for a model at fixed momenta.

    All evaluators broadcast over array-valued ``t`` and ``x``.
    """

    model: FieldModel
    momenta: TransverseMomenta = TransverseMomenta()

    def transverse_velocity(self, t, x) -> np.ndarray:
        """``(dy/dtau, dz/dtau) = P - a(t, x)``, stacked along axis 0."""
        jet = self.model.jet(t, x)
        return _momenta_column(self.momenta, jet.a.ndim - 1) - jet.a

    def phi(self, t, x) -> np.ndarray:
        w = self.transverse_velocity(t, x)
        return 0.5 * np.sum(w * w, axis=0)

    def phi_jet(self, t, x):
        """Return ``Phi`` with its gradient and Hessian.

        Returns ``(phi, phi_t, phi_x, phi_tt, phi_tx, phi_xx)``.
        """
        j = self.model.jet(t, x)
        w = _momenta_column(self.momenta, j.a.ndim - 1) - j.a
        phi = 0.5 * np.sum(w * w, axis=0)
        phi_t = -np.sum(w * j.a_t, axis=0)
        phi_x = -np.sum(w * j.a_x, axis=0)
        phi_tt = np.sum(j.a_t * j.a_t - w * j.a_tt, axis=0)
        phi_tx = np.sum(j.a_t * j.a_x - w * j.a_tx, axis=0)
        phi_xx = np.sum(j.a_x * j.a_x - w * j.a_xx, axis=0)
        return phi, phi_t, phi_x, phi_tt, phi_tx, phi_xx

    def phi_gradient(self, t, x):
        j = self.model.jet(t, x)
        w = _momenta_column(self.momenta, j.a.ndim - 1) - j.a
        return -np.sum(w * j.a_t, axis=0), -np.sum(w * j.a_x, axis=0)

    def phi_gradient_scalar(self, t: float, x: float):
        """Return ``(phi, phi_t, phi_x)`` as floats for scalar ``t``, ``x``."""
        ay, az, ay_t, az_t, ay_x, az_x = self.model.first_jet_scalar(t, x)
        wy, wz = self.momenta.p_y - ay, self.momenta.p_z - az
        return 0.5 * (wy * wy + wz * wz), -(wy * ay_t + wz * az_t), -(wy * ay_x + wz * az_x)

    def sigma_gradient(self, t, x):
        """Return ``(e^{-2 sigma}, sigma_t, sigma_x)``."""
        j = self.model.jet(t, x)
        w = _momenta_column(self.momenta, j.a.ndim - 1) - j.a
        inv = 1.0 / (1.0 + np.sum(w * w, axis=0))
        return inv, -np.sum(w * j.a_t, axis=0) * inv, -np.sum(w * j.a_x, axis=0) * inv

    def sigma(self, t, x) -> np.ndarray:
        return 0.5 * np.log1p(2.0 * self.phi(t, x))

    def sigma_jet(self, t, x) -> SigmaJet:
        phi, pt, px, ptt, ptx, pxx = self.phi_jet(t, x)
        g = 1.0 + 2.0 * phi  # = e^{2 sigma}
        g2 = g * g
        return SigmaJet(
            0.5 * np.log1p(2.0 * phi),
            pt / g,
            px / g,
            ptt / g - 2.0 * pt * pt / g2,
            ptx / g - 2.0 * pt * px / g2,
            pxx / g - 2.0 * px * px / g2,
        )

    def curvature(self, t, x) -> np.ndarray:
        """Gaussian curvature ``K = -e^{-2 sigma} (sigma_xx - sigma_tt)``."""
        s = self.sigma_jet(t, x)
        return -np.exp(-2.0 * s.sigma) * (s.xx - s.tt)


def scalar_potential(model: FieldModel, P: TransverseMomenta, t, x):
    """Scalar potential ``Phi(t, x) >= 0`` of the reduced longitudinal motion."""
    return ScalarField2D(model, P).phi(t, x)


def sigma_derivatives(field: ScalarField2D, t, x) -> SigmaJet:
    """Conformal factor exponent sigma and its first and second partials."""
    return field.sigma_jet(t, x)


def gaussian_curvature(field: ScalarField2D, t, x):
    return field.curvature(t, x)
