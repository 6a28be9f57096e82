"""Charged-particle orbits in planar electromagnetic fields as geodesics of a 2D metric.

Modules: ``fields`` (potentials, conformal factor, curvature), ``dynamics``
(reduced equations of motion), ``planewave`` (quadrature solution),
``floquet`` (Hill equation stability), ``averaging`` (Landau decomposition,
ponderomotive approximation and error bounds), ``cli``.
"""

__version__ = "0.1.0"

from .exceptions import *  # noqa: F401,F403
from .fields import (  # noqa: F401
    FieldKind,
    FieldModel,
    FieldParams,
    ScalarField2D,
    TransverseMomenta,
    gaussian_curvature,
    scalar_potential,
    sigma_derivatives,
)
from .dynamics import (  # noqa: F401
    LongitudinalState,
    WorldLine,
    hamiltonian_residual,
    integrate_geodesic_affine,
    integrate_longitudinal,
    recover_transverse,
)
from .planewave import plane_wave_orbit, plane_wave_quadrature, verify_flatness  # noqa: F401
from .floquet import (  # noqa: F401
    HillSystem,
    MonodromyResult,
    StabilityZones,
    floquet_modes,
    integrate_jacobi,
    jacobi_equation_on_orbit,
    monodromy,
    scan_zones,
)
from .averaging import (  # noqa: F401
    DecompositionTrace,
    averaged_jacobi,
    averaged_landau,
    divergence_rate,
    error_envelopes,
    integrate_landau,
    ponderomotive_center,
)
