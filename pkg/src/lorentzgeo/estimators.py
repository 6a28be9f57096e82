"""scikit-learn style wrapper around the monodromy computation."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_eta_column
from .floquet import MONODROMY_RTOL, characteristic_function, floquet_exponent, scan_zones


class FloquetStability(TransformerMixin, BaseEstimator):
    """Stability of node orbits as a function of ``eta``.

    ``fit`` scans ``[0, max(X)]`` for zone boundaries; ``transform`` maps
    each eta to ``[phi, |rho|_max, mu]``; ``predict`` returns 1 for stable
    (``|phi| < 1``) and 0 otherwise.

    Parameters
    ----------
    p_y : float
        Transverse canonical momentum of the orbit.
    tol : float
        Integrator tolerance for the monodromy matrix.
    resolution : float
        Grid spacing of the zone scan done in ``fit``.
    refine_tol : float
        Bisection tolerance for zone boundaries.

    Examples
    --------
    >>> est = FloquetStability().fit([[0.5], [1.2]])
    >>> est.predict([[0.2], [1.2]]).tolist()
    [1, 0]
    """

    def __init__(self, p_y=0.0, tol=MONODROMY_RTOL, resolution=1e-2, refine_tol=1e-8):
        self.p_y = p_y
        self.tol = tol
        self.resolution = resolution
        self.refine_tol = refine_tol

    def fit(self, X, y=None):
        eta = check_eta_column(X)
        top = float(eta.max()) if eta.size and eta.max() > 0 else self.resolution
        self.zones_ = scan_zones(top, self.resolution, self.refine_tol, self.p_y, self.tol)
        self.boundaries_ = np.asarray(self.zones_.boundaries)
        self.n_features_in_ = 1
        return self

    def _phi(self, X):
        check_is_fitted(self, "zones_")
        return characteristic_function(check_eta_column(X), self.p_y, self.tol)

    def transform(self, X):
        phi = self._phi(X)
        a = np.abs(phi)
        rho = np.where(a > 1, a + np.sqrt(np.maximum(a * a - 1, 0.0)), 1.0)
        mu = np.array([floquet_exponent(p) for p in phi])
        return np.column_stack([phi, rho, mu])

    def predict(self, X):
        return (np.abs(self._phi(X)) < 1.0).astype(int)
