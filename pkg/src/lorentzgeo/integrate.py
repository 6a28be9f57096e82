"""Adaptive Dormand-Prince 5(4) integrator with PI step-size control.

The state may be an array of any shape; the error norm is the maximum over
all components, so a batch of independent systems stacked along extra axes
advances with one shared step sequence (used for vectorised eta scans).

Output times are hit exactly by clipping the step, which avoids mixing dense
output interpolation error into accuracy comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import StepFailure

# Butcher tableau of the Dormand-Prince pair
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

ORDER = 5
_SAFETY = 0.9
_ALPHA = 0.7 / ORDER
_BETA = 0.4 / ORDER
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass(frozen=True)
class Solution:
    """Samples of an integrated trajectory.

    ``y[i]`` is the state at ``t[i]``; ``nsteps``/``nrejected`` count
    accepted and rejected steps.
    """

    t: np.ndarray
    y: np.ndarray
    nsteps: int
    nrejected: int


def _initial_step(fun, t0, y0, f0, direction, rtol, atol):
    # Hairer, Norsett & Wanner, Solving ODEs I, II.4
    scale = atol + np.abs(y0) * rtol
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + direction * h0 * f0
    f1 = fun(t0 + direction * h0, y1)
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / ORDER)
    return min(100 * h0, h1)


def solve(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t_span: tuple[float, float],
    y0,
    t_eval=None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    max_step: float = np.inf,
    first_step: float | None = None,
    max_steps: int = 5_000_000,
) -> Solution:
    """Integrate ``dy/dt = fun(t, y)`` over ``t_span``.

    Parameters
    ----------
    fun : callable
        Right-hand side; must return an array shaped like ``y``.
    t_span : (float, float)
        Start and end of the integration; backwards integration is allowed.
    y0 : array_like
        Initial state, any shape.
    t_eval : array_like, optional
        Monotone output times inside ``t_span``. Defaults to both endpoints.
    rtol, atol : float
        Relative and absolute tolerances of the local error test.

    Raises
    ------
    StepFailure
        If the step size underflows or ``max_steps`` is exceeded.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    y = np.array(y0, dtype=float)
    direction = 1.0 if t1 >= t0 else -1.0

    if t_eval is None:
        t_eval = np.array([t0, t1])
    else:
        t_eval = np.asarray(t_eval, dtype=float)
        if t_eval.ndim != 1:
            raise ValueError("t_eval must be one-dimensional")
        if np.any(direction * np.diff(t_eval) < 0):
            raise ValueError("t_eval must be monotone in the integration direction")
        lo, hi = min(t0, t1), max(t0, t1)
        if t_eval.size and (t_eval.min() < lo or t_eval.max() > hi):
            raise ValueError("t_eval must lie inside t_span")

    out = np.empty((t_eval.size,) + y.shape)
    k_out = 0
    while k_out < t_eval.size and t_eval[k_out] == t0:
        out[k_out] = y
        k_out += 1
    if t0 == t1:
        return Solution(t_eval, out, 0, 0)

    t = t0
    f = np.asarray(fun(t, y), dtype=float)
    if first_step is None:
        h = _initial_step(fun, t, y, f, direction, rtol, atol)
    else:
        h = abs(first_step)
    h = min(h, max_step)
    err_prev = 1.0
    nsteps = nrejected = 0
    k = [None] * 7

    while direction * (t1 - t) > 0:
        target = t_eval[k_out] if k_out < t_eval.size else t1
        h_proposed = h
        span = abs(target - t)
        clipped = h >= span
        step = span if clipped else h
        min_step = 16 * np.spacing(abs(t)) + 1e-300
        if step < min_step and not clipped:
            raise StepFailure(f"step size underflow at t={t:.17g} (h={step:.3g})")

        k[0] = f
        hs = direction * step
        for i in range(1, 7):
            dy = _A[i][0] * k[0]
            for j in range(1, i):
                if _A[i][j] != 0.0:
                    dy = dy + _A[i][j] * k[j]
            k[i] = np.asarray(fun(t + _C[i] * hs, y + hs * dy), dtype=float)
        y_new = y + hs * (_B[0] * k[0] + _B[2] * k[2] + _B[3] * k[3] + _B[4] * k[4] + _B[5] * k[5])
        err_vec = hs * (_E[0] * k[0] + _E[2] * k[2] + _E[3] * k[3] + _E[4] * k[4] + _E[5] * k[5] + _E[6] * k[6])
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / scale)) if err_vec.size else 0.0
        if not np.isfinite(err):
            err = np.inf

        if err <= 1.0:
            nsteps += 1
            if nsteps > max_steps:
                raise StepFailure(f"exceeded max_steps={max_steps}")
            t = target if clipped else t + direction * step
            y = y_new
            f = k[6]  # FSAL
            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = _SAFETY * err ** (-_ALPHA) * err_prev ** _BETA
                factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
            # a clipped step says nothing about the natural step length
            h = min(max_step, (h_proposed if clipped else step) * (factor if not clipped or factor < 1 else 1.0))
            while k_out < t_eval.size and direction * (t_eval[k_out] - t) <= 0:
                out[k_out] = y
                k_out += 1
        else:
            nrejected += 1
            if not np.isfinite(err):
                factor = _MIN_FACTOR
            else:
                factor = max(_MIN_FACTOR, _SAFETY * err ** (-_ALPHA))
            h = step * factor
            if h < 16 * np.spacing(abs(t)) + 1e-300:
                raise StepFailure(f"step size underflow at t={t:.17g}")

    return Solution(t_eval, out, nsteps, nrejected)
