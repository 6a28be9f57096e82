"""Flat ``key = value`` scenario files for the command-line tool.

Every output file echoes its effective configuration as ``# config: key = value``
header lines. When a file contains such lines only those are read, so an
output file can be passed back as ``--config`` to reproduce it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .exceptions import ConfigError
from .fields import FieldKind, FieldModel, FieldParams, ScalarField2D, TransverseMomenta

ECHO_PREFIX = "config:"

# name: (type, help)
KEYS = {
    "model": (str, "field model: plane_wave or standing_wave"),
    "amplitude": (float, "electric field amplitude"),
    "omega": (float, "angular frequency"),
    "delta": (float, "plane-wave polarisation parameter, |delta| <= 1"),
    "charge_mass_ratio": (float, "q/m"),
    "eta": (float, "impulse factor q E / (m omega)"),
    "p_y": (float, "transverse canonical momentum P_y"),
    "p_z": (float, "transverse canonical momentum P_z"),
    "t0": (float, "initial lab time"),
    "x0": (float, "initial position"),
    "dx_dtau0": (float, "initial dx/dtau (dt/dtau follows from the mass shell)"),
    "J0": (float, "initial Jacobi field J^x"),
    "dJ0": (float, "initial dJ^x/dT"),
    "cycles": (float, "duration in optical cycles"),
    "samples_per_cycle": (int, "output samples per optical cycle"),
    "tol": (float, "relative integration tolerance"),
    "eta_min": (float, "scan start"),
    "eta_max": (float, "scan end"),
    "step": (float, "scan step"),
    "refine_tol": (float, "bisection tolerance for zone boundaries"),
    "grid": (int, "points per axis of the curvature map"),
}


def _convert(key, text):
    if key not in KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    kind = KEYS[key][0]
    try:
        value = kind(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    return value


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    If the text carries ``# config:`` echo lines (an output file), only those
    lines are read.
    """
    lines = text.splitlines()
    echoed = [ln.lstrip("#").strip()[len(ECHO_PREFIX):] for ln in lines if ln.lstrip("#").strip().startswith(ECHO_PREFIX)]
    if echoed:
        lines = echoed
    values = {}
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = _convert(key, value)
    return values


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


def format_value(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def echo_lines(values: dict) -> list:
    """Header lines reproducing ``values`` (without the leading ``#``)."""
    return [f"{ECHO_PREFIX} {k} = {format_value(values[k])}" for k in KEYS if k in values]


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario: field, momenta, initial data, duration and tolerances."""

    values: dict = field(repr=False)
    kind: FieldKind | None
    params: FieldParams | None
    momenta: TransverseMomenta
    eta: float | None
    initial: tuple  # (t0, x0, dx_dtau0)
    jacobi_initial: tuple  # (J0, dJ0)
    cycles: float
    samples_per_cycle: int
    tol: float

    @classmethod
    def from_values(cls, values: dict) -> "ScenarioConfig":
        """Resolve and cross-check the raw values.

        ``eta`` and ``(amplitude, omega, charge_mass_ratio)`` may both be
        given only if they agree; given ``eta`` and ``omega`` the amplitude is
        derived.

        Raises
        ------
        ConfigError
            On contradictory or out-of-range values.
        """
        v = dict(values)
        qm = v.get("charge_mass_ratio", 1.0)
        params = None
        eta = v.get("eta")
        if "omega" in v:
            if v["omega"] <= 0:
                raise ConfigError("omega must be > 0")
            if "amplitude" not in v:
                if eta is None:
                    raise ConfigError("give amplitude or eta together with omega")
                if qm == 0:
                    raise ConfigError("charge_mass_ratio = 0 cannot produce eta > 0")
                v["amplitude"] = eta * v["omega"] / qm if eta else 0.0
            try:
                params = FieldParams(v["amplitude"], v["omega"], v.get("delta", 1.0), qm)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            if eta is not None and abs(params.eta - eta) > 1e-12 * max(1.0, abs(eta)):
                raise ConfigError(f"eta = {eta!r} contradicts q E / (m omega) = {params.eta!r}")
            eta = params.eta
        elif "amplitude" in v:
            raise ConfigError("amplitude given without omega")
        if eta is not None and eta < 0:
            raise ConfigError("eta must be >= 0")
        kind = None
        if "model" in v:
            try:
                kind = FieldKind(v["model"])
            except ValueError as exc:
                raise ConfigError(f"model must be plane_wave or standing_wave, got {v['model']!r}") from exc
        tol = v.get("tol", 1e-10)
        if not 0 < tol < 1:
            raise ConfigError("tol must lie in (0, 1)")
        cycles = v.get("cycles", 10.0)
        if cycles < 0:
            raise ConfigError("cycles must be >= 0")
        spc = v.get("samples_per_cycle", 256)
        if spc <= 0:
            raise ConfigError("samples_per_cycle must be > 0")
        if kind is FieldKind.PLANE_WAVE_ELLIPTIC and params is not None and abs(params.delta) > 1:
            raise ConfigError("plane wave needs |delta| <= 1")
        return cls(
            values=v,
            kind=kind,
            params=params,
            momenta=TransverseMomenta(v.get("p_y", 0.0), v.get("p_z", 0.0)),
            eta=eta,
            initial=(v.get("t0", 0.0), v.get("x0", 0.0), v.get("dx_dtau0", 0.0)),
            jacobi_initial=(v.get("J0", 1.0), v.get("dJ0", 0.0)),
            cycles=cycles,
            samples_per_cycle=spc,
            tol=tol,
        )

    def require_field(self) -> ScalarField2D:
        if self.params is None:
            raise ConfigError("missing omega (and amplitude or eta) for the field")
        if self.kind is None:
            raise ConfigError("missing model")
        return ScalarField2D(FieldModel(self.kind, self.params), self.momenta)

    def require_eta(self) -> float:
        if self.eta is None:
            raise ConfigError("missing eta (or amplitude and omega)")
        return self.eta
