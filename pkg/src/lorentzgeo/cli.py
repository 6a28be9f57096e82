"""Command-line front end: ``lorentzgeo <command> [--config FILE] [--key value ...]``.

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .averaging import integrate_landau, per_cycle_max, ponderomotive_frequency, ponderomotive_stiffness, resonance_report
from .config import KEYS, ScenarioConfig, echo_lines, load_config
from .dynamics import LongitudinalState, integrate_longitudinal, recover_transverse, write_csv
from .exceptions import ConfigError, LorentzGeoError
from .fields import FieldKind
from .floquet import characteristic_function, floquet_exponent, integrate_jacobi, monodromy, scan_zones
from .planewave import plane_wave_orbit

QUADRATURE_CHECK_TOL = 1e-8

# per-command defaults, applied below config file and flags
DEFAULTS = {
    "orbit": {"cycles": 10.0, "tol": 1e-10},
    "curvature": {"grid": 101},
    "floquet": {"eta_min": 0.0, "eta_max": 2.0, "step": 1e-3, "refine_tol": 1e-8, "tol": 1e-12},
    "zones": {"eta_min": 0.0, "eta_max": 2.0, "step": 1e-3, "refine_tol": 1e-8, "tol": 1e-12},
    "jacobi": {"cycles": 10.0, "tol": 1e-12},
    "landau": {"cycles": 10.0, "tol": 1e-12},
    "pondero": {"cycles": 10.0, "tol": 1e-12},
    "resonance": {"eta": 1.2, "cycles": 30.0, "tol": 1e-12},
}

HELP = {
    "orbit": "integrate a world line (with transverse recovery)",
    "curvature": "Gaussian curvature map on a (t, x) grid",
    "floquet": "scan the characteristic function phi(eta)",
    "zones": "stability and instability zones in eta",
    "jacobi": "Jacobi field along the node orbit x = 0",
    "landau": "Landau decomposition trace with averaged and ponderomotive centres",
    "pondero": "ponderomotive centre against the Landau oscillation centre",
    "resonance": "growth rates and ponderomotive breakdown in a resonance zone",
}


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorentzgeo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in DEFAULTS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", metavar="PATH", help="flat key = value file (or a previous output)")
        p.add_argument("--out", metavar="PATH", help=f"output CSV (default {name}.csv)")
        for key, (kind, text) in KEYS.items():
            p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=kind, default=None, help=text)
    return parser


def resolve(args) -> ScenarioConfig:
    values = dict(DEFAULTS[args.command])
    if args.config:
        values.update(load_config(args.config))
    values.update({k: getattr(args, k) for k in KEYS if getattr(args, k) is not None})
    return ScenarioConfig.from_values(values)


def _emit(out: Path, command: str, cfg: ScenarioConfig, columns: dict, extra=()):
    comments = [f"lorentzgeo {command}", *echo_lines(cfg.values), *extra]
    with open(out, "w", newline="") as fh:
        write_csv(fh, columns, comments)


def _sidecar(out: Path, payload: dict):
    with open(out.with_suffix(".json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_orbit(cfg, out):
    field = cfg.require_field()
    t0, x0, dx0 = cfg.initial
    start = LongitudinalState.on_shell(field, t0, x0, dx0)
    tau_end = cfg.cycles * cfg.params.optical_cycle
    wl = integrate_longitudinal(field, start, tau_end, tol=cfg.tol, atol=1e-2 * cfg.tol,
                                samples_per_cycle=cfg.samples_per_cycle)
    wl = recover_transverse(field.model, field.momenta, wl)
    residual = np.abs(wl.hamiltonian_residual())
    summary = {"max_hamiltonian_residual": float(residual.max()), "samples": len(wl)}
    extra = [f"max |H + 1/2| = {residual.max():.3e}"]
    ok = True
    if cfg.kind is FieldKind.PLANE_WAVE_ELLIPTIC:
        ref = plane_wave_orbit(field.model, field.momenta, start, tau_eval=wl.tau)
        dev = max(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b))) for a, b in
                  ((wl.t, ref.t), (wl.x, ref.x), (wl.y, ref.y), (wl.z, ref.z)))
        ok = dev < QUADRATURE_CHECK_TOL
        summary.update(quadrature_deviation=float(dev), quadrature_check="pass" if ok else "fail")
        extra.append(f"quadrature_check: {summary['quadrature_check']} (deviation {dev:.3e})")
    cols = dict(wl.columns)
    cols["H_residual"] = wl.hamiltonian_residual()
    _emit(out, "orbit", cfg, cols, extra)
    _sidecar(out, summary)
    print(extra[0])
    if len(extra) > 1:
        print(extra[1])
    return 0 if ok else 1


def cmd_curvature(cfg, out):
    field = cfg.require_field()
    n = cfg.values["grid"]
    if n < 1:
        raise ConfigError("grid must be >= 1")
    lam = cfg.params.optical_cycle
    t = np.linspace(0.0, lam, n)
    T, X = np.meshgrid(t, t, indexing="ij")
    K = field.curvature(T, X)
    _emit(out, "curvature", cfg, {"t": T.ravel(), "x": X.ravel(), "K": K.ravel()})
    _sidecar(out, {"max_abs_K": float(np.max(np.abs(K)))})
    print(f"max |K| = {np.max(np.abs(K)):.3e}")
    return 0


def _scan_settings(cfg):
    v = cfg.values
    if v["step"] <= 0:
        raise ConfigError("step must be > 0")
    if v["eta_min"] < 0 or v["eta_max"] <= v["eta_min"]:
        raise ConfigError("need 0 <= eta_min < eta_max")
    return v["eta_min"], v["eta_max"], v["step"], v["refine_tol"]


def _zones_columns(zones):
    return {
        "zone_index": np.arange(len(zones.zones)),
        "kind": [1.0 if z.kind == "stable" else 0.0 for z in zones.zones],
        "eta_left": [z.left for z in zones.zones],
        "eta_right": [z.right for z in zones.zones],
    }


def _write_zones(path, cfg, command, zones):
    comments = [f"lorentzgeo {command}", *echo_lines(cfg.values), "kind: 1 = stable, 0 = unstable"]
    with open(path, "w", newline="") as fh:
        write_csv(fh, _zones_columns(zones), comments)


def _zones_summary(zones):
    return {
        "boundaries": zones.boundaries,
        "zones": [{"kind": z.kind, "eta_left": z.left, "eta_right": z.right} for z in zones.zones],
    }


def cmd_floquet(cfg, out):
    lo, hi, step, refine = _scan_settings(cfg)
    zones = scan_zones(hi, step, refine, cfg.momenta.p_y, cfg.tol, eta_min=lo)
    eta = np.concatenate([zones.eta_grid, zones.boundaries])
    phi = np.concatenate([zones.phi_grid, characteristic_function(zones.boundaries, cfg.momenta.p_y, cfg.tol)])
    order = np.argsort(eta, kind="stable")
    eta, phi = eta[order], phi[order]
    # eta = 0 is parabolic (phi = 1) but is the left edge of the first stable zone
    stable = (np.abs(phi) < 1) | (eta == 0)
    cols = {"eta": eta, "phi": phi, "abs_phi_minus_1": np.abs(phi) - 1.0, "stable_flag": stable.astype(float)}
    _emit(out, "floquet", cfg, cols, [f"boundaries: {' '.join(repr(b) for b in zones.boundaries) or 'none'}"])
    _write_zones(out.with_name(out.stem + "_zones.csv"), cfg, "floquet", zones)
    _sidecar(out, _zones_summary(zones))
    print(f"{len(zones.boundaries)} boundaries in [{lo}, {hi}]" + (f"; first at {zones.boundaries[0]:.6f}" if zones.boundaries else ""))
    return 0


def cmd_zones(cfg, out):
    lo, hi, step, refine = _scan_settings(cfg)
    zones = scan_zones(hi, step, refine, cfg.momenta.p_y, cfg.tol, eta_min=lo)
    _write_zones(out, cfg, "zones", zones)
    _sidecar(out, _zones_summary(zones))
    for z in zones.zones:
        print(f"{z.kind:9s} ({z.left:.8f}, {z.right:.8f})")
    return 0


def cmd_jacobi(cfg, out):
    eta = cfg.require_eta()
    series = integrate_jacobi(eta, cfg.momenta.p_y, cfg.jacobi_initial, cfg.cycles, cfg.samples_per_cycle, cfg.tol)
    res = monodromy(eta, cfg.momenta.p_y, cfg.tol)
    _emit(out, "jacobi", cfg, {"T": series.T, "Jx": series.J, "dJx": series.dJ})
    _sidecar(out, {"phi": res.phi, "mu": res.mu, "stable": res.stable, "det": res.det})
    print(f"phi = {res.phi:.6f}, mu = {res.mu:.6f}")
    return 0


def _landau_trace(cfg):
    if cfg.momenta.p_y != 0:
        raise ConfigError("the Landau decomposition is implemented for p_y = 0")
    return integrate_landau(cfg.require_eta(), cfg.jacobi_initial, cfg.cycles, cfg.tol, cfg.samples_per_cycle)


def cmd_landau(cfg, out):
    tr = _landau_trace(cfg)
    _emit(out, "landau", cfg, tr.columns)
    summary = {"samples": len(tr)}
    if len(tr):
        summary.update(
            max_J_minus_X=float(np.max(np.abs(tr.J - tr.X))),
            max_J_minus_Xbar=float(np.max(np.abs(tr.J - tr.Xbar))),
            max_J_minus_Xp=float(np.max(np.abs(tr.J - tr.Xp))),
        )
    _sidecar(out, summary)
    return 0


def cmd_pondero(cfg, out):
    tr = _landau_trace(cfg)
    eta = tr.eta
    cols = {"T": tr.T, "X": tr.X, "Xbar": tr.Xbar, "Xp": tr.Xp, "xi": tr.xi, "xip": tr.xip,
            "xip_from_Xp": tr.xip_from_Xp, "abs_X_minus_Xp": np.abs(tr.X - tr.Xp), "env_VE4": tr.envelopes.pondero}
    _emit(out, "pondero", cfg, cols)
    _sidecar(out, {"omega_p": ponderomotive_frequency(eta), "omega_p_squared_from_average": ponderomotive_stiffness(eta)})
    return 0


def cmd_resonance(cfg, out):
    tr = _landau_trace(cfg)
    res = monodromy(tr.eta, 0.0, cfg.tol)
    rep = resonance_report(tr, floquet_exponent(res.phi))
    cols = {
        "cycle": np.arange(len(rep.X_minus_Xp)),
        "max_Jx": per_cycle_max(tr.T, tr.J),
        "max_X": per_cycle_max(tr.T, tr.X),
        "max_xi": per_cycle_max(tr.T, tr.xi),
        "max_X_minus_Xp": rep.X_minus_Xp,
    }
    _emit(out, "resonance", cfg, cols)
    r = rep.rates
    summary = {
        "phi": res.phi, "mu": rep.mu, "rate_J": r.J, "rate_X": r.X, "rate_xi": r.xi, "fit_tol": r.fit_tol,
        "rate_matches_mu": rep.rate_matches_mu, "landau_not_slower": r.landau_not_slower(),
        "breakdown_monotone": rep.breakdown_monotone, "Xp_bounded": rep.Xp_bounded,
    }
    _sidecar(out, summary)
    print(f"mu = {rep.mu:.6f}; fitted rates J {r.J:.6f}, X {r.X:.6f}, xi {r.xi:.6f}")
    return 0


COMMANDS = {
    "orbit": cmd_orbit, "curvature": cmd_curvature, "floquet": cmd_floquet, "zones": cmd_zones,
    "jacobi": cmd_jacobi, "landau": cmd_landau, "pondero": cmd_pondero, "resonance": cmd_resonance,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad usage
    out = Path(args.out or f"{args.command}.csv")
    try:
        cfg = resolve(args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"lorentzgeo {args.command}: error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"lorentzgeo {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (LorentzGeoError, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"lorentzgeo {args.command}: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
