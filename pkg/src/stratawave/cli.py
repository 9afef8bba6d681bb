"""Command-line front end.

Subcommands: coeffs | rays | jacobian | break | solve | sweep | verify.
Every emitted file is CSV with a '#'-prefixed metadata header recording the
fully resolved configuration; numbers carry 17 significant digits so reruns
are byte-identical.  Flags override a key=value config file, which overrides
the built-in defaults; unknown config keys are hard errors.

Exit codes: 0 success, 2 config/validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import atmosphere as atm
from . import fv_solver as fv
from . import params as par
from . import thermo, transport
from .atmosphere import AtmosphereParams
from .errors import AdmissibilityError, DomainError, NumericalError
from .hyperbolic_core import verify_report
from .thermo import GasParams

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_SWEEP_DEFAULTS = {
    "beta": [0.02, 0.04, 0.06],
    "alpha": [0.15, 0.25, 0.35],
    "theta": [0.05, 0.1, 0.15],
    "omega": [0.1, 0.15, 0.2],
}

_DEFAULTS: dict[str, object] = {
    "alpha": 0.35,
    "beta": 0.06,
    "gamma": 1.01,
    "theta": 0.1,
    "omega": 0.1,
    "epsilon": 0.01,
    "t_start": "0",
    "t_eval": 1.4,
    "t_max": 10.0,
    "n_eta": 4097,
    "n_cells": 512,
    "xi_min": -1.0,
    "xi_max": math.pi + 3.0,
    "support": [0.0, math.pi],
    "mode": "direct",
    "g_form": "derived",
    "compare": False,
    "out": "-",
    "tol": 1e-10,
    # command extras (merged into one namespace for config-file simplicity)
    "samples": 15,
    "dt": 0.1,
    "sweep_param": "beta",
    "sweep_values": None,
    "closed_form": False,
    "quadratic_only": False,
    "snapshots": None,
    "reconstruction": "first-order",
    "cfl": 0.45,
    "boundary": "outflow",
    "alpha_values": [0.15, 0.25, 0.35],
    "beta_values": [0.02, 0.04, 0.06],
    "jobs": 4,
}


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, float) or isinstance(x, np.floating):
        return f"{float(x):.17g}"
    return str(x)


def _add_common(p: argparse.ArgumentParser) -> None:
    sup = argparse.SUPPRESS
    p.add_argument("--alpha", type=float, default=sup, help="attraction constant")
    p.add_argument("--beta", type=float, default=sup, help="covolume constant")
    p.add_argument("--gamma", type=float, default=sup, help="specific-heat ratio")
    p.add_argument("--theta", type=float, default=sup, help="density attenuation rate")
    p.add_argument("--omega", type=float, default=sup, help="sound-speed attenuation rate")
    p.add_argument("--epsilon", type=float, default=sup, help="amplitude parameter")
    p.add_argument(
        "--t-start", dest="t_start", default=sup,
        help="start time (number, or 'anchor' for the admissibility anchor t0; "
        "with 'anchor', --t-eval and --t-max are measured from it)",
    )
    p.add_argument("--t-eval", dest="t_eval", type=float, default=sup, help="evaluation time")
    p.add_argument("--t-max", dest="t_max", type=float, default=sup, help="breaking-search horizon")
    p.add_argument("--n-eta", dest="n_eta", type=int, default=sup, help="label-grid size")
    p.add_argument("--n-cells", dest="n_cells", type=int, default=sup, help="finite-volume cells")
    p.add_argument("--xi-min", dest="xi_min", type=float, default=sup)
    p.add_argument("--xi-max", dest="xi_max", type=float, default=sup)
    p.add_argument("--support", nargs=2, type=float, default=sup, metavar=("LO", "HI"))
    p.add_argument("--mode", choices=["direct", "assembled"], default=sup,
                   help="cubic-coefficient mode")
    p.add_argument("--g-form", dest="g_form", choices=["derived", "alt"], default=sup,
                   help="attenuation form (alt = retained theta-exponent variant)")
    p.add_argument("--compare", action="store_true", default=sup)
    p.add_argument("--tol", type=float, default=sup, help="integrator tolerance")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--out", default=sup, help="output path ('-' for stdout)")


def _parse_config_file(path: str) -> dict:
    values: dict[str, object] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for ln, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"{path}:{ln}: unknown key {key!r}")
        default = _DEFAULTS[key]
        try:
            if isinstance(default, bool):
                values[key] = val.lower() in ("1", "true", "yes", "on")
            elif isinstance(default, int):
                values[key] = int(val)
            elif isinstance(default, float):
                values[key] = float(val)
            elif isinstance(default, list) or default is None:
                values[key] = [float(v) for v in val.replace(",", " ").split()]
            else:
                values[key] = val
        except ValueError as exc:
            raise ConfigError(f"{path}:{ln}: bad value for {key}: {val!r}") from exc
    return values


def _resolve(args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        cfg.update(_parse_config_file(config_path))
    for key, val in vars(args).items():
        if key in ("command", "config"):
            continue
        cfg[key] = val
    return cfg


def _build_run(cfg: dict):
    gas = GasParams(
        alpha=float(cfg["alpha"]), beta=float(cfg["beta"]), gamma=float(cfg["gamma"]),
        epsilon=float(cfg["epsilon"]),
    )
    ap = AtmosphereParams(theta=float(cfg["theta"]), omega=float(cfg["omega"]))
    return gas, ap


def _resolve_times(cfg: dict, gas: GasParams, ap: AtmosphereParams):
    """Returns (t_start, t_eval_abs, t_max_abs, anchored)."""
    raw = str(cfg["t_start"]).strip()
    if raw == "anchor":
        t_start = par.resolve_anchor(gas, ap)
        anchored = True
    else:
        try:
            t_start = float(raw)
        except ValueError as exc:
            raise ConfigError(f"bad t_start {raw!r}") from exc
        anchored = False
    t_eval = float(cfg["t_eval"])
    t_max = float(cfg["t_max"])
    if anchored:
        return t_start, t_start + t_eval, t_start + t_max, anchored
    return t_start, t_eval, t_max, anchored


def _provider(cfg: dict, gas: GasParams, ap: AtmosphereParams, **overrides) -> transport.CoeffProvider:
    kw = dict(mode=str(cfg["mode"]), g_form=str(cfg["g_form"]))
    kw.update(overrides)
    return transport.CoeffProvider(gas, ap, **kw)


class _Writer:
    """CSV writer with a deterministic metadata header."""

    def __init__(self, cfg: dict, command: str):
        self.lines: list[str] = [f"# stratawave {command}"]
        items = []
        for key in sorted(cfg):
            val = cfg[key]
            if val is None or key == "out":  # the destination is not run config
                continue
            if isinstance(val, (list, tuple)):
                val = ",".join(_fmt(v) for v in val)
            else:
                val = _fmt(val)
            items.append(f"{key}={val}")
        self.lines.append("# config: " + " ".join(items))

    def meta(self, text: str) -> None:
        self.lines.append(f"# {text}")

    def header(self, *cols: str) -> None:
        self.lines.append(",".join(cols))

    def row(self, *vals) -> None:
        self.lines.append(",".join(_fmt(v) for v in vals))

    def dump(self, out: str) -> None:
        payload = "\n".join(self.lines) + "\n"
        if out == "-":
            sys.stdout.write(payload)
        else:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(payload)


def _sweep_pairs(cfg: dict):
    name = str(cfg["sweep_param"])
    if name not in _SWEEP_DEFAULTS:
        raise ConfigError(f"unknown sweep parameter {name!r}")
    values = cfg.get("sweep_values") or _SWEEP_DEFAULTS[name]
    return name, [float(v) for v in values]


def _substitute(cfg: dict, name: str, value: float):
    sub = dict(cfg)
    sub[name] = value
    return _build_run(sub)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_coeffs(cfg: dict) -> int:
    gas, ap = _build_run(cfg)
    t_start, t_eval, _, _ = _resolve_times(cfg, gas, ap)
    par.validate_run(gas, ap, t_start=t_start)
    n = int(cfg["samples"])
    if n < 1:
        raise ConfigError("samples must be >= 1")
    times = np.linspace(t_start, t_eval, n)
    w = _Writer(cfg, "coeffs")
    direct = _provider(cfg, gas, ap, mode="direct")
    assembled = _provider(cfg, gas, ap, mode="assembled")
    active = direct if cfg["mode"] == "direct" else assembled
    if cfg["compare"]:
        w.header("t", "A", "B_direct", "B_assembled", "B_discrepancy",
                 "g", "Gamma", "Gamma_hat", "Omega", "Lambda", "chi")
    else:
        w.header("t", "A", "B", "g", "Gamma", "Gamma_hat", "Omega", "Lambda", "chi")
    for t in times:
        t = float(t)
        x3 = atm.height_at(ap, t)
        rho0, a0 = atm.profiles(ap, x3)
        norm = atm.grad_phi_norm_at(ap, t)
        gam = thermo.quadratic_coefficient(gas, rho0, a0, norm)
        gam_hat = thermo.quadratic_coefficient_scaled(gas)
        omega_c = thermo.cubic_nonlinearity(gas, rho0, a0)
        lam = thermo.cubic_coefficient(gas, rho0, a0, norm)
        chi_val = atm.chi(gas, ap, t)
        if cfg["compare"]:
            bd, ba = float(direct.B(t)), float(assembled.B(t))
            w.row(t, float(active.A(t)), bd, ba, bd - ba,
                  float(active.g(t)), gam, gam_hat, omega_c, lam, chi_val)
        else:
            w.row(t, float(active.A(t)), float(active.B(t)), float(active.g(t)),
                  gam, gam_hat, omega_c, lam, chi_val)
    w.dump(str(cfg["out"]))
    return EXIT_OK


def cmd_rays(cfg: dict) -> int:
    gas, ap = _build_run(cfg)
    t_start, t_eval, _, _ = _resolve_times(cfg, gas, ap)
    par.validate_run(gas, ap, t_start=t_start)
    path = atm.trace_ray(ap, t_eval, dt=float(cfg["dt"]), tol=float(cfg["tol"]))
    w = _Writer(cfg, "rays")
    w.header("t", "x3", "grad_phi3", "x3_closed", "grad_phi3_closed", "err_x3", "err_grad")
    for ps in path:
        ref = atm.phase_closed_form(ap, ps.t)
        w.row(ps.t, ps.x3, ps.grad_phi[2], ref.x3, ref.grad_phi[2],
              ps.x3 - ref.x3, ps.grad_phi[2] - ref.grad_phi[2])
    w.dump(str(cfg["out"]))
    return EXIT_OK


def cmd_jacobian(cfg: dict) -> int:
    name, values = _sweep_pairs(cfg)
    lo, hi = (float(v) for v in cfg["support"])
    profile = transport.sine_profile((lo, hi))
    w = _Writer(cfg, "jacobian")
    cols = ["sweep_param", "sweep_value", "eta", "jac_variational"]
    if cfg["closed_form"]:
        cols.append("jac_closed_form")
    w.header(*cols)
    for value in values:
        gas, ap = _substitute(cfg, name, value)
        t_start, t_eval, _, _ = _resolve_times(cfg, gas, ap)
        par.validate_run(gas, ap, t_start=t_start)
        w.meta(f"{name}={_fmt(value)} t0="
               + (_fmt(par.anchor_time(gas, ap)) if _has_anchor(gas, ap) else "undefined"))
        provider = _provider(cfg, gas, ap)
        bundle = transport.make_bundle(profile, t_start, n_eta=int(cfg["n_eta"]))
        bundle = transport.advance_characteristics(bundle, provider, t_eval, tol=float(cfg["tol"]))
        sl = slice(bundle.n_ghost, bundle.eta.size - bundle.n_ghost)
        closed = None
        if cfg["closed_form"]:
            closed = transport.jacobian_closed_form(bundle.eta[sl], t_eval, gas, ap)
        for i, (eta, jac) in enumerate(zip(bundle.eta[sl], bundle.jac[sl])):
            if closed is None:
                w.row(name, value, eta, jac)
            else:
                w.row(name, value, eta, jac, closed[i])
    w.dump(str(cfg["out"]))
    return EXIT_OK


def _has_anchor(gas: GasParams, ap: AtmosphereParams) -> bool:
    try:
        par.anchor_time(gas, ap)
        return True
    except AdmissibilityError:
        return False


def cmd_break(cfg: dict) -> int:
    name, values = _sweep_pairs(cfg)
    lo, hi = (float(v) for v in cfg["support"])
    profile = transport.sine_profile((lo, hi))
    w = _Writer(cfg, "break")
    w.header("sweep_param", "sweep_value", "t_start", "t_break_abs", "t_break_elapsed")
    for value in values:
        gas, ap = _substitute(cfg, name, value)
        t_start, _, t_max, _ = _resolve_times(cfg, gas, ap)
        par.validate_run(gas, ap, t_start=t_start)
        overrides = {}
        if cfg["quadratic_only"]:
            overrides = dict(include_cubic=False, include_source=False, include_forcing=False)
        provider = _provider(cfg, gas, ap, **overrides)
        result = transport.breaking_time(
            gas, ap, profile, t_start=t_start, t_max=t_max,
            n_eta=int(cfg["n_eta"]), tol=float(cfg["tol"]), provider=provider,
        )
        if result.t_break is None:
            w.row(name, value, t_start, "none", "none")
        else:
            w.row(name, value, t_start, result.t_break, result.t_break - t_start)
    w.dump(str(cfg["out"]))
    return EXIT_OK


def cmd_solve(cfg: dict) -> int:
    gas, ap = _build_run(cfg)
    t_start, t_eval, _, anchored = _resolve_times(cfg, gas, ap)
    par.validate_run(gas, ap, t_start=t_start)
    provider = _provider(cfg, gas, ap)
    lo, hi = (float(v) for v in cfg["support"])
    profile = transport.sine_profile((lo, hi))
    xi_min, xi_max = float(cfg["xi_min"]), float(cfg["xi_max"])
    field = fv.make_field(
        profile.f(np.linspace(xi_min, xi_max, int(cfg["n_cells"]) * 2 + 1)[1::2]),
        xi_min=xi_min, xi_max=xi_max, t=t_start,
    )
    scfg = fv.SolverConfig(
        cfl=float(cfg["cfl"]), boundary=str(cfg["boundary"]),
        reconstruction=str(cfg["reconstruction"]),
    )
    snaps = cfg.get("snapshots")
    snap_times = sorted(float(s) + (t_start if anchored else 0.0) for s in snaps) if snaps else [t_eval]
    if snap_times[-1] < t_eval:
        snap_times.append(t_eval)
    fields = fv.solve(field, provider, max(snap_times), scfg, snapshot_times=snap_times)

    compare_bundle = None
    if cfg["compare"]:
        pad = (xi_max - xi_min)
        bundle = transport.make_bundle(profile, t_start, n_eta=int(cfg["n_eta"]), pad=pad)
        compare_bundle = bundle

    w = _Writer(cfg, "solve")
    cols = ["t", "xi", "sigma"]
    if cfg["compare"]:
        cols.append("sigma_characteristics")
    w.header(*cols)
    for fld in fields:
        w.meta(f"t={_fmt(fld.t)} total_variation={_fmt(fv.total_variation(fld.sigma))}")
        char_vals = None
        if compare_bundle is not None:
            compare_bundle = transport.advance_characteristics(
                compare_bundle, provider, fld.t, tol=float(cfg["tol"])
            )
            if float(np.min(compare_bundle.jac)) > 0.0:
                char_vals = transport.sample_characteristics(compare_bundle, fld.centers)
        for i, (xi, sg) in enumerate(zip(fld.centers, fld.sigma)):
            if cfg["compare"]:
                w.row(fld.t, xi, sg, char_vals[i] if char_vals is not None else math.nan)
            else:
                w.row(fld.t, xi, sg)
    w.dump(str(cfg["out"]))
    return EXIT_OK


def _sweep_one(cfg: dict, alpha: float, beta: float):
    sub = dict(cfg)
    sub["alpha"] = alpha
    sub["beta"] = beta
    gas, ap = _build_run(sub)
    t_start, t_eval, t_max, _ = _resolve_times(sub, gas, ap)
    par.validate_run(gas, ap, t_start=t_start)
    provider = _provider(sub, gas, ap)
    profile = transport.sine_profile(tuple(float(v) for v in sub["support"]))
    result = transport.breaking_time(
        gas, ap, profile, t_start=t_start, t_max=t_max,
        n_eta=int(sub["n_eta"]), tol=float(sub["tol"]), provider=provider,
    )
    bundle = transport.make_bundle(profile, t_start, n_eta=int(sub["n_eta"]))
    bundle = transport.advance_characteristics(bundle, provider, t_eval, tol=float(sub["tol"]))
    t0 = par.anchor_time(gas, ap) if _has_anchor(gas, ap) else math.nan
    return (
        alpha, beta, t0,
        result.t_break if result.t_break is not None else None,
        float(np.min(bundle.jac)),
    )


def cmd_sweep(cfg: dict) -> int:
    alphas = [float(v) for v in cfg["alpha_values"]]
    betas = [float(v) for v in cfg["beta_values"]]
    grid = [(a, b) for a in alphas for b in betas]
    jobs = max(1, int(cfg["jobs"]))
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_sweep_one, cfg, a, b) for (a, b) in grid]
        results = [f.result() for f in futures]  # configured order preserved
    w = _Writer(cfg, "sweep")
    w.header("alpha", "beta", "t0_anchor", "t_break", "min_jac_at_t_eval")
    for alpha, beta, t0, t_break, min_jac in results:
        w.row(alpha, beta, t0, "none" if t_break is None else t_break, min_jac)
    w.dump(str(cfg["out"]))
    return EXIT_OK


def cmd_verify(cfg: dict) -> int:
    gas, _ = _build_run(cfg)
    checks = verify_report(gas)
    width = max(len(c.name) for c in checks)
    all_ok = True
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        all_ok &= c.passed
        lines.append(f"{status} {c.name:<{width}} residual={c.residual:.3e} tol={c.tolerance:.1e}")
    out = str(cfg["out"])
    payload = "\n".join(lines) + "\n"
    if out == "-":
        sys.stdout.write(payload)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    return EXIT_OK if all_ok else EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stratawave",
        description="Nonlinear acoustic transport in a stratified van der Waals atmosphere",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sup = argparse.SUPPRESS

    p = sub.add_parser("coeffs", help="tabulate evolution-equation coefficients")
    _add_common(p)
    p.add_argument("--samples", type=int, default=sup, help="number of sampled times")

    p = sub.add_parser("rays", help="trace the vertical ray against its closed form")
    _add_common(p)
    p.add_argument("--dt", type=float, default=sup, help="output sampling step")

    p = sub.add_parser("jacobian", help="label-map Jacobian curves for a parameter sweep")
    _add_common(p)
    p.add_argument("--sweep-param", dest="sweep_param",
                   choices=sorted(_SWEEP_DEFAULTS), default=sup)
    p.add_argument("--sweep-values", dest="sweep_values", nargs="+", type=float, default=sup)
    p.add_argument("--closed-form", dest="closed_form", action="store_true", default=sup,
                   help="also emit the fixed closed-form Jacobian (comparison only)")

    p = sub.add_parser("break", help="breaking times for a parameter sweep")
    _add_common(p)
    p.add_argument("--sweep-param", dest="sweep_param",
                   choices=sorted(_SWEEP_DEFAULTS), default=sup)
    p.add_argument("--sweep-values", dest="sweep_values", nargs="+", type=float, default=sup)
    p.add_argument("--quadratic-only", dest="quadratic_only", action="store_true", default=sup,
                   help="drop the cubic term, attenuation and forcing")

    p = sub.add_parser("solve", help="finite-volume solution with snapshots")
    _add_common(p)
    p.add_argument("--snapshots", nargs="+", type=float, default=sup)
    p.add_argument("--reconstruction", choices=["first-order", "slope-limited"], default=sup)
    p.add_argument("--cfl", type=float, default=sup)
    p.add_argument("--boundary", choices=["outflow", "periodic"], default=sup)

    p = sub.add_parser("sweep", help="Cartesian (alpha, beta) grid of breaking runs")
    _add_common(p)
    p.add_argument("--alpha-values", dest="alpha_values", nargs="+", type=float, default=sup)
    p.add_argument("--beta-values", dest="beta_values", nargs="+", type=float, default=sup)
    p.add_argument("--jobs", type=int, default=sup)

    p = sub.add_parser("verify", help="run the coefficient oracle cross-checks")
    _add_common(p)
    return parser


_COMMANDS = {
    "coeffs": cmd_coeffs,
    "rays": cmd_rays,
    "jacobian": cmd_jacobian,
    "break": cmd_break,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _resolve(args)
        command = _COMMANDS[args.command]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return command(cfg)
    except (ConfigError, AdmissibilityError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, NumericalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
