"""Command-line front end.

    rdshock {solve|boundary|shock-compare|stability|phase-plane} --config PATH
            [--out DIR] [--format csv|json]

The config schema is described in :mod:`rdshock.config`. One [command]
section may serve several subcommands; each reads the keys it knows and keys
known to no subcommand are rejected. Keys (all optional):

solve
    family (travelling | receding | colliding, default from c1, c2),
    times (list, default 0), x_min, x_max, n_x, rule (continuity | equal_area)
boundary
    family, t_min, t_max, n_t (default 0..40, 41 points); without a range
    the ``times`` list is used
shock-compare
    t (display time for the shock locations, default 0), n_scan
stability
    n_alpha, alpha_max, n_samples, scan (bool), scan_n_a, scan_n_b,
    a_min, a_max, b_min, b_max
phase-plane
    n_u, n_q (40 x 40), u_min, u_max (0 .. 1.05), q_min, q_max, n_traj

``out`` and ``format`` may also be set in [command]; the command line wins,
and the RDSHOCK_OUT environment variable wins over both.

Files written
    solve          profile_NNN, shocked_NNN (one per requested t), shock.json
    boundary       boundary
    shock-compare  shock_compare.json
    stability      constant_states.json, dispersion_essential, dispersion_u0,
                   dispersion_u1, sturm_trace, region_mask
    phase-plane    field, trajectory, nullclines

Tables go to NAME.csv (header row, comma separated, LF line endings, floats
as 17 significant digits) or NAME.json (a list of records). Exit codes: 0 on
success, 2 on a bad config, 3 on a numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from rdshock.config import load_config
from rdshock.errors import ConfigError, ConvergenceError, InfeasibleShockError, NumericalError
from rdshock.model import eval_flux_potential
from rdshock.phase_plane import analytic_trajectory, field_grid, nullclines_and_walls
from rdshock.shock import RULES, ShockPair, apply_shock, find_shock, locate_shock, shock_continuity_report, shock_quadratic_closed_form
from rdshock.solution import FAMILIES, boundary_records, infer_family, sample_profile
from rdshock.stability import (
    GridSpec,
    classify_constant_state,
    constant_state_dispersion,
    essential_spectrum_curve,
    stability_region_scan,
    sturm_criterion_trace,
)

SUBCOMMANDS = ("solve", "boundary", "shock-compare", "stability", "phase-plane")
FORMATS = ("csv", "json")
DEFAULT_OUT = "rdshock-out"
EQUAL_TOL = 1e-9

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# x windows that cover the support of each family at moderate times
X_RANGES = {"travelling": (-15.0, 1.0, 1601), "receding": (0.0, 2.0, 801), "colliding": (-6.0, 6.0, 1201)}


# {{{ output

def fmt_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.16e}"
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


class Writer:
    def __init__(self, out_dir, fmt):
        self.out = Path(out_dir)
        self.fmt = fmt
        self.written = []

    def _path(self, name):
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        self.written.append(path)
        return path

    def json(self, name, obj):
        text = json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"
        with open(self._path(name + ".json"), "w", newline="\n") as fh:
            fh.write(text)

    def table(self, name, header, rows, as_json=None):
        """CSV table, or ``as_json`` (default: list of records) in json mode."""
        if self.fmt == "json":
            self.json(name, as_json if as_json is not None else [dict(zip(header, r)) for r in rows])
            return
        with open(self._path(name + ".csv"), "w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for r in rows:
                fh.write(",".join(fmt_value(v) for v in r) + "\n")

# }}}


def _family(cfg):
    family = cfg.get("family")
    if family is None:
        try:
            return infer_family(cfg.params)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if family not in FAMILIES:
        raise ConfigError(f"[command] family = {family!r}; expected one of {', '.join(FAMILIES)}")
    try:
        actual = infer_family(cfg.params)
    except ValueError:
        actual = None
    if actual != family:
        raise ConfigError(f"[params] c1 = {cfg.params.c1}, c2 = {cfg.params.c2} do not describe a {family} solution")
    return family


def _continuity_pair(model):
    if model.kind == "quadratic":
        return shock_quadratic_closed_form(model)
    return find_shock(model, "continuity")


def _positive_int(cfg, key, default, minimum=1):
    n = cfg.get_int(key, default)
    if n < minimum:
        raise ConfigError(f"[command] {key} must be at least {minimum}, got {n}")
    return n


# {{{ subcommands

def run_solve(cfg, w):
    model, params = cfg.model, cfg.params
    family = _family(cfg)
    rule = cfg.get("rule", "continuity")
    if rule not in RULES:
        raise ConfigError(f"[command] rule = {rule!r}; expected one of {', '.join(RULES)}")
    times = cfg.get_floats("times", [0.0])
    x0, x1, n = X_RANGES[family]
    x_min, x_max = cfg.get_float("x_min", x0), cfg.get_float("x_max", x1)
    n_x = _positive_int(cfg, "n_x", n, 2)
    if not x_min < x_max:
        raise ConfigError("[command] x_min must be below x_max")
    x_grid = np.linspace(x_min, x_max, n_x)
    pair = _continuity_pair(model) if rule == "continuity" else find_shock(model, rule)
    report = {"family": family, "pair": pair.to_dict(), "profiles": []}
    for i, t in enumerate(times):
        profile = sample_profile(model, params, t, x_grid)
        shocked = apply_shock(profile, pair)
        jumps = shock_continuity_report(model, params, pair, t) if shocked.shocks else None
        report["profiles"].append(
            {"t": t, "shocks": shocked.shocks, "continuity": jumps.to_dict() if jumps is not None else None}
        )
        w.table(
            f"profile_{i:03d}",
            ("x", "u", "branch", "t"),
            [(s.x, s.u, s.branch, float(t)) for s in profile.samples],
            as_json=profile.to_dict(),
        )
        w.table(
            f"shocked_{i:03d}",
            ("x", "u", "t"),
            [(x, u, float(t)) for x, u in zip(shocked.x, shocked.u)],
            as_json=shocked.to_dict(),
        )
    w.json("shock", report)


def _times(cfg):
    # an explicit range wins over the profile time list
    times = cfg.get_floats("times")
    if times is not None and not any(k in cfg.command for k in ("t_min", "t_max", "n_t")):
        return times
    n = _positive_int(cfg, "n_t", 41, 2)
    return [float(t) for t in np.linspace(cfg.get_float("t_min", 0.0), cfg.get_float("t_max", 40.0), n)]


def run_boundary(cfg, w):
    family = _family(cfg)
    rows = []
    for t in _times(cfg):
        for r in boundary_records(cfg.model, cfg.params, family, t):
            rows.append((r.t, r.position, r.flux, r.speed, r.stefan_residual))
    w.table("boundary", ("t", "L", "flux", "speed", "stefan_residual"), rows)


def run_shock_compare(cfg, w, verbose=False):
    model, params = cfg.model, cfg.params
    t = cfg.get_float("t", 0.0)
    n_scan = _positive_int(cfg, "n_scan", 200, 2)
    out = {"t": t}
    pairs = {}
    for rule in RULES:
        pair = find_shock(model, rule, n_scan=n_scan)
        xs = locate_shock(params, pair, t)
        pair = replace(pair, location=xs[0] if xs else None)
        pairs[rule] = pair
        report = shock_continuity_report(model, params, pair, t)
        out[rule] = {"pair": pair.to_dict(), "locations": xs, "report": report.to_dict()}
        if verbose:
            out[rule]["all_pairs"] = [p.to_dict() for p in find_shock(model, rule, n_scan=n_scan, return_all=True)]
    c, e = pairs["continuity"], pairs["equal_area"]
    out["equal"] = abs(c.u_l - e.u_l) <= EQUAL_TOL and abs(c.u_r - e.u_r) <= EQUAL_TOL
    out["equal_tol"] = EQUAL_TOL
    out["u_l_difference"] = e.u_l - c.u_l
    out["u_r_difference"] = e.u_r - c.u_r
    if c.location is not None and e.location is not None:
        out["location_difference"] = e.location - c.location
    else:
        out["location_difference"] = None
    w.json("shock_compare", out)


def _dispersion_rows(curve):
    return [(float(a), float(lam.real), float(lam.imag)) for a, lam in zip(curve.alphas, curve.lambdas)]


def run_stability(cfg, w):
    model, params = cfg.model, cfg.params
    n_alpha = _positive_int(cfg, "n_alpha", 201, 2)
    alpha_max = cfg.get_float("alpha_max", 10.0)
    alphas = np.linspace(-alpha_max, alpha_max, n_alpha)
    header = ("alpha", "re_lambda", "im_lambda")

    ess = essential_spectrum_curve(model, params, alphas)
    re_max, alpha_at = ess.max_real
    w.json(
        "constant_states",
        {
            "u0": classify_constant_state(model, params, 0).to_dict(),
            "u1": classify_constant_state(model, params, 1).to_dict(),
            "essential_spectrum": {"max_re_lambda": re_max, "alpha_at_max": alpha_at},
        },
    )
    w.table("dispersion_essential", header, _dispersion_rows(ess))
    for u_bar in (0, 1):
        w.table(f"dispersion_u{u_bar}", header, _dispersion_rows(constant_state_dispersion(model, params, u_bar, alphas)))

    try:
        pair = _continuity_pair(model)
    except InfeasibleShockError as exc:
        # u_l <= 0 leaves the upper interval only; the trace handles that
        if exc.u_l is None or exc.u_r is None or not exc.u_r < 1.0:
            raise
        pair = ShockPair(exc.u_l, exc.u_r, "continuity", float(eval_flux_potential(model, exc.u_l)))
    trace = sturm_criterion_trace(model, params, pair, n_samples=_positive_int(cfg, "n_samples", 200, 2))
    w.table("sturm_trace", ("u", "criterion", "interval"), list(zip(trace.u.tolist(), trace.values.tolist(), trace.interval)))

    if cfg.get_bool("scan", True):
        d = GridSpec()
        grid = GridSpec(
            a_min=cfg.get_float("a_min", d.a_min),
            a_max=cfg.get_float("a_max", d.a_max),
            n_a=_positive_int(cfg, "scan_n_a", d.n_a, 2),
            b_min=cfg.get_float("b_min", d.b_min),
            b_max=cfg.get_float("b_max", d.b_max),
            n_b=_positive_int(cfg, "scan_n_b", d.n_b, 2),
        )
        mask = stability_region_scan(grid, kappa=params.kappa, n_samples=_positive_int(cfg, "n_samples", 200, 2))
        w.table(
            "region_mask",
            ("a", "b", "shock_feasible", "sturm_ok", "stable"),
            [(c.a, c.b, c.shock_feasible, c.sturm_ok, c.stable) for c in mask.cells],
            as_json=mask.to_dict(),
        )


def run_phase_plane(cfg, w):
    model, params = cfg.model, cfg.params
    q0 = params.k * eval_flux_potential(model, 0.0)
    u_min, u_max = cfg.get_float("u_min", 0.0), cfg.get_float("u_max", 1.05)
    q_min = cfg.get_float("q_min", 1.2 * q0 if q0 < 0 else -0.2 * q0)
    q_max = cfg.get_float("q_max", -0.2 * q0 if q0 < 0 else 1.2 * q0)
    if not (u_min < u_max and q_min < q_max):
        raise ConfigError("[command] phase-plane ranges need u_min < u_max and q_min < q_max")
    us = np.linspace(u_min, u_max, _positive_int(cfg, "n_u", 40, 2))
    qs = np.linspace(q_min, q_max, _positive_int(cfg, "n_q", 40, 2))
    w.table(
        "field",
        ("u", "q", "du_dz", "dq_dz", "wall_flag"),
        [(s.u, s.q, s.du_dz, s.dq_dz, s.wall) for s in field_grid(model, params, us, qs)],
    )

    try:
        pair = _continuity_pair(model)
    except InfeasibleShockError:
        pair = None
    u_traj = np.linspace(0.0, 1.0, _positive_int(cfg, "n_traj", 501, 2))
    w.table("trajectory", ("u", "q", "branch"), [(p.u, p.q, p.branch) for p in analytic_trajectory(model, params, u_traj, pair)])

    nc = nullclines_and_walls(model, params, us)
    rows = [(u, q, "q_nullcline") for u, q in zip(nc.u.tolist(), nc.q_nullcline.tolist())]
    rows += [(u, q, "u_nullcline") for u, q in zip(nc.u.tolist(), nc.u_nullcline.tolist())]
    for name, u_wall in zip(("wall_a", "wall_b"), nc.walls):
        rows += [(float(u_wall), q_min, name), (float(u_wall), q_max, name)]
    w.table("nullclines", ("u", "q", "which"), rows)

# }}}


def build_parser():
    p = argparse.ArgumentParser(prog="rdshock", description="Exact shocked solutions of a reaction-diffusion equation with negative diffusivity.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, help="INI file with [model], [params], [command]")
    p.add_argument("--out", help=f"output directory (default {DEFAULT_OUT}; RDSHOCK_OUT overrides)")
    p.add_argument("--format", choices=FORMATS, help="table format (default csv)")
    p.add_argument("-v", "--verbose", action="store_true", help="shock-compare: also list every solving pair")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.subcommand)
        out = os.environ.get("RDSHOCK_OUT") or args.out or cfg.get("out") or DEFAULT_OUT
        fmt = args.format or cfg.get("format", "csv")
        if fmt not in FORMATS:
            raise ConfigError(f"[command] format = {fmt!r}; expected csv or json")
        w = Writer(out, fmt)
        if args.subcommand == "solve":
            run_solve(cfg, w)
        elif args.subcommand == "boundary":
            run_boundary(cfg, w)
        elif args.subcommand == "shock-compare":
            run_shock_compare(cfg, w, verbose=args.verbose)
        elif args.subcommand == "stability":
            run_stability(cfg, w)
        else:
            run_phase_plane(cfg, w)
    except ConfigError as exc:
        print(f"rdshock: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        msg = f"rdshock: numerical error: {exc}"
        if isinstance(exc, ConvergenceError) and exc.residuals is not None:
            msg += f" (residuals: {exc.residuals})"
        print(msg, file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # bad parameter combinations surface as ValueError from the library
        print(f"rdshock: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - keep the exit-code contract
        print(f"rdshock: unexpected failure: {exc!r}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in w.written:
        print(path)
    return EXIT_OK
