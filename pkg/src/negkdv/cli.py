"""Command-line interface.

JSON goes to stdout, logs to stderr.  Exit codes: 0 success, 1 numerical
failure, 2 rejected input.  Files are written under ``--out-dir``, which
defaults to ``$NEGKDV_OUTPUT_DIR`` or the current directory.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import closed_form, hamiltonian_ode, operators, pde_sim, phase_plane
from .errors import DivergenceError, NumericFailure, RejectedInput

log = logging.getLogger("negkdv")

OUTPUT_ENV = "NEGKDV_OUTPUT_DIR"

_NUM = {"type": "number"}
_NUM_OR_NULL = {"type": ["number", "null"]}

SIMULATE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["case", "c", "g", "grid", "closure", "dt", "t_end"],
    "properties": {
        "case": {"enum": ["soliton25", "dn26", "SOLITON_25", "DN_26"]},
        "c": _NUM, "g": _NUM, "h": _NUM_OR_NULL,
        "grid": {
            "type": "object", "additionalProperties": False, "required": ["n"],
            "properties": {"x0": _NUM_OR_NULL, "dx": _NUM_OR_NULL,
                           "n": {"type": "integer", "minimum": 8}},
        },
        "closure": {"enum": ["periodic", "decaying"]},
        "gauge": {"enum": ["conserve_L2", "anchored"]},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "t_end": {"type": "number", "exclusiveMinimum": 0},
        "output_every": {"type": ["integer", "null"], "minimum": 1},
        "u_min": _NUM,
    },
}

ODE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["c", "g", "U0", "y0", "dxi", "steps"],
    "properties": {
        "c": _NUM, "g": _NUM, "U0": _NUM, "y0": _NUM,
        "dxi": {"type": "number", "exclusiveMinimum": 0},
        "steps": {"type": "integer", "minimum": 1},
        "method": {"enum": ["leapfrog", "rk4"]},
        "every": {"type": "integer", "minimum": 1},
        "overflow_guard": _NUM,
    },
}

AUDIT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["regimes"],
    "properties": {
        "regimes": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "additionalProperties": False,
                      "required": ["c", "g"], "properties": {"c": _NUM, "g": _NUM}},
        },
    },
}


def _load_config(path, schema):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise RejectedInput(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise RejectedInput(f"config {path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, schema)
    except jsonschema.ValidationError as exc:
        raise RejectedInput(f"invalid config {path}: {exc.message}") from exc
    return cfg


def _out_dir(args) -> Path:
    d = Path(args.out_dir or os.environ.get(OUTPUT_ENV) or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _emit_json(obj):
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _params(args):
    return phase_plane.TravelingWaveParams(args.c, args.g)


# -- commands -----------------------------------------------------------------

def cmd_classify(args):
    params = _params(args)
    portrait = phase_plane.classify(params)
    out = portrait.to_dict()
    if args.orbit_samples:
        U = np.linspace(-args.u_max, args.u_max, args.orbit_samples)
        orbits = []
        for fam in portrait.families:
            lo, hi = fam.h_range
            if lo == hi:
                h = lo
            elif math.isinf(hi):
                h = lo + 1.0
            else:
                h = 0.5 * (lo + hi)
            y = phase_plane.level_curve(params, h, U)
            orbits.append({"kind": fam.kind, "h": h, "U": U.tolist(),
                           "y": [None if math.isnan(v) else v for v in y.tolist()]})
        out["orbits"] = orbits
    _emit_json(out)
    return 0


def _parse_range(text):
    try:
        a, b = (float(s) for s in text.split(":"))
    except ValueError as exc:
        raise RejectedInput(f"range must look like a:b, got {text!r}") from exc
    if not b > a:
        raise RejectedInput("range end must exceed its start")
    return a, b


def cmd_sample(args):
    params = _params(args)
    prof = closed_form.make_profile(params, args.case, branch=args.branch, xi0=args.xi0,
                                    A=args.A, h=args.h, width_variant=args.variant)
    a, b = _parse_range(args.range)
    if args.n < 2:
        raise RejectedInput("n must be at least 2")
    rows = closed_form.sample_profile(prof, np.linspace(a, b, args.n))
    text = closed_form.profile_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_audit(args):
    if args.config:
        cfg = _load_config(args.config, AUDIT_SCHEMA)
        regimes = [phase_plane.TravelingWaveParams(r["c"], r["g"]) for r in cfg["regimes"]]
    else:
        regimes = closed_form.default_regimes()
    report = closed_form.audit_all(regimes)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    _emit_json(report.to_dict())
    return 0


def cmd_ode(args):
    if args.config:
        cfg = _load_config(args.config, ODE_SCHEMA)
    else:
        missing = [k for k in ("c", "g", "U0", "y0") if getattr(args, k) is None]
        if missing:
            raise RejectedInput(f"missing flags: {', '.join('--' + m for m in missing)}")
        cfg = {"c": args.c, "g": args.g, "U0": args.U0, "y0": args.y0, "dxi": args.dxi,
               "steps": args.steps, "method": args.method, "every": args.every}
    params = phase_plane.TravelingWaveParams(cfg["c"], cfg["g"])
    try:
        traj = hamiltonian_ode.integrate(
            params, hamiltonian_ode.OdeState(cfg["U0"], cfg["y0"]), cfg["dxi"], cfg["steps"],
            cfg.get("method", "leapfrog"), cfg.get("every", 1),
            cfg.get("overflow_guard", hamiltonian_ode.OVERFLOW_GUARD))
    except DivergenceError as exc:
        if exc.trajectory is not None:
            sys.stdout.write(exc.trajectory.to_csv())
        raise
    sys.stdout.write(traj.to_csv())
    log.info("max |H - H0| = %.3e, secular drift = %.3e", traj.max_energy_error, traj.energy_drift)
    return 0


def cmd_simulate(args):
    cfg = _load_config(args.config, SIMULATE_SCHEMA)
    result = pde_sim.run(cfg)
    out = _out_dir(args)
    stem = Path(args.config).stem
    (out / f"{stem}_slices.csv").write_text(result.slices_csv())
    (out / f"{stem}_summary.json").write_text(json.dumps(result.summary, indent=2) + "\n")
    log.info("wrote %s", out / f"{stem}_slices.csv")
    _emit_json(result.summary)
    return 0


def cmd_verify_operators(args):
    if args.n < 16 or args.refine < 1:
        raise RejectedInput("need --n >= 16 and --refine >= 1")
    _emit_json(operators.certification_suite(args.n, args.refine, args.seed))
    return 0


def cmd_report(args):
    from . import plotting

    out = _out_dir(args)
    written = []

    def put(name, text):
        (out / name).write_text(text)
        written.append(name)

    portraits = [phase_plane.classify(phase_plane.TravelingWaveParams(c, g)).to_dict()
                 for c, g in plotting.PANEL_PARAMS.values()]
    put("portraits.json", json.dumps({"schema": "negkdv.portraits.v1", "panels": portraits}, indent=2) + "\n")
    plotting.portrait_grid(out / "fig_phase_portraits.png")
    written.append("fig_phase_portraits.png")

    P = phase_plane.TravelingWaveParams
    profiles = {
        "breaking23 (c=1, xi0=-1)": closed_form.make_profile(P(1, 0), "BREAKING_23", xi0=-1.0),
        "exp24 (c=1, g=1, A=4)": closed_form.make_profile(P(1, 1), "EXP_24", A=4.0),
        "soliton25 derived (c=-1, g=1)": closed_form.make_profile(P(-1, 1), "SOLITON_25"),
        "dn26 (c=-1, g=1, h=-1/8)": closed_form.make_profile(P(-1, 1), "DN_26", h=-0.125),
        "cn27 (c=-1, g=1, h=1/8)": closed_form.make_profile(P(-1, 1), "CN_27", h=0.125),
        "kink28 derived (c=1, g=-1)": closed_form.make_profile(P(1, -1), "KINK_28"),
        "sn29 (c=1, g=-1, h=1/8)": closed_form.make_profile(P(1, -1), "SN_29", h=0.125),
    }
    for label, prof in profiles.items():
        name = "profile_" + label.split()[0] + ".csv"
        rows = closed_form.sample_profile(prof, np.linspace(-12.0, 12.0, args.samples))
        put(name, closed_form.profile_csv(rows))
    plotting.profile_panels(out / "fig_profiles.png", profiles)
    plotting.breaking_figure(out / "fig_breaking.png")
    written += ["fig_profiles.png", "fig_breaking.png"]

    audit = closed_form.audit_all(closed_form.default_regimes())
    put("audit.json", audit.to_json() + "\n")
    put("audit.csv", audit.to_csv())

    ops = operators.certification_suite(args.n, args.refine)
    put("operators.json", json.dumps(ops, indent=2) + "\n")
    plotting.convergence_figure(out / "fig_operator_convergence.png", ops)
    written.append("fig_operator_convergence.png")

    cfg = {"case": "soliton25", "c": -1.0, "g": 1.0, "h": None,
           "grid": {"x0": -30.0, "dx": 0.02, "n": 3001}, "closure": "decaying",
           "gauge": "conserve_L2", "dt": 0.005, "t_end": 1.0, "output_every": 50}
    sim = pde_sim.run(cfg)
    put("soliton_slices.csv", sim.slices_csv())
    put("soliton_summary.json", json.dumps(sim.summary, indent=2) + "\n")
    plotting.simulation_figure(out / "fig_soliton_sim.png", sim, pde_sim.initial_profile(cfg))
    written.append("fig_soliton_sim.png")

    _emit_json({"schema": "negkdv.report.v1", "out_dir": str(out), "files": written})
    return 0


# -- parser -------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="negkdv", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="phase portrait for (c, g)")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--orbit-samples", type=int, default=0,
                   help="emit this many level-curve points per orbit family")
    p.add_argument("--u-max", type=float, default=2.5)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sample", help="closed-form profile as CSV")
    p.add_argument("--case", required=True, choices=sorted(closed_form.CASE_ALIASES))
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--h", type=float)
    p.add_argument("--A", type=float)
    p.add_argument("--xi0", type=float, default=0.0)
    p.add_argument("--branch", choices=["plus", "minus"], default="plus")
    p.add_argument("--variant", choices=["paper", "derived"], default="derived")
    p.add_argument("--range", default="-10:10")
    p.add_argument("--n", type=int, default=1001)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("audit", help="residual audit of every closed form")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--default-regimes", action="store_true")
    grp.add_argument("--config")
    p.add_argument("--csv", help="also write the table as CSV")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("ode", help="integrate the traveling-wave ODE")
    p.add_argument("--config")
    p.add_argument("--c", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--U0", type=float)
    p.add_argument("--y0", type=float)
    p.add_argument("--dxi", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--method", choices=["leapfrog", "rk4"], default="leapfrog")
    p.add_argument("--every", type=int, default=1)
    p.set_defaults(func=cmd_ode)

    p = sub.add_parser("simulate", help="evolve a positive traveling wave")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-operators", help="operator identity refinement study")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--refine", type=int, default=3)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_verify_operators)

    p = sub.add_parser("report", help="write figures plus CSV/JSON data files")
    p.add_argument("--out-dir")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--refine", type=int, default=3)
    p.add_argument("--samples", type=int, default=1201)
    p.set_defaults(func=cmd_report)
    return ap


def _glue_negative_values(argv):
    # "--range -10:10" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for a in it:
        if a == "--range":
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except RejectedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
