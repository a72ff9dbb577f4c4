"""Batch command-line front end.

Every subcommand emits rows with the columns ``quantity,value,abs_err,anchor,meta``
as CSV (default) or JSON.  A JSON config file may replace or override the flags.

Exit codes: 0 success, 2 configuration error, 3 accuracy/convergence failure,
4 sizing cap exceeded.
"""
import os

_threads = os.environ.get("BOSEGAS_THREADS")
if _threads:
    # must happen before numpy loads its BLAS
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[_var] = _threads

import argparse
import csv
import io
import json
import math
import sys

EXIT_OK, EXIT_CONFIG, EXIT_ACCURACY, EXIT_SIZING = 0, 2, 3, 4
COLUMNS = ("quantity", "value", "abs_err", "anchor", "meta")
SUBCOMMANDS = ("scattering", "dispersion", "lhy", "ed", "params", "report")


class ConfigError(Exception):
    pass


def _number(x):
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    x = float(x)
    return repr(x) if math.isfinite(x) else str(x)


def _plain(obj):
    """JSON-safe copy: numpy scalars and arrays become Python numbers and lists."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _plain(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def row(quantity, value, anchor, abs_err=None, **meta):
    return {"quantity": quantity, "value": value, "abs_err": abs_err, "anchor": anchor,
            "meta": _plain(meta)}


def render(rows, fmt):
    if fmt == "json":
        out = [{"quantity": r["quantity"],
                "value": _plain(r["value"]) if not isinstance(r["value"], float)
                else (r["value"] if math.isfinite(r["value"]) else str(r["value"])),
                "abs_err": None if r["abs_err"] is None else float(r["abs_err"]),
                "anchor": r["anchor"], "meta": r["meta"]} for r in rows]
        return json.dumps(out, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        v = r["value"]
        value = _number(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v
        if isinstance(v, bool):
            value = "true" if v else "false"
        w.writerow([r["quantity"], value, _number(r["abs_err"]), r["anchor"],
                    json.dumps(r["meta"], sort_keys=True, separators=(",", ":"))])
    return buf.getvalue()


# --- potentials -------------------------------------------------------------

def _potential(args, required=True):
    from .scattering import RadialPotential, load_potential
    if args.potential:
        return load_potential(args.potential, args.d)
    if args.square_barrier:
        V0, R = args.square_barrier
        return RadialPotential.square_barrier(V0, R, args.d)
    if required:
        raise ConfigError("a potential is required (--potential FILE or --square-barrier V0 R)")
    return None


def _scattering_or_none(v, rho):
    # the 2D comparison energies need a dilute density; skip them otherwise
    from .errors import DomainError
    from .scattering import solve_for_density
    try:
        return solve_for_density(v, rho)
    except DomainError:
        return None


def _solve(v, args, rho=None):
    from .scattering import solve_for_density, solve_scattering
    if v.d == 3:
        return solve_scattering(v)
    if rho is not None:
        return solve_for_density(v, rho)
    if args.R_tilde is None:
        raise ConfigError("2D scattering needs --R-tilde or a density")
    return solve_scattering(v, R_tilde=args.R_tilde)


# --- subcommands --------------------------------------------------------------

def cmd_scattering(args):
    from .lhy import g_omega_real_space
    from .scattering import exterior_energy, variational_scattering_energy
    v = _potential(args)
    sol = _solve(v, args, args.rho)
    rows = [row("scattering_length", sol.a, "scattering-length", conditioning=sol.conditioning),
            row("g_hat_zero", sol.g_hat_zero, "g-hat-zero")]
    if sol.d == 2:
        rows += [row("delta", sol.delta, "log-coupling"),
                 row("R_tilde", sol.R_tilde, "log-coupling"),
                 row("ell_delta", sol.ell_delta, "log-coupling")]
    gw = g_omega_real_space(sol)
    rows.append(row("g_omega_zero", gw.value, "g-omega-zero", gw.abs_error_estimate,
                    method="real_space"))
    if args.variational:
        R_tilde = args.R_tilde or (sol.R_tilde if sol.d == 2 else 10 * v.support_radius)
        e = variational_scattering_energy(v, R_tilde=R_tilde, mesh=args.mesh)
        exact = exterior_energy(sol.a, sol.d, R_tilde)
        rows.append(row("variational_energy", e, "scattering-energy", abs(e - exact),
                        closed_form=exact, R_tilde=R_tilde))
    return rows


def cmd_dispersion(args):
    import numpy as np
    from .bogoliubov import dispersion_table
    from .scattering import g_hat_profile
    v = _potential(args)
    sol = _solve(v, args, args.rho)
    ks = np.array(args.k) if args.k else np.linspace(0.0, args.k_max, args.points)
    table = dispersion_table(ks, args.rho, g_hat_profile(sol))
    rows = []
    for i, k in enumerate(ks):
        rows.append(row("excitation_energy", float(table["D_k"][i]), "dispersion", k=float(k),
                        alpha_k=float(table["alpha_k"][i]),
                        pair_shift=float(table["pair_shift"][i])))
    return rows


def cmd_lhy(args):
    from . import lhy
    from .scattering import g_hat_profile
    r = lhy.ibog(args.d, tol=args.tol)
    rows = [row(f"ibog_{args.d}d", r.value, "bogoliubov-constant", r.abs_error_estimate,
                exact=lhy.BOGOLIUBOV_CONSTANTS[args.d], evaluations=r.evaluations)]
    v = _potential(args, required=False)
    if v is None:
        return rows
    sol = _solve(v, args, args.rho)
    gh = g_hat_profile(sol)
    ell_delta = sol.ell_delta if sol.d == 2 else None
    box = lhy.BoxSpec.from_density(args.d, args.rho, args.K_ell, sol.g_hat_zero)
    pred = lhy.lhy_energy(args.rho, box, sol)
    so = lhy.second_order_integral(gh, args.rho, args.d, box, ell_delta, tol=args.tol)
    gw = lhy.g_omega_zero(gh, args.d, ell_delta, tol=args.tol)
    rows += [
        row("mean_field_energy", pred.mean_field, "mean-field"),
        row("lhy_energy", pred.E_LHY, "lhy-energy", small_parameter=pred.small_parameter),
        row("second_order_integral", so.value, "second-order-integral", so.abs_error_estimate,
            relative_to_lhy=so.value / pred.E_LHY - 1 if pred.E_LHY else None),
        row("g_omega_zero", gw.value, "g-omega-zero", gw.abs_error_estimate),
    ]
    if args.lattice:
        ls = lhy.lattice_sum_error(box, gh, args.rho, tol=args.tol)
        rows.append(row("lattice_sum_minus_integral", ls.difference, "lattice-sum-error",
                        ls.abs_error_estimate, **ls.to_dict()))
    if args.K_H:
        for K_H in args.K_H:
            t = lhy.tail_sum_vs_gomega(gh, args.d, box, K_H, ell_delta, tol=args.tol)
            rows.append(row("g_omega_minus_tail_sum", t.difference, "tail-sum",
                            t.abs_error_estimate, **t.to_dict()))
    return rows


def cmd_ed(args):
    from .fock.comparison import bogoliubov_vs_ed
    from .fock.modes import ModeSet
    from .scattering import FourierProfile
    v = _potential(args)
    if args.modes:
        modes = ModeSet.parse(args.modes, args.d, args.ell)
    else:
        modes = ModeSet.shells(args.d, args.ell, args.shell)
    v_hat = FourierProfile.from_radial_function(v, args.d, v.breakpoints, True, "v")
    sol = _scattering_or_none(v, args.N / args.ell ** args.d)
    rep = bogoliubov_vs_ed(modes, args.N, v_hat, sol, args.K_L, cap=args.cap, tol=args.tol)
    d = rep.to_dict()
    meta = {"dimension": rep.dimension, "modes": modes.size}
    return [
        row("sector_dimension", rep.dimension, "fock-basis", modes=modes.size),
        row("ground_energy", rep.E0, "hamiltonian", rep.residual, **meta),
        row("condensate_energy", rep.E_condensate, "mean-field"),
        row("perturbative_energy", rep.E_perturbative, "second-order-integral"),
        row("bogoliubov_energy", rep.E_bogoliubov, "dispersion", pairs=d["pair_modes"]),
        row("mean_field_energy", rep.E_meanfield, "mean-field"),
        row("two_term_energy", rep.E_meanfield_plus_lhy, "lhy-energy"),
        row("n_plus", rep.n_plus, "excitation-number"),
        row("n_plus_high", rep.n_plus_high, "excitation-number", K_L=args.K_L),
        row("ordering_holds", rep.ordering_holds, "hamiltonian", truncation=rep.truncation),
    ]


def cmd_params(args):
    from . import params
    v = _potential(args)
    p = params.derive_parameters(args.d, args.small_param, args.K_ell, args.epsilon, v)
    rows = [row(name, p.value(name), "parameter-choice", log10=p.logs[name] / math.log(10))
            for name in ("K_L", "K_H", "M_over_N", "eps_gap", "eps_K", "eps_plus")]
    reports = params.check_relations(p, C=args.C, extras=True)
    for r in reports:
        rows.append(row(r.id, r.slack_exponent, "parameter-relation", lhs=r.lhs, rhs=r.rhs,
                        log10_lhs=r.log_lhs / math.log(10), log10_rhs=r.log_rhs / math.log(10),
                        satisfied=r.satisfied, **r.detail))
    main = reports[:len(params.RELATION_IDS)]
    rows.append(row("all_relations_satisfied", params.all_satisfied(main), "parameter-relation",
                     admissibility_slack=p.admissibility_slack))
    return rows


def cmd_report(args):
    from .acceptance import run_all
    results = run_all(set(args.only) if args.only else None)
    rows = [row(f"criterion_{r.number}", r.passed, r.anchor, name=r.name, tolerance=r.tolerance,
                seconds=round(r.seconds, 3), measured=r.measured) for r in results]
    for r in results:
        print(r.line(), file=sys.stderr)
    if args.strict and not all(r.passed for r in results):
        args._exit = EXIT_ACCURACY
    return rows


HANDLERS = {"scattering": cmd_scattering, "dispersion": cmd_dispersion, "lhy": cmd_lhy,
            "ed": cmd_ed, "params": cmd_params, "report": cmd_report}


# --- parser and config ----------------------------------------------------------

def _add_potential(p):
    p.add_argument("--potential", help="JSON potential description")
    p.add_argument("--square-barrier", nargs=2, type=float, metavar=("V0", "R"))
    p.add_argument("--R-tilde", dest="R_tilde", type=float, help="2D normalization radius")


def _add_io(p, top_level):
    fmt = {"default": "csv"} if top_level else {}
    p.add_argument("--config", help="JSON config; its values override flags")
    p.add_argument("--format", choices=("csv", "json"), **fmt)
    p.add_argument("--output", help="output path (default stdout)")


def build_parser():
    ap = argparse.ArgumentParser(prog="bosegas", description=__doc__.splitlines()[0])
    _add_io(ap, True)
    # the same options after the subcommand; SUPPRESS keeps the top-level values
    io_opts = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    _add_io(io_opts, False)
    sub = ap.add_subparsers(dest="subcommand")
    _add_parser = sub.add_parser

    def add_parser(name, **kw):
        return _add_parser(name, parents=[io_opts], **kw)
    sub.add_parser = add_parser

    p = sub.add_parser("scattering", help="scattering length and related constants")
    p.add_argument("--d", type=int, choices=(2, 3), default=3)
    _add_potential(p)
    p.add_argument("--rho", type=float, help="density fixing R̃ in 2D")
    p.add_argument("--variational", action="store_true")
    p.add_argument("--mesh", type=int, default=200)

    p = sub.add_parser("dispersion", help="Bogoliubov dispersion table")
    p.add_argument("--d", type=int, choices=(2, 3), default=3)
    _add_potential(p)
    p.add_argument("--rho", type=float)
    p.add_argument("--k", type=float, nargs="+")
    p.add_argument("--k-max", dest="k_max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=51)

    p = sub.add_parser("lhy", help="Bogoliubov constant and second-order energies")
    p.add_argument("--d", type=int, choices=(2, 3), default=3)
    _add_potential(p)
    p.add_argument("--rho", type=float, default=1e-3)
    p.add_argument("--K-ell", dest="K_ell", type=float, default=8.0)
    p.add_argument("--K-H", dest="K_H", type=float, nargs="+")
    p.add_argument("--lattice", action="store_true", help="add the lattice-sum comparison")
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("ed", help="exact diagonalization in a truncated Fock space")
    p.add_argument("--d", type=int, choices=(2, 3), default=3)
    _add_potential(p)
    p.add_argument("--ell", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--shell", type=int, default=1, help="keep modes with |n|² <= shell")
    p.add_argument("--modes", help="explicit modes 'n1,n2,...;...' or 'shell:m'")
    p.add_argument("--K-L", dest="K_L", type=float)
    p.add_argument("--cap", type=int, default=200_000)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("params", help="parameter choice and relation slacks")
    p.add_argument("--d", type=int, choices=(2, 3), default=3)
    _add_potential(p)
    p.add_argument("--small-param", dest="small_param", type=float)
    p.add_argument("--K-ell", dest="K_ell", type=float)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--C", type=float, default=1.0, help="constant hidden in each relation")

    p = sub.add_parser("report", help="run the acceptance suite")
    p.add_argument("--only", type=int, nargs="+", help="criterion numbers")
    p.add_argument("--strict", action="store_true", help="exit 3 when a criterion fails")
    return ap


_NUM = {"type": "number"}
_POT = {"potential": {"type": "string"}, "square_barrier": {"type": "array", "items": _NUM,
        "minItems": 2, "maxItems": 2}, "R_tilde": _NUM}
_COMMON = {"subcommand": {"enum": list(SUBCOMMANDS)}, "format": {"enum": ["csv", "json"]},
           "output": {"type": "string"}, "d": {"enum": [2, 3]}}
_PROPS = {
    "scattering": {**_POT, "rho": _NUM, "variational": {"type": "boolean"},
                   "mesh": {"type": "integer", "minimum": 2}},
    "dispersion": {**_POT, "rho": _NUM, "k": {"type": "array", "items": _NUM},
                   "k_max": _NUM, "points": {"type": "integer", "minimum": 1}},
    "lhy": {**_POT, "rho": _NUM, "K_ell": _NUM, "K_H": {"type": "array", "items": _NUM},
            "lattice": {"type": "boolean"}, "tol": _NUM},
    "ed": {**_POT, "ell": _NUM, "N": {"type": "integer", "minimum": 1},
           "shell": {"type": "integer", "minimum": 0}, "modes": {"type": "string"},
           "K_L": _NUM, "cap": {"type": "integer", "minimum": 1}, "tol": _NUM},
    "params": {**_POT, "small_param": _NUM, "K_ell": _NUM, "epsilon": _NUM, "C": _NUM},
    "report": {"only": {"type": "array", "items": {"type": "integer"}},
               "strict": {"type": "boolean"}},
}


def config_schema(subcommand):
    return {"type": "object", "additionalProperties": False,
            "properties": {**_COMMON, **_PROPS[subcommand]}}


def _key_path(err):
    path = "/".join(str(p) for p in err.absolute_path)
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        path = "/".join(filter(None, [path, ",".join(extra)]))
    return path or "<root>"


def load_config(path, subcommand=None):
    import jsonschema
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: "
                          f"{exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: <root>: config must be a JSON object")
    sub = cfg.get("subcommand", subcommand)
    if sub not in SUBCOMMANDS:
        raise ConfigError(f"{path}: subcommand: must be one of {', '.join(SUBCOMMANDS)}")
    if subcommand is not None and sub != subcommand:
        raise ConfigError(f"{path}: subcommand: config says {sub!r}, command line says "
                          f"{subcommand!r}")
    validator = jsonschema.Draft7Validator(config_schema(sub))
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"{path}: {_key_path(e)}: {e.message}")
    return sub, cfg


_REQUIRED = {"dispersion": ("rho",), "ed": ("ell", "N"), "params": ("small_param", "K_ell")}


def parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub, cfg = load_config(args.config, args.subcommand)
        if args.subcommand is None:
            # fill in the subcommand's defaults, then apply the config on top
            args = parser.parse_args(argv + [sub])
        for key, value in cfg.items():
            setattr(args, key, value)
    if args.subcommand is None:
        raise ConfigError("a subcommand or a config with 'subcommand' is required")
    missing = [k for k in _REQUIRED.get(args.subcommand, ()) if getattr(args, k) is None]
    if missing:
        raise ConfigError(f"{args.subcommand}: missing required value(s): {', '.join(missing)}")
    args._exit = EXIT_OK
    return args


def run(args):
    """Execute a parsed configuration; returns (exit code, rows or an error message)."""
    from .errors import (AccuracyError, ConvergenceError, DivergenceError, DomainError,
                         MeshError, SizingError)
    try:
        rows = HANDLERS[args.subcommand](args)
    except ConfigError as exc:
        return EXIT_CONFIG, f"config error: {exc}"
    except SizingError as exc:
        return EXIT_SIZING, f"sizing cap exceeded: {exc} (size {exc.size})"
    except (AccuracyError, ConvergenceError, DivergenceError, MeshError) as exc:
        return EXIT_ACCURACY, f"numerical failure: {exc}"
    except (DomainError, OSError, ValueError) as exc:
        return EXIT_CONFIG, f"invalid input: {exc}"
    return args._exit, rows


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, result = run(args)
    if isinstance(result, str):
        print(result, file=sys.stderr)
        return code
    text = render(result, args.format)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
