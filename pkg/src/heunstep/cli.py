"""Command-line interface: potential profiles, wavefunctions, transmission sweeps, self-checks.

Exit status: 0 success, 1 usage error, 2 numeric or regime error,
3 verification failure. Output is assembled completely before anything
is written, so a failing command never leaves partial output behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import HeunStepError
from .geometry import PhysicalConfig, coordinate_z, jacobian_rho, potential_v
from .oracle import solve_scattering
from .scattering import reflection, schrodinger_residual, transmission

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
FIG2_SIGMAS = (-0.1, -0.25, -0.6)
ORACLE_TOL_NAME = "oracle_transmission"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _tolerance(text: str):
    name, sep, value = text.partition("=")
    try:
        val = float(value)
    except ValueError:
        val = float("nan")
    if not sep or not name or not val > 0 or not math.isfinite(val):
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE with VALUE > 0, got {text!r}")
    return name, val


def _physical_flags() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("physical parameters (units hbar = m = 1 by default)")
    g.add_argument("--v0", type=float, default=0.0, help="asymptotic level on the z -> inf side")
    g.add_argument("--v1", type=float, default=1.0, help="step height")
    g.add_argument("--sigma", type=float, action="append", help="step width parameter (repeatable)")
    g.add_argument("--x0", type=float, default=0.0, help="step position")
    g.add_argument("--mass", type=float, default=1.0)
    g.add_argument("--hbar", type=float, default=1.0)
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--output", help="write to PATH instead of standard output")
    return p


def _x_flags(p: argparse.ArgumentParser, defaults=(-10.0, 10.0, 101)):
    p.add_argument("--x-min", type=float, default=defaults[0])
    p.add_argument("--x-max", type=float, default=defaults[1])
    p.add_argument("--x-count", type=int, default=defaults[2])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heunstep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _physical_flags()

    for name in ("potential", "transform"):
        sp = sub.add_parser(name, parents=[common], help="tabulate x, z(x), rho(x), V(x)")
        _x_flags(sp)

    sp = sub.add_parser("wavefunction", parents=[common], help="evaluate psi on an x grid")
    sp.add_argument("--energy", type=float, required=True)
    sp.add_argument("--c1", type=_complex, default=0j)
    sp.add_argument("--c2", type=_complex, default=1 + 0j)
    _x_flags(sp, defaults=(None, None, 201))

    sp = sub.add_parser("transmission", parents=[common], help="sweep T and R over energy")
    sp.add_argument("--energy", type=float, action="append",
                    help="single energy (repeatable); overrides the range flags")
    sp.add_argument("--energy-min", type=float, default=1.1)
    sp.add_argument("--energy-max", type=float, default=6.0)
    sp.add_argument("--energy-count", type=int, default=50)
    sp.add_argument("--oracle", action="store_true", help="add numerically integrated T for comparison")
    sp.add_argument("--tolerance", type=_tolerance, action="append", default=[],
                    metavar="NAME=VAL", help=f"{ORACLE_TOL_NAME}=VAL sets the allowed |dT|")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes for oracle runs")

    sp = sub.add_parser("verify", help="run the self-check suite and print a JSON report")
    sp.add_argument("--tolerance", type=_tolerance, action="append", default=[], metavar="NAME=VAL")
    sp.add_argument("--output")
    sp.add_argument("--inject-fault", choices=("q",), help=argparse.SUPPRESS)
    return parser


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def render(rows: List[Dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        clean = [{c: (None if r.get(c) is None else r[c]) for c in columns} for r in rows]
        return json.dumps(clean, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _configs(args) -> List[PhysicalConfig]:
    sigmas = args.sigma or [-1.0]
    try:
        return [PhysicalConfig(V0=args.v0, V1=args.v1, sigma=s, x0=args.x0, m=args.mass, hbar=args.hbar)
                for s in sigmas]
    except ValueError as exc:
        raise UsageError(str(exc))


def _grid(lo, hi, count, what="x") -> np.ndarray:
    if count < 1:
        raise UsageError(f"--{what}-count must be at least 1")
    if not lo <= hi:
        raise UsageError(f"--{what}-min must not exceed --{what}-max")
    return np.linspace(lo, hi, count)


def cmd_potential(args) -> int:
    cfgs = _configs(args)
    xs = _grid(args.x_min, args.x_max, args.x_count)
    multi = len(cfgs) > 1
    rows = []
    for cfg in cfgs:
        z = np.atleast_1d(coordinate_z(xs, cfg))
        rho = np.atleast_1d(jacobian_rho(z, cfg))
        V = np.atleast_1d(potential_v(xs, cfg))
        for i, x in enumerate(xs):
            rows.append({"sigma": cfg.sigma, "x": x, "z": z[i], "rho": rho[i], "V": V[i]})
    cols = (["sigma"] if multi else []) + ["x", "z", "rho", "V"]
    _emit(render(rows, cols, args.format), args.output)
    return EXIT_OK


def cmd_wavefunction(args) -> int:
    cfgs = _configs(args)
    if len(cfgs) != 1:
        raise UsageError("wavefunction takes a single --sigma")
    cfg = cfgs[0]
    s = abs(cfg.sigma)
    lo = cfg.x0 - 10 * s if args.x_min is None else args.x_min
    hi = cfg.x0 + 10 * s if args.x_max is None else args.x_max
    xs = _grid(lo, hi, args.x_count)
    psi, res = schrodinger_residual(cfg, args.energy, xs, c1=args.c1, c2=args.c2)
    rows = [{"x": x, "re_psi": p.real, "im_psi": p.imag, "abs_psi2": p.real ** 2 + p.imag ** 2,
             "residual": r} for x, p, r in zip(xs, psi, res)]
    _emit(render(rows, ["x", "re_psi", "im_psi", "abs_psi2", "residual"], args.format), args.output)
    return EXIT_OK


def _oracle_t(job):
    cfg, E = job
    return solve_scattering(cfg, E).T


def cmd_transmission(args) -> int:
    tols = dict(args.tolerance)
    unknown = set(tols) - {ORACLE_TOL_NAME}
    if unknown:
        raise UsageError(f"unknown tolerance name(s): {', '.join(sorted(unknown))}")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    tol = tols.get(ORACLE_TOL_NAME, 1e-4)
    if args.sigma is None:
        args.sigma = list(FIG2_SIGMAS)
    cfgs = _configs(args)
    energies = (np.array(args.energy) if args.energy
                else _grid(args.energy_min, args.energy_max, args.energy_count, "energy"))

    rows, jobs = [], []
    for cfg in cfgs:
        for E in energies:
            E = float(E)
            row = {"sigma": cfg.sigma, "E": E}
            if E > cfg.V0 + cfg.V1 and E > cfg.V0:
                row.update(T=transmission(cfg, E), R=reflection(cfg, E), regime="above")
                jobs.append((len(rows), cfg, E))
            else:
                row.update(T=None, R=None, regime="below_threshold")
            rows.append(row)

    cols = ["sigma", "E", "T", "R", "regime"]
    failed = False
    if args.oracle:
        cols += ["T_oracle", "abs_dT"]
        work = [(cfg, E) for _, cfg, E in jobs]
        if args.jobs > 1 and len(work) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                t_or = list(pool.map(_oracle_t, work))
        else:
            t_or = [_oracle_t(w) for w in work]
        for (idx, _, _), t in zip(jobs, t_or):
            rows[idx]["T_oracle"] = t
            rows[idx]["abs_dT"] = abs(t - rows[idx]["T"])
            failed |= not rows[idx]["abs_dT"] <= tol
    _emit(render(rows, cols, args.format), args.output)
    if failed:
        worst = max(r["abs_dT"] for r in rows if r.get("abs_dT") is not None)
        print(f"heunstep: oracle disagreement {worst:.3e} exceeds tolerance {tol:.3e}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import DEFAULT_TOLERANCES, run_checks

    tols = dict(args.tolerance)
    unknown = set(tols) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise UsageError(f"unknown tolerance name(s): {', '.join(sorted(unknown))}")
    report = run_checks(tols, fault=args.inject_fault)
    _emit(json.dumps(report, indent=1) + "\n", args.output)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


COMMANDS = {
    "potential": cmd_potential,
    "transform": cmd_potential,
    "wavefunction": cmd_wavefunction,
    "transmission": cmd_transmission,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HeunStepError, ValueError, OverflowError, ZeroDivisionError) as exc:
        print(f"heunstep: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
