"""Command-line interface.

Every invocation prints one JSON object on one line to stdout:
``{"command", "parameters", "result", "schema_version"}``. Human-readable
messages go to stderr.

Exit codes: 0 success, 2 invalid input, 3 file I/O or CSV format error,
4 numerical non-convergence (the best-effort record is still printed).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import distributions as dist
from . import numerics, simulation
from ._backend import BACKEND
from .errors import CovpairError, DomainError
from .inference import equality_test
from .params import make_structure
from .quadrature import QuadratureConfig

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_NONCONVERGED = 0, 2, 3, 4
SIG_DIGITS = 12


class InputFileError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INVALID)


def _num(v):
    """JSON-safe number with 12 significant digits; None for non-finite."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    if not math.isfinite(v):
        return None
    return float(f"{v:.{SIG_DIGITS}g}")


def _real_payload(v) -> dict:
    v = float(v)
    out = {"value": _num(v)}
    if math.isinf(v):
        out["infinite"] = True
    return out


def _complex_payload(z) -> dict:
    z = complex(z)
    return {"re": _num(z.real), "im": _num(z.imag)}


def emit(command: str, params: dict, result: dict, stream=None) -> None:
    record = {
        "command": command,
        "parameters": params,
        "result": result,
        "schema_version": SCHEMA_VERSION,
    }
    stream = stream or sys.stdout
    stream.write(json.dumps(record, allow_nan=False, separators=(",", ":")) + "\n")
    stream.flush()


def _params(args, *names) -> dict:
    return {name: _num(getattr(args, name)) if isinstance(getattr(args, name), (int, float)) else getattr(args, name)
            for name in names}


def _config(args) -> QuadratureConfig:
    trunc = ("auto", args.truncation_eps) if args.radius is None else args.radius
    return QuadratureConfig(
        abs_tol=args.abs_tol,
        rel_tol=args.rel_tol,
        max_subdivisions=args.max_subdivisions,
        truncation=trunc,
        singularity_exclusion_radius=args.exclusion_radius,
    )


# ---------------------------------------------------------------------------
# subcommands


def cmd_density(args):
    s = make_structure(args.rho, args.sigma)
    val = dist.density(s, args.n, args.x, args.y, form=args.form)
    emit("density", _params(args, "rho", "sigma", "n", "x", "y", "form"), _real_payload(val))
    return EXIT_OK


def cmd_cf(args):
    s = make_structure(args.rho, args.sigma)
    fn = {"closed": dist.cf_closed, "reduced": dist.cf_reduced, "determinant": dist.cf_determinant}[args.form]
    val = fn(s, args.n, args.u, args.v)
    emit("cf", _params(args, "rho", "sigma", "n", "u", "v", "form"), _complex_payload(val))
    return EXIT_OK


def cmd_cf3(args):
    s = make_structure(args.rho, args.sigma)
    val = dist.cf_triple(s, args.u, args.v, args.w)
    emit("cf3", _params(args, "rho", "sigma", "u", "v", "w"), _complex_payload(val))
    return EXIT_OK


def cmd_prob(args):
    s = make_structure(args.rho, args.sigma)
    res = numerics.quadrant_probability(s, args.n, args.x0, args.y0, _config(args))
    emit(
        "prob",
        _params(args, "rho", "sigma", "n", "x0", "y0", "abs_tol", "rel_tol", "max_subdivisions",
                "truncation_eps", "radius", "exclusion_radius"),
        {
            "value": _num(res.value),
            "raw_value": _num(res.raw_value),
            "error_estimate": _num(res.error_estimate),
            "subdivisions_used": res.subdivisions_used,
            "converged": res.converged,
        },
    )
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def cmd_marginal(args):
    s = make_structure(args.rho, args.sigma)
    payload = _real_payload(dist.marginal_density(s, args.n, args.x))
    status = EXIT_OK
    if args.check:
        if args.n == 1 and args.x == 0:
            raise DomainError("the n = 1 marginal is infinite at x = 0")
        cfg = _config(args)
        payload["numerical"] = _num(numerics.marginalize(s, args.n, args.x, cfg))
    emit(
        "marginal",
        _params(args, "rho", "sigma", "n", "x", "check"),
        payload,
    )
    return status


def cmd_invert(args):
    s = make_structure(args.rho, args.sigma)
    res = numerics.invert_cf(s, args.n, args.x, args.y, m=args.nodes, tol=args.tol)
    payload = {
        "value": _num(res.value),
        "error_estimate": _num(res.error_estimate),
        "imag_residual": _num(res.imag_residual),
        "slow_convergence": res.slow_convergence,
    }
    if args.compare:
        payload["closed_form"] = _num(dist.density_general(s, args.n, args.x, args.y))
    emit("invert", _params(args, "rho", "sigma", "n", "x", "y", "nodes", "tol", "compare"), payload)
    return EXIT_NONCONVERGED if res.slow_convergence else EXIT_OK


def cmd_simulate(args):
    s = make_structure(args.rho, args.sigma)
    plan = simulation.SimulationPlan(s, args.n, args.reps, args.seed)
    hits = 0
    sums = np.zeros(2)
    out = None
    if args.emit_samples:
        try:
            out = open(args.emit_samples, "w", newline="")
        except OSError as exc:
            raise InputFileError(f"cannot write {args.emit_samples}: {exc}") from exc
        out.write("g_ac,g_bc\n")
    try:
        for g in simulation.iter_cov_pairs(plan):
            hits += int(np.count_nonzero((g[:, 0] > args.x0) & (g[:, 1] > args.y0)))
            sums += g.sum(axis=0)
            if out is not None:
                np.savetxt(out, g, fmt="%.17g", delimiter=",")
    finally:
        if out is not None:
            out.close()
    p = hits / plan.reps
    emit(
        "simulate",
        _params(args, "rho", "sigma", "n", "reps", "seed", "x0", "y0", "emit_samples"),
        {
            "quadrant_estimate": _num(p),
            "std_error": _num(math.sqrt(p * (1.0 - p) / plan.reps)),
            "mean_g_ac": _num(sums[0] / plan.reps),
            "mean_g_bc": _num(sums[1] / plan.reps),
            "seed": args.seed,
            "blocks": plan.blocks,
        },
    )
    return EXIT_OK


def read_observations(path: str) -> np.ndarray:
    """Read an "a,b,c" CSV with header into an (n, 3) array."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["a", "b", "c"]:
                raise InputFileError(f"{path}: expected header 'a,b,c', got {header!r}")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 3:
                    raise InputFileError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
                try:
                    rows.append([float(c) for c in row])
                except ValueError as exc:
                    raise InputFileError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise InputFileError(f"cannot read {path}: {exc}") from exc
    return np.array(rows, dtype=float).reshape(-1, 3)


def cmd_test(args):
    obs = read_observations(args.data)
    res = equality_test(obs, sigma=args.sigma, alternative=args.alternative)
    emit(
        "test",
        _params(args, "data", "sigma", "alternative"),
        {
            "statistic": _num(res.statistic),
            "n": res.n,
            "sigma_used": _num(res.sigma_used),
            "sigma_source": res.sigma_source,
            "p_value": _num(res.p_value),
        },
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _structure_flags(p, n=True):
    p.add_argument("--rho", type=float, required=True, help="Cov(A,C) = Cov(B,C)")
    p.add_argument("--sigma", type=float, required=True, help="Cov(A,B)")
    if n:
        p.add_argument("--n", type=int, default=1, help="sample size (default 1)")


def _quad_flags(p, eps):
    d = QuadratureConfig()
    p.add_argument("--abs-tol", type=float, default=d.abs_tol)
    p.add_argument("--rel-tol", type=float, default=d.rel_tol)
    p.add_argument("--max-subdivisions", type=int, default=d.max_subdivisions)
    p.add_argument("--truncation-eps", type=float, default=eps,
                   help="neglected tail mass for the automatic truncation radius")
    p.add_argument("--radius", type=float, default=None, help="fixed truncation half-width")
    p.add_argument("--exclusion-radius", type=float, default=d.singularity_exclusion_radius)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="covpair", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"covpair ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("density", help="joint density of (g_ac, g_bc)")
    _structure_flags(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--form", choices=("general", "specialized"), default="general")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("cf", help="characteristic function of (g_ac, g_bc)")
    _structure_flags(p)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--form", choices=("closed", "reduced", "determinant"), default="closed")
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("cf3", help="joint CF of (AB, AC, BC), one observation")
    _structure_flags(p, n=False)
    p.add_argument("--u", type=float, required=True, help="AB frequency")
    p.add_argument("--v", type=float, required=True, help="AC frequency")
    p.add_argument("--w", type=float, required=True, help="BC frequency")
    p.set_defaults(func=cmd_cf3)

    p = sub.add_parser("prob", help="P(g_ac > x0, g_bc > y0)")
    _structure_flags(p)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--y0", type=float, default=0.0)
    _quad_flags(p, 1e-10)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("marginal", help="marginal density of g_ac")
    _structure_flags(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--check", action="store_true", help="also integrate the joint density over y")
    _quad_flags(p, 1e-8)
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("invert", help="density by numerical CF inversion")
    _structure_flags(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--nodes", type=int, default=96, help="Ooura-Mori mesh parameter")
    p.add_argument("--tol", type=float, default=1e-6, help="flag non-convergence above this error estimate")
    p.add_argument("--compare", action="store_true", help="include the closed-form density")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("simulate", help="Monte Carlo of the covariance pair")
    _structure_flags(p)
    p.add_argument("--reps", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--emit-samples", metavar="PATH", default=None, help="write g_ac,g_bc CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("test", help="test Cov(A,C) = Cov(B,C) from a,b,c data")
    p.add_argument("--data", required=True, metavar="PATH", help="CSV with header a,b,c")
    p.add_argument("--sigma", type=float, default=None, help="known Cov(A,B); estimated if omitted")
    p.add_argument("--alternative", choices=("two_sided", "greater", "less"), default="two_sided")
    p.set_defaults(func=cmd_test)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputFileError as exc:
        print(f"covpair {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CovpairError, ValueError) as exc:
        which = getattr(exc, "which", None)
        tag = f" [{which}]" if which else ""
        print(f"covpair {args.command}: invalid input{tag}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
