"""Command-line front end.

Subcommands
-----------
ness         stationary observables at one parameter point (two-spin flags
             or a generic Hamiltonian/state pair in the interchange format)
sweep        stationary observables over a (rate, coupling) grid
timeseries   finite-time entropy (and fidelity) at fixed parameters
optimize     maximize stationary concurrence over the reset rate
critical     entropy inflection point in the (rate, coupling) plane
peak-r       maximize finite-time entropy over the reset rate
mc-validate  Monte Carlo trajectory check of the exact engine

Parameters are either dimensionless (--R, --alpha; unit transverse field,
rescaled time) or physical (--omega, --j, --r; all three together) -- the
two styles are mutually exclusive.  Grids use lo:hi:n or lo:hi:n:log.

Generic Hamiltonian/state input uses a JSON interchange document:

    {"dim": 4, "matrix": [[re, im], [re, im], ...]}

with dim*dim [real, imaginary] pairs in row-major order; documents are
validated on load (square, finite; Hermitian for Hamiltonians; Hermitian,
PSD, unit trace for density matrices).

Exit codes: 0 success, 2 validation failure (observable bounds or Monte
Carlo mismatch), 3 solver failure, 4 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager

import numpy as np

from .observables import concurrence, fidelity, purity, von_neumann_entropy
from .reset_core import ResetSpec, SubsystemSplit, ness_density, partial_trace
from .serialize import RecordWriter, format_float, load_quantum_system
from .sweep import (
    ALL_OBSERVABLES,
    BoundsError,
    SolverError,
    SweepGrid,
    _check_bounds,
    _point_record,
    find_entropy_peak_rate,
    find_inflection,
    mc_validate,
    optimize_concurrence,
    run_sweep,
    timeseries,
)
from .twospin import TwoSpinParams

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4

THREADS_ENV = "QRESET_THREADS"


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; remap to the config code.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_CONFIG)


def _parse_grid(spec: str, name: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise ValueError(f"{name} must look like lo:hi:n or lo:hi:n:log, got {spec!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"cannot parse {name} spec {spec!r}") from None
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi or n < 1:
        raise ValueError(f"{name} needs finite lo <= hi and n >= 1, got {spec!r}")
    if len(parts) == 4:
        if lo <= 0:
            raise ValueError(f"{name}: logarithmic spacing needs lo > 0")
        return [float(v) for v in np.geomspace(lo, hi, n)]
    return [float(v) for v in np.linspace(lo, hi, n)]


def _parse_bounds(spec: str, name: str) -> tuple[float, float]:
    parts = spec.split(":")
    if len(parts) != 2:
        raise ValueError(f"{name} must look like lo:hi, got {spec!r}")
    return float(parts[0]), float(parts[1])


def _parse_observables(spec: str, allowed=ALL_OBSERVABLES) -> tuple[str, ...]:
    names = tuple(s.strip() for s in spec.split(",") if s.strip())
    bad = set(names) - set(allowed)
    if bad or not names:
        raise ValueError(f"observables must be from {allowed}, got {spec!r}")
    return names


def _add_param_flags(sp):
    sp.add_argument("--R", type=float, default=None,
                    help="dimensionless reset rate r/omega")
    sp.add_argument("--alpha", type=float, default=None,
                    help="dimensionless coupling j/omega (default 0)")
    sp.add_argument("--omega", type=float, default=None, help="transverse field")
    sp.add_argument("--j", type=float, default=None, help="ferromagnetic coupling")
    sp.add_argument("--r", type=float, default=None, help="reset rate")


def _resolve_params(args) -> TwoSpinParams:
    dimless = args.R is not None or args.alpha is not None
    physical = args.omega is not None or args.j is not None or args.r is not None
    if dimless and physical:
        raise ValueError("--R/--alpha and --omega/--j/--r are mutually exclusive")
    if physical:
        if args.omega is None or args.j is None or args.r is None:
            raise ValueError("physical parameters need all of --omega, --j, --r")
        return TwoSpinParams(omega=args.omega, j=args.j, r=args.r)
    if args.R is None:
        raise ValueError("missing parameters: give --R [--alpha] or --omega --j --r")
    alpha = args.alpha if args.alpha is not None else 0.0
    return TwoSpinParams.from_dimensionless(args.R, alpha)


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        if args.threads < 1:
            raise ValueError("--threads must be >= 1")
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"invalid {THREADS_ENV} value {env!r}") from None
    return 1


@contextmanager
def _out_stream(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as f:
            yield f


def _json_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"unsupported report value {v!r}")


def _write_report(pairs, stream) -> None:
    body = ", ".join(f'"{k}": {_json_value(v)}' for k, v in pairs)
    stream.write("{" + body + "}\n")


def _matrix_pairs_json(m: np.ndarray) -> str:
    cells = ", ".join(
        f"[{format_float(float(v.real))}, {format_float(float(v.imag))}]"
        for v in m.reshape(-1)
    )
    return "[" + cells + "]"


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_ness(args) -> int:
    if args.hamiltonian or args.rho0:
        if not (args.hamiltonian and args.rho0):
            raise ValueError("generic mode needs both --hamiltonian and --rho0")
        if args.r is None or args.r <= 0:
            raise ValueError("generic mode needs a positive --r")
        sys_ = load_quantum_system(args.hamiltonian, args.rho0)
        rho = ness_density(sys_, ResetSpec(args.r))
        pairs = [
            ("dim", sys_.dim),
            ("rate", float(args.r)),
            ("purity", purity(rho)),
            ("fidelity_rho0", fidelity(rho, sys_.rho0)),
        ]
        if args.split:
            da, db = (int(x) for x in args.split.split(":"))
            reduced = partial_trace(rho, SubsystemSplit(da, db), "A")
            pairs.append(("entropy_subsystem_a", von_neumann_entropy(reduced)))
        if sys_.dim == 4:
            pairs.append(("concurrence", concurrence(rho).value))
        with _out_stream(args.out) as f:
            body = ", ".join(f'"{k}": {_json_value(v)}' for k, v in pairs)
            f.write("{" + body + f', "ness_matrix": {_matrix_pairs_json(rho)}' + "}\n")
        return EXIT_OK

    p = _resolve_params(args)
    if p.r <= 0:
        raise ValueError("stationary observables need a positive reset rate")
    observables = _parse_observables(args.observables)
    rec = _check_bounds(_point_record(p.R, p.alpha, observables))
    with _out_stream(args.out) as f:
        RecordWriter(f, args.format).write(rec)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    grid = SweepGrid(
        r_values=tuple(_parse_grid(args.grid_r, "--grid-r")),
        alpha_values=tuple(_parse_grid(args.grid_alpha, "--grid-alpha")),
        observables=_parse_observables(args.observables),
    )
    threads = _resolve_threads(args)
    with _out_stream(args.out) as f:
        run_sweep(grid, RecordWriter(f, args.format), threads=threads)
    return EXIT_OK


def _cmd_timeseries(args) -> int:
    p = _resolve_params(args)
    t_values = _parse_grid(args.grid_t, "--grid-t")
    observables = _parse_observables(args.observables, allowed=("entropy", "fidelity"))
    records = timeseries(p, t_values, observables)
    with _out_stream(args.out) as f:
        writer = RecordWriter(f, args.format)
        for rec in records:
            writer.write(rec)
    return EXIT_OK


def _cmd_optimize(args) -> int:
    lo, hi = _parse_bounds(args.r_bounds, "--r-bounds")
    res = optimize_concurrence(args.alpha, lo, hi, tol=args.tol)
    with _out_stream(args.out) as f:
        _write_report(
            [
                ("alpha", float(args.alpha)),
                ("r_star", res.x),
                ("c_star", res.value),
                ("flag", res.flag),
            ],
            f,
        )
    return EXIT_OK


def _cmd_critical(args) -> int:
    parts = args.box.split(":")
    if len(parts) != 4:
        raise ValueError(f"--box must look like rlo:rhi:alo:ahi, got {args.box!r}")
    r_lo, r_hi, a_lo, a_hi = (float(x) for x in parts)
    cp = find_inflection(r_lo, r_hi, a_lo, a_hi)
    with _out_stream(args.out) as f:
        _write_report(
            [
                ("r_c", cp.r_c),
                ("alpha_c", cp.alpha_c),
                ("residual_slope", cp.residuals[0]),
                ("residual_curvature", cp.residuals[1]),
            ],
            f,
        )
    return EXIT_OK


def _cmd_peak_r(args) -> int:
    lo, hi = _parse_bounds(args.r_bounds, "--r-bounds")
    alpha = args.alpha if args.alpha is not None else 0.0
    res = find_entropy_peak_rate(args.t, alpha, lo, hi, tol=args.tol)
    with _out_stream(args.out) as f:
        _write_report(
            [
                ("t", float(args.t)),
                ("alpha", float(alpha)),
                ("r_star", res.x),
                ("s_star", res.value),
                ("flag", res.flag),
            ],
            f,
        )
    return EXIT_OK


def _cmd_mc_validate(args) -> int:
    p = _resolve_params(args)
    report = mc_validate(
        p,
        t=args.t,
        n_traj=args.ntraj,
        seed=args.seed,
        against=args.against,
        threshold=args.threshold,
    )
    with _out_stream(args.out) as f:
        _write_report(
            [
                ("R", p.R),
                ("alpha", p.alpha),
                ("t", report.t),
                ("n_traj", report.n_traj),
                ("compared_to", report.compared_to),
                ("max_std_dev", report.max_std_dev),
                ("threshold", report.threshold),
                ("passed", report.passed),
            ],
            f,
        )
    return EXIT_OK if report.passed else EXIT_VALIDATION


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qreset", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def common_output(sp, formats=True):
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        if formats:
            sp.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    sp = sub.add_parser("ness", parents=[], help="stationary observables at a point")
    _add_param_flags(sp)
    sp.add_argument("--observables", default=",".join(ALL_OBSERVABLES))
    sp.add_argument("--hamiltonian", default=None,
                    help="interchange file with a generic Hamiltonian")
    sp.add_argument("--rho0", default=None,
                    help="interchange file with the initial density matrix")
    sp.add_argument("--split", default=None,
                    help="dimA:dimB bipartition for the subsystem entropy")
    common_output(sp)
    sp.set_defaults(func=_cmd_ness)

    sp = sub.add_parser("sweep", help="grid sweep of stationary observables")
    sp.add_argument("--grid-r", required=True, help="lo:hi:n[:log]")
    sp.add_argument("--grid-alpha", required=True, help="lo:hi:n[:log]")
    sp.add_argument("--observables", default=",".join(ALL_OBSERVABLES))
    sp.add_argument("--threads", type=int, default=None)
    common_output(sp)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("timeseries", help="finite-time entropy/fidelity")
    _add_param_flags(sp)
    sp.add_argument("--grid-t", required=True, help="lo:hi:n[:log], rescaled time")
    sp.add_argument("--observables", default="entropy")
    common_output(sp)
    sp.set_defaults(func=_cmd_timeseries)

    sp = sub.add_parser("optimize", help="maximize concurrence over the rate")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--r-bounds", required=True, help="lo:hi")
    sp.add_argument("--tol", type=float, default=1e-8)
    common_output(sp, formats=False)
    sp.set_defaults(func=_cmd_optimize)

    sp = sub.add_parser("critical", help="entropy inflection point")
    sp.add_argument("--box", default="0.05:0.3:0.8:2.0", help="rlo:rhi:alo:ahi")
    common_output(sp, formats=False)
    sp.set_defaults(func=_cmd_critical)

    sp = sub.add_parser("peak-r", help="maximize finite-time entropy over the rate")
    sp.add_argument("--t", type=float, required=True, help="rescaled time")
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--r-bounds", required=True, help="lo:hi")
    sp.add_argument("--tol", type=float, default=1e-8)
    common_output(sp, formats=False)
    sp.set_defaults(func=_cmd_peak_r)

    sp = sub.add_parser("mc-validate", help="trajectory check of the engine")
    _add_param_flags(sp)
    sp.add_argument("--t", type=float, required=True, help="rescaled time")
    sp.add_argument("--ntraj", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--against", choices=("reset", "ness"), default="reset")
    sp.add_argument("--threshold", type=float, default=5.0)
    common_output(sp, formats=False)
    sp.set_defaults(func=_cmd_mc_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except BoundsError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
