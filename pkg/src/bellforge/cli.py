"""Command-line entry point.

Exit status: 0 on success, 1 on invalid input, 2 when a numeric
certification fails (the residual is printed on stdout).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings
from fractions import Fraction

import numpy as np

from . import analytic, bounds
from .behavior import Behavior, BehaviorError, all_ones_strategy, check_behavior, ns_box
from .functional import (
    BellFunctional,
    TrivialInequalityWarning,
    build_centered,
    build_m_separable,
    build_mu_family,
    build_recursive_symmetric,
    build_symmetric,
    chsh_variant,
    evaluate,
    tilted_chsh,
    tripartite_seed,
)
from .optimize import VIOLATION_THRESHOLD, optimize, scan_random_states
from .quantum import MeasurementAssignment, PureState, behavior_from_state, ghz_state, haar_random_state

EXIT_OK, EXIT_INVALID, EXIT_CERT = 0, 1, 2


class UsageError(ValueError):
    pass


class CertificationFailed(RuntimeError):
    def __init__(self, message: str, residual):
        super().__init__(message)
        self.residual = residual


# --- I/O helpers --------------------------------------------------------------

def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _emit(data, path: str | None) -> None:
    text = json.dumps(data)
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _fmt(v) -> str:
    # repr gives the shortest round-tripping form with '.' regardless of locale
    return repr(float(v))


def _load_functional(path: str) -> BellFunctional:
    return BellFunctional.from_json(_read_json(path))


def _parse_state(spec: str, rng_seed) -> PureState:
    """``file.json``, ``ghz:n:theta`` or ``haar:n``."""
    if spec.startswith("ghz:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"state spec {spec!r}: expected ghz:n:theta")
        try:
            return ghz_state(int(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise UsageError(f"state spec {spec!r}: {exc}") from None
    if spec.startswith("haar:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"state spec {spec!r}: expected haar:n") from None
        return haar_random_state(n, rng_seed)
    return PureState.from_json(_read_json(spec))


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("BELLFORGE_THREADS")
    if env is None:
        return 1
    try:
        value = int(env)
    except ValueError:
        raise UsageError(f"BELLFORGE_THREADS={env!r} is not an integer") from None
    if value < 1:
        raise UsageError("BELLFORGE_THREADS must be >= 1")
    return value


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return v


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number") from None


# --- subcommands ----------------------------------------------------------------

SEEDS = {"chsh": lambda a: chsh_variant(), "tilted": lambda a: tilted_chsh(a.beta),
         "tripartite": lambda a: tripartite_seed()}


def cmd_build(args) -> int:
    fam = args.family
    if fam == "mu":
        if args.mu is None:
            raise UsageError("--family mu requires --mu MU12 MU13 MU23")
        f = build_mu_family(*args.mu)
    elif fam == "recursive":
        f = build_recursive_symmetric(args.n)
    elif fam in ("msep-sym", "msep-centered"):
        if args.m is None:
            raise UsageError(f"--family {fam} requires --m")
        f = build_m_separable(SEEDS[args.seed](args), args.n, args.m,
                              "symmetric" if fam == "msep-sym" else "centered")
    else:
        seed = SEEDS[args.seed](args)
        f = build_symmetric(seed, args.n) if fam == "sym" else build_centered(seed, args.n)
    _emit(f.to_json(), args.out)
    return EXIT_OK


def _load_behavior(args) -> Behavior:
    if args.behavior:
        return Behavior.from_json(_read_json(args.behavior))
    if args.state:
        if not args.assignment:
            raise UsageError("--state requires --assignment")
        assignment = MeasurementAssignment.from_json(_read_json(args.assignment))
        return behavior_from_state(_parse_state(args.state, args.seed), assignment)
    if args.ns_box:
        return ns_box(args.ns_box)
    if args.all_ones:
        return all_ones_strategy(args.all_ones).behavior()
    raise UsageError("give one of --behavior, --state/--assignment, --ns-box, --all-ones")


def cmd_evaluate(args) -> int:
    f = _load_functional(args.functional)
    b = _load_behavior(args)
    if b.n_parties != f.n_parties:
        raise UsageError(f"behavior has {b.n_parties} parties, functional {f.n_parties}")
    report = check_behavior(b, tol=args.tol)
    if not report.ok:
        raise BehaviorError(f"behavior is not a valid NS behavior: {report}")
    value = evaluate(f, b)
    _emit({"value": str(value) if isinstance(value, Fraction) else float(value),
           "bound": str(f.bound), "violation": bool(value > f.bound)}, args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    f = _load_functional(args.functional)
    if args.kind == "local":
        cert = bounds.local_bound(f)
    elif args.kind == "bisep3":
        cert = bounds.biseparable_bound_tripartite(f)
    else:
        if args.m is None:
            raise UsageError("--kind sampled requires --m")
        cert = bounds.grouped_bound_sampled(f, args.m, args.samples, args.seed)
    _emit(cert.to_json(), args.out)
    excess = cert.value - f.bound
    if excess > (0 if args.kind != "sampled" else args.tol):
        raise CertificationFailed(f"{args.kind} maximum {cert.value} exceeds the declared bound {f.bound}",
                                  excess)
    return EXIT_OK


def cmd_ghz_scan(args) -> int:
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if not 0 < args.theta_min <= args.theta_max < math.pi / 4:
        raise UsageError("need 0 < theta-min <= theta-max < pi/4")
    rows, worst = [], 0.0
    failed = None
    for theta in np.linspace(args.theta_min, args.theta_max, args.steps):
        try:
            c = analytic.ghz_violation(args.n, float(theta), tol=args.tol)
        except analytic.CertificationError as exc:
            failed = failed or str(exc)
            a0, a1 = analytic.ghz_angles(args.n, float(theta))
            c = None
        if c is not None:
            worst = max(worst, c.residual, c.flip_residual, c.pair_residual)
            rows.append([_fmt(theta), _fmt(c.alpha0), _fmt(c.alpha1), _fmt(c.value), _fmt(c.value_closed),
                         _fmt(c.residual)])
        else:
            rows.append([_fmt(theta), _fmt(a0), _fmt(a1), "nan", _fmt(analytic.ghz_value_closed(args.n, theta)),
                         "nan"])
    header = ["theta", "alpha0", "alpha1", "value_sim", "value_closed", "residual"]
    if args.out:
        _write_csv(args.out, header, rows)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        w.writerows(rows)
    if failed:
        raise CertificationFailed(failed, worst)
    return EXIT_OK


def cmd_hardy_demo(args) -> int:
    c = analytic.hardy_measurements(args.theta, args.alpha, args.delta)
    out = {
        "theta": c.theta, "alpha": c.alpha, "delta": c.delta,
        "assignment": c.measurements.to_json(),
        "P(00|00)": c.p_00_00, "P(01|01)": c.p_01_01, "P(10|10)": c.p_10_10, "P(00|11)": c.p_00_11,
    }
    _emit(out, args.out)
    if c.zero_residual > args.tol or c.p_00_00 <= 0:
        raise CertificationFailed("Hardy zero conditions not met", c.zero_residual)
    return EXIT_OK


def cmd_symmetric_hardy(args) -> int:
    state = PureState.from_json(_read_json(args.state))
    alpha = args.alpha
    if alpha not in (None, "scan"):
        try:
            alpha = float(alpha)
        except ValueError:
            raise UsageError(f"--alpha must be a number or 'scan', got {alpha!r}") from None
    try:
        r = analytic.symmetric_hardy_construction(state, alpha, tol=args.tol)
    except analytic.ConstructionError as exc:
        if "no admissible angle" in str(exc):
            raise CertificationFailed(str(exc), float("nan")) from None
        raise
    out = {"assignment": r.assignment.to_json(),
           "certificate": {"value": r.value, "p_root": r.p_root, "zeros": r.zeros, "alpha": r.alpha,
                           "schmidt_theta": r.schmidt_theta, "zero_residual": r.zero_residual}}
    if args.assignment_out:
        _emit(r.assignment.to_json(), args.assignment_out)
    _emit(out, args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    f = _load_functional(args.functional)
    state = _parse_state(args.state, args.seed)
    if state.n_qubits != f.n_parties:
        raise UsageError(f"state has {state.n_qubits} qubits, functional {f.n_parties} parties")
    r = optimize(f, state, args.restarts, args.seed, args.method)
    _emit(r.to_json(), args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    f = _load_functional(args.functional)
    s = scan_random_states(f, f.n_parties, args.count, args.seed, args.restarts, args.method, _threads(args))
    data = s.to_json()
    data["threshold"] = VIOLATION_THRESHOLD
    _emit(data, args.out)
    if args.csv:
        _write_csv(args.csv, ["state_index", "best_value", "restarts_to_first_violation"],
                   [[k, _fmt(r.value), "" if r.first_violation is None else r.first_violation]
                    for k, r in enumerate(s.results)])
    return EXIT_OK


def cmd_ns_box(args) -> int:
    b = ns_box(args.n)
    if args.functional:
        f = _load_functional(args.functional)
        if f.n_parties != args.n:
            raise UsageError(f"functional has {f.n_parties} parties, box {args.n}")
        _emit({"value": str(evaluate(f, b)), "bound": str(f.bound)}, args.out)
    else:
        _emit(b.to_json(), args.out)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for certification failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bellforge", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker processes for scans (default: $BELLFORGE_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, aliases=()):
        sp = sub.add_parser(name, help=help_, aliases=list(aliases))
        sp.set_defaults(func=func)
        sp.add_argument("--out", "-o", default=None, help="output file (default stdout)")
        return sp

    b = add("build", cmd_build, "construct a Bell functional")
    b.add_argument("--family", required=True, choices=["sym", "centered", "mu", "msep-sym", "msep-centered",
                                                       "recursive"])
    b.add_argument("--seed", default="chsh", choices=sorted(SEEDS), help="seed inequality")
    b.add_argument("--n", type=_positive_int, default=3)
    b.add_argument("--m", type=_positive_int, default=None)
    b.add_argument("--beta", type=_rational, default=Fraction(0), help="tilt of the tilted seed")
    b.add_argument("--mu", type=_rational, nargs=3, metavar=("MU12", "MU13", "MU23"))

    e = add("evaluate", cmd_evaluate, "evaluate a functional on a behavior")
    e.add_argument("--functional", required=True)
    e.add_argument("--behavior")
    e.add_argument("--state", help="file, ghz:n:theta or haar:n")
    e.add_argument("--assignment")
    e.add_argument("--ns-box", type=_positive_int)
    e.add_argument("--all-ones", type=_positive_int)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--tol", type=float, default=1e-9)

    c = add("certify", cmd_certify, "compute a local, biseparable or sampled m-separable bound")
    c.add_argument("--functional", required=True)
    c.add_argument("--kind", required=True, choices=["local", "bisep3", "sampled"])
    c.add_argument("--m", type=_positive_int)
    c.add_argument("--samples", type=_positive_int, default=10_000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=float, default=1e-9, help="slack for sampled bounds")

    g = add("ghz-scan", cmd_ghz_scan, "closed-form GHZ violations over a theta grid (CSV)")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--theta-min", type=float, default=0.05)
    g.add_argument("--theta-max", type=float, default=math.pi / 4 - 0.05)
    g.add_argument("--steps", type=int, default=20)
    g.add_argument("--tol", type=float, default=1e-10)

    h = add("hardy-demo", cmd_hardy_demo, "Hardy measurements on cos t|00> + sin t|11>")
    h.add_argument("--theta", type=float, default=math.pi / 6)
    h.add_argument("--alpha", type=float, default=math.pi / 3)
    h.add_argument("--delta", type=float, default=0.0)
    h.add_argument("--tol", type=float, default=1e-12)

    t = add("symmetric-hardy", cmd_symmetric_hardy, "Hardy-based violation on a symmetric three-qubit state",
            aliases=["theorem2"])
    t.add_argument("--state", required=True, help="state JSON in canonical form")
    t.add_argument("--alpha", default=None, help="shared angle, or 'scan'")
    t.add_argument("--assignment-out", default=None)
    t.add_argument("--tol", type=float, default=1e-10)

    for name, func, help_ in [("optimize", cmd_optimize, "maximize a functional over measurements"),
                              ("scan", cmd_scan, "optimize on Haar-random states")]:
        o = add(name, func, help_)
        o.add_argument("--functional", required=True)
        o.add_argument("--restarts", type=_positive_int, default=20)
        o.add_argument("--seed", type=int, default=0)
        o.add_argument("--method", choices=["see-saw", "direct-search"], default="see-saw")
        if name == "optimize":
            o.add_argument("--state", required=True, help="file, ghz:n:theta or haar:n")
        else:
            o.add_argument("--count", type=_positive_int, default=10)
            o.add_argument("--csv", default=None)

    nb = add("ns-box", cmd_ns_box, "the n-party NS box, or a functional's value on it")
    nb.add_argument("--n", type=_positive_int, required=True)
    nb.add_argument("--functional", default=None)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", TrivialInequalityWarning)
            return args.func(args)
    except CertificationFailed as exc:
        print(json.dumps({"error": str(exc), "residual": _jsonable_residual(exc.residual)}))
        print(f"bellforge: certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT
    except (ValueError, OverflowError) as exc:
        print(f"bellforge: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def _jsonable_residual(r):
    if isinstance(r, Fraction):
        return str(r)
    return None if r != r else float(r)


if __name__ == "__main__":
    sys.exit(main())
