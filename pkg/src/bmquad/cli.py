"""Command-line interface: one record per line, json-lines or tsv.

Exit status: 0 on success, 2 on invalid input, 3 on an internal
inconsistency (a failed self-check or disagreeing routes).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from fractions import Fraction

from .arith import is_prime
from .brauer import (
    REAL,
    NoNontrivialClass,
    ProjectivePoint,
    brauer_decomposition,
    family_invariant_profile,
    find_rational_point,
    obstruction_decision,
    Obstruction,
)
from .census import (
    NumericalInconsistency,
    count_nbr_characters,
    count_nbr_direct,
    count_nbr_mobius,
    count_nloc,
)
from .constants import constant_D, constant_E, dirichlet_L1, euler_C, euler_C_f
from .local import FamilyInstance, QuadricInstance, family_local_criterion, solvable_at_prime, solvable_everywhere
from .verify import run_suite

EXIT_OK, EXIT_INVALID, EXIT_INCONSISTENT = 0, 2, 3
THREADS_ENV = "BMQUAD_THREADS"


class InvalidInput(ValueError):
    pass


class Inconsistent(RuntimeError):
    pass


def _frac(x: Fraction):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _form(f):
    return [_frac(c) for c in f.coeffs]


# ---------------------------------------------------------------------------
# subcommands; each returns a list of records


def cmd_local(args):
    Q = QuadricInstance(args.a, args.b, args.c, args.n)
    if args.p is not None:
        if not is_prime(args.p):
            raise InvalidInput(f"{args.p} is not prime")
        v = solvable_at_prime(Q, args.p)
        return [{
            "a": Q.a, "b": Q.b, "c": Q.c, "n": Q.n, "place": v.place, "solvable": v.solvable,
            "witness": list(v.witness) if v.witness else None, "modulus": v.modulus,
            "searched_depth": v.searched_depth,
        }]
    ok, failing = solvable_everywhere(Q)
    return [{"a": Q.a, "b": Q.b, "c": Q.c, "n": Q.n, "indefinite": Q.indefinite,
             "solvable_everywhere": ok, "failing_places": failing}]


def cmd_obstruct(args):
    F = FamilyInstance(args.q, args.a, args.c, args.d, args.e)
    rec = {"q": F.q, "a": F.a, "c": F.c, "d": F.d, "e": F.e}
    if not family_local_criterion(F):
        rec.update(locally_solvable=False, obstructed=None, invariant_profile=None)
        return [rec]
    prof = family_invariant_profile(F)
    rec.update(
        locally_solvable=True,
        obstructed=obstruction_decision(F) is Obstruction.OBSTRUCTED,
        invariant_profile={str(k): str(v) for k, v in prof.items() if v},
    )
    return [rec]


def _parse_point(text: str) -> ProjectivePoint:
    parts = text.split(",")
    if len(parts) != 4:
        raise InvalidInput("--point expects four comma-separated rationals x,y,z,t")
    try:
        return ProjectivePoint(tuple(Fraction(p) for p in parts))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"bad point {text!r}: {exc}") from None


def cmd_brauer(args):
    Q = QuadricInstance(args.a, args.b, args.c, args.n)
    if args.point:
        M = _parse_point(args.point)
        if not M.on(Q):
            raise InvalidInput(f"point {args.point} is not on the quadric")
    else:
        M = find_rational_point(Q, args.height)
        if M is None:
            raise InvalidInput(f"no rational point of height <= {args.height}; pass --point")
    dec = brauer_decomposition(Q, M, require_nontrivial=not args.allow_split)
    if not dec.identity_holds():
        raise Inconsistent("decomposition identity failed")
    return [{
        "a": Q.a, "b": Q.b, "c": Q.c, "n": Q.n, "point": [_frac(x) for x in M.coords],
        "l1": _form(dec.l1), "l2": _form(dec.l2), "l3": _form(dec.l3), "l4": _form(dec.l4),
        "c0": _frac(dec.c0), "d": dec.d,
    }]


def cmd_count(args, threads):
    mode = args.mode
    if mode == "nloc":
        return [count_nloc(args.B, args.n, threads=threads).as_record()]
    fns = {
        "nbr-direct": lambda: count_nbr_direct(args.B, args.q, threads=threads),
        "nbr-mobius": lambda: count_nbr_mobius(args.B, args.q, threads=threads),
        "nbr-characters": lambda: count_nbr_characters(args.B, args.q),
    }
    E = constant_E(args.q).value

    def run_mode(m):
        rep = fns[m]()
        pred = E * args.B**1.5 * math.sqrt(math.log(args.B)) if args.B > 1 else None
        return dataclasses.replace(rep, predicted=pred)

    if mode == "nbr-all":
        reps = [run_mode(m) for m in ("nbr-direct", "nbr-mobius", "nbr-characters")]
        recs = [r.as_record() for r in reps]
        if len({r.count for r in reps}) != 1:
            raise Inconsistent(f"routes disagree: {[r.count for r in reps]}", recs)
        return recs
    return [run_mode(mode).as_record()]


def cmd_constants(args):
    name = args.name
    if name == "C":
        rep = euler_C(args.a, args.b, args.c, args.P)
    elif name == "Cf":
        rep = euler_C_f(args.f, args.q, args.P)
    elif name == "D":
        rep = constant_D(args.q, args.P)
    elif name == "E":
        rep = constant_E(args.q, args.P)
    else:
        rep = dirichlet_L1(args.q)
    return [rep.as_record()]


def cmd_verify(args):
    recs = run_suite(args.suite, args.seed)
    if not all(r["passed"] for r in recs):
        raise Inconsistent("self-check failed", recs)
    return recs


# ---------------------------------------------------------------------------
# output


def _tsv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


def write_records(records, fmt: str, stream) -> None:
    if fmt == "tsv":
        keys: list = []
        for r in records:
            keys += [k for k in r if k not in keys]
        stream.write("\t".join(keys) + "\n")
        for r in records:
            stream.write("\t".join(_tsv_cell(r.get(k)) for k in keys) + "\n")
    else:
        for r in records:
            stream.write(json.dumps(r, separators=(", ", ": ")) + "\n")


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonzero(text):
    v = int(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be nonzero")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json-lines", "tsv"), default="json-lines")
    common.add_argument("--out", help="write records to this file instead of stdout")
    common.add_argument("--threads", type=_positive, default=None,
                        help=f"worker threads (default ${THREADS_ENV} or 1)")

    ap = argparse.ArgumentParser(prog="bmquad", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("local", parents=[common], help="local solvability of a x^2 + b y^2 + c z^2 = n")
    for k in "abcn":
        p.add_argument(f"--{k}", type=_nonzero, required=True)
    p.add_argument("--p", type=_positive, help="a single prime; default: every relevant place")

    p = sub.add_parser("obstruct", parents=[common], help="Brauer-Manin obstruction for the family")
    p.add_argument("--q", type=_positive, default=17)
    for k in "acde":
        p.add_argument(f"--{k}", type=_nonzero, required=True)

    p = sub.add_parser("brauer", parents=[common], help="quaternion decomposition at a rational point")
    for k in "abcn":
        p.add_argument(f"--{k}", type=_nonzero, required=True)
    p.add_argument("--point", help="x,y,z,t on a x^2 + b y^2 + c z^2 = n t^2")
    p.add_argument("--height", type=_positive, default=1000, help="point search height")
    p.add_argument("--allow-split", action="store_true",
                   help="also decompose when -abcn is a square (the quaternion class is then trivial)")

    p = sub.add_parser("count", parents=[common], help="census counts")
    p.add_argument("--mode", choices=("nbr-direct", "nbr-mobius", "nbr-characters", "nbr-all", "nloc"),
                   required=True)
    p.add_argument("--B", type=_positive, required=True)
    p.add_argument("--q", type=_positive, default=17)
    p.add_argument("--n", type=_nonzero, default=1, help="represented value for nloc")

    p = sub.add_parser("constants", parents=[common], help="Euler products and main-term constants")
    p.add_argument("--name", choices=("C", "Cf", "D", "E", "L1"), required=True)
    p.add_argument("--q", type=_positive, default=17)
    p.add_argument("--P", type=_positive, default=10**6)
    for k in "abc":
        p.add_argument(f"--{k}", type=_nonzero, default=1)
    p.add_argument("--f", type=_positive, default=1)

    p = sub.add_parser("verify", parents=[common], help="run built-in self-checks")
    p.add_argument("--suite", choices=("identities", "oracles", "all"), default="all")
    p.add_argument("--seed", type=int, default=0)
    return ap


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            v = int(env)
        except ValueError:
            raise InvalidInput(f"{THREADS_ENV} must be a positive integer") from None
        if v < 1:
            raise InvalidInput(f"{THREADS_ENV} must be a positive integer")
        return v
    return 1


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    records: list = []
    status = EXIT_OK
    try:
        threads = _threads(args)
        if args.command == "count":
            records = cmd_count(args, threads)
        else:
            records = {
                "local": cmd_local, "obstruct": cmd_obstruct, "brauer": cmd_brauer,
                "constants": cmd_constants, "verify": cmd_verify,
            }[args.command](args)
    except Inconsistent as exc:
        print(f"error: {exc.args[0]}", file=stderr)
        records = exc.args[1] if len(exc.args) > 1 else []
        status = EXIT_INCONSISTENT
    except (NumericalInconsistency, ArithmeticError) as exc:
        print(f"error: {exc}", file=stderr)
        status = EXIT_INCONSISTENT
    except (InvalidInput, NoNontrivialClass, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    if args.out:
        with open(args.out, "w") as fh:
            write_records(records, args.format, fh)
    else:
        write_records(records, args.format, stdout)
    return status


def main() -> None:
    sys.exit(run())


__all__ = ["run", "main", "build_parser", "REAL"]
