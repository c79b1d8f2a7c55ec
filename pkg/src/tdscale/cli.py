"""Command-line entry point.

Every command produces a list of flat records. ``--format json`` prints one
JSON object per line (keys sorted); ``--format human`` prints the same
records as ``key: value`` text. Exit codes: 0 success, 1 mathematical
precondition failure, 2 parse or configuration error. ``reproduce`` exits 0
only when every target matches.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import cayley, counterexamples, directions, flat, scale
from .automorphisms import LinearAutomorphism
from .errors import ParseError, PreconditionError
from .field import FieldContext, format_element, is_prime
from .lattices import (BasisLattice, MonomialLattice, dplus_d, format_monomial_lattice,
                       parse_monomial_lattice)
from .matrix import format_matrix, parse_matrix


class ConfigError(ValueError):
    pass


def _prime(text):
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _horizon(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n < 2:
        raise argparse.ArgumentTypeError("horizon must be at least 2")
    return n


def _positive(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _window(text):
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("window must look like LO:HI") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("window must have LO <= HI")
    return lo, hi


def _field(text):
    try:
        return FieldContext.from_spec(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


# ---------------------------------------------------------------------------
# inputs

def _lattice(ctx, text, rank=None):
    """A basis matrix ``[[..]]`` or a monomial lattice ``tail=..; plus={..} | ...``."""
    s = text.strip()
    if s.startswith("["):
        return BasisLattice(parse_matrix(ctx, s))
    if s.lower() in ("o", "std", "standard"):
        if rank is None:
            raise ConfigError("the standard lattice needs a rank from the automorphism")
        return BasisLattice.standard(ctx, rank)
    return parse_monomial_lattice(ctx, s)


def _format_lattice(L):
    if isinstance(L, BasisLattice):
        return format_matrix(L.basis)
    if isinstance(L, MonomialLattice):
        return format_monomial_lattice(L)
    return str(L)


def _pair(args):
    """``(a, b, V, W)`` from ``--example`` or from ``--a/--b`` matrices."""
    if args.example:
        ex = counterexamples.build_example(args.example, args.p)
        if args.linearized:
            a, b = ex.L_alpha, ex.L_beta
        else:
            a, b = ex.alpha, ex.beta
        V = ex.V
        if args.V or args.W:
            raise ConfigError("--V/--W cannot be combined with --example")
        return a, b, V, V
    if not (args.field and args.a and args.b):
        raise ConfigError("give --example, or --field with --a and --b")
    ctx = args.field
    ma, mb = parse_matrix(ctx, args.a), parse_matrix(ctx, args.b)
    a, b = LinearAutomorphism(ma, name="a"), LinearAutomorphism(mb, name="b")
    V = _lattice(ctx, args.V or "std", ma.n)
    W = _lattice(ctx, args.W or "std", ma.n)
    return a, b, V, W


# ---------------------------------------------------------------------------
# commands: each returns (records, ok)

def cmd_scale(args):
    M = parse_matrix(args.field, args.matrix)
    return [{"scale_exponent": scale.scale_exponent(M), "matrix": format_matrix(M)}], True


def cmd_module(args):
    M = parse_matrix(args.field, args.matrix)
    return [{"module_exponent": scale.module_exponent(M), "matrix": format_matrix(M)}], True


def cmd_inner_scale(args):
    M = parse_matrix(args.field, args.matrix)
    return [{"inner_scale_exponent": scale.inner_scale_exponent(M),
             "matrix": format_matrix(M)}], True


def cmd_dplus(args):
    V = _lattice(args.field, args.V)
    W = _lattice(args.field, args.W)
    dist = dplus_d(V, W)
    return [{"dplus_VW": dist.dplus_vw, "dplus_WV": dist.dplus_wv, "d": dist.d}], True


def cmd_delta_seq(args):
    a, b, V, W = _pair(args)
    rep = directions.delta_plus(a, b, V, W, args.N)
    records = [dict(t.record(), record="term") for t in rep.terms]
    lo, hi = rep.window
    summary = {"record": "summary", "estimate": rep.estimate(), "window": [lo, hi],
               "finite_horizon": True, "scale_a": rep.scale_a, "scale_b": rep.scale_b}
    if args.odd:
        summary["estimate_odd_n"] = rep.estimate(lambda n: n % 2 == 1)
    if args.both:
        back = directions.delta_plus(b, a, W, V, args.N)
        summary["estimate_reverse"] = back.estimate()
        summary["delta"] = rep.estimate() + back.estimate()
    records.append(summary)
    return records, True


def cmd_asymptotic(args):
    a, b, V, W = _pair(args)
    return [directions.asymptotic_verdict(a, b, V, W, args.N).record()], True


def cmd_reproduce(args):
    records = counterexamples.reproduce(args.example, args.N, args.p)
    ok = counterexamples.all_match(records)
    return records + [{"record": "summary", "lines": len(records),
                       "mismatches": sum(not r["match"] for r in records), "all_match": ok}], ok


def cmd_cayley(args):
    variants = cayley.VARIANTS if args.variant == "all" else (args.variant,)
    report = cayley.cayley_suite(args.field, args.n, args.samples, args.seed, variants)
    records = report.records()
    records.append({"record": "summary", "failures": report.failures})
    return records, report.failures == 0


def _perm(text):
    return flat.parse_permutation(text)


def cmd_flat(args):
    if args.flat_cmd == "orbits":
        sigma = _perm(args.perm)
        v = flat.orbit_finiteness(sigma)
        records = [dict(v.record(), record="finiteness", permutation=str(sigma))]
        lo, hi = args.window
        seen = set()
        for j in range(lo, hi + 1):
            if j in seen:
                continue
            o = flat.orbit(sigma, j, args.cap)
            seen.update(o.elements)
            records.append(dict(o.record(), record="orbit", start=j))
        return records, True
    if args.flat_cmd == "tidy":
        sigma = _perm(args.perm)
        A = flat.PatternSubgroup(_int_list(args.pattern))
        return [{"pattern": sorted(A.A), "image": sorted(A.image(sigma).A),
                 "tidy": flat.pattern_tidy(sigma, A)}], True
    gens = [_perm(p) for p in args.perm]
    parts = flat.joint_finite_orbits(gens, args.window, args.cap)
    return [dict(o.record(), record="orbit") for o in parts], True


def _int_list(text):
    text = text.strip().strip("{}")
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise ParseError(f"bad integer list {text!r}", text, 0) from None


def cmd_parse(args):
    ctx = args.field
    if args.element is not None:
        return [{"element": format_element(ctx.parse(args.element))}], True
    if args.matrix is not None:
        return [{"matrix": format_matrix(parse_matrix(ctx, args.matrix))}], True
    if args.lattice is not None:
        return [{"lattice": _format_lattice(_lattice(ctx, args.lattice))}], True
    if args.perm is not None:
        return [{"permutation": str(_perm(args.perm))}], True
    raise ConfigError("give one of --element, --matrix, --lattice, --perm")


COMMANDS = {
    "scale": cmd_scale, "module": cmd_module, "inner-scale": cmd_inner_scale,
    "dplus": cmd_dplus, "delta-seq": cmd_delta_seq, "asymptotic": cmd_asymptotic,
    "reproduce": cmd_reproduce, "cayley": cmd_cayley, "flat": cmd_flat, "parse": cmd_parse,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "json"), default="human")

    parser = argparse.ArgumentParser(prog="tdscale", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("scale", "scale exponent of a matrix"),
                        ("module", "module exponent -v(det)"),
                        ("inner-scale", "scale exponent of conjugation by a matrix")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--field", type=_field, required=True)
        sp.add_argument("--matrix", required=True)

    sp = sub.add_parser("dplus", parents=[common], help="d_+ and d between two lattices")
    sp.add_argument("--field", type=_field, required=True)
    sp.add_argument("--V", required=True)
    sp.add_argument("--W", required=True)

    for name, help_ in (("delta-seq", "delta_n trace and delta_+ estimate"),
                        ("asymptotic", "boundedness evidence for d along both rays")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--example", choices=counterexamples.EXAMPLE_IDS)
        sp.add_argument("--linearized", action="store_true",
                        help="use L(alpha), L(beta) of the example")
        sp.add_argument("--p", type=_prime, default=2)
        sp.add_argument("--field", type=_field)
        sp.add_argument("--a")
        sp.add_argument("--b")
        sp.add_argument("--V")
        sp.add_argument("--W")
        sp.add_argument("--N", type=_horizon, default=20)
        if name == "delta-seq":
            sp.add_argument("--odd", action="store_true", help="also estimate along odd n")
            sp.add_argument("--both", action="store_true", help="also the reverse direction and delta")

    sp = sub.add_parser("reproduce", parents=[common], help="example targets vs computed values")
    sp.add_argument("example", choices=counterexamples.EXAMPLE_IDS)
    sp.add_argument("--N", type=_horizon, default=20)
    sp.add_argument("--p", type=_prime, default=2)

    sp = sub.add_parser("cayley", parents=[common], help="Cayley transform identity suite")
    csub = sp.add_subparsers(dest="cayley_cmd", required=True)
    cp = csub.add_parser("check", parents=[common])
    cp.add_argument("--variant", choices=cayley.VARIANTS + ("all",), default="all")
    cp.add_argument("--n", type=_positive, default=2)
    cp.add_argument("--samples", type=_positive, default=100)
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--field", type=_field, default=FieldContext("laurent", 3))

    sp = sub.add_parser("flat", parents=[common], help="permutation-induced automorphisms of F^Z")
    fsub = sp.add_subparsers(dest="flat_cmd", required=True)
    fp = fsub.add_parser("orbits", parents=[common])
    fp.add_argument("--perm", required=True)
    fp.add_argument("--window", type=_window, default=(-5, 5))
    fp.add_argument("--cap", type=_positive, default=100)
    fp = fsub.add_parser("tidy", parents=[common])
    fp.add_argument("--perm", required=True)
    fp.add_argument("--pattern", required=True, help="comma-separated integers")
    fp = fsub.add_parser("joint", parents=[common])
    fp.add_argument("--perm", action="append", required=True)
    fp.add_argument("--window", type=_window, default=(-5, 5))
    fp.add_argument("--cap", type=_positive, default=100)

    sp = sub.add_parser("parse", parents=[common], help="parse and print canonical forms")
    sp.add_argument("--field", type=_field, default=FieldContext("laurent", 2))
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--element")
    group.add_argument("--matrix")
    group.add_argument("--lattice")
    group.add_argument("--perm")
    return parser


def _config(args):
    skip = {"format", "command"}
    return {k: (str(v) if isinstance(v, FieldContext) else v)
            for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _emit(records, fmt, out):
    for rec in records:
        rec = _jsonable(rec)
        if fmt == "json":
            out.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            out.write("  ".join(f"{k}: {rec[k]}" for k in sorted(rec)) + "\n")


def run(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    header = {"record": "config", "command": args.command, "config": _config(args)}
    try:
        records, ok = COMMANDS[args.command](args)
        records = [r if "record" in r else dict(r, record="result") for r in records]
        code = 0 if ok else 1
        status = {"record": "status", "exit": code}
    except (ParseError, ConfigError) as exc:
        code = 2
        status = {"record": "status", "exit": code, "error": str(exc),
                  "position": getattr(exc, "position", None)}
        records = []
    except (PreconditionError, ZeroDivisionError) as exc:
        code = 1
        status = {"record": "status", "exit": code, "error": f"{type(exc).__name__}: {exc}"}
        records = []
    except ValueError as exc:
        code = 2
        status = {"record": "status", "exit": code, "error": str(exc)}
        records = []
    if code and "error" in status:
        err.write(f"tdscale: error: {status['error']}\n")
    _emit([header] + records + [status], args.format, out)
    return code


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
