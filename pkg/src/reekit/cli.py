"""Command-line entry point: field inspection, element algebra, unital export,
the verification suite, and the product-replacement tools.

Exit codes: 0 success / all checks pass, 1 verification failure, 2 usage
error.  Identical invocations produce byte-identical output (seeded
determinism, no wall-clock data in any report).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import groups, pra, ree, verify
from .gf3 import make_field, field_for_q
from .unital import Unital, DEFAULT_MAX_POINTS

VALID_Q = (3, 27)


class UsageError(Exception):
    pass


def _field_for_q_arg(q):
    if q not in VALID_Q:
        raise UsageError(f"--q must be one of {VALID_Q}")
    return field_for_q(q)


def _thread_count():
    raw = os.environ.get("REEKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"REEKIT_THREADS must be an integer, got {raw!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_field(args):
    if args.e < 0:
        raise UsageError("--e must be a non-negative integer")
    f = make_field(args.e)
    theta_desc = (f"x -> x^(3^{f.e + 1}) (identity on GF(3))" if f.e == 0
                  else f"x -> x^(3^{f.e + 1})")
    print(f"q = {f.q} = 3^{f.m} (e = {f.e})")
    print(f"modulus = {f.modulus_str()}")
    print(f"theta: {theta_desc}; theta o theta is the Frobenius cubing")
    print(f"element text form: little-endian digit string of length {f.m}")
    return 0


def cmd_element(args):
    f = _field_for_q_arg(args.q)
    a = ree.from_text(f, args.a)
    if args.op == "mul":
        if args.b is None:
            raise UsageError("mul needs --b")
        b = ree.from_text(f, args.b)
        print(ree.to_text(a * b))
    elif args.op == "inv":
        print(ree.to_text(a.inverse()))
    elif args.op == "order":
        print(ree.order(a))
    elif args.op == "trace":
        print(f.to_str(a.trace()))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown element op {args.op}")
    return 0


def cmd_unital(args):
    if args.q not in VALID_Q and not args.force:
        raise UsageError(f"--q must be one of {VALID_Q} (--force overrides)")
    f = field_for_q(args.q)
    uni = Unital(f, max_points=10**8 if args.force else DEFAULT_MAX_POINTS)
    include_blocks = args.full_blocks or args.q == 3
    if args.q != 3 and args.full_blocks and not args.force:
        raise UsageError(
            f"full block export at q={args.q} enumerates about "
            f"{args.q**2 * (args.q**2 - args.q + 1)} blocks; pass --force")
    if args.format == "text":
        print(f"q = {args.q}: {uni.n_points} points", end="")
        if args.q == 3:
            print(f", {len(uni.all_blocks())} blocks")
        else:
            print(f", {args.q**2 * (args.q**2 - args.q + 1)} blocks "
                  f"(not enumerated)")
        return 0
    payload = uni.to_json_dict(include_blocks=include_blocks)
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}: {uni.n_points} points"
              + (f", {len(payload['blocks'])} blocks" if include_blocks else ""))
    else:
        print(text)
    return 0


def cmd_verify(args):
    if args.q not in VALID_Q:
        raise UsageError(f"--q must be one of {VALID_Q}")
    if args.samples <= 0 or args.seed < 0:
        raise UsageError("--samples must be positive and --seed non-negative")
    if args.lemma == "all":
        names = verify.default_check_names(args.q)
    else:
        if args.lemma not in verify.CHECKS:
            raise UsageError(
                f"unknown lemma {args.lemma!r}; choose 'all' or one of "
                f"{', '.join(sorted(verify.CHECKS))}")
        names = [args.lemma]
    reports = verify.run_checks(names, args.q, args.samples, args.seed,
                                threads=_thread_count())
    lines = [r.to_json_line() for r in reports]
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        for ln in lines:
            print(ln)
    width = max(len(r.name) for r in reports)
    print(f"-- verification summary (q={args.q}) --", file=sys.stderr)
    for r in reports:
        print(f"{r.name:<{width}}  {r.verdict}", file=sys.stderr)
    n_fail = sum(r.verdict == "FAIL" for r in reports)
    n_disc = sum(r.verdict == "DISCREPANCY" for r in reports)
    print(f"{len(reports)} checks: {len(reports) - n_fail - n_disc} pass, "
          f"{n_disc} discrepancy, {n_fail} fail", file=sys.stderr)
    return 1 if n_fail else 0


def _ree_walk_tuple(f, n):
    t = min(3, f.q - 1)  # additive generator of the field (t = x for m > 1)
    cycle = [ree.u_inf(f, t, 0, 0), ree.u_o(f, t, 0, 0),
             ree.u_inf(f, 0, t, 0), ree.u_o(f, 0, t, 0),
             ree.u_inf(f, 0, 0, t), ree.u_o(f, 0, 0, t)]
    return tuple(cycle[i % len(cycle)] for i in range(n))


def cmd_pra(args):
    if args.mode == "census":
        if args.q is not None:
            f = _field_for_q_arg(args.q)
            order = f.q**3 * (f.q**3 + 1) * (f.q - 1)
            raise UsageError(
                f"census at q={args.q} would need {order}^{args.n} tuple "
                f"addresses, far beyond the bound 2^34; censuses run on the "
                f"built-in small groups ({', '.join(sorted(pra_census_groups()))})")
        if args.group is None:
            raise UsageError("census needs --group")
        if args.group not in pra_census_groups():
            raise UsageError(
                f"census supports {', '.join(sorted(pra_census_groups()))}; "
                f"got {args.group!r}")
        ctx = groups.builtin_group(args.group)
        rep = pra.bfs_census(ctx, args.n)
        text = json.dumps(rep.to_json_dict(), sort_keys=True,
                          separators=(",", ":"))
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        print(text)
        return 0

    # random-element walk
    if args.steps < 0:
        raise UsageError("--steps must be >= 0")
    if (args.q is None) == (args.group is None):
        raise UsageError("random needs exactly one of --q or --group")
    if args.q is not None:
        f = _field_for_q_arg(args.q)
        start = _ree_walk_tuple(f, args.n)
        uni = verify._unital(args.q) if args.q == 27 else None
        if args.q == 3:
            assert len(groups.closure(list(start), ree.identity(f))) == 1512
        else:
            assert groups.ree_transitive(uni, start)
        tup, elem = pra.pra_walk(start, args.steps, args.seed,
                                 pra.ElementOps())
        print(ree.to_text(elem))
        print(f"order = {ree.order(elem)}")
        print(f"trace = {f.to_str(elem.trace())}")
    else:
        ctx = groups.builtin_group(args.group)
        gens = _small_group_generating_tuple(ctx, args.n)
        tup, elem = pra.pra_walk(gens, args.steps, args.seed,
                                 pra.IndexOps(ctx))
        g = ctx.elements[elem]
        print(f"element index = {elem}")
        print(f"images = {list(g.images)}")
        print(f"order = {g.order()}")
    return 0


def pra_census_groups():
    # ree3 closures are available, but its 1512^n tuple space makes a census
    # unusable in practice; censuses are offered for the three small groups
    return {"a5", "psl27", "psl28"}


def _small_group_generating_tuple(ctx, n):
    if n < 2:
        raise UsageError("--n must be >= 2")
    base = []
    for i, g in enumerate(ctx.elements):
        if not g.is_identity():
            base.append(i)
        if len(base) >= n:
            break
    for attempt in range(ctx.order):
        if groups.generates(base[:n], ctx):
            return tuple(base[:n])
        base = base[1:] + [(base[-1] + 1) % ctx.order]
    raise UsageError(f"could not find a generating {n}-tuple")


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="reekit",
        description="small Ree groups, their unital, lemma verification, "
                    "and product-replacement machinery")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("field", help="describe GF(3^(2e+1))")
    sp.add_argument("--e", type=int, required=True)
    sp.set_defaults(fn=cmd_field)

    sp = sub.add_parser("element", help="matrix element algebra")
    sp.add_argument("op", choices=["mul", "inv", "order", "trace"])
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--a", required=True, help="matrix text (7 rows, ';')")
    sp.add_argument("--b", help="second matrix for mul")
    sp.set_defaults(fn=cmd_element)

    sp = sub.add_parser("unital", help="enumerate / export the unital")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--format", choices=["json", "text"], default="json")
    sp.add_argument("--out", help="output path (default stdout)")
    sp.add_argument("--full-blocks", action="store_true",
                    help="include the exhaustive block list")
    sp.add_argument("--force", action="store_true",
                    help="override size guards")
    sp.set_defaults(fn=cmd_unital)

    sp = sub.add_parser("verify", help="run the lemma verification suite")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--lemma", default="all")
    sp.add_argument("--samples", type=int, default=verify.DEFAULT_SAMPLES)
    sp.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    sp.add_argument("--out", help="JSONL output path (default stdout)")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("pra", help="product-replacement tools")
    sp.add_argument("mode", choices=["census", "random"])
    sp.add_argument("--group", help="a5, psl27, psl28, ree3")
    sp.add_argument("--q", type=int)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--steps", type=int, default=200)
    sp.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    sp.add_argument("--out", help="output path for census JSON")
    sp.set_defaults(fn=cmd_pra)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, pra.CensusBoundExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
