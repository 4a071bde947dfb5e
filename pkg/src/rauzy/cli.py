"""Command-line entry point: `rauzy <verb> ...`.

Exit codes: 0 success, 1 verification failure or internal helper failure,
2 usage error, 3 not connected, 4 search budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import logging
import random
import sys
from typing import Sequence

from . import __version__
from .dynamics import OperatorWord, WordError, track
from .perm_core import EdgeColoring, ParseError, PermError, parse, parse_colored, render, render_colored

CSV_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NOT_CONNECTED, EXIT_BUDGET = 0, 1, 2, 3, 4

log = logging.getLogger("rauzy")


class UsageError(Exception):
    pass


def _perm(text: str):
    try:
        return parse(text)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc


def _fmt_lam(lam) -> str:
    return "{" + ",".join(map(str, lam)) + "}"


def _full_lambda(fp) -> tuple[int, ...]:
    # rank fingerprints keep the rank apart from the other cycle lengths
    lam = fp.lam if fp.rank is None else fp.lam + (fp.rank,)
    return tuple(sorted(lam, reverse=True))


def _csv_writer(out, kind: str, columns: Sequence[str]):
    out.write(f"# rauzy {kind} csv v{CSV_VERSION}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    return w


# -- verbs ---------------------------------------------------------------------------------------


def cmd_invariants(args, out) -> int:
    from .invariants import arf_fast, cycle_invariant, genus, is_exceptional, perm_type, sign_from

    p = _perm(args.perm)
    inv = cycle_invariant(p)
    abar = arf_fast(p)
    lines = [
        f"n: {p.n}",
        f"mapping: {render(p)}",
        f"lambda: {_fmt_lam(inv.lam)}",
        f"rank: {inv.rank}",
        f"ell: {inv.ell}",
        f"abar: {abar}",
        f"sign: {sign_from(abar, p.n, inv.ell)}",
        f"type: {perm_type(p)}",
        f"hyperelliptic: {str(is_exceptional(p)).lower()}",
        f"genus: {genus(inv, p.n):g}",
    ]
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_label(args, out) -> int:
    from .labelling import build_labelling

    p = _perm(args.perm)
    lab = build_labelling(p)
    out.write(f"mapping: {render(p)}\n")
    for a in range(1, p.n):
        out.write(f"bottom {a}: {lab.pi_b[a]}\n")
    for a in range(1, p.n):
        out.write(f"top {a}: {lab.pi_t[a]}\n")
    return EXIT_OK


def cmd_apply(args, out) -> int:
    try:
        w = OperatorWord.parse(args.word)
    except WordError as exc:
        raise UsageError(str(exc)) from exc
    try:
        c = parse_colored(args.perm)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc
    t = c.host.mapping
    marked = sorted(c.gray_set)
    for s in w.steps:
        t, marked = track(s, t, marked)
    from .perm_core import Permutation

    out.write(render_colored(EdgeColoring(Permutation(t), frozenset(marked))) + "\n")
    return EXIT_OK


def cmd_classify(args, out) -> int:
    from .classes import BudgetExceeded, enumerate_classes

    try:
        reports = enumerate_classes(args.n, args.dynamics, max_n=args.max_n)
    except BudgetExceeded as exc:
        log.error("%s", exc)
        return EXIT_BUDGET
    w = _csv_writer(out, "classify", ["n", "dynamics", "representative", "size", "lambda", "rank", "sign", "hyperelliptic", "marked"])
    for r in reports:
        fp = r.fingerprint
        w.writerow(
            [
                args.n,
                r.dynamics,
                render(r.representative),
                r.size,
                " ".join(map(str, _full_lambda(fp))) if fp else "",
                "" if fp is None or fp.rank is None else fp.rank,
                "" if fp is None else fp.sign,
                "" if fp is None else int(fp.hyperelliptic),
                "" if fp is None else int(fp.marked),
            ]
        )
    return EXIT_OK


def cmd_diameter(args, out) -> int:
    from .classes import BudgetExceeded, enumerate_classes, measure_diameter

    if args.metric == "alternation" and args.dynamics not in ("rauzy", "extended"):
        raise UsageError("the alternation metric needs --dynamics rauzy or extended")
    try:
        reports = enumerate_classes(args.n, args.dynamics, max_n=args.max_n, keep_members=True)
    except BudgetExceeded as exc:
        log.error("%s", exc)
        return EXIT_BUDGET
    w = _csv_writer(out, "diameter", ["n", "dynamics", "metric", "representative", "size", "diameter"])
    for r in reports:
        d = measure_diameter(r, args.metric, max_size=args.max_size)
        w.writerow([args.n, r.dynamics, args.metric, render(r.representative), r.size, d])
    return EXIT_OK


def cmd_connect(args, out) -> int:
    from .pathfinder import (
        BudgetExceeded,
        HelperFailure,
        NotConnected,
        SearchBudgetExceeded,
        connect_bfs,
        connect_rauzy,
        connect_sliding,
    )

    p, q = _perm(args.source), _perm(args.target)
    try:
        if args.oracle or args.dynamics == "extended":
            cert = connect_bfs(p, q, args.dynamics, max_states=args.max_states)
            if cert is None:
                raise NotConnected("orbit exhausted or fingerprints differ")
        elif args.dynamics == "rauzy":
            cert = connect_rauzy(p, q, n0=args.n0)
        else:
            cert = connect_sliding(p, q, n0=args.n0)
    except NotConnected as exc:
        out.write(f"not connected: {exc}\n")
        return EXIT_NOT_CONNECTED
    except (SearchBudgetExceeded, BudgetExceeded) as exc:
        out.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except HelperFailure as exc:
        out.write(f"helper failure: {exc}\n")
        return EXIT_FAIL
    except PermError as exc:
        raise UsageError(str(exc)) from exc
    out.write(f"word: {cert.word}\n")
    out.write(f"graph_length: {cert.graph_length}\n")
    out.write(f"alternation_length: {cert.alternation_length}\n")
    bound = "n/a" if cert.bound_ok is None else str(cert.bound_ok).lower()
    out.write(f"bound_ok: {bound}\n")
    for note in cert.notes:
        out.write(f"note: {note}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    from .checks import ALL_CHECKS, check_small_table

    if args.table == "small-n":
        selected = {"1": check_small_table}
    elif args.only:
        keys = [k.strip() for k in args.only.split(",") if k.strip()]
        missing = [k for k in keys if k not in ALL_CHECKS]
        if missing:
            raise UsageError(f"unknown check ids {missing}; known: {', '.join(ALL_CHECKS)}")
        selected = {k: ALL_CHECKS[k] for k in keys}
    else:
        selected = dict(ALL_CHECKS)
    failed = 0
    for key, fn in selected.items():
        kw = {"seed": args.seed} if "seed" in fn.__code__.co_varnames else {}
        res = fn(**kw)
        out.write(res.line() + "\n")
        out.flush()
        failed += not res.ok
    return EXIT_FAIL if failed else EXIT_OK


# -- parser --------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    common.add_argument("--workers", type=int, default=1, help="parallelism cap (work runs single-threaded)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="rauzy", description="Rauzy and sliding dynamics on permutations.", parents=[common])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("invariants", parents=[common], help="cycle, rank, Arf and sign invariants")
    s.add_argument("perm")
    s.set_defaults(fn=cmd_invariants)

    s = sub.add_parser("label", parents=[common], help="canonical consistent labelling of the arcs")
    s.add_argument("perm")
    s.set_defaults(fn=cmd_label)

    s = sub.add_parser("apply", parents=[common], help="apply a word; a 'g:...|' prefix tracks gray edges")
    s.add_argument("word")
    s.add_argument("perm")
    s.set_defaults(fn=cmd_apply)

    dyn = ["extended", "sliding", "rauzy", "pivotless"]
    s = sub.add_parser("classify", parents=[common], help="enumerate the classes of one size as CSV")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--dynamics", choices=dyn, default="extended")
    s.add_argument("--max-n", type=int, default=None, help="raise the size budget")
    s.set_defaults(fn=cmd_classify)

    s = sub.add_parser("diameter", parents=[common], help="exact class diameters as CSV")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--dynamics", choices=dyn, default="rauzy")
    s.add_argument("--metric", choices=["graph", "alternation"], default="alternation")
    s.add_argument("--max-n", type=int, default=None)
    s.add_argument("--max-size", type=int, default=200_000)
    s.set_defaults(fn=cmd_diameter)

    s = sub.add_parser("connect", parents=[common], help="certificate word between two permutations")
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("--dynamics", choices=["sliding", "rauzy", "extended"], default="rauzy")
    s.add_argument("--oracle", action="store_true", help="use the exact bidirectional search")
    s.add_argument("--n0", type=int, default=9, help="size at and below which classes are searched exactly")
    s.add_argument("--max-states", type=int, default=2_000_000)
    s.set_defaults(fn=cmd_connect)

    s = sub.add_parser("verify", parents=[common], help="run the acceptance batteries")
    s.add_argument("--table", choices=["small-n"], default=None)
    s.add_argument("--only", default=None, help="comma-separated check ids, e.g. 1,5,8t")
    s.set_defaults(fn=cmd_verify)
    return ap


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.workers < 1:
        print("rauzy: --workers must be positive", file=sys.stderr)
        return EXIT_USAGE
    if args.workers > 1:
        log.info("--workers %d accepted; computations run single-threaded", args.workers)
    random.seed(args.seed)
    try:
        return args.fn(args, out)
    except UsageError as exc:
        print(f"rauzy: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
