"""kummer-rank command line.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error,
3 I/O error.  Every failure prints one diagnostic line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

from .errors import ConfigMismatch, IoFailure, KummerError, ValidationError
from .invariants import compute_invariants
from .modarith import PrimePair, check_odd_prime
from .selmer import dimension_string, rank_estimate
from .survey import SurveyConfig, aggregate, read_records, run_survey
from .verify import run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # one-line diagnostic, exit 2, no usage dump
        raise _UsageError(message)


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("KUMMER_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kummer-rank", description="p-rank bounds for class groups of Q(N^(1/p)).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(sp):
        sp.add_argument("--format", choices=("text", "json", "csv"), default="text")

    for name, help_ in (
        ("rank", "rank bounds for one prime N"),
        ("dims", "Selmer dimension string with provenance"),
        ("invariants", "S_i, M_i, A_2 and C values and labels"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--N", type=int, required=True)
        fmt(sp)

    sp = sub.add_parser("verify", help="identity suite over all N <= max")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--max", type=int, required=True)
    fmt(sp)

    sp = sub.add_parser("survey", help="evaluate every prime N = 1 mod p up to max")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--min", type=int, default=2)
    sp.add_argument("--out", type=Path, required=True)
    sp.add_argument("--workers", type=int, default=_default_workers())
    sp.add_argument("--resume", action="store_true")
    sp.add_argument("--timing", action="store_true", help="fill the elapsed_us column (breaks byte-identity)")
    sp.add_argument("--no-jsonl", dest="jsonl", action="store_false")
    sp.add_argument("--checkpoint-every", type=int, default=10_000)
    fmt(sp)

    sp = sub.add_parser("tables", help="aggregate a survey's records into count tables")
    sp.add_argument("--in", dest="source", type=Path, required=True, help="survey directory or records file")
    fmt(sp)
    return parser


# ---------------------------------------------------------------------------


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _cmd_rank(args) -> tuple[int, str]:
    pair = PrimePair(args.p, args.N)
    est = rank_estimate(pair)
    if args.format == "json":
        body = {
            "p": pair.p,
            "N": pair.N,
            "lower": est.lower,
            "upper": est.upper,
            "exact": est.exact,
            "mu": est.mu,
            "assumed_r_cyclotomic": est.assumed_r_cyclotomic,
            "notes": list(est.notes),
        }
        return EXIT_OK, json.dumps(body)
    if args.format == "csv":
        return EXIT_OK, _csv_text(
            ("p", "N", "lower", "upper", "exact", "mu"),
            [(pair.p, pair.N, est.lower, est.upper, int(est.exact), est.mu)],
        )
    lines = [str(est)] + [f"note: {n}" for n in est.notes]
    return EXIT_OK, "\n".join(lines)


def _cmd_dims(args) -> tuple[int, str]:
    pair = PrimePair(args.p, args.N)
    dims = dimension_string(pair)
    if args.format == "json":
        body = {
            "p": pair.p,
            "N": pair.N,
            "dim_string": str(dims),
            "degenerate": dims.degenerate,
            "entries": [
                {
                    "i": e.index,
                    "value": e.value,
                    "source": e.source,
                    "reason": e.reason,
                    "best_effort": e.best_effort,
                }
                for e in dims.entries
            ],
        }
        return EXIT_OK, json.dumps(body)
    if args.format == "csv":
        rows = [(pair.p, pair.N, e.index, e.render(), e.source, e.reason or "") for e in dims.entries]
        return EXIT_OK, _csv_text(("p", "N", "i", "value", "source", "reason"), rows)
    lines = [f"p={pair.p} N={pair.N} dims {dims or '(empty)'}"]
    for e in dims.entries:
        line = f"  h(-{e.index}) = {e.render()}  [{e.source}]"
        if e.reason:
            line += f"  unknown: {e.reason}"
        if e.best_effort:
            line += "  (best effort)"
        lines.append(line)
    if dims.degenerate:
        lines.append("  note: unit polynomial degenerate mod N, eigenunit used")
    return EXIT_OK, "\n".join(lines)


def _cmd_invariants(args) -> tuple[int, str]:
    pair = PrimePair(args.p, args.N)
    inv = compute_invariants(pair)
    rows = [(f"S_{i}", c.value, c.label) for i, c in enumerate(inv.s, 1)]
    rows += [(f"M_{i}", c.value, c.label) for i, c in sorted(inv.m_gamma.items())]
    if inv.a2 is not None:
        rows.append(("A_2", inv.a2.value, inv.a2.label))
    if inv.c is not None:
        rows.append(("C", inv.c.value, inv.c.label))
    if args.format == "json":
        body = {"p": pair.p, "N": pair.N, "invariants": [{"name": n, "value": v, "label": l} for n, v, l in rows]}
        return EXIT_OK, json.dumps(body)
    if args.format == "csv":
        return EXIT_OK, _csv_text(("name", "value", "label"), rows)
    lines = [f"p={pair.p} N={pair.N}"] + [f"  {n:<5} = {v:>12}  label {l}" for n, v, l in rows]
    return EXIT_OK, "\n".join(lines)


def _cmd_verify(args) -> tuple[int, str]:
    check_odd_prime(args.p)
    rep = run_suite(args.p, args.max)
    code = EXIT_OK if rep.ok else EXIT_VERIFY
    if args.format == "json":
        return code, json.dumps(rep.to_dict())
    if args.format == "csv":
        names = sorted(set(rep.passed) | set(rep.failed))
        return code, _csv_text(("check", "pass", "fail"), [(n, rep.passed[n], rep.failed[n]) for n in names])
    return code, rep.render()


def _render_aggregate(agg, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(agg.to_dict())
    if fmt == "csv":
        return _csv_text(("dim_string", "count"), sorted(agg.counts.items()))
    return agg.render()


def _cmd_survey(args) -> tuple[int, str]:
    if args.workers < 1 or args.checkpoint_every < 1:
        raise _UsageError("--workers and --checkpoint-every must be positive")
    check_odd_prime(args.p)
    config = SurveyConfig(
        p=args.p,
        max_n=args.max,
        output=args.out,
        workers=args.workers,
        resume=args.resume,
        min_n=args.min,
        checkpoint_every=args.checkpoint_every,
        timing=args.timing,
        jsonl=args.jsonl,
    )
    return EXIT_OK, _render_aggregate(run_survey(config), args.format)


def _cmd_tables(args) -> tuple[int, str]:
    if not args.source.exists():
        raise IoFailure(f"{args.source} does not exist")
    return EXIT_OK, _render_aggregate(aggregate(read_records(args.source)), args.format)


_COMMANDS = {
    "rank": _cmd_rank,
    "dims": _cmd_dims,
    "invariants": _cmd_invariants,
    "verify": _cmd_verify,
    "survey": _cmd_survey,
    "tables": _cmd_tables,
}


def run_cli(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args = build_parser().parse_args(argv)
        code, text = _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"kummer-rank: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, ConfigMismatch) as exc:
        print(f"kummer-rank: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IoFailure, OSError) as exc:
        print(f"kummer-rank: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KummerError as exc:
        print(f"kummer-rank: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    print(text)
    return code


def main() -> None:
    sys.exit(run_cli())
