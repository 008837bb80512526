"""Command-line interface: ``coalgmin minimize | gen | check``.

Exit codes: 0 success, 1 parse or I/O error, 2 invariant violation,
3 arithmetic overflow.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time
from typing import Optional

from .coalgebra import CoalgebraTable
from .formats import FormatError, coalg_text, parse_aut, parse_coalg_text, read_partition, write_aut, write_partition
from .functor import Neighbourhood
from .generators import WtaSpec, gen_chain_ts, gen_cycle_dfa, gen_prob_ladder, gen_wta
from .minimize import bound_violations, minimize, naive_minimize, quotient, stability_violation
from .monoids import ArithmeticOverflow
from .partition import PartitionInvariantError
from .signature import TermError, compile_collector

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2
EXIT_OVERFLOW = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def load_table(path: str, fmt: Optional[str] = None) -> CoalgebraTable:
    if fmt is None:
        fmt = "aut" if path.endswith(".aut") else "coalg"
    try:
        if path == "-":
            stream = sys.stdin
            return parse_aut(stream) if fmt == "aut" else parse_coalg_text(stream)
        with open(path, encoding="utf-8") as fh:
            return parse_aut(fh) if fmt == "aut" else parse_coalg_text(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    except (FormatError, TermError) as exc:
        raise CliError(f"{path}: {exc}") from None


def _write_file(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def peak_memory_bytes() -> int:
    try:
        import resource
    except ImportError:
        print("warning: peak memory not available on this platform", file=sys.stderr)
        return 0
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    # kilobytes on Linux, bytes on macOS
    return rss if sys.platform == "darwin" else rss * 1024


def degree_measures(table: CoalgebraTable) -> dict:
    """Maximum out-degree ``k``; for neighbourhood frames also the two atom-based measures."""
    collect = compile_collector(table.functor)
    k = 0
    buf: list[int] = []
    for t in table.terms:
        buf.clear()
        collect(t, buf)
        k = max(k, len(set(buf)))
    out = {"k": k}
    if isinstance(table.functor, Neighbourhood):
        out["k_atoms"] = max((len(t) for t in table.terms), default=0)
        out["k_atom_size"] = max((sum(len(s) for s in t) for t in table.terms), default=0)
    return out


def cmd_minimize(args) -> int:
    table = load_table(args.input, args.format)
    start = time.perf_counter()
    if args.algorithm == "naive":
        result = naive_minimize(table)
    else:
        result = minimize(table)
    elapsed = (time.perf_counter() - start) * 1000.0
    stats = {
        "algorithm": result.algorithm,
        "n": table.n,
        "m": table.m,
        "block_count": result.block_count,
        **result.stats.as_dict(),
        "wall_time_ms": round(elapsed, 3),
        "peak_mem_bytes": peak_memory_bytes(),
        **degree_measures(table),
    }
    if args.assert_bounds and result.algorithm == "optimized":
        problems = bound_violations(result.stats, table.n, table.m)
        if problems:
            raise CliError("complexity bound violated: " + "; ".join(problems), EXIT_INVARIANT)
    # render everything before touching the file system
    outputs = []
    if args.partition_out:
        buf = io.StringIO()
        write_partition(result.assignment, buf)
        outputs.append((args.partition_out, buf.getvalue()))
    if args.quotient_out:
        q = quotient(table, result)
        if args.quotient_out.endswith(".aut"):
            buf = io.StringIO()
            write_aut(q, buf)
            outputs.append((args.quotient_out, buf.getvalue()))
        else:
            outputs.append((args.quotient_out, coalg_text(q)))
    for path, text in outputs:
        _write_file(path, text)
    if args.stats == "json":
        print(json.dumps(stats))
    elif args.stats == "text":
        width = max(len(k) for k in stats)
        for key, value in stats.items():
            print(f"{key:<{width}}  {value}")
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        if args.shape == "wta":
            table = gen_wta(WtaSpec(args.n, args.r, args.monoid, args.k, args.seed))
        elif args.shape == "cycle":
            table = gen_cycle_dfa(args.n)
        elif args.shape == "chain":
            table = gen_chain_ts(args.n)
        else:
            table = gen_prob_ladder(args.n)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    text = coalg_text(table)
    if args.out and args.out != "-":
        _write_file(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    table = load_table(args.input, args.format)
    try:
        with open(args.partition, encoding="utf-8") as fh:
            assignment = read_partition(fh)
    except OSError as exc:
        raise CliError(f"cannot read {args.partition}: {exc.strerror}") from None
    except FormatError as exc:
        raise CliError(f"{args.partition}: {exc}") from None
    if len(assignment) != table.n:
        raise CliError(f"partition covers {len(assignment)} states, system has {table.n}")
    pair = stability_violation(table, assignment)
    if pair is None:
        print("stable")
        return EXIT_OK
    x, y = pair
    print(f"not stable: states {x} and {y} share block {assignment[x]} but have different signatures")
    return EXIT_INVARIANT


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not invariant violations
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coalgmin", description="Minimize finite coalgebras by partition refinement.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("minimize", help="compute behavioural equivalence and the quotient")
    p.add_argument("--input", required=True, help="input file, or - for standard input")
    p.add_argument("--format", choices=["aut", "coalg"], help="input format (default: by extension)")
    p.add_argument("--algorithm", choices=["optimized", "naive"], default="optimized")
    p.add_argument("--partition-out", help="write the partition here")
    p.add_argument("--quotient-out", help="write the minimized system here")
    p.add_argument("--stats", choices=["json", "text"], help="print run statistics")
    p.add_argument("--assert-bounds", action="store_true",
                   help="fail with exit code 2 if a complexity counter exceeds its bound")
    p.set_defaults(func=cmd_minimize)

    g = sub.add_parser("gen", help="generate a benchmark system in the textual format")
    g.add_argument("shape", choices=["wta", "cycle", "chain", "ladder"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--r", type=int, default=2, help="branching factor (wta)")
    g.add_argument("--monoid", default="int-add", help="weight monoid (wta)")
    g.add_argument("--k", type=int, default=10, help="transitions per state (wta)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output file (default: standard output)")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="check that a partition is stable")
    c.add_argument("--input", required=True)
    c.add_argument("--format", choices=["aut", "coalg"])
    c.add_argument("--partition", required=True)
    c.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"coalgmin: {exc}", file=sys.stderr)
        return exc.code
    except ArithmeticOverflow as exc:
        print(f"coalgmin: arithmetic overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except PartitionInvariantError as exc:
        print(f"coalgmin: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"coalgmin: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
