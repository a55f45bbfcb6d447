"""Command-line front end.

Exit status: 0 on success, 1 for usage errors, 2 for bad input data
(unparseable files, invalid patterns, failed passes or simulations).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import clifford as cl
from . import pattern as pat
from .backends import BACKENDS, ExecutionConfig, SimulationError, run
from .bench import BenchRow, qaoa_bench
from .command import C
from .flow import NoFlowExistsError, UnsupportedPlaneError, generate_from_graph, parse_open_graph
from .graphsim import GraphSimError
from .passes import PassReport, UnknownPassError, run_passes
from .transpiler import ParseError, UnsupportedGateError, parse_circuit, standardize_and_transpile, transpile

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def _load_pattern(path: str) -> pat.Pattern:
    p = pat.loads(_read(path))
    pat.check(p)
    return p


def _pattern_dot(p: pat.Pattern) -> str:
    """Resource graph; nodes carrying C commands are labelled ``node:decoration``."""
    vop: dict[int, int] = {}
    for c in p.commands:
        if isinstance(c, C):
            vop[c.node] = cl.MUL[cl.from_command_index(c.k)][vop.get(c.node, cl.IDENTITY)]
    lines = ["graph pattern {"]
    outputs = set(p.outputs)
    inputs = set(p.inputs)
    for v in p.nodes:
        shape = "doublecircle" if v in outputs else "box" if v in inputs else "circle"
        g = vop.get(v, cl.IDENTITY)
        label = f"{v}:{cl.NAMES[g]}" if g != cl.IDENTITY else str(v)
        lines.append(f'  {v} [label="{label}", shape={shape}];')
    for a, b in p.edges():
        lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _parse_force(text: str | None) -> dict[int, int]:
    forced: dict[int, int] = {}
    if not text:
        return forced
    for item in text.split(","):
        node, sep, bit = item.partition("=")
        if not sep or bit.strip() not in ("0", "1"):
            raise UsageError(f"--force expects node=bit pairs, got {item!r}")
        try:
            forced[int(node)] = int(bit)
        except ValueError:
            raise UsageError(f"--force expects integer nodes, got {node!r}") from None
    return forced


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        try:
            out += list(range(int(lo), int(hi) + 1)) if sep else [int(lo)]
        except ValueError:
            raise UsageError(f"expected integers or ranges like 2-8, got {part!r}") from None
    return out


# -- subcommands ---------------------------------------------------------------


def cmd_transpile(args: argparse.Namespace) -> None:
    circuit = parse_circuit(_read(args.circuit), radians=args.radians)
    p = standardize_and_transpile(circuit) if args.direct_standard else transpile(circuit)
    _write(args.output, pat.dumps(p))


def cmd_fromgraph(args: argparse.Namespace) -> None:
    og, angles = parse_open_graph(_read(args.graph))
    _write(args.output, pat.dumps(generate_from_graph(og, angles)))


def cmd_optimize(args: argparse.Namespace) -> None:
    p = _load_pattern(args.pattern)
    names = [n for n in args.passes.split(",") if n] if args.passes else []
    p, reports = run_passes(p, names)
    report = "\n".join([PassReport.HEADER, *(r.to_tsv() for r in reports)]) + "\n"
    if args.output in (None, "-"):
        sys.stderr.write(report)
    else:
        sys.stdout.write(report)
    _write(args.output, pat.dumps(p))


def cmd_stats(args: argparse.Namespace) -> None:
    p = _load_pattern(args.pattern)
    counts = p.count()
    rows = [("nodes", len(p.nodes)), ("commands", len(p))]
    rows += [(k, counts[k]) for k in "NEMXZC"]
    rows += [("max_space", pat.max_space(p)), ("depth", pat.depth(p))]
    sys.stdout.write("".join(f"{k}\t{v}\n" for k, v in rows))
    if args.graph:
        _write(args.graph, _pattern_dot(p))


def cmd_simulate(args: argparse.Namespace) -> None:
    p = _load_pattern(args.pattern)
    config = ExecutionConfig(backend=args.backend, seed=args.seed, forced_outcomes=_parse_force(args.force))
    state = run(p, config)
    lines = [f"# outputs {' '.join(map(str, state.nodes))}"]
    lines += [f"# outcomes {' '.join(f'{k}={v}' for k, v in sorted(state.outcomes.items()))}"]
    for i, a in enumerate(state.amplitudes):
        lines.append(f"{i}\t{a.real:.12g}\t{a.imag:.12g}")
    _write(args.out, "\n".join(lines) + "\n")


def cmd_qaoa_bench(args: argparse.Namespace) -> None:
    ns = _int_list(args.n)
    layers = _int_list(args.layers)
    if any(not 2 <= n <= 10 for n in ns):
        raise UsageError("--n values must lie in 2..10")
    if any(L < 1 for L in layers):
        raise UsageError("--layers values must be positive")
    rows = qaoa_bench(ns, layers, seed=args.seed, workers=args.workers)
    _write(args.output, "\n".join([BenchRow.HEADER, *(r.to_tsv() for r in rows)]) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lcmbqc", description="Measurement-pattern compiler and simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transpile", help="circuit text -> pattern file")
    p.add_argument("circuit", help="circuit file ('-' for stdin)")
    p.add_argument("-o", "--output", help="pattern file (default stdout)")
    p.add_argument("--direct-standard", action="store_true", help="emit the standardised, signal-shifted form directly")
    p.add_argument("--radians", action="store_true", help="read angles in radians instead of units of pi")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("fromgraph", help="open graph + angles -> pattern via (g)flow")
    p.add_argument("graph", help="graph file")
    p.add_argument("-o", "--output", help="pattern file (default stdout)")
    p.set_defaults(func=cmd_fromgraph)

    p = sub.add_parser("optimize", help="apply passes and report metrics")
    p.add_argument("pattern", help="pattern file")
    p.add_argument("--passes", default="", help="comma-separated: standardize,shift,pauli,space,parallel")
    p.add_argument("-o", "--output", help="pattern file (default stdout; the report then goes to stderr)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("stats", help="print pattern metrics")
    p.add_argument("pattern", help="pattern file")
    p.add_argument("--graph", metavar="DOT", help="also write the resource graph in DOT format")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("simulate", help="run a pattern and print output amplitudes")
    p.add_argument("pattern", help="pattern file")
    p.add_argument("--backend", choices=sorted(BACKENDS), default="statevector")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--force", help="forced outcomes, e.g. 0=1,3=0")
    p.add_argument("--out", help="amplitude file (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("qaoa-bench", help="node counts before/after Pauli preprocessing for complete-graph QAOA")
    p.add_argument("--n", default="2-8", help="qubit counts, e.g. 4 or 2-8 or 2,4,6")
    p.add_argument("--layers", default="1", help="layer counts, e.g. 1,3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", help="TSV file (default stdout)")
    p.set_defaults(func=cmd_qaoa_bench)
    return parser


_DATA_ERRORS = (
    DataError,
    ParseError,
    pat.PatternError,
    UnsupportedGateError,
    UnsupportedPlaneError,
    NoFlowExistsError,
    SimulationError,
    GraphSimError,
    ValueError,
)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (UsageError, UnknownPassError) as exc:
        parser.print_usage(sys.stderr)
        print(f"lcmbqc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _DATA_ERRORS as exc:
        print(f"lcmbqc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
