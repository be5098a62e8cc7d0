"""Command-line front end.

Exit codes: 0 verdict Ok, 1 verdict Nok, 2 usage or input error, 3 timeout.
Machine-readable results go to stdout as ``key=value`` lines; any human
commentary goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path
from typing import List, Optional

from .analysis import ExploreConfig, Verdict, explore, export_dot
from .bench import (
    GenParams,
    SuiteConfig,
    gen_accepted,
    gen_interaction,
    gen_prefix,
    mutate_noise,
    mutate_swap_act,
    mutate_swap_comp,
    parse_dimacs,
    paper_preset,
    rows_to_csv,
    run_suite,
    encode_3sat,
)
from .multitrace import INFINITE
from .terms import ModelError
from .textio import ParseError, parse_model, parse_multitrace, print_model, print_multitrace

EXIT_OK = 0
EXIT_NOK = 1
EXIT_USAGE = 2
EXIT_TIMEOUT = 3

TIMEOUT_ENV = "TRACEMATCH_TIMEOUT_MS"


class _CliError(Exception):
    pass


def _default_timeout_ms() -> int:
    raw = os.environ.get(TIMEOUT_ENV)
    if raw is None:
        return 3000
    try:
        value = int(raw)
        if value < 1:
            raise ValueError
        return value
    except ValueError:
        raise _CliError(f"invalid {TIMEOUT_ENV} value {raw!r}") from None


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc.strerror or exc}") from None


def _loc_depth(raw: str):
    if raw == "inf":
        return INFINITE
    try:
        depth = int(raw)
        if depth < 0:
            raise ValueError
        return depth
    except ValueError:
        raise _CliError(f"invalid --loc-depth {raw!r} (want a natural number or 'inf')") from None


def _verdict_exit(verdict: Verdict) -> int:
    return {Verdict.OK: EXIT_OK, Verdict.NOK: EXIT_NOK, Verdict.TIMEOUT: EXIT_TIMEOUT}[verdict]


def _cmd_analyze(args: argparse.Namespace) -> int:
    sig, term = parse_model(_read(args.model), path=args.model)
    mtrace = parse_multitrace(_read(args.trace), sig, path=args.trace)
    cfg = ExploreConfig(
        por=args.por,
        loc=args.loc,
        loc_depth=_loc_depth(args.loc_depth),
        strategy=args.strategy,
        timeout_ms=args.timeout_ms if args.timeout_ms is not None else _default_timeout_ms(),
        stop_on_ok=not args.full,
        record_graph=args.dot is not None,
    )
    report = explore(term, mtrace, cfg)
    if args.dot is not None:
        Path(args.dot).write_bytes(export_dot(report))
    print(f"verdict={report.verdict.value}")
    print(f"node_count={report.node_count}")
    print(f"edge_count={report.edge_count}")
    print(f"elapsed_us={report.elapsed_us}")
    print(
        f"analysis finished: {report.verdict.value} after {report.node_count} vertices",
        file=sys.stderr,
    )
    return _verdict_exit(report.verdict)


def _gen_params(args: argparse.Namespace) -> GenParams:
    if args.preset == "paper":
        params = paper_preset()
    else:
        params = GenParams(
            lifeline_count=args.lifelines,
            message_count=args.messages,
            min_depth=args.min_depth,
            max_depth=args.max_depth,
            min_symbols=args.min_symbols,
        )
    return params


def _cmd_generate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    master = random.Random(args.seed)
    params = _gen_params(args)
    seen = set()
    for idx in range(args.count):
        while True:
            from dataclasses import replace

            sig, term = gen_interaction(replace(params, rng_seed=master.getrandbits(63)))
            if term.text not in seen:
                seen.add(term.text)
                break
        path = out / f"model_{idx:03d}.txt"
        path.write_bytes(print_model(sig, term))
        print(f"model_{idx:03d}={path}")
    return EXIT_OK


def _cmd_mutate(args: argparse.Namespace) -> int:
    sig, term = parse_model(_read(args.model), path=args.model)
    mtrace = parse_multitrace(_read(args.trace), sig, path=args.trace)
    rng = random.Random(args.seed)
    if args.kind == "accepted":
        result = gen_accepted(sig, term, (args.min_len, args.max_len), rng)
        if result is None:
            raise _CliError("no accepted multi-trace found within the retry budget")
    elif args.kind == "prefix":
        result = gen_prefix(mtrace, rng)
    elif args.kind == "noise":
        result = mutate_noise(mtrace, rng)
    elif args.kind == "swap-act":
        result = mutate_swap_act(mtrace, rng)
        if result is None:
            raise _CliError("swap-act needs a component with at least two actions")
    else:  # swap-comp
        if args.trace2 is None:
            raise _CliError("--trace2 is required for swap-comp")
        other = parse_multitrace(_read(args.trace2), sig, path=args.trace2)
        result = mutate_swap_comp(mtrace, other, rng)
    Path(args.out).write_bytes(print_multitrace(result))
    print(f"trace={args.out}")
    return EXIT_OK


def _cmd_sat(args: argparse.Namespace) -> int:
    cnf = parse_dimacs(_read(args.dimacs), path=args.dimacs)
    sig, term, mtrace = encode_3sat(cnf)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model_path = out / "model.txt"
    trace_path = out / "trace.txt"
    model_path.write_bytes(print_model(sig, term))
    trace_path.write_bytes(print_multitrace(mtrace))
    print(f"model={model_path}")
    print(f"trace={trace_path}")
    print(
        "analyze the written pair to decide satisfiability (exit 0 = satisfiable)",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    data = {}
    if args.config is not None:
        try:
            data = json.loads(_read(args.config))
        except json.JSONDecodeError as exc:
            raise _CliError(f"{args.config}: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise _CliError(f"{args.config}: expected a JSON object")
    if args.seed is not None:
        data["seed"] = args.seed
    if args.workers is not None:
        data["workers"] = args.workers
    try:
        cfg = SuiteConfig.from_mapping(data)
    except TypeError as exc:
        raise _CliError(f"invalid benchmark config: {exc}") from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_suite(cfg)
    csv_path = out / "results.csv"
    csv_path.write_bytes(rows_to_csv(rows))
    print(f"results={csv_path}")
    print(f"rows={len(rows)}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracematch",
        description="Check multi-traces of a distributed system against an interaction model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="decide multi-prefix membership")
    analyze.add_argument("model", help="model file")
    analyze.add_argument("trace", help="multi-trace file")
    analyze.add_argument("--por", action="store_true", help="enable partial order reduction")
    analyze.add_argument("--loc", action="store_true", help="enable local analyses")
    analyze.add_argument("--loc-depth", default="inf", help="local analysis look-ahead (N or 'inf')")
    analyze.add_argument("--strategy", choices=("dfs", "bfs"), default="dfs")
    analyze.add_argument("--timeout-ms", type=int, default=None)
    analyze.add_argument("--full", action="store_true", help="explore everything, do not stop at Ok")
    analyze.add_argument("--dot", default=None, help="write the explored graph as DOT")
    analyze.set_defaults(func=_cmd_analyze)

    generate = sub.add_parser("generate", help="generate random models")
    generate.add_argument("--out", required=True, help="output directory")
    generate.add_argument("--count", type=int, default=1)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--preset", choices=("paper",), default=None)
    generate.add_argument("--lifelines", type=int, default=5)
    generate.add_argument("--messages", type=int, default=6)
    generate.add_argument("--min-depth", type=int, default=6)
    generate.add_argument("--max-depth", type=int, default=9)
    generate.add_argument("--min-symbols", type=int, default=20)
    generate.set_defaults(func=_cmd_generate)

    mutate = sub.add_parser("mutate", help="derive traces and mutants")
    mutate.add_argument("--model", required=True)
    mutate.add_argument("--trace", required=True)
    mutate.add_argument(
        "--kind",
        required=True,
        choices=("accepted", "prefix", "noise", "swap-act", "swap-comp"),
    )
    mutate.add_argument("--trace2", default=None, help="second trace for swap-comp")
    mutate.add_argument("--out", required=True)
    mutate.add_argument("--seed", type=int, default=0)
    mutate.add_argument("--min-len", type=int, default=1)
    mutate.add_argument("--max-len", type=int, default=30)
    mutate.set_defaults(func=_cmd_mutate)

    sat = sub.add_parser("sat", help="encode a DIMACS 3-CNF as a model and trace")
    sat.add_argument("--dimacs", required=True)
    sat.add_argument("--out", required=True)
    sat.set_defaults(func=_cmd_sat)

    bench = sub.add_parser("bench", help="run the benchmark suite")
    bench.add_argument("--config", default=None, help="JSON suite configuration")
    bench.add_argument("--out", required=True)
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--workers", type=int, default=None)
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ParseError, ModelError, _CliError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
