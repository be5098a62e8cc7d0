"""Benchmark protocol: random models, trace corpora, mutants, SAT encoding.

Reproduces the evaluation recipe at desk scale: generate random interaction
terms, sample accepted multi-traces by random walks over the execution
frontier, derive multi-prefixes and three mutant families from them, then
time the four analysis configurations (with/without partial order reduction
and local analyses) in full and stop-on-ok modes, emitting one CSV row per
run.  A 3-CNF encoder doubles as a stress generator: the encoded instance is
a prefix-membership question whose verdict equals satisfiability.
"""

from __future__ import annotations

import csv
import io
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .analysis import ExploreConfig, Verdict, explore
from .multitrace import MultiTrace, empty_multitrace, make_multitrace, project
from .semantics import frontier, terminates
from .terms import (
    EMIT,
    EMPTY,
    RECV,
    Act,
    Action,
    Interaction,
    ModelError,
    Signature,
    act,
    alt,
    binary,
    loop,
    node_count,
    seq,
    simplify,
    term_depth,
)
from .textio import ParseError, parse_model, parse_multitrace, print_model, print_multitrace

GEN_SYMBOLS = ("empty", "action", "strict", "seq", "par", "alt", "loopS", "loopW", "loopP")
_LEAF_SYMBOLS = ("empty", "action")

TRACE_KINDS = ("ACPT", "PREF", "NOIS", "SACT", "SCMP")
METHODS = (
    ("base", False, False),
    ("por", True, False),
    ("loc", False, True),
    ("por+loc", True, True),
)
MODES = ("full", "stop")
CSV_COLUMNS = (
    "interaction_id",
    "trace_id",
    "trace_kind",
    "trace_len",
    "method",
    "mode",
    "verdict",
    "node_count",
    "elapsed_us",
    "label",
)


@dataclass(frozen=True)
class GenParams:
    """Shape constraints for random interaction generation."""

    lifeline_count: int = 5
    message_count: int = 6
    min_depth: int = 6
    max_depth: int = 9
    min_symbols: int = 20
    symbol_weights: Optional[Tuple[float, ...]] = None
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.lifeline_count < 1 or self.message_count < 1:
            raise ModelError("need at least one lifeline and one message")
        if not (1 <= self.min_depth <= self.max_depth):
            raise ModelError("need 1 <= min_depth <= max_depth")
        if self.min_symbols < 1:
            raise ModelError("min_symbols must be at least 1")
        if self.symbol_weights is not None:
            if len(self.symbol_weights) != len(GEN_SYMBOLS):
                raise ModelError(f"symbol_weights must list {len(GEN_SYMBOLS)} weights")
            if any(w < 0 for w in self.symbol_weights):
                raise ModelError("symbol weights must be non-negative")
            if sum(self.symbol_weights[:2]) <= 0:
                raise ModelError("leaves must be reachable: empty/action weights are zero")
        if self.min_symbols > 2 ** self.max_depth - 1:
            raise ModelError("min_symbols unreachable within max_depth")

    def weights(self) -> Tuple[float, ...]:
        return self.symbol_weights or tuple(1.0 for _ in GEN_SYMBOLS)


def paper_preset(rng_seed: int = 0) -> GenParams:
    return GenParams(rng_seed=rng_seed)


def signature_for(params: GenParams) -> Signature:
    return Signature(
        tuple(f"l{i}" for i in range(1, params.lifeline_count + 1)),
        tuple(f"m{i}" for i in range(1, params.message_count + 1)),
    )


def random_action(rng: random.Random, sig: Signature) -> Action:
    return Action(
        rng.choice(sig.lifelines), rng.choice((EMIT, RECV)), rng.choice(sig.messages)
    )


def random_term(
    rng: random.Random,
    sig: Signature,
    max_depth: int,
    weights: Optional[Sequence[float]] = None,
) -> Interaction:
    """One random raw (unsimplified) term of depth at most ``max_depth``."""
    pool = GEN_SYMBOLS if max_depth > 1 else _LEAF_SYMBOLS
    w = list(weights or (1.0,) * len(GEN_SYMBOLS))[: len(pool)]
    symbol = rng.choices(pool, weights=w, k=1)[0]
    if symbol == "empty":
        return EMPTY
    if symbol == "action":
        return act(random_action(rng, sig))
    if symbol.startswith("loop"):
        return loop(symbol[-1], random_term(rng, sig, max_depth - 1, weights))
    return binary(
        symbol,
        random_term(rng, sig, max_depth - 1, weights),
        random_term(rng, sig, max_depth - 1, weights),
    )


def gen_interaction(
    params: GenParams, max_attempts: int = 100_000
) -> Tuple[Signature, Interaction]:
    """Random simplified term meeting the depth and symbol-count minima.

    Rejection sampling, deterministic for a given ``rng_seed``.
    """
    sig = signature_for(params)
    rng = random.Random(params.rng_seed)
    weights = params.weights()
    for _ in range(max_attempts):
        term = simplify(random_term(rng, sig, params.max_depth, weights))
        if term_depth(term) >= params.min_depth and node_count(term) >= params.min_symbols:
            return sig, term
    raise ModelError(
        "generation parameters look infeasible: "
        f"no conforming term in {max_attempts} attempts"
    )


def gen_accepted(
    sig: Signature,
    term: Interaction,
    len_range: Tuple[int, int],
    rng: random.Random,
    budget: int = 100,
    stop_probability: float = 0.5,
) -> Optional[MultiTrace]:
    """Sample an accepted multi-trace with cumulative length in ``len_range``.

    Random walk over frontier steps; a walk may stop whenever the residual
    term terminates and the length constraint holds.  Returns None once the
    retry budget is exhausted (e.g. the term accepts no trace in range).
    """
    lo, hi = len_range
    if lo < 0 or hi < lo:
        raise ModelError("invalid length range")
    for _ in range(budget):
        current = term
        picked: List[Action] = []
        while True:
            acceptable = terminates(current) and lo <= len(picked) <= hi
            if acceptable and rng.random() < stop_probability:
                return project(sig, picked)
            if len(picked) >= hi:
                if acceptable:
                    return project(sig, picked)
                break
            steps = frontier(sig, current)
            if not steps:
                if acceptable:
                    return project(sig, picked)
                break
            step = rng.choice(steps)
            picked.append(step.action)
            current = step.follow_up
    return None


def gen_prefix(mt: MultiTrace, rng: random.Random) -> MultiTrace:
    """Independent random truncation of every component."""
    parts = tuple(p[: rng.randint(0, len(p))] for p in mt.parts)
    return MultiTrace(mt.signature, parts)


def mutate_noise(mt: MultiTrace, rng: random.Random) -> MultiTrace:
    """Insert one random declared action at a random index of its component."""
    sig = mt.signature
    action = random_action(rng, sig)
    part = list(mt.component(action.lifeline))
    part.insert(rng.randint(0, len(part)), action)
    return mt.with_component(action.lifeline, part)


def mutate_swap_act(mt: MultiTrace, rng: random.Random) -> Optional[MultiTrace]:
    """Exchange two distinct positions in one component; None if no component has two."""
    eligible = [l for l in mt.signature.lifelines if len(mt.component(l)) >= 2]
    if not eligible:
        return None
    lifeline = rng.choice(eligible)
    part = list(mt.component(lifeline))
    i, j = rng.sample(range(len(part)), 2)
    part[i], part[j] = part[j], part[i]
    return mt.with_component(lifeline, part)


def mutate_swap_comp(
    first: MultiTrace, second: MultiTrace, rng: random.Random
) -> MultiTrace:
    """Copy one random lifeline's component of ``second`` into ``first``."""
    if first.signature != second.signature:
        raise ModelError("component swap requires a common signature")
    lifeline = rng.choice(first.signature.lifelines)
    return first.with_component(lifeline, second.component(lifeline))


# ---------------------------------------------------------------------------
# 3-SAT reduction


@dataclass(frozen=True)
class Cnf:
    """A 3-CNF formula: clauses of exactly three distinct literals."""

    variable_count: int
    clauses: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.variable_count < 0:
            raise ModelError("variable count must be non-negative")
        for clause in self.clauses:
            if len(clause) != 3 or len(set(clause)) != 3:
                raise ModelError(f"clause {clause} must hold three distinct literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.variable_count:
                    raise ModelError(f"literal {lit} out of range")


def parse_dimacs(data, path: Optional[str] = None) -> Cnf:
    """Parse DIMACS CNF text; every clause must have exactly three distinct literals."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    variable_count: Optional[int] = None
    declared_clauses: Optional[int] = None
    clauses: List[Tuple[int, int, int]] = []
    for lineno, raw in enumerate(data.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise ParseError(f"malformed problem line {line!r}", lineno, None, path)
            variable_count = int(fields[2])
            declared_clauses = int(fields[3])
            continue
        try:
            literals = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"malformed clause {line!r}", lineno, None, path) from None
        if not literals or literals[-1] != 0:
            raise ParseError("clause line must end with 0", lineno, None, path)
        body = tuple(literals[:-1])
        if len(body) != 3:
            raise ParseError("exactly three literals per clause required", lineno, None, path)
        clauses.append(body)  # type: ignore[arg-type]
    if variable_count is None:
        raise ParseError("missing 'p cnf' problem line", None, None, path)
    if declared_clauses is not None and declared_clauses != len(clauses):
        raise ParseError(
            f"problem line declares {declared_clauses} clauses, found {len(clauses)}",
            None,
            None,
            path,
        )
    try:
        return Cnf(variable_count, tuple(clauses))
    except ModelError as exc:
        raise ParseError(str(exc), None, None, path) from None


def encode_3sat(cnf: Cnf) -> Tuple[Signature, Interaction, MultiTrace]:
    """Encode satisfiability as a multi-trace prefix-membership question.

    One lifeline per clause and a single message.  Choosing a branch of each
    alternative plays the role of assigning one variable; the branch receives
    the message on every clause the chosen literal satisfies.  The analysed
    multi-trace demands one reception per clause, so it is a multi-prefix of
    some accepted behaviour iff some assignment satisfies every clause.
    """
    k = len(cnf.clauses)
    if k == 0 or cnf.variable_count == 0:
        sig = Signature(("c1",), ("m",))
        return sig, EMPTY, empty_multitrace(sig)
    sig = Signature(tuple(f"c{j}" for j in range(1, k + 1)), ("m",))

    def receive(j: int) -> Action:
        return Action(f"c{j}", RECV, "m")

    def literal_term(lit: int) -> Interaction:
        hits = [j for j, clause in enumerate(cnf.clauses, start=1) if lit in clause]
        term: Interaction = EMPTY
        for j in reversed(hits):
            term = act(receive(j)) if term is EMPTY else seq(act(receive(j)), term)
        return term

    term = EMPTY
    for v in range(cnf.variable_count, 0, -1):
        chooser = alt(literal_term(v), literal_term(-v))
        term = chooser if term is EMPTY else seq(chooser, term)
    term = simplify(term)
    mtrace = make_multitrace(sig, {f"c{j}": [receive(j)] for j in range(1, k + 1)})
    return sig, term, mtrace


# ---------------------------------------------------------------------------
# suite runner


@dataclass(frozen=True)
class SuiteConfig:
    gen: GenParams = GenParams()
    interaction_count: int = 10
    traces_per_kind: int = 24
    min_trace_len: int = 1
    max_trace_len: int = 30
    timeout_ms: int = 3000
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.interaction_count < 1 or self.traces_per_kind < 1:
            raise ModelError("need at least one interaction and one trace per kind")
        if not (0 <= self.min_trace_len <= self.max_trace_len):
            raise ModelError("invalid trace length range")
        if self.timeout_ms < 1 or self.workers < 1:
            raise ModelError("timeout and workers must be positive")

    @staticmethod
    def from_mapping(data: Dict) -> "SuiteConfig":
        gen = GenParams(**data.get("gen", {}))
        fields = {k: v for k, v in data.items() if k != "gen"}
        return SuiteConfig(gen=gen, **fields)


def _build_instances(cfg: SuiteConfig) -> List[Dict]:
    master = random.Random(cfg.seed)
    seen_terms = set()
    instances = []
    for idx in range(cfg.interaction_count):
        while True:
            params = replace(cfg.gen, rng_seed=master.getrandbits(63))
            sig, term = gen_interaction(params)
            if term.text not in seen_terms:
                seen_terms.add(term.text)
                break
        rng = random.Random(master.getrandbits(63))
        accepted: List[MultiTrace] = []
        for _ in range(cfg.traces_per_kind):
            mt = gen_accepted(sig, term, (cfg.min_trace_len, cfg.max_trace_len), rng)
            if mt is not None:
                accepted.append(mt)
        prefixes = [gen_prefix(mt, rng) for mt in accepted]
        traces: List[Tuple[str, str, MultiTrace]] = []
        for k, mt in enumerate(accepted):
            traces.append((f"t{k:03d}", "ACPT", mt))
        for k, mt in enumerate(prefixes):
            traces.append((f"t{k:03d}", "PREF", mt))
        for k, mt in enumerate(prefixes):
            traces.append((f"t{k:03d}", "NOIS", mutate_noise(mt, rng)))
        for k, mt in enumerate(prefixes):
            swapped = mutate_swap_act(mt, rng)
            if swapped is not None:
                traces.append((f"t{k:03d}", "SACT", swapped))
        if len(prefixes) >= 2:
            for k, mt in enumerate(prefixes):
                partner = rng.choice([j for j in range(len(prefixes)) if j != k])
                traces.append(
                    (f"t{k:03d}", "SCMP", mutate_swap_comp(mt, prefixes[partner], rng))
                )
        instances.append(
            {
                "interaction_id": f"i{idx:03d}",
                "model": print_model(sig, term).decode("utf-8"),
                "traces": [
                    (tid, kind, print_multitrace(mt).decode("utf-8"))
                    for tid, kind, mt in traces
                ],
                "timeout_ms": cfg.timeout_ms,
            }
        )
    return instances


def _run_instance(payload: Dict) -> List[Dict]:
    sig, term = parse_model(payload["model"])
    rows: List[Dict] = []
    warmed = False
    for tid, kind, text in payload["traces"]:
        mtrace = parse_multitrace(text, sig)
        if not warmed:
            explore(term, mtrace, ExploreConfig(timeout_ms=payload["timeout_ms"]))
            warmed = True
        label = "?"
        for method, por, loc in METHODS:
            for mode in MODES:
                report = explore(
                    term,
                    mtrace,
                    ExploreConfig(
                        por=por,
                        loc=loc,
                        stop_on_ok=(mode == "stop"),
                        timeout_ms=payload["timeout_ms"],
                    ),
                )
                if method == "base" and mode == "full":
                    label = report.verdict.value
                rows.append(
                    {
                        "interaction_id": payload["interaction_id"],
                        "trace_id": tid,
                        "trace_kind": kind,
                        "trace_len": mtrace.total_length,
                        "method": method,
                        "mode": mode,
                        "verdict": report.verdict.value,
                        "node_count": report.node_count,
                        "elapsed_us": report.elapsed_us,
                        "label": label,
                    }
                )
    return rows


def run_suite(cfg: SuiteConfig) -> List[Dict]:
    """Run the whole benchmark; rows are deterministic apart from elapsed_us."""
    instances = _build_instances(cfg)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            batches = list(pool.map(_run_instance, instances))
    else:
        batches = [_run_instance(p) for p in instances]
    return [row for batch in batches for row in batch]


def rows_to_csv(rows: Iterable[Dict]) -> bytes:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue().encode("utf-8")
