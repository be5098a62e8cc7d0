"""Analysis graph exploration: does a multi-trace prefix a specified behaviour?

A vertex pairs an interaction term with the still-unmatched part of the
multi-trace.  Three rules generate successors, tried in priority order:

* ok — the multi-trace is fully consumed; the search target.
* removal — some components are empty: drop all their lifelines at once from
  both the term and the multi-trace, so the rest of the behaviour is no
  longer blocked by subsystems that are not (or no longer) observed.
* execution — consume the head action of a component while executing a
  matching occurrence in the term.

Reaching the ok vertex proves the multi-trace is a prefix of an accepted
behaviour; exhausting the reachable graph without it disproves membership.

Two optional prunings shrink the search space without changing verdicts:
partial order reduction keeps a single successor when the consumed action has
exactly one immediately executable occurrence on its own lifeline
(``one_unambiguous``), and local analyses discard vertices whose per-lifeline
projections already reject a component.
"""

from __future__ import annotations

import json
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, Dict, List, Optional, Tuple

from .multitrace import INFINITE, Bound, MultiTrace
from .semantics import frontier, raw_frontier
from .terms import (
    Action,
    Interaction,
    ModelError,
    Signature,
    lifelines_in,
    remove_lifelines,
    simplify,
    validate_over,
)


class Verdict(Enum):
    OK = "ok"
    NOK = "nok"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class Vertex:
    """An (interaction, multi-trace) pair; the signature lives on the multi-trace."""

    interaction: Interaction
    mtrace: MultiTrace

    @property
    def signature(self) -> Signature:
        return self.mtrace.signature

    def key(self) -> Tuple[str, str]:
        return (self.interaction.text, self.mtrace.key_text())


@dataclass(frozen=True)
class ExploreConfig:
    por: bool = False
    loc: bool = False
    loc_depth: Bound = INFINITE
    strategy: str = "dfs"
    timeout_ms: Optional[int] = None
    stop_on_ok: bool = True
    record_graph: bool = False

    def __post_init__(self) -> None:
        if self.strategy not in ("dfs", "bfs"):
            raise ModelError(f"unknown strategy {self.strategy!r}")


@dataclass
class GraphDump:
    """Vertices and arcs discovered by one exploration, in discovery order."""

    vertices: List[Dict[str, object]] = field(default_factory=list)
    edges: List[Dict[str, object]] = field(default_factory=list)


@dataclass
class ExploreReport:
    verdict: Verdict
    node_count: int
    edge_count: int
    elapsed_us: int
    graph: Optional[GraphDump] = None


class _Deadline(Exception):
    pass


def make_vertex(interaction: Interaction, mtrace: MultiTrace) -> Vertex:
    """Admit an (interaction, multi-trace) pair as a graph vertex.

    The interaction is simplified, and removals that would leave the term
    untouched are applied on the spot: lifelines with an empty component and
    no occurrence in the term carry no information, so the vertex is
    identified with its removal successor.  Removals that do rewrite the term
    stay explicit graph steps.
    """
    term = simplify(interaction)
    empty = mtrace.empty_lifelines()
    if empty and len(empty) < len(mtrace.signature.lifelines):
        used = lifelines_in(term)
        silent = tuple(l for l in empty if l not in used)
        if silent:
            mtrace = mtrace.removed(silent)
    return Vertex(term, mtrace)


def succ_removal(v: Vertex) -> Optional[Vertex]:
    """Single-shot removal of every empty-component lifeline, if any remain."""
    empty = v.mtrace.empty_lifelines()
    if not empty or len(empty) == len(v.signature.lifelines):
        return None
    stripped = remove_lifelines(v.interaction, empty)
    return make_vertex(stripped, v.mtrace.removed(empty))


def succ_executions(v: Vertex) -> List[Tuple[Action, Vertex]]:
    """Execution successors in tie-break order; empty means the vertex is dead."""
    out = []
    for step in frontier(v.signature, v.interaction):
        rest = v.mtrace.consume_head(step.action)
        if rest is not None:
            out.append((step.action, make_vertex(step.follow_up, rest)))
    return out


_ONE_UNAMBIGUOUS: Dict[Tuple[Interaction, Action], bool] = {}


def one_unambiguous(i: Interaction, a: Action) -> bool:
    """Does ``a`` have a unique immediately executable occurrence on its lifeline?

    Checked on the projection of ``i`` onto the action's own lifeline: every
    action elsewhere is removed (without simplification, so positions keep
    their meaning) and the enabled occurrences of ``a`` are counted.
    """
    key = (i, a)
    cached = _ONE_UNAMBIGUOUS.get(key)
    if cached is not None:
        return cached
    others = lifelines_in(i) - {a.lifeline}
    projected = remove_lifelines(i, others)
    count = sum(1 for step in raw_frontier(projected) if step.action == a)
    result = count == 1
    _ONE_UNAMBIGUOUS[key] = result
    return result


def por_successors(v: Vertex) -> List[Tuple[Action, Vertex]]:
    """Keep only the first one-unambiguous successor when one exists."""
    succs = succ_executions(v)
    for pair in succs:
        if one_unambiguous(v.interaction, pair[0]):
            return [pair]
    return succs


def local_analysis(
    v: Vertex,
    depth: Bound = INFINITE,
    memo: Optional[Dict[Tuple[Interaction, Tuple[Action, ...]], bool]] = None,
    deadline: Optional[float] = None,
) -> bool:
    """Check every component of the multi-trace against its local view.

    For each lifeline, the interaction is projected onto that lifeline alone
    and the component (truncated to ``depth``) is analysed with the baseline
    rules.  A failed component refutes the whole vertex.
    """
    if memo is None:
        memo = {}
    sig = v.signature
    for lifeline in sig.lifelines:
        local = v.mtrace.component(lifeline)
        if depth != INFINITE:
            local = local[: int(depth)]
        others = [l for l in sig.lifelines if l != lifeline]
        projected = simplify(remove_lifelines(v.interaction, others))
        key = (projected, local)
        verdict = memo.get(key)
        if verdict is None:
            sub_sig = Signature((lifeline,), sig.messages)
            sub_mt = MultiTrace(sub_sig, (local,))
            state = _Search(ExploreConfig(stop_on_ok=True), deadline=deadline)
            sub = state.run(Vertex(projected, sub_mt))
            if sub is Verdict.TIMEOUT:
                raise _Deadline()
            verdict = sub is Verdict.OK
            memo[key] = verdict
        if not verdict:
            return False
    return True


class _Search:
    """One exploration of the reachable analysis graph."""

    def __init__(
        self,
        cfg: ExploreConfig,
        deadline: Optional[float],
        loc_memo: Optional[Dict] = None,
    ) -> None:
        self.cfg = cfg
        self.deadline = deadline
        self.loc_memo = loc_memo if loc_memo is not None else {}
        self.node_count = 0
        self.edge_count = 0
        self.ok_found = False
        self.graph = GraphDump() if cfg.record_graph else None
        self._ids: Dict[Tuple[str, str], int] = {}
        self._expandable: Dict[int, bool] = {}

    def _check_deadline(self) -> None:
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise _Deadline()

    def _admit(self, v: Vertex) -> Tuple[int, bool]:
        key = v.key()
        known = self._ids.get(key)
        if known is not None:
            return known, False
        vid = self.node_count
        self._ids[key] = vid
        self.node_count += 1
        ok_state = v.mtrace.is_empty
        alive = True
        if ok_state:
            self.ok_found = True
        elif self.cfg.loc:
            alive = local_analysis(v, self.cfg.loc_depth, self.loc_memo, self.deadline)
        self._expandable[vid] = alive and not ok_state
        if self.graph is not None:
            self.graph.vertices.append(
                {
                    "id": vid,
                    "interaction": v.interaction.text,
                    "mtrace": v.mtrace.key_text(),
                    "lifelines": list(v.signature.lifelines),
                    "ok": ok_state,
                    "pruned": not alive,
                }
            )
        if ok_state:
            self.edge_count += 1
            if self.graph is not None:
                self.graph.edges.append({"src": vid, "dst": "ok", "label": "ok", "kind": "ok"})
        return vid, True

    def _edge(self, src: int, dst: int, label: str, kind: str) -> None:
        self.edge_count += 1
        if self.graph is not None:
            self.graph.edges.append({"src": src, "dst": dst, "label": label, "kind": kind})

    def _successors(self, v: Vertex) -> List[Tuple[str, str, Vertex]]:
        removal = succ_removal(v)
        if removal is not None:
            gone = set(v.signature.lifelines) - set(removal.signature.lifelines)
            label = "rmv{" + ",".join(l for l in v.signature.lifelines if l in gone) + "}"
            return [(label, "removal", removal)]
        pairs = por_successors(v) if self.cfg.por else succ_executions(v)
        return [(a.text, "execution", w) for a, w in pairs]

    def run(self, root: Vertex) -> Verdict:
        try:
            agenda: Deque[Tuple[int, Vertex]] = deque()
            vid, _ = self._admit(root)
            if self.ok_found and self.cfg.stop_on_ok:
                return Verdict.OK
            if self._expandable[vid]:
                agenda.append((vid, root))
            dfs = self.cfg.strategy == "dfs"
            while agenda:
                self._check_deadline()
                src, v = agenda.pop() if dfs else agenda.popleft()
                children = self._successors(v)
                if not children and self.graph is not None:
                    self.graph.vertices[src]["dead"] = True
                fresh: List[Tuple[int, Vertex]] = []
                for label, kind, w in children:
                    wid, new = self._admit(w)
                    self._edge(src, wid, label, kind)
                    if new:
                        if self.ok_found and self.cfg.stop_on_ok:
                            return Verdict.OK
                        if self._expandable[wid]:
                            fresh.append((wid, w))
                # a stack pops last-in first: reverse so the first child expands first
                agenda.extend(reversed(fresh) if dfs else fresh)
            return Verdict.OK if self.ok_found else Verdict.NOK
        except _Deadline:
            return Verdict.TIMEOUT


def explore(
    interaction: Interaction, mtrace: MultiTrace, cfg: Optional[ExploreConfig] = None
) -> ExploreReport:
    """Decide whether ``mtrace`` is a multi-prefix of a behaviour of ``interaction``.

    Returns the verdict together with the number of distinct vertices and
    arcs discovered.  With ``stop_on_ok`` the search halts at the first ok
    vertex; otherwise the full reachable sub-graph is explored.
    """
    if cfg is None:
        cfg = ExploreConfig()
    validate_over(interaction, mtrace.signature)
    t0 = time.perf_counter()
    deadline = None
    if cfg.timeout_ms is not None:
        deadline = t0 + cfg.timeout_ms / 1000.0
    state = _Search(cfg, deadline)
    verdict = state.run(make_vertex(interaction, mtrace))
    elapsed_us = int((time.perf_counter() - t0) * 1_000_000)
    return ExploreReport(
        verdict=verdict,
        node_count=state.node_count,
        edge_count=state.edge_count,
        elapsed_us=elapsed_us,
        graph=state.graph,
    )


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(report: ExploreReport) -> bytes:
    """Render the recorded graph as a DOT digraph (deterministic output)."""
    if report.graph is None:
        raise ModelError("report carries no graph dump; explore with record_graph")
    lines = ["digraph analysis {", "  rankdir=TB;", '  node [shape=box, fontname="monospace"];']
    has_ok_edge = any(e["dst"] == "ok" for e in report.graph.edges)
    for rec in report.graph.vertices:
        label = f"{rec['interaction']}\\n{rec['mtrace']}"
        attrs = [f"label={_dot_quote(label)}"]
        if rec.get("dead"):
            attrs.append("color=red")
        if rec.get("pruned"):
            attrs.append("color=red")
            attrs.append('style=dashed')
        lines.append(f"  n{rec['id']} [{', '.join(attrs)}];")
    if has_ok_edge:
        lines.append('  ok [label="Ok", shape=hexagon, color=blue];')
    for e in report.graph.edges:
        dst = "ok" if e["dst"] == "ok" else f"n{e['dst']}"
        lines.append(f"  n{e['src']} -> {dst} [label={_dot_quote(str(e['label']))}];")
    lines.append("}")
    lines.append("")
    return "\n".join(lines).encode("utf-8")


def export_jsonl(report: ExploreReport) -> bytes:
    """One JSON object per vertex and per edge, in discovery order."""
    if report.graph is None:
        raise ModelError("report carries no graph dump; explore with record_graph")
    out = []
    for rec in report.graph.vertices:
        out.append(json.dumps({"type": "vertex", **rec}, sort_keys=True))
    for e in report.graph.edges:
        out.append(json.dumps({"type": "edge", **e}, sort_keys=True))
    out.append("")
    return "\n".join(out).encode("utf-8")
