"""Multi-traces, the trace algebra and a bounded denotational oracle.

A multi-trace is one local trace per declared lifeline, with no ordering
between actions of different lifelines.  Global traces (plain tuples of
actions) keep the full ordering; ``project`` forgets the cross-lifeline
order.

The algebra operators (union, strict sequencing, interleaving, weak
sequencing and bounded closures) mirror the term operators and feed
``denotational_traces``, an independent enumeration of the accepted traces
used as an oracle against the operational engine.  Weak sequencing exists
only for global traces: on multi-traces it coincides with strict sequencing,
so no multi-trace variant is exposed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Tuple,
    Union,
)

from .terms import (
    Act,
    Action,
    Binary,
    Interaction,
    Loop,
    ModelError,
    Signature,
    has_loop,
)

GlobalTrace = Tuple[Action, ...]
LocalTrace = Tuple[Action, ...]

INFINITE = float("inf")
Bound = Union[int, float]


@dataclass(frozen=True)
class MultiTrace:
    """Per-lifeline local traces over a signature; cumulative length is |mu|."""

    signature: Signature
    parts: Tuple[LocalTrace, ...]

    def __post_init__(self) -> None:
        if len(self.parts) != len(self.signature.lifelines):
            raise ModelError("multi-trace must carry one component per lifeline")
        for lifeline, part in zip(self.signature.lifelines, self.parts):
            for a in part:
                if a.lifeline != lifeline:
                    raise ModelError(
                        f"action {a.text} cannot sit on component {lifeline!r}"
                    )

    def component(self, lifeline: str) -> LocalTrace:
        return self.parts[self.signature.lifeline_index(lifeline)]

    @property
    def total_length(self) -> int:
        return sum(len(p) for p in self.parts)

    @property
    def is_empty(self) -> bool:
        return all(not p for p in self.parts)

    def empty_lifelines(self) -> Tuple[str, ...]:
        return tuple(
            l for l, p in zip(self.signature.lifelines, self.parts) if not p
        )

    def with_component(self, lifeline: str, part: Iterable[Action]) -> "MultiTrace":
        idx = self.signature.lifeline_index(lifeline)
        parts = list(self.parts)
        parts[idx] = tuple(part)
        return MultiTrace(self.signature, tuple(parts))

    def prepend(self, action: Action) -> "MultiTrace":
        idx = self.signature.lifeline_index(action.lifeline)
        parts = list(self.parts)
        parts[idx] = (action,) + parts[idx]
        return MultiTrace(self.signature, tuple(parts))

    def append(self, action: Action) -> "MultiTrace":
        idx = self.signature.lifeline_index(action.lifeline)
        parts = list(self.parts)
        parts[idx] = parts[idx] + (action,)
        return MultiTrace(self.signature, tuple(parts))

    def consume_head(self, action: Action) -> Optional["MultiTrace"]:
        """Drop ``action`` from the head of its component, or None if it is not there."""
        if not self.signature.has_lifeline(action.lifeline):
            return None
        idx = self.signature.lifeline_index(action.lifeline)
        part = self.parts[idx]
        if not part or part[0] != action:
            return None
        parts = list(self.parts)
        parts[idx] = part[1:]
        return MultiTrace(self.signature, tuple(parts))

    def removed(self, lifelines: Iterable[str]) -> "MultiTrace":
        """Drop the components of ``lifelines``; the signature shrinks accordingly."""
        gone = frozenset(lifelines)
        sig = self.signature.without(gone)
        parts = tuple(
            p
            for l, p in zip(self.signature.lifelines, self.parts)
            if l not in gone
        )
        return MultiTrace(sig, parts)

    def truncated(self, depth: Bound) -> "MultiTrace":
        if depth == INFINITE:
            return self
        n = int(depth)
        return MultiTrace(self.signature, tuple(p[:n] for p in self.parts))

    def key_text(self) -> str:
        return "|".join(
            f"{l}:" + ".".join(a.text for a in p)
            for l, p in zip(self.signature.lifelines, self.parts)
        )

    def __str__(self) -> str:
        return self.key_text()


def empty_multitrace(sig: Signature) -> MultiTrace:
    return MultiTrace(sig, tuple(() for _ in sig.lifelines))


def make_multitrace(
    sig: Signature, components: Mapping[str, Iterable[Action]]
) -> MultiTrace:
    """Build a multi-trace from a lifeline -> actions mapping; omitted lifelines are empty."""
    for lifeline in components:
        sig.lifeline_index(lifeline)
    parts = []
    for lifeline in sig.lifelines:
        part = tuple(components.get(lifeline, ()))
        for a in part:
            a.validate(sig)
        parts.append(part)
    return MultiTrace(sig, tuple(parts))


def project(sig: Signature, trace: Iterable[Action]) -> MultiTrace:
    """Dispatch every action of a global trace to its lifeline component."""
    buckets: Dict[str, List[Action]] = {l: [] for l in sig.lifelines}
    for a in trace:
        a.validate(sig)
        buckets[a.lifeline].append(a)
    return MultiTrace(sig, tuple(tuple(buckets[l]) for l in sig.lifelines))


def conflict(trace: Iterable[Action], lifeline: str) -> bool:
    """True iff the global trace contains an action on ``lifeline``."""
    return any(a.lifeline == lifeline for a in trace)


def is_multiprefix(prefix: MultiTrace, full: MultiTrace) -> bool:
    """Componentwise word-prefix test; both operands must share a signature."""
    if prefix.signature != full.signature:
        raise ModelError("multi-prefix test requires a common signature")
    return all(
        len(p) <= len(q) and p == q[: len(p)]
        for p, q in zip(prefix.parts, full.parts)
    )


def multiprefixes(mt: MultiTrace) -> Iterator[MultiTrace]:
    """Enumerate every multi-prefix of ``mt`` (product of component prefixes)."""
    choices = [[p[:n] for n in range(len(p) + 1)] for p in mt.parts]
    for combo in itertools.product(*choices):
        yield MultiTrace(mt.signature, tuple(combo))


# ---------------------------------------------------------------------------
# trace algebra


def op_union(s1: FrozenSet, s2: FrozenSet) -> FrozenSet:
    return s1 | s2


def mt_concat(m1: MultiTrace, m2: MultiTrace) -> MultiTrace:
    if m1.signature != m2.signature:
        raise ModelError("concatenation requires a common signature")
    return MultiTrace(m1.signature, tuple(p + q for p, q in zip(m1.parts, m2.parts)))


def op_strict_seq(
    s1: FrozenSet[MultiTrace], s2: FrozenSet[MultiTrace]
) -> FrozenSet[MultiTrace]:
    return frozenset(mt_concat(a, b) for a in s1 for b in s2)


_SHUFFLES: Dict[Tuple[Tuple, Tuple], FrozenSet[Tuple]] = {}


def word_shuffle(u: Tuple, v: Tuple) -> FrozenSet[Tuple]:
    """All interleavings of two words, preserving each word's internal order."""
    if not u:
        return frozenset((v,))
    if not v:
        return frozenset((u,))
    key = (u, v)
    cached = _SHUFFLES.get(key)
    if cached is not None:
        return cached
    out = frozenset((u[0],) + rest for rest in word_shuffle(u[1:], v)) | frozenset(
        (v[0],) + rest for rest in word_shuffle(u, v[1:])
    )
    _SHUFFLES[key] = out
    return out


def mt_interleave(m1: MultiTrace, m2: MultiTrace) -> FrozenSet[MultiTrace]:
    """Componentwise shuffles combined independently across lifelines."""
    if m1.signature != m2.signature:
        raise ModelError("interleaving requires a common signature")
    per_lifeline = [word_shuffle(p, q) for p, q in zip(m1.parts, m2.parts)]
    return frozenset(
        MultiTrace(m1.signature, combo)
        for combo in itertools.product(*per_lifeline)
    )


def op_interleave(
    s1: FrozenSet[MultiTrace], s2: FrozenSet[MultiTrace]
) -> FrozenSet[MultiTrace]:
    out: set = set()
    for a in s1:
        for b in s2:
            out |= mt_interleave(a, b)
    return frozenset(out)


_WEAK_SEQ: Dict[Tuple[GlobalTrace, GlobalTrace], FrozenSet[GlobalTrace]] = {}


def gt_weak_seq(t1: GlobalTrace, t2: GlobalTrace) -> FrozenSet[GlobalTrace]:
    """Interleavings of two global traces that keep t1's actions first per lifeline."""
    if not t1:
        return frozenset((t2,))
    if not t2:
        return frozenset((t1,))
    key = (t1, t2)
    cached = _WEAK_SEQ.get(key)
    if cached is not None:
        return cached
    a1, a2 = t1[0], t2[0]
    out = set((a1,) + rest for rest in gt_weak_seq(t1[1:], t2))
    if not conflict(t1, a2.lifeline):
        out |= set((a2,) + rest for rest in gt_weak_seq(t1, t2[1:]))
    result = frozenset(out)
    _WEAK_SEQ[key] = result
    return result


def op_weak_seq(
    s1: FrozenSet[GlobalTrace], s2: FrozenSet[GlobalTrace]
) -> FrozenSet[GlobalTrace]:
    out: set = set()
    for a in s1:
        for b in s2:
            out |= gt_weak_seq(a, b)
    return frozenset(out)


def _element_length(x: Union[MultiTrace, GlobalTrace]) -> int:
    return x.total_length if isinstance(x, MultiTrace) else len(x)


def _compose(op: str, a, b) -> FrozenSet:
    if isinstance(a, MultiTrace):
        if op == ";":
            return frozenset((mt_concat(a, b),))
        if op == "||":
            return mt_interleave(a, b)
        raise ModelError(f"unknown multi-trace operator {op!r}")
    if op == ";":
        return frozenset((a + b,))
    if op == ";x":
        return gt_weak_seq(a, b)
    if op == "||":
        return word_shuffle(a, b)
    raise ModelError(f"unknown trace operator {op!r}")


def kleene_bounded(s: FrozenSet, op: str, bound: Bound, unit=None) -> FrozenSet:
    """Elements of the ``op``-closure of ``s`` whose length does not exceed ``bound``.

    ``op`` is ";" (strict sequencing), ";x" (weak sequencing, global traces
    only) or "||" (interleaving).  The unit is inferred from ``s`` for
    multi-traces; pass it explicitly for an empty set.
    """
    if bound < 0:
        raise ModelError("length bound must be non-negative")
    if unit is None:
        sample = next(iter(s), None)
        if isinstance(sample, MultiTrace):
            unit = empty_multitrace(sample.signature)
        else:
            unit = ()
    if bound == INFINITE and any(_element_length(x) > 0 for x in s):
        raise ModelError("unbounded closure of a non-empty-trace set is infinite")
    acc = {unit}
    layer = {unit}
    while layer:
        fresh = set()
        for tail in layer:
            for head in s:
                for composed in _compose(op, head, tail):
                    if _element_length(composed) <= bound and composed not in acc:
                        fresh.add(composed)
        acc |= fresh
        layer = fresh
    return frozenset(acc)


# ---------------------------------------------------------------------------
# denotational semantics


_DENOTE: Dict[Tuple[Interaction, Bound], FrozenSet[GlobalTrace]] = {}

_LOOP_OP = {"S": ";", "W": ";x", "P": "||"}


def denotational_traces(i: Interaction, bound: Bound) -> FrozenSet[GlobalTrace]:
    """Accepted global traces of ``i`` up to cumulative length ``bound``.

    Computed algebraically: alt as union, strict as concatenation, seq as
    weak sequencing, par as shuffle, loops as bounded closures.  An infinite
    bound is permitted only for loop-free terms.
    """
    if bound == INFINITE and has_loop(i):
        raise ModelError("a finite length bound is required for terms with loops")
    return _denote(i, bound)


def _denote(i: Interaction, bound: Bound) -> FrozenSet[GlobalTrace]:
    key = (i, bound)
    cached = _DENOTE.get(key)
    if cached is not None:
        return cached
    result: FrozenSet[GlobalTrace]
    if isinstance(i, Act):
        result = frozenset(((i.action,),)) if bound >= 1 else frozenset()
    elif isinstance(i, Binary):
        left = _denote(i.left, bound)
        right = _denote(i.right, bound)
        if i.op == "alt":
            result = left | right
        elif i.op == "strict":
            result = frozenset(
                a + b for a in left for b in right if len(a) + len(b) <= bound
            )
        elif i.op == "seq":
            out: set = set()
            for a in left:
                for b in right:
                    if len(a) + len(b) <= bound:
                        out |= gt_weak_seq(a, b)
            result = frozenset(out)
        else:  # par
            out = set()
            for a in left:
                for b in right:
                    if len(a) + len(b) <= bound:
                        out |= word_shuffle(a, b)
            result = frozenset(out)
    elif isinstance(i, Loop):
        result = kleene_bounded(_denote(i.body, bound), _LOOP_OP[i.kind], bound, unit=())
    else:
        result = frozenset(((),))
    _DENOTE[key] = result
    return result


def semantic_multitraces(
    sig: Signature, i: Interaction, bound: Bound
) -> FrozenSet[MultiTrace]:
    """Accepted multi-traces up to length ``bound`` (projection of the trace semantics)."""
    return frozenset(project(sig, t) for t in denotational_traces(i, bound))


def operational_traces(i: Interaction) -> FrozenSet[GlobalTrace]:
    """Accepted traces of a loop-free term enumerated with the execution engine.

    Independent cross-check route: repeated frontier expansion plus the
    termination predicate, instead of the trace algebra.
    """
    from .semantics import raw_frontier, terminates

    if has_loop(i):
        raise ModelError("operational enumeration requires a loop-free term")
    memo: Dict[Interaction, FrozenSet[GlobalTrace]] = {}

    def walk(node: Interaction) -> FrozenSet[GlobalTrace]:
        cached = memo.get(node)
        if cached is not None:
            return cached
        acc = set()
        if terminates(node):
            acc.add(())
        for step in raw_frontier(node):
            for rest in walk(step.follow_up):
                acc.add((step.action,) + rest)
        result = frozenset(acc)
        memo[node] = result
        return result

    return walk(i)


def oracle_prefix_membership(i: Interaction, mt: MultiTrace) -> bool:
    """Brute-force decision of multi-prefix membership for loop-free terms.

    Enumerates the full accepted-trace set and tests ``mt`` against the
    projection of every trace.  Deliberately independent of the analysis
    graph; used to validate it.
    """
    if has_loop(i):
        raise ModelError("the brute-force oracle requires a loop-free term")
    sig = mt.signature
    for t in denotational_traces(i, INFINITE):
        if is_multiprefix(mt, project(sig, t)):
            return True
    return False
