"""Signatures, actions and interaction terms.

An interaction term describes the expected communication behaviour of a
distributed system as a tree over the operators ``strict``, ``seq``, ``par``,
``alt`` and the three loop flavours ``loopS``/``loopW``/``loopP``.  Leaves are
either the empty interaction ``0`` or a single communication action such as
``lp!pub`` (lifeline ``lp`` emits message ``pub``).

Terms are immutable and interned: building the same term twice yields the
same object, so equality is identity and dictionaries keyed on terms are
cheap.  Every node carries its canonical text form, which doubles as the
injective serialisation used for deduplication.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

EMIT = "!"
RECV = "?"

BINARY_OPS = ("strict", "seq", "par", "alt")
SCHEDULING_OPS = ("strict", "seq", "par")
LOOP_KINDS = ("S", "W", "P")

_IDENT_RE = re.compile(r"\A[A-Za-z_][A-Za-z0-9_]*\Z")

Position = Tuple[int, ...]


class ModelError(ValueError):
    """A signature, action or term violates a structural rule."""


def is_identifier(name: str) -> bool:
    return bool(_IDENT_RE.match(name))


@dataclass(frozen=True)
class Signature:
    """Declared lifelines and messages; declaration order is significant.

    The declaration order gives the total order used for deterministic
    tie-breaking everywhere (frontier ordering, generation, printing).
    """

    lifelines: Tuple[str, ...]
    messages: Tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.lifelines:
            raise ModelError("signature must declare at least one lifeline")
        for group, names in (("lifeline", self.lifelines), ("message", self.messages)):
            seen = set()
            for name in names:
                if not is_identifier(name):
                    raise ModelError(f"invalid {group} identifier {name!r}")
                if name in seen:
                    raise ModelError(f"duplicate {group} {name!r}")
                seen.add(name)

    def has_lifeline(self, lifeline: str) -> bool:
        return lifeline in self.lifelines

    def lifeline_index(self, lifeline: str) -> int:
        try:
            return self.lifelines.index(lifeline)
        except ValueError:
            raise ModelError(f"undeclared lifeline {lifeline!r}") from None

    def message_index(self, message: str) -> int:
        try:
            return self.messages.index(message)
        except ValueError:
            raise ModelError(f"undeclared message {message!r}") from None

    def without(self, removed: Iterable[str]) -> "Signature":
        """Signature obtained by dropping ``removed`` lifelines (order kept)."""
        gone = set(removed)
        for name in gone:
            self.lifeline_index(name)
        kept = tuple(l for l in self.lifelines if l not in gone)
        return Signature(kept, self.messages)


@dataclass(frozen=True)
class Action:
    """One observable event: a lifeline emits (``!``) or receives (``?``) a message."""

    lifeline: str
    kind: str
    message: str

    def __post_init__(self) -> None:
        if self.kind not in (EMIT, RECV):
            raise ModelError(f"action kind must be '!' or '?', got {self.kind!r}")
        if not is_identifier(self.lifeline) or not is_identifier(self.message):
            raise ModelError(f"invalid action {self.lifeline!r} {self.message!r}")

    @property
    def text(self) -> str:
        return f"{self.lifeline}{self.kind}{self.message}"

    def sort_key(self, sig: Signature) -> Tuple[int, int, int]:
        # emit sorts before recv; '!' < '?' would do, but keep it explicit
        return (
            sig.lifeline_index(self.lifeline),
            0 if self.kind == EMIT else 1,
            sig.message_index(self.message),
        )

    def __str__(self) -> str:
        return self.text

    def validate(self, sig: Signature) -> None:
        sig.lifeline_index(self.lifeline)
        sig.message_index(self.message)


class Interaction:
    """Base class of interned interaction term nodes.

    Equality is object identity (guaranteed by interning); ``text`` is the
    canonical, re-parseable rendering of the term.
    """

    __slots__ = ("text",)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.text}>"

    def __str__(self) -> str:
        return self.text


class Empty(Interaction):
    __slots__ = ()


class Act(Interaction):
    __slots__ = ("action",)


class Binary(Interaction):
    __slots__ = ("op", "left", "right")


class Loop(Interaction):
    __slots__ = ("kind", "body")


_POOL: Dict[str, Interaction] = {}


def _interned(node: Interaction) -> Interaction:
    return _POOL.setdefault(node.text, node)


def _new_empty() -> Empty:
    node = Empty()
    node.text = "0"
    return node


EMPTY: Empty = _new_empty()
_POOL[EMPTY.text] = EMPTY


def act(action: Action) -> Interaction:
    node = _POOL.get(action.text)
    if node is None:
        fresh = Act()
        fresh.text = action.text
        fresh.action = action
        node = _POOL.setdefault(fresh.text, fresh)
    return node


def binary(op: str, left: Interaction, right: Interaction) -> Interaction:
    if op not in BINARY_OPS:
        raise ModelError(f"unknown binary operator {op!r}")
    text = f"{op}({left.text},{right.text})"
    node = _POOL.get(text)
    if node is None:
        fresh = Binary()
        fresh.text = text
        fresh.op = op
        fresh.left = left
        fresh.right = right
        node = _POOL.setdefault(text, fresh)
    return node


def loop(kind: str, body: Interaction) -> Interaction:
    if kind not in LOOP_KINDS:
        raise ModelError(f"unknown loop kind {kind!r}")
    text = f"loop{kind}({body.text})"
    node = _POOL.get(text)
    if node is None:
        fresh = Loop()
        fresh.text = text
        fresh.kind = kind
        fresh.body = body
        node = _POOL.setdefault(text, fresh)
    return node


def strict(left: Interaction, right: Interaction) -> Interaction:
    return binary("strict", left, right)


def seq(left: Interaction, right: Interaction) -> Interaction:
    return binary("seq", left, right)


def par(left: Interaction, right: Interaction) -> Interaction:
    return binary("par", left, right)


def alt(left: Interaction, right: Interaction) -> Interaction:
    return binary("alt", left, right)


def loop_s(body: Interaction) -> Interaction:
    return loop("S", body)


def loop_w(body: Interaction) -> Interaction:
    return loop("W", body)


def loop_p(body: Interaction) -> Interaction:
    return loop("P", body)


def canonical_key(i: Interaction) -> bytes:
    """Injective byte serialisation of a term (its canonical text)."""
    return i.text.encode("ascii")


_POSITIONS: Dict[Interaction, FrozenSet[Position]] = {}


def positions(i: Interaction) -> FrozenSet[Position]:
    """All Dewey positions of ``i``; the root is the empty tuple."""
    cached = _POSITIONS.get(i)
    if cached is not None:
        return cached
    acc = {()}
    if isinstance(i, Binary):
        acc.update((1,) + p for p in positions(i.left))
        acc.update((2,) + p for p in positions(i.right))
    elif isinstance(i, Loop):
        acc.update((1,) + p for p in positions(i.body))
    result = frozenset(acc)
    _POSITIONS[i] = result
    return result


def symbol_at(i: Interaction, pos: Position) -> Interaction:
    """Subterm rooted at ``pos`` (raises ModelError on invalid positions)."""
    node = i
    for step in pos:
        if isinstance(node, Binary):
            if step == 1:
                node = node.left
            elif step == 2:
                node = node.right
            else:
                raise ModelError(f"invalid position {pos} in {i.text}")
        elif isinstance(node, Loop) and step == 1:
            node = node.body
        else:
            raise ModelError(f"invalid position {pos} in {i.text}")
    return node


def remove_lifelines(
    i: Interaction, removed: Iterable[str], sig: Optional[Signature] = None
) -> Interaction:
    """Replace every action on a removed lifeline by the empty interaction.

    Structure preserving: no simplification happens here, so the result has
    exactly the positions of ``i``.  When ``sig`` is given the removed set is
    checked against its declared lifelines.
    """
    gone = frozenset(removed)
    if sig is not None:
        for name in gone:
            sig.lifeline_index(name)
    if not gone:
        return i

    def walk(node: Interaction) -> Interaction:
        if isinstance(node, Act):
            return EMPTY if node.action.lifeline in gone else node
        if isinstance(node, Binary):
            return binary(node.op, walk(node.left), walk(node.right))
        if isinstance(node, Loop):
            return loop(node.kind, walk(node.body))
        return node

    return walk(i)


_SIMPLIFIED: Dict[Interaction, Interaction] = {}


def simplify(i: Interaction) -> Interaction:
    """Remove redundant empty-interaction leaves.

    Rewrites to fixpoint with: f(x,0) -> x and f(0,x) -> x for the scheduling
    operators, alt(0,0) -> 0 and loop(0) -> 0.  ``alt`` with a single empty
    branch is kept: optionality is semantic, not redundancy.
    """
    cached = _SIMPLIFIED.get(i)
    if cached is not None:
        return cached
    if isinstance(i, Binary):
        left = simplify(i.left)
        right = simplify(i.right)
        if i.op == "alt":
            result = EMPTY if (left is EMPTY and right is EMPTY) else binary("alt", left, right)
        elif left is EMPTY:
            result = right
        elif right is EMPTY:
            result = left
        else:
            result = binary(i.op, left, right)
    elif isinstance(i, Loop):
        body = simplify(i.body)
        result = EMPTY if body is EMPTY else loop(i.kind, body)
    else:
        result = i
    _SIMPLIFIED[i] = result
    _SIMPLIFIED[result] = result
    return result


def sched(op: str, left: Interaction, right: Interaction) -> Interaction:
    """Scheduling-operator constructor that drops empty operands.

    Produces a simplified node whenever both arguments are simplified.
    """
    if left is EMPTY:
        return right
    if right is EMPTY:
        return left
    return binary(op, left, right)


def node_count(i: Interaction) -> int:
    if isinstance(i, Binary):
        return 1 + node_count(i.left) + node_count(i.right)
    if isinstance(i, Loop):
        return 1 + node_count(i.body)
    return 1


def term_depth(i: Interaction) -> int:
    if isinstance(i, Binary):
        return 1 + max(term_depth(i.left), term_depth(i.right))
    if isinstance(i, Loop):
        return 1 + term_depth(i.body)
    return 1


def has_loop(i: Interaction) -> bool:
    if isinstance(i, Loop):
        return True
    if isinstance(i, Binary):
        return has_loop(i.left) or has_loop(i.right)
    return False


def actions_in(i: Interaction) -> FrozenSet[Action]:
    if isinstance(i, Act):
        return frozenset((i.action,))
    if isinstance(i, Binary):
        return actions_in(i.left) | actions_in(i.right)
    if isinstance(i, Loop):
        return actions_in(i.body)
    return frozenset()


def lifelines_in(i: Interaction) -> FrozenSet[str]:
    return frozenset(a.lifeline for a in actions_in(i))


def validate_over(i: Interaction, sig: Signature) -> None:
    """Check that every action of ``i`` is declared in ``sig``."""
    for a in actions_in(i):
        a.validate(sig)
