"""Small-step operational semantics of interaction terms.

Four mutually recursive notions drive execution:

* ``terminates(i)`` — the term accepts the empty trace.
* ``collides(i, l)`` — every trace accepted by ``i`` touches lifeline ``l``.
* ``prune(i, l)`` — the largest sub-behaviour of ``i`` with no action on
  ``l``; undefined (``None``) exactly when ``i`` collides with ``l``.
* ``frontier(sig, i)`` — all immediately executable actions, each with the
  position of the executed occurrence and the simplified follow-up term.

Pruning gates weak sequencing: an action may fire in the right operand of a
``seq`` only if the left operand can avoid its lifeline entirely, and a
``loopW`` unfolding wraps the new iteration in the pruned loop.

All functions are pure and memoized on the interned terms, so repeated
analyses of shared subterms are cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .terms import (
    EMPTY,
    Act,
    Action,
    Binary,
    Interaction,
    Loop,
    Position,
    Signature,
    binary,
    loop,
    sched,
    simplify,
)


@dataclass(frozen=True)
class ExecStep:
    """One enabled execution: ``action`` at ``position`` leaving ``follow_up``."""

    action: Action
    position: Position
    follow_up: Interaction


_TERMINATES: Dict[Interaction, bool] = {}
_COLLIDES: Dict[Tuple[Interaction, str], bool] = {}
_PRUNE: Dict[Tuple[Interaction, str], Optional[Interaction]] = {}
_STEPS: Dict[Interaction, Tuple[ExecStep, ...]] = {}


def terminates(i: Interaction) -> bool:
    """True iff the empty trace is accepted: loops and 0 always, actions never,
    alt if either branch does, scheduling operators if both operands do."""
    cached = _TERMINATES.get(i)
    if cached is not None:
        return cached
    if isinstance(i, Act):
        result = False
    elif isinstance(i, Loop):
        result = True
    elif isinstance(i, Binary):
        if i.op == "alt":
            result = terminates(i.left) or terminates(i.right)
        else:
            result = terminates(i.left) and terminates(i.right)
    else:
        result = True
    _TERMINATES[i] = result
    return result


def collides(i: Interaction, lifeline: str, sig: Optional[Signature] = None) -> bool:
    """True iff every accepted trace of ``i`` contains an action on ``lifeline``."""
    if sig is not None:
        sig.lifeline_index(lifeline)
    return _collides(i, lifeline)


def _collides(i: Interaction, lifeline: str) -> bool:
    key = (i, lifeline)
    cached = _COLLIDES.get(key)
    if cached is not None:
        return cached
    if isinstance(i, Act):
        result = i.action.lifeline == lifeline
    elif isinstance(i, Binary):
        if i.op == "alt":
            result = _collides(i.left, lifeline) and _collides(i.right, lifeline)
        else:
            result = _collides(i.left, lifeline) or _collides(i.right, lifeline)
    else:
        # the empty interaction and loops accept the empty trace
        result = False
    _COLLIDES[key] = result
    return result


def prune(
    i: Interaction, lifeline: str, sig: Optional[Signature] = None
) -> Optional[Interaction]:
    """Largest sub-behaviour of ``i`` avoiding ``lifeline``; ``None`` if impossible.

    The result is simplified.  ``prune(i, l)`` is defined exactly when
    ``not collides(i, l)``.
    """
    if sig is not None:
        sig.lifeline_index(lifeline)
    return _prune(i, lifeline)


def _prune(i: Interaction, lifeline: str) -> Optional[Interaction]:
    key = (i, lifeline)
    if key in _PRUNE:
        return _PRUNE[key]
    result: Optional[Interaction]
    if isinstance(i, Act):
        result = None if i.action.lifeline == lifeline else i
    elif isinstance(i, Binary):
        if i.op == "alt":
            left = _prune(i.left, lifeline)
            right = _prune(i.right, lifeline)
            if left is None and right is None:
                result = None
            elif left is None:
                result = right
            elif right is None:
                result = left
            elif left is EMPTY and right is EMPTY:
                result = EMPTY
            else:
                result = binary("alt", left, right)
        else:
            left = _prune(i.left, lifeline)
            right = _prune(i.right, lifeline)
            if left is None or right is None:
                result = None
            else:
                result = sched(i.op, left, right)
    elif isinstance(i, Loop):
        body = _prune(i.body, lifeline)
        if body is None or body is EMPTY:
            result = EMPTY
        else:
            result = loop(i.kind, body)
    else:
        result = EMPTY
    _PRUNE[key] = result
    return result


def raw_frontier(i: Interaction) -> Tuple[ExecStep, ...]:
    """Enabled execution steps of ``i`` in structural (left-to-right) order.

    Follow-up terms are simplified.  Positions refer to the given term, which
    need not itself be simplified.
    """
    cached = _STEPS.get(i)
    if cached is not None:
        return cached
    steps: List[ExecStep] = []
    if isinstance(i, Act):
        steps.append(ExecStep(i.action, (), EMPTY))
    elif isinstance(i, Binary):
        if i.op == "alt":
            for st in raw_frontier(i.left):
                steps.append(ExecStep(st.action, (1,) + st.position, st.follow_up))
            for st in raw_frontier(i.right):
                steps.append(ExecStep(st.action, (2,) + st.position, st.follow_up))
        elif i.op == "par":
            for st in raw_frontier(i.left):
                steps.append(
                    ExecStep(st.action, (1,) + st.position, sched("par", st.follow_up, simplify(i.right)))
                )
            for st in raw_frontier(i.right):
                steps.append(
                    ExecStep(st.action, (2,) + st.position, sched("par", simplify(i.left), st.follow_up))
                )
        elif i.op == "strict":
            for st in raw_frontier(i.left):
                steps.append(
                    ExecStep(st.action, (1,) + st.position, sched("strict", st.follow_up, simplify(i.right)))
                )
            if terminates(i.left):
                for st in raw_frontier(i.right):
                    steps.append(ExecStep(st.action, (2,) + st.position, st.follow_up))
        else:  # seq
            for st in raw_frontier(i.left):
                steps.append(
                    ExecStep(st.action, (1,) + st.position, sched("seq", st.follow_up, simplify(i.right)))
                )
            for st in raw_frontier(i.right):
                kept = _prune(i.left, st.action.lifeline)
                if kept is not None:
                    steps.append(
                        ExecStep(st.action, (2,) + st.position, sched("seq", kept, st.follow_up))
                    )
    elif isinstance(i, Loop):
        here = simplify(i)
        if i.kind == "S":
            for st in raw_frontier(i.body):
                steps.append(
                    ExecStep(st.action, (1,) + st.position, sched("strict", st.follow_up, here))
                )
        elif i.kind == "P":
            for st in raw_frontier(i.body):
                steps.append(
                    ExecStep(st.action, (1,) + st.position, sched("par", st.follow_up, here))
                )
        else:  # W: the pruned loop may still run ahead of the new iteration
            for st in raw_frontier(i.body):
                kept = _prune(i, st.action.lifeline)
                assert kept is not None  # loops never collide
                steps.append(
                    ExecStep(
                        st.action,
                        (1,) + st.position,
                        sched("seq", kept, sched("seq", st.follow_up, here)),
                    )
                )
    result = tuple(steps)
    _STEPS[i] = result
    return result


def frontier(sig: Signature, i: Interaction) -> List[ExecStep]:
    """All enabled steps ordered by the global tie-breaking rule.

    Order: lifeline declaration index, emissions before receptions, message
    declaration index, then position lexicographically.
    """
    return sorted(
        raw_frontier(i), key=lambda st: st.action.sort_key(sig) + (st.position,)
    )
