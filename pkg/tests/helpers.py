"""Shared fixtures: the running example, tiny builders and random generators.

The random generators here are intentionally separate from the package's own
benchmark generator so that property tests do not inherit its biases.
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Tuple

from tracematch import (
    EMPTY,
    Action,
    Interaction,
    MultiTrace,
    Signature,
    make_multitrace,
    parse_model,
)
from tracematch.terms import EMIT, RECV, act, binary, loop

FIG1_MODEL = b"""
# publish/subscribe running example
lifelines: lp, lb, ls
messages: pub, sub
interaction: seq(seq(loopW(strict(lp!pub,lb?pub)),strict(ls!sub,lb?sub)),loopW(seq(strict(lp!pub,lb?pub),strict(lb!pub,ls?pub))))
"""


def fig1() -> Tuple[Signature, Interaction]:
    return parse_model(FIG1_MODEL)


def action(text: str) -> Action:
    for kind in (EMIT, RECV):
        if kind in text:
            lifeline, _, message = text.partition(kind)
            return Action(lifeline, kind, message)
    raise ValueError(f"not an action: {text!r}")


def ga(*texts: str) -> Tuple[Action, ...]:
    """A global trace from action texts."""
    return tuple(action(t) for t in texts)


def mt(sig: Signature, components: Dict[str, str]) -> MultiTrace:
    """A multi-trace from 'l1!m.l2?m'-style component strings."""
    parsed = {
        lifeline: [action(t) for t in body.split(".")] if body else []
        for lifeline, body in components.items()
    }
    return make_multitrace(sig, parsed)


SIG2 = Signature(("l1", "l2"), ("m1", "m2"))
SIG3 = Signature(("l1", "l2", "l3"), ("m",))


def rand_action(rng: random.Random, sig: Signature) -> Action:
    return Action(
        rng.choice(sig.lifelines), rng.choice((EMIT, RECV)), rng.choice(sig.messages)
    )


def rand_term(
    rng: random.Random,
    sig: Signature,
    depth: int,
    allow_loops: bool = True,
    leaf_bias: float = 0.4,
) -> Interaction:
    """Small random term; depth bounds recursion, leaves get likelier near it."""
    if depth <= 1 or rng.random() < leaf_bias:
        return EMPTY if rng.random() < 0.2 else act(rand_action(rng, sig))
    ops = ["strict", "seq", "par", "alt"]
    if allow_loops:
        ops += ["loopS", "loopW", "loopP"]
    op = rng.choice(ops)
    if op.startswith("loop"):
        return loop(op[-1], rand_term(rng, sig, depth - 1, allow_loops, leaf_bias))
    return binary(
        op,
        rand_term(rng, sig, depth - 1, allow_loops, leaf_bias),
        rand_term(rng, sig, depth - 1, allow_loops, leaf_bias),
    )


def rand_loopfree(
    rng: random.Random, sig: Signature, max_actions: int, depth: int = 5
) -> Interaction:
    """Loop-free random term with at most ``max_actions`` action leaves."""
    while True:
        term = rand_term(rng, sig, depth, allow_loops=False)
        if len(_action_positions(term)) <= max_actions:
            return term


def _action_positions(term: Interaction) -> List:
    from tracematch.terms import Act, Binary, positions, symbol_at

    return [p for p in positions(term) if isinstance(symbol_at(term, p), Act)]


def rand_trace(rng: random.Random, sig: Signature, length: int) -> Tuple[Action, ...]:
    return tuple(rand_action(rng, sig) for _ in range(length))


def rand_mt(rng: random.Random, sig: Signature, total: int) -> MultiTrace:
    parts: Dict[str, List[Action]] = {l: [] for l in sig.lifelines}
    for _ in range(total):
        a = rand_action(rng, sig)
        parts[a.lifeline].append(a)
    return make_multitrace(sig, parts)


def rand_sublifelines(
    rng: random.Random, sig: Signature, proper: bool = True
) -> Tuple[str, ...]:
    """A random (by default proper) subset of the declared lifelines."""
    upper = len(sig.lifelines) - 1 if proper else len(sig.lifelines)
    k = rng.randint(0, upper)
    return tuple(rng.sample(sig.lifelines, k))
