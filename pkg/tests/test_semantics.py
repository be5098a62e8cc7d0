"""Execution-relation unit tests plus cross-checks against the trace oracle."""

import random

import pytest

from tracematch import (
    EMPTY,
    ModelError,
    Signature,
    collides,
    frontier,
    prune,
    remove_lifelines,
    simplify,
    terminates,
)
from tracematch.multitrace import conflict, denotational_traces, INFINITE
from tracematch.semantics import raw_frontier
from tracematch.terms import act, alt, loop_w, seq, strict

from helpers import SIG2, action, fig1, rand_loopfree, rand_sublifelines, rand_term


def A(text):
    return act(action(text))


def test_terminates_examples():
    _, term = fig1()
    assert terminates(EMPTY)
    assert terminates(loop_w(strict(A("lp!pub"), A("lb?pub"))))
    assert not terminates(term)
    assert not terminates(A("lp!pub"))
    assert terminates(alt(A("lp!pub"), EMPTY))


def test_collides_examples():
    sig, _ = fig1()
    assert collides(A("lb?pub"), "lb")
    assert not collides(EMPTY, "lb")
    assert not collides(alt(A("lp!pub"), EMPTY), "lp")
    assert collides(strict(A("ls!sub"), A("lb?sub")), "lb")
    assert not collides(loop_w(A("lb?pub")), "lb")
    with pytest.raises(ModelError):
        collides(EMPTY, "nope", sig=sig)


def test_prune_examples():
    sig, _ = fig1()
    assert prune(loop_w(strict(A("lp!pub"), A("lb?pub"))), "lb") is EMPTY
    assert prune(A("lp!pub"), "lb") is A("lp!pub")
    assert prune(A("lp!pub"), "lp") is None
    assert prune(strict(A("ls!sub"), A("lb?sub")), "lb") is None
    kept = prune(alt(A("lp!pub"), A("lb?pub")), "lb")
    assert kept is A("lp!pub")
    with pytest.raises(ModelError):
        prune(EMPTY, "nope", sig=sig)


def test_prune_defined_iff_no_collision():
    rng = random.Random(5)
    for _ in range(1000):
        term = rand_term(rng, SIG2, depth=5)
        lifeline = rng.choice(SIG2.lifelines)
        assert (prune(term, lifeline) is None) == collides(term, lifeline)


def test_frontier_axiom_and_empty():
    sig = Signature(("lp",), ("pub",))
    steps = frontier(sig, A("lp!pub"))
    assert [(s.action, s.position, s.follow_up) for s in steps] == [
        (action("lp!pub"), (), EMPTY)
    ]
    assert frontier(sig, EMPTY) == []


def test_frontier_after_removing_subscriber():
    sig, term = fig1()
    reduced = simplify(remove_lifelines(term, {"ls"}))
    steps = frontier(sig, reduced)
    assert len(steps) == 3
    labels = [(s.action.text, s.position) for s in steps]
    assert labels == [
        ("lp!pub", (1, 1, 1, 1)),
        ("lp!pub", (2, 1, 1, 1)),
        ("lb?sub", (1, 2)),
    ]
    assert len({s.follow_up for s in steps}) == 3


def test_frontier_is_deterministic():
    sig, term = fig1()
    assert frontier(sig, term) == frontier(sig, term)


def test_frontier_ordering_follows_declarations():
    sig = Signature(("x", "y"), ("b", "a"))
    term = seq(alt(A("y?a"), A("x?b")), A("x!b"))
    order = [s.action.text for s in frontier(sig, term)]
    # lifeline declaration first, emissions before receptions, then message order
    assert order == ["x!b", "x?b", "y?a"]


def test_loopfree_agrees_with_trace_oracle():
    rng = random.Random(9)
    for _ in range(400):
        term = rand_loopfree(rng, SIG2, max_actions=6)
        traces = denotational_traces(term, INFINITE)
        assert terminates(term) == (() in traces)
        for lifeline in SIG2.lifelines:
            assert collides(term, lifeline) == all(
                conflict(t, lifeline) for t in traces
            )
        # frontier soundness and completeness: sigma(i) minus the empty trace
        # equals the union of a.sigma(i') over the enabled steps
        via_steps = set()
        for step in raw_frontier(term):
            for rest in denotational_traces(step.follow_up, INFINITE):
                via_steps.add((step.action,) + rest)
        assert via_steps == {t for t in traces if t}


def test_removal_preserves_termination_collision_pruning_execution():
    rng = random.Random(13)
    sig = Signature(("l1", "l2", "l3"), ("m1", "m2"))
    for _ in range(1000):
        term = rand_term(rng, sig, depth=5)
        removed = rand_sublifelines(rng, sig)
        kept = [l for l in sig.lifelines if l not in removed]
        lifeline = rng.choice(kept)
        stripped = remove_lifelines(term, removed)

        if terminates(term):
            assert terminates(stripped)
        assert collides(term, lifeline) == collides(stripped, lifeline)

        pruned = prune(term, lifeline)
        if pruned is not None:
            expected = prune(stripped, lifeline)
            assert expected is simplify(remove_lifelines(pruned, removed))

        steps = {(s.action, s.position) for s in raw_frontier(term)}
        stripped_steps = {(s.action, s.position) for s in raw_frontier(stripped)}
        for a, p in steps:
            if a.lifeline not in removed:
                assert (a, p) in stripped_steps


def test_removal_preserves_follow_ups():
    rng = random.Random(14)
    sig = Signature(("l1", "l2", "l3"), ("m1", "m2"))
    for _ in range(500):
        term = rand_term(rng, sig, depth=4)
        removed = rand_sublifelines(rng, sig)
        stripped = remove_lifelines(term, removed)
        stripped_by_pos = {
            (s.action, s.position): s.follow_up for s in raw_frontier(stripped)
        }
        for s in raw_frontier(term):
            if s.action.lifeline in removed:
                continue
            follow = stripped_by_pos[(s.action, s.position)]
            assert follow is simplify(remove_lifelines(s.follow_up, removed))
