"""Offline conformance checking of distributed-system multi-traces
against sequence-diagram interaction models."""

from .analysis import (
    ExploreConfig,
    ExploreReport,
    Verdict,
    Vertex,
    explore,
    export_dot,
    export_jsonl,
    local_analysis,
    one_unambiguous,
    por_successors,
    succ_executions,
    succ_removal,
)
from .bench import (
    Cnf,
    GenParams,
    SuiteConfig,
    encode_3sat,
    gen_accepted,
    gen_interaction,
    gen_prefix,
    mutate_noise,
    mutate_swap_act,
    mutate_swap_comp,
    parse_dimacs,
    run_suite,
)
from .multitrace import (
    MultiTrace,
    conflict,
    denotational_traces,
    empty_multitrace,
    is_multiprefix,
    kleene_bounded,
    make_multitrace,
    op_interleave,
    op_strict_seq,
    op_union,
    op_weak_seq,
    oracle_prefix_membership,
    project,
)
from .semantics import ExecStep, collides, frontier, prune, terminates
from .terms import (
    EMPTY,
    Action,
    Interaction,
    ModelError,
    Signature,
    canonical_key,
    positions,
    remove_lifelines,
    simplify,
)
from .textio import (
    ParseError,
    parse_model,
    parse_multitrace,
    print_model,
    print_multitrace,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Cnf",
    "EMPTY",
    "ExecStep",
    "ExploreConfig",
    "ExploreReport",
    "GenParams",
    "Interaction",
    "ModelError",
    "MultiTrace",
    "ParseError",
    "Signature",
    "SuiteConfig",
    "Verdict",
    "Vertex",
    "canonical_key",
    "collides",
    "conflict",
    "denotational_traces",
    "empty_multitrace",
    "encode_3sat",
    "explore",
    "export_dot",
    "export_jsonl",
    "frontier",
    "gen_accepted",
    "gen_interaction",
    "gen_prefix",
    "is_multiprefix",
    "kleene_bounded",
    "local_analysis",
    "make_multitrace",
    "mutate_noise",
    "mutate_swap_act",
    "mutate_swap_comp",
    "one_unambiguous",
    "op_interleave",
    "op_strict_seq",
    "op_union",
    "op_weak_seq",
    "oracle_prefix_membership",
    "parse_dimacs",
    "parse_model",
    "parse_multitrace",
    "por_successors",
    "positions",
    "print_model",
    "print_multitrace",
    "project",
    "prune",
    "remove_lifelines",
    "run_suite",
    "simplify",
    "succ_executions",
    "succ_removal",
    "terminates",
]
