"""Predicate-calculus data-base with backward/forward chaining, a
self-watcher, and a finite checker for inter-theory reductions."""

from .inference import (
    ChainConfig, Network, ProofNode, ProofResult, backward_chain,
    forward_chain, saturate, semantic_network, show,
)
from .knowledge_base import (
    Fact, KbStats, KnowledgeBase, KnowledgeBaseError, Rule,
    assert_formula, dump_kb, facts_matching, load_kb, stats,
)
from .pc_core import (
    And, Atom, Compound, Const, Exists, ForAll, If, Not, Or, ParseError, Var,
    apply_substitution, parse, render, unify,
)
from .reduction import (
    ExplanationResult, ReductionReport, SpecError, check_e_bijective, check_spec,
    classify, detect_fusion, explain, explanatory_power, load_reduction_spec,
    nomologically_necessary, preserves_nn, render_report, structural_report,
    translate_explanation,
)
from .self_watcher import WatcherConfig, WatcherReport, run_watcher, watch_tick

__version__ = "0.1.0"
