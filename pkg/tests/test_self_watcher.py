import random

import pytest
from hypothesis import given, settings, strategies as st

from pcreduce.knowledge_base import WATCHER, KnowledgeBase, facts_matching, load_kb, stats
from pcreduce.pc_core import parse, unify
from pcreduce.self_watcher import (
    AWARENESS, RESERVED_PREFIXES, WatcherConfig, run_watcher, watch_tick,
)

from oracles import random_horn_kb

ELEPHANTS = """
(forall (z) (if (inst z elephant) (color z gray)))
(inst Clyde elephant)
"""


def atoms(kb):
    return {str(f.atom) for f in kb.facts}


def test_tick_on_empty_kb():
    kb = watch_tick(KnowledgeBase(), 1)
    assert atoms(kb) == {"(db-fact-count 0)", "(db-rule-count 0)", "(watcher-generation 1)"}
    assert all(f.provenance == WATCHER and f.generation == 1 for f in kb.facts)


def test_tick_on_elephants():
    kb = watch_tick(load_kb(ELEPHANTS), 1)
    assert {"(db-fact-count 1)", "(db-rule-count 1)", "(db-has-predicate inst)",
            "(watcher-generation 1)"} <= atoms(kb)


def test_second_tick_describes_first():
    kb1 = watch_tick(load_kb(ELEPHANTS), 1)
    kb2 = watch_tick(kb1, 2)
    # tick 1 left 4 watcher facts next to the 1 asserted fact
    assert "(db-fact-count 5)" in atoms(kb2)
    assert "(db-has-predicate db-fact-count)" in atoms(kb2)


def test_generation_must_be_positive():
    with pytest.raises(ValueError):
        watch_tick(KnowledgeBase(), 0)


def test_defaults_on_elephants():
    kb, report = run_watcher(load_kb(ELEPHANTS))
    assert report.generations_run == 4
    assert report.awareness_emitted and report.awareness_generation == 2
    assert AWARENESS in kb
    assert report.facts_emitted_per_generation == (4, 6, 3, 2)
    assert report.observed_fact_counts == (1, 5, 12, 15)


def test_two_fact_kb_hand_simulated():
    # tick 1 sees {p a, p b}: count 2, rules 0, predicate p, generation 1 -> 4 new
    # tick 2 sees 6 facts: count 6, four db-/watcher- predicates, generation 2 -> 6 new
    #   (rule count 0 and predicate p repeat); awareness follows, 13 facts
    # tick 3 sees 13 facts: count 13, predicate have-impression-of, generation 3 -> 3 new
    kb = load_kb("(p a)\n(p b)\n")
    _, report = run_watcher(kb, WatcherConfig(max_generations=3))
    assert report.facts_emitted_per_generation == (4, 6, 3)
    assert report.observed_fact_counts == (2, 6, 13)


def test_single_generation_never_aware():
    kb, report = run_watcher(load_kb(ELEPHANTS), WatcherConfig(max_generations=1))
    assert not report.awareness_emitted
    assert AWARENESS not in kb


def test_threshold_delays_awareness():
    _, report = run_watcher(load_kb(ELEPHANTS), WatcherConfig(awareness_threshold=3))
    assert report.awareness_generation == 3


def test_report_render():
    _, report = run_watcher(load_kb(ELEPHANTS))
    assert report.render().splitlines() == [
        "generation 1: observed 1 facts, emitted 4",
        "generation 2: observed 5 facts, emitted 6",
        "generation 3: observed 12 facts, emitted 3",
        "generation 4: observed 15 facts, emitted 2",
        "awareness: (have-impression-of mind) at generation 2",
    ]


def test_emission_flags():
    cfg = WatcherConfig(emit_has_predicate=False, emit_rule_count=False)
    kb = watch_tick(load_kb(ELEPHANTS), 1, cfg)
    assert atoms(kb) - atoms(load_kb(ELEPHANTS)) == {"(db-fact-count 1)", "(watcher-generation 1)"}


def test_config_validation():
    with pytest.raises(ValueError):
        WatcherConfig(max_generations=0)


def latest_count(kb):
    best = max((f for f, _ in facts_matching(kb, parse("(db-fact-count ?n)"))),
               key=lambda f: f.generation)
    return int(best.atom.args[0].name)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_watcher_properties(seed, generations):
    kb = load_kb(random_horn_kb(random.Random(seed)).text)
    user_preds = {f.atom.predicate for f in kb.facts} | {r.consequent.predicate for r in kb.rules}
    sizes = []
    for gen in range(1, generations + 1):
        before = stats(kb).fact_count
        kb = watch_tick(kb, gen)
        assert latest_count(kb) == before  # snapshot fidelity
        sizes.append(stats(kb).fact_count)
    assert sizes == sorted(sizes)
    for f in kb.facts:
        if f.provenance == WATCHER:
            assert f.atom.predicate.startswith(RESERVED_PREFIXES)
            assert f.atom.predicate not in user_preds

    final, report = run_watcher(load_kb(random_horn_kb(random.Random(seed)).text),
                                WatcherConfig(max_generations=generations))
    assert report.generations_run == generations
    assert len(report.facts_emitted_per_generation) == generations
    if report.awareness_emitted:
        assert report.awareness_generation >= 2
        # the tick that raised awareness observed an earlier snapshot
        assert report.observed_fact_counts[report.awareness_generation - 1] > \
            report.observed_fact_counts[0]
    assert report.awareness_emitted == (generations >= 2)


def test_watcher_facts_do_not_unify_with_user_goals():
    kb, _ = run_watcher(load_kb(ELEPHANTS))
    goals = [parse("(inst ?x ?y)"), parse("(color ?x ?y)")]
    for f in kb.facts:
        if f.provenance == WATCHER:
            assert all(unify(g, f.atom) is None for g in goals)
