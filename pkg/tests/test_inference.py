import random

import pytest
from hypothesis import given, settings, strategies as st

from pcreduce.inference import (
    ChainConfig, backward_chain, forward_chain, saturate, semantic_network, show,
)
from pcreduce.knowledge_base import DERIVED, KnowledgeBase, load_kb, stats
from pcreduce.pc_core import Const, parse

from oracles import (
    atom_t, herbrand_base, kb_tuples, naive_fixpoint, on_cycle_by_paths,
    random_horn_kb, to_atom,
)

ELEPHANTS = """
(forall (z) (if (inst z elephant) (color z gray)))
(inst Clyde elephant)
"""


@pytest.fixture
def elephants():
    return load_kb(ELEPHANTS)


def test_clyde_is_gray(elephants):
    res = backward_chain(elephants, parse("(color Clyde gray)"))
    assert res.proven
    assert res.bindings == ({},)
    tree = res.proof_tree
    assert tree.rule is elephants.rules[0]
    assert [c.atom for c in tree.children] == [parse("(inst Clyde elephant)")]
    assert tree.children[0].rule is None
    assert tree.depth == 2


def test_clyde_is_not_pink(elephants):
    res = backward_chain(elephants, parse("(color Clyde pink)"))
    assert not res.proven
    assert not res.depth_limited


def test_unknown_predicate_fails(elephants):
    assert not backward_chain(elephants, parse("(weighs Clyde ?w)")).proven


def test_variable_goal(elephants):
    res = backward_chain(elephants, parse("(color ?x ?c)"))
    assert res.bindings == ({"?x": Const("Clyde"), "?c": Const("gray")},)


def test_circular_rule_terminates():
    kb = load_kb("(forall (x) (if (p x) (p x)))\n")
    res = backward_chain(kb, parse("(p a)"))
    assert not res.proven
    assert res.depth_limited


def test_depth_limit_cuts_long_chain():
    # chain p0 -> p1 -> ... -> p5 needs a proof of height 6
    lines = ["(p0 a)"] + [f"(forall (x) (if (p{i} x) (p{i + 1} x)))" for i in range(5)]
    kb = load_kb("\n".join(lines))
    assert backward_chain(kb, parse("(p5 a)"), ChainConfig(depth_limit=6)).proven
    short = backward_chain(kb, parse("(p5 a)"), ChainConfig(depth_limit=5))
    assert not short.proven and short.depth_limited


def test_left_recursion_complete():
    kb = load_kb("""
    (edge a b) (edge b c) (edge c d)
    (forall (x y) (if (edge x y) (path x y)))
    (forall (x y z) (if (and (path x y) (edge y z)) (path x z)))
    """)
    res = backward_chain(kb, parse("(path a ?t)"))
    assert sorted(b["?t"].name for b in res.bindings) == ["b", "c", "d"]


def test_proof_leaves_are_facts():
    kb = load_kb("""
    (edge a b) (edge b c)
    (forall (x y) (if (edge x y) (path x y)))
    (forall (x y z) (if (and (edge x y) (path y z)) (path x z)))
    """)
    res = backward_chain(kb, parse("(path a c)"))
    facts = {f.atom for f in kb.facts}
    for tree in res.proofs:
        assert set(tree.leaves()) <= facts


def test_show_caches(elephants):
    res, kb2 = show(elephants, parse("(color Clyde gray)"))
    assert res.proven
    derived = [f for f in kb2.facts if f.provenance == DERIVED]
    assert [f.atom for f in derived] == [parse("(color Clyde gray)")]
    assert parse("(color Clyde gray)") not in elephants


def test_show_unprovable_leaves_kb(elephants):
    _, kb2 = show(elephants, parse("(color Clyde pink)"))
    assert kb2 is elephants


def test_show_without_cache(elephants):
    _, kb2 = show(elephants, parse("(color Clyde gray)"), ChainConfig(cache_derived=False))
    assert kb2 is elephants


def test_show_twice_uses_cached_fact(elephants):
    first, kb2 = show(elephants, parse("(color Clyde gray)"))
    second, kb3 = show(kb2, parse("(color Clyde gray)"))
    assert first.proof_tree.depth == 2
    assert second.proof_tree.depth == 1
    assert kb3 is kb2


def test_forward_chain_elephant(elephants):
    res = saturate(elephants)
    assert res.derived == (parse("(color Clyde gray)"),)
    assert res.reached_fixpoint


def test_forward_chain_no_rules():
    kb = load_kb("(p a)\n(q b)\n")
    res = saturate(kb)
    assert res.kb is kb and res.rounds == 0


def test_forward_chain_two_steps_matches_oracle():
    kb = load_kb("""
    (a-shaped k)
    (forall (x) (if (a-shaped x) (b-shaped x)))
    (forall (x) (if (b-shaped x) (c-shaped x)))
    """)
    facts, rules = kb_tuples(kb)
    fixed = forward_chain(kb)
    assert {atom_t(f.atom) for f in fixed.facts} == naive_fixpoint(facts, rules)
    assert saturate(kb).rounds == 2


def test_forward_chain_idempotent(elephants):
    once = forward_chain(elephants)
    assert forward_chain(once) is once


def test_max_rounds_flagged():
    kb = load_kb("(n z)\n(forall (x) (if (n x) (n (s x))))\n")
    res = saturate(kb, ChainConfig(max_rounds=3))
    assert not res.reached_fixpoint
    assert res.rounds == 3
    assert len(res.derived) == 3


@pytest.mark.parametrize("seed", range(30))
def test_forward_matches_naive_oracle(seed):
    kb = load_kb(random_horn_kb(random.Random(seed)).text)
    facts, rules = kb_tuples(kb)
    got = {atom_t(f.atom) for f in forward_chain(kb).facts}
    assert got == naive_fixpoint(facts, rules)


@pytest.mark.parametrize("seed", range(30))
def test_show_is_conservative(seed):
    rng = random.Random(1000 + seed)
    rk = random_horn_kb(rng)
    kb = load_kb(rk.text)
    p = rng.choice(sorted(rk.preds))
    goal = parse(f"({p} {' '.join('?v%d' % i for i in range(rk.preds[p]))})")
    res, kb2 = show(kb, goal)
    added = {f.atom for f in kb2.facts} - {f.atom for f in kb.facts}
    assert added <= set(res.answers)
    assert backward_chain(kb, goal) == res  # determinism


def test_semantic_network_elephant(elephants):
    net = semantic_network(elephants)
    assert [(str(e.premise), str(e.conclusion)) for e in net.edges] == \
        [("(inst Clyde elephant)", "(color Clyde gray)")]
    assert not net.loop_nodes


def test_semantic_network_empty():
    net = semantic_network(KnowledgeBase())
    assert net.nodes == () and net.edges == () and not net.loop_nodes


def test_semantic_network_loop():
    kb = load_kb("""
    (p a)
    (forall (x) (if (p x) (q x)))
    (forall (x) (if (q x) (p x)))
    """)
    net = semantic_network(kb)
    assert net.loop_nodes == {parse("(p a)"), parse("(q a)")}
    edges = {(e.premise, e.conclusion) for e in net.edges}
    assert on_cycle_by_paths(net.nodes, edges) == net.loop_nodes


@pytest.mark.parametrize("seed", range(30))
def test_loop_nodes_match_path_enumeration(seed):
    kb = load_kb(random_horn_kb(random.Random(2000 + seed)).text)
    net = semantic_network(kb)
    edges = {(e.premise, e.conclusion) for e in net.edges}
    assert on_cycle_by_paths(net.nodes, edges) == set(net.loop_nodes)


@pytest.mark.parametrize("seed", range(25))
def test_backward_forward_agree(seed):
    rk = random_horn_kb(random.Random(3000 + seed))
    kb = load_kb(rk.text)
    fixed = {atom_t(f.atom) for f in forward_chain(kb).facts}
    for t in herbrand_base(rk.preds, rk.consts):
        assert backward_chain(kb, to_atom(t)).proven == (t in fixed), t


def test_derived_facts_in_herbrand_base():
    rk = random_horn_kb(random.Random(7))
    kb = load_kb(rk.text)
    base = set(herbrand_base(rk.preds, rk.consts))
    assert {atom_t(f.atom) for f in forward_chain(kb).facts} <= base
    assert stats(forward_chain(kb)).fact_count >= stats(kb).fact_count


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(0, 100_000))
def test_forward_chain_monotone(seed, extra_seed):
    rk = random_horn_kb(random.Random(seed))
    kb = load_kb(rk.text)
    rng = random.Random(extra_seed)
    p = rng.choice(sorted(rk.preds))
    extra = parse(f"({p} {' '.join(rng.choice(rk.consts) for _ in range(rk.preds[p]))})")
    bigger = kb.with_facts([extra])
    small = {f.atom for f in forward_chain(kb).facts}
    assert small <= {f.atom for f in forward_chain(bigger).facts}
    once = forward_chain(kb)
    assert forward_chain(once) is once
