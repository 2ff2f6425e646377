"""Inference engine: backward chaining, forward chaining, result caching and
the semantic network of rule firings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .knowledge_base import (
    DERIVED, KnowledgeBase, Rule, facts_matching, match_all,
)
from .pc_core import (
    Atom, atom_vars, render, rename_atom, substitute_atom, unify,
)


@dataclass(frozen=True)
class ChainConfig:
    depth_limit: int = 32
    max_rounds: int = 64
    cache_derived: bool = True

    def __post_init__(self):
        if self.depth_limit < 1 or self.max_rounds < 1:
            raise ValueError("depth_limit and max_rounds must be >= 1")


@dataclass(frozen=True)
class ProofNode:
    """One step of a proof: ``atom`` holds because of ``rule`` (or is a fact
    when ``rule`` is None) applied to the proofs in ``children``."""

    atom: Atom
    rule: Rule | None = None
    children: tuple[ProofNode, ...] = ()

    @property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=0)

    def leaves(self) -> Iterator[Atom]:
        if not self.children:
            yield self.atom
        for c in self.children:
            yield from c.leaves()

    def render(self, indent: int = 0) -> str:
        why = "fact" if self.rule is None else f"rule {self.rule.label}"
        lines = [f"{'  ' * indent}{render(self.atom)}  <= {why}"]
        lines += [c.render(indent + 1) for c in self.children]
        return "\n".join(lines)


@dataclass(frozen=True)
class ProofResult:
    goal: Atom
    proven: bool
    bindings: tuple[dict, ...]
    answers: tuple[Atom, ...] = ()
    proofs: tuple[ProofNode, ...] = ()
    depth_limited: bool = False

    @property
    def proof_tree(self) -> ProofNode | None:
        return self.proofs[0] if self.proofs else None


def _canonical(goal: Atom) -> Atom:
    return rename_atom(goal, {v: f"?_{i}" for i, v in enumerate(atom_vars(goal))})


@dataclass
class _Prover:
    """Depth-bounded memoised SLD search.

    ``answers(g, d)`` is every ground instance of ``g`` with a proof tree of
    height at most ``d``. It depends only on the variant class of ``g`` and on
    ``d``, so it can be tabled without regard to the calling context, and the
    strictly decreasing ``d`` guarantees termination on cyclic rules.
    """

    kb: KnowledgeBase
    table: dict = field(default_factory=dict)
    counter: int = 0

    def rules_for(self, goal: Atom) -> list[Rule]:
        return [r for r in self.kb.rules
                if r.consequent.predicate == goal.predicate
                and r.consequent.arity == goal.arity]

    def answers(self, goal: Atom, d: int) -> tuple[dict[Atom, ProofNode], bool]:
        goal = _canonical(goal)
        key = (goal, d)
        if key in self.table:
            return self.table[key]
        if d > 1:
            prev = self.answers(goal, d - 1)
            if not prev[1]:
                # search at d-1 was exhaustive; more depth cannot help
                self.table[key] = prev
                return prev

        found: dict[Atom, ProofNode] = {}
        limited = False
        for fact, _ in facts_matching(self.kb, goal):
            found.setdefault(fact.atom, ProofNode(fact.atom))
        for rule in self.rules_for(goal):
            self.counter += 1
            tag = self.counter
            ren = {v: f"{v}#{tag}" for v in rule.vars}
            head = rename_atom(rule.consequent, ren)
            s = unify(head, goal)
            if s is None:
                continue
            if d <= 1:
                limited = True
                continue
            body = [rename_atom(a, ren) for a in rule.antecedents]
            cut = [False]
            for s2, kids in self._solve(body, s, d - 1, cut):
                atom = substitute_atom(goal, s2)
                found.setdefault(atom, ProofNode(atom, rule, kids))
            limited |= cut[0]
        result = (found, limited)
        self.table[key] = result
        return result

    def _solve(self, body: list[Atom], s: dict, d: int, cut: list[bool]):
        if not body:
            yield s, ()
            return
        first = substitute_atom(body[0], s)
        found, limited = self.answers(first, d)
        cut[0] |= limited
        for atom, node in found.items():
            s2 = unify(first, atom, s)
            if s2 is None:
                continue
            for s3, rest in self._solve(body[1:], s2, d, cut):
                yield s3, (node,) + rest


def backward_chain(kb: KnowledgeBase, goal: Atom,
                   cfg: ChainConfig = ChainConfig()) -> ProofResult:
    """Prove ``goal`` on demand from the facts and rules of ``kb``.

    Facts are tried before rules, rules in assertion order, antecedents left
    to right. Answers are ground instances of the goal, deduplicated, in
    discovery order; each carries its first-found proof.
    """
    prover = _Prover(kb)
    found, limited = prover.answers(goal, cfg.depth_limit)
    answers = tuple(found)
    gvars = atom_vars(goal)
    bindings = []
    for a in answers:
        s = unify(goal, a) or {}
        bindings.append({v: s[v] for v in gvars})
    return ProofResult(
        goal=goal,
        proven=bool(answers),
        bindings=tuple(bindings),
        answers=answers,
        proofs=tuple(found[a] for a in answers),
        depth_limited=limited,
    )


def show(kb: KnowledgeBase, goal: Atom,
         cfg: ChainConfig = ChainConfig()) -> tuple[ProofResult, KnowledgeBase]:
    """Backward-chain ``goal`` and, if configured, add the proven ground
    answers to the data-base as derived facts."""
    result = backward_chain(kb, goal, cfg)
    if not (cfg.cache_derived and result.proven):
        return result, kb
    new = kb.with_facts(result.answers, DERIVED, kb.next_generation)
    if new is kb:
        return result, kb
    return result, new.bump_generation()


@dataclass(frozen=True)
class Firing:
    rule: Rule
    premises: tuple[Atom, ...]
    conclusion: Atom


def firings(kb: KnowledgeBase) -> list[Firing]:
    """Every instantiation of every rule whose antecedents are all facts."""
    out = []
    for rule in kb.rules:
        for s, used in match_all(kb, rule.antecedents):
            out.append(Firing(rule, tuple(f.atom for f in used),
                              substitute_atom(rule.consequent, s)))
    return out


@dataclass(frozen=True)
class SaturationResult:
    kb: KnowledgeBase
    rounds: int
    reached_fixpoint: bool
    derived: tuple[Atom, ...]


def saturate(kb: KnowledgeBase, cfg: ChainConfig = ChainConfig()) -> SaturationResult:
    """Naive round-based forward chaining.

    Each round fires every rule against all current facts and adds the new
    conclusions at once. Stops at the fixpoint or after ``cfg.max_rounds``
    rounds that produced something.
    """
    derived: list[Atom] = []
    rounds = 0
    while True:
        fresh = []
        seen = set()
        for fr in firings(kb):
            c = fr.conclusion
            if c not in kb and c not in seen:
                seen.add(c)
                fresh.append(c)
        if not fresh:
            return SaturationResult(kb, rounds, True, tuple(derived))
        if rounds >= cfg.max_rounds:
            return SaturationResult(kb, rounds, False, tuple(derived))
        kb = kb.with_facts(fresh, DERIVED, kb.next_generation).bump_generation()
        derived.extend(fresh)
        rounds += 1


def forward_chain(kb: KnowledgeBase, cfg: ChainConfig = ChainConfig()) -> KnowledgeBase:
    return saturate(kb, cfg).kb


@dataclass(frozen=True)
class Edge:
    premise: Atom
    conclusion: Atom
    rule: Rule


@dataclass(frozen=True)
class Network:
    nodes: tuple[Atom, ...]
    edges: tuple[Edge, ...]
    loop_nodes: frozenset[Atom]

    def successors(self, a: Atom) -> list[Atom]:
        return [e.conclusion for e in self.edges if e.premise == a]


def _on_cycle(nodes, adj) -> set:
    on = set()
    for start in nodes:
        stack, seen = list(adj.get(start, ())), set()
        while stack:
            n = stack.pop()
            if n == start:
                on.add(start)
                break
            if n in seen:
                continue
            seen.add(n)
            stack.extend(adj.get(n, ()))
    return on


def semantic_network(kb: KnowledgeBase, cfg: ChainConfig = ChainConfig()) -> Network:
    """Link the facts of the saturated data-base through rule firings.

    Nodes are the facts of the forward-chaining fixpoint; every firing with
    premises P and conclusion c contributes edges P -> c. Nodes lying on a
    directed cycle are reported as loop nodes.
    """
    full = forward_chain(kb, cfg)
    nodes = tuple(f.atom for f in full.facts)
    edges: dict[tuple[Atom, Atom], Edge] = {}
    for fr in firings(full):
        for p in fr.premises:
            edges.setdefault((p, fr.conclusion), Edge(p, fr.conclusion, fr.rule))
    adj: dict[Atom, list[Atom]] = {}
    for p, c in edges:
        adj.setdefault(p, []).append(c)
    return Network(nodes, tuple(edges.values()), frozenset(_on_cycle(nodes, adj)))
