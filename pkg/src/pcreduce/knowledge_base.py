"""The fact-base: ground facts plus Horn rules, as an immutable value."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .pc_core import (
    And, Atom, ForAll, Formula, If, Substitution,
    atom_vars, free_vars, is_ground, parse_many, render, unify,
)

ASSERTED = "asserted"
DERIVED = "derived"
WATCHER = "watcher"


class KnowledgeBaseError(ValueError):
    pass


@dataclass(frozen=True)
class Fact:
    atom: Atom
    provenance: str = ASSERTED
    generation: int = 0

    def __post_init__(self):
        if not is_ground(self.atom):
            raise KnowledgeBaseError(f"fact is not ground: {render(self.atom)}")


@dataclass(frozen=True)
class Rule:
    """``(forall vars (if (and antecedents...) consequent))``."""

    vars: tuple[str, ...]
    antecedents: tuple[Atom, ...]
    consequent: Atom
    source: Formula | None = field(default=None, compare=False)

    @property
    def label(self) -> str:
        return render(self.to_formula())

    def to_formula(self) -> Formula:
        if self.source is not None:
            return self.source
        ante = self.antecedents[0] if len(self.antecedents) == 1 else And(self.antecedents)
        return ForAll(self.vars, If(ante, self.consequent))


def rule_from_formula(f: Formula) -> Rule:
    """Convert a Horn-shaped formula into a Rule.

    Accepted: ``(forall (v...) (if A C))`` with nested ``forall`` flattened,
    where A is an atom or a conjunction of atoms and C is an atom.
    """
    source, names = f, []
    while isinstance(f, ForAll):
        names.extend(f.vars)
        f = f.body
    if not names or not isinstance(f, If):
        raise KnowledgeBaseError(f"unsupported for chaining: {render(source)}")
    ante, cons = f.antecedent, f.consequent
    if isinstance(ante, Atom):
        antecedents: tuple[Atom, ...] = (ante,)
    elif isinstance(ante, And) and all(isinstance(x, Atom) for x in ante.items):
        antecedents = ante.items
    else:
        raise KnowledgeBaseError(f"unsupported for chaining: {render(source)}")
    if not isinstance(cons, Atom):
        raise KnowledgeBaseError(f"unsupported for chaining: {render(source)}")
    if free_vars(source):
        raise KnowledgeBaseError(
            f"unsupported for chaining: free variables in {render(source)}")
    body_vars = {v for a in antecedents for v in atom_vars(a)}
    loose = [v for v in atom_vars(cons) if v not in body_vars]
    if loose:
        raise KnowledgeBaseError(
            f"unsupported for chaining: consequent variable {loose[0]} "
            f"does not occur in an antecedent")
    return Rule(tuple(dict.fromkeys(names)), antecedents, cons, source)


@dataclass(frozen=True)
class KbStats:
    fact_count: int
    rule_count: int
    predicate_names: tuple[str, ...]
    derived_count: int
    watcher_fact_count: int
    per_predicate: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class KnowledgeBase:
    facts: tuple[Fact, ...] = ()
    rules: tuple[Rule, ...] = ()
    next_generation: int = 1

    @cached_property
    def _atoms(self) -> frozenset[Atom]:
        return frozenset(f.atom for f in self.facts)

    @cached_property
    def _index(self) -> dict[str, tuple[Fact, ...]]:
        idx: dict[str, list[Fact]] = {}
        for f in self.facts:
            idx.setdefault(f.atom.predicate, []).append(f)
        return {k: tuple(v) for k, v in idx.items()}

    def __contains__(self, atom: Atom) -> bool:
        return atom in self._atoms

    def facts_for(self, predicate: str) -> tuple[Fact, ...]:
        return self._index.get(predicate, ())

    def with_facts(self, atoms: Iterable[Atom], provenance: str = ASSERTED,
                   generation: int = 0) -> KnowledgeBase:
        """Add many ground atoms at once; known atoms keep their first provenance."""
        seen = set(self._atoms)
        new = []
        for a in atoms:
            if a not in seen:
                seen.add(a)
                new.append(Fact(a, provenance, generation))
        if not new:
            return self
        return KnowledgeBase(self.facts + tuple(new), self.rules, self.next_generation)

    def with_rule(self, rule: Rule) -> KnowledgeBase:
        if rule in self.rules:
            return self
        return KnowledgeBase(self.facts, self.rules + (rule,), self.next_generation)

    def bump_generation(self) -> KnowledgeBase:
        return KnowledgeBase(self.facts, self.rules, self.next_generation + 1)


def assert_formula(kb: KnowledgeBase, f: Formula) -> KnowledgeBase:
    """Return a new KB holding ``f`` (a ground atom or a Horn rule).

    Asserting something already present returns ``kb`` itself.
    """
    if isinstance(f, Atom):
        if not is_ground(f):
            raise KnowledgeBaseError(f"cannot assert non-ground atom {render(f)}")
        return kb.with_facts([f])
    return kb.with_rule(rule_from_formula(f))


def facts_matching(kb: KnowledgeBase, pattern: Atom) -> list[tuple[Fact, dict]]:
    out = []
    for fact in kb.facts_for(pattern.predicate):
        s = unify(pattern, fact.atom)
        if s is not None:
            out.append((fact, s))
    return out


def stats(kb: KnowledgeBase) -> KbStats:
    per = Counter(f.atom.predicate for f in kb.facts)
    prov = Counter(f.provenance for f in kb.facts)
    return KbStats(
        fact_count=sum(per.values()),
        rule_count=len(kb.rules),
        predicate_names=tuple(sorted(per)),
        derived_count=prov[DERIVED],
        watcher_fact_count=prov[WATCHER],
        per_predicate=tuple(sorted(per.items())),
    )


def load_kb(text: str, kb: KnowledgeBase | None = None) -> KnowledgeBase:
    """Fold ``assert_formula`` over every formula in a KB file, in order."""
    kb = kb if kb is not None else KnowledgeBase()
    for f, offset in parse_many(text, closed=True):
        try:
            kb = assert_formula(kb, f)
        except KnowledgeBaseError as exc:
            line = text.encode("utf-8")[:offset].count(b"\n") + 1
            raise KnowledgeBaseError(f"error: {exc} at offset {offset} (line {line})") from None
    return kb


def dump_kb(kb: KnowledgeBase) -> str:
    """Serialize in KB file format: rules first, then facts in insertion order."""
    st = stats(kb)
    lines = [f"; {st.fact_count} facts, {st.rule_count} rules"]
    lines += [r.label for r in kb.rules]
    for f in kb.facts:
        line = render(f.atom)
        if f.provenance != ASSERTED:
            line += f" ; {f.provenance} gen {f.generation}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def match_all(kb: KnowledgeBase, patterns: Iterable[Atom],
              s: Substitution | None = None) -> list[tuple[dict, tuple[Fact, ...]]]:
    """Join ``patterns`` left to right against the facts of ``kb``."""
    partial: list[tuple[dict, tuple[Fact, ...]]] = [(dict(s or {}), ())]
    for p in patterns:
        nxt = []
        for sub, used in partial:
            for fact in kb.facts_for(p.predicate):
                s2 = unify(p, fact.atom, sub)
                if s2 is not None:
                    nxt.append((s2, used + (fact,)))
        partial = nxt
        if not partial:
            break
    return partial
