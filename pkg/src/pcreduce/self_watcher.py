"""Self-watcher: record descriptions of the data-base inside the data-base.

Each tick takes a snapshot of the data-base as it stands *before* the tick
and stores that snapshot as ordinary facts. Once a snapshot contains facts
left by an earlier snapshot, the watcher adds ``(have-impression-of mind)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .knowledge_base import WATCHER, KnowledgeBase, stats
from .pc_core import Atom, Const

AWARENESS = Atom("have-impression-of", (Const("mind"),))
RESERVED_PREFIXES = ("db-", "watcher-", "have-impression-of")


@dataclass(frozen=True)
class WatcherConfig:
    max_generations: int = 4
    awareness_threshold: int = 2
    emit_fact_count: bool = True
    emit_rule_count: bool = True
    emit_has_predicate: bool = True
    emit_generation: bool = True

    def __post_init__(self):
        # max_generations < awareness_threshold is allowed: awareness is then
        # simply unreachable.
        if self.max_generations < 1 or self.awareness_threshold < 1:
            raise ValueError("max_generations and awareness_threshold must be >= 1")


@dataclass(frozen=True)
class WatcherReport:
    generations_run: int
    facts_emitted_per_generation: tuple[int, ...]
    awareness_emitted: bool
    awareness_generation: int | None = None
    observed_fact_counts: tuple[int, ...] = ()

    def render(self) -> str:
        lines = [
            f"generation {g}: observed {seen} facts, emitted {n}"
            for g, (seen, n) in enumerate(
                zip(self.observed_fact_counts, self.facts_emitted_per_generation), 1)
        ]
        if self.awareness_emitted:
            lines.append(f"awareness: (have-impression-of mind) at generation "
                         f"{self.awareness_generation}")
        else:
            lines.append("awareness: none")
        return "\n".join(lines)


def snapshot_atoms(kb: KnowledgeBase, gen: int, cfg: WatcherConfig) -> list[Atom]:
    st = stats(kb)
    out = []
    if cfg.emit_fact_count:
        out.append(Atom("db-fact-count", (Const(str(st.fact_count)),)))
    if cfg.emit_rule_count:
        out.append(Atom("db-rule-count", (Const(str(st.rule_count)),)))
    if cfg.emit_has_predicate:
        out += [Atom("db-has-predicate", (Const(p),)) for p in st.predicate_names]
    if cfg.emit_generation:
        out.append(Atom("watcher-generation", (Const(str(gen)),)))
    return out


def watch_tick(kb: KnowledgeBase, gen: int, cfg: WatcherConfig = WatcherConfig()) -> KnowledgeBase:
    if gen < 1:
        raise ValueError("generation must be >= 1")
    return kb.with_facts(snapshot_atoms(kb, gen, cfg), WATCHER, gen)


def run_watcher(kb: KnowledgeBase,
                cfg: WatcherConfig = WatcherConfig()) -> tuple[KnowledgeBase, WatcherReport]:
    emitted, observed = [], []
    aware_at = None
    for gen in range(1, cfg.max_generations + 1):
        before = stats(kb)
        after = watch_tick(kb, gen, cfg)
        emitted.append(len(after.facts) - len(kb.facts))
        observed.append(before.fact_count)
        if aware_at is None and gen >= cfg.awareness_threshold and before.watcher_fact_count > 0:
            after = after.with_facts([AWARENESS], WATCHER, gen)
            aware_at = gen
        kb = after
    report = WatcherReport(
        generations_run=cfg.max_generations,
        facts_emitted_per_generation=tuple(emitted),
        awareness_emitted=aware_at is not None,
        awareness_generation=aware_at,
        observed_fact_counts=tuple(observed),
    )
    return kb, report
