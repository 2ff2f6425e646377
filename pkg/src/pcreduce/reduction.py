"""Finite-model checks for inter-theory reductions.

A reduction spec names two theories (the first is the reduced theory, the
second the reducing theory), a set of generalizations stated in one or both
of them, and a table of bridge laws. Each bridge law is a named function;
one ``bridge`` clause gives one point of its table::

    (bridge f1 (args x1 x2) (to y1))

Theories are either *abstract* (sentences are token sequences and
explanations are declared) or *concrete* (sentences are Horn formulas and
explanations are searched for by subset enumeration and backward chaining).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .inference import ChainConfig, backward_chain
from .knowledge_base import KnowledgeBase, KnowledgeBaseError, assert_formula, rule_from_formula
from .pc_core import (
    KEYWORDS, And, Atom, Const, ForAll, Formula, If, ParseError, SList, Sym,
    formula_from_sexpr, is_ground, read_sexprs, render, substitute_atom, symbols,
)

ABSTRACT = "abstract"
CONCRETE = "concrete"
DEFAULT_CAP = 4
MAX_CAP = 6
DEFAULT_CONNECTIVES = tuple(sorted(KEYWORDS))


class SpecError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.message = message
        self.line = line
        where = f" at line {line}" if line is not None else ""
        super().__init__(f"error: {message}{where}")


class ReductionError(ValueError):
    pass


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[str, ...]
    concrete_form: Formula | None = None


@dataclass(frozen=True)
class Theory:
    id: str
    mode: str
    vocabulary: tuple[str, ...]
    sentences: tuple[Sentence, ...]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.sentences)

    def sentence(self, sid: str) -> Sentence:
        for s in self.sentences:
            if s.id == sid:
                return s
        raise KeyError(sid)


@dataclass(frozen=True)
class Statement:
    """A generalization as written in the vocabulary of one theory."""

    theory: str
    tokens: tuple[str, ...]
    concrete_form: Formula | None = None
    explained_by: tuple[frozenset[str], ...] = ()


@dataclass(frozen=True)
class Generalization:
    id: str
    statements: tuple[Statement, ...]

    def statement_in(self, theory_id: str) -> Statement | None:
        for st in self.statements:
            if st.theory == theory_id:
                return st
        return None

    @property
    def declared_explanations(self) -> dict[str, tuple[frozenset[str], ...]]:
        return {st.theory: st.explained_by for st in self.statements if st.explained_by}


@dataclass(frozen=True)
class BridgeLaw:
    id: str
    args: tuple[str, ...]
    output: str


@dataclass(frozen=True)
class Reduction:
    laws: tuple[BridgeLaw, ...]
    vocab_map: tuple[tuple[str, tuple[str, ...]], ...] | None = None

    def vocab_dict(self) -> dict[str, tuple[str, ...]]:
        return dict(self.vocab_map or ())


@dataclass(frozen=True)
class ReductionSpec:
    reduced: Theory
    reducing: Theory
    generalizations: tuple[Generalization, ...]
    reduction: Reduction
    connectives: tuple[str, ...] = DEFAULT_CONNECTIVES


@dataclass(frozen=True)
class ExplanationResult:
    status: str  # none | unique | ambiguous
    subsets: tuple[frozenset[str], ...] = ()

    @property
    def explanation(self) -> frozenset[str] | None:
        return self.subsets[0] if self.status == "unique" else None


@dataclass(frozen=True)
class StructuralReport:
    is_map: bool
    uncovered_reduced: tuple[str, ...]
    conflicts: tuple[tuple[str, tuple[str, ...], tuple[str, ...]], ...]
    injective: bool
    collisions: tuple[tuple[str, tuple[tuple[str, ...], ...]], ...]
    onto: bool
    uncovered_reducing: tuple[str, ...]

    @property
    def requirements_met(self) -> bool:
        return self.is_map and not self.onto


@dataclass(frozen=True)
class Fusion:
    generalization: str
    reason: str  # "a": translated explanations collapse; "b": content lost
    detail: str


@dataclass(frozen=True)
class ReductionReport:
    reduced: str
    reducing: str
    structure: StructuralReport
    explanations: tuple[tuple[str, ExplanationResult], ...]
    e_bijective_in_reduced: bool
    e_witnesses: tuple[str, ...]
    translated: tuple[tuple[str, frozenset[str]], ...]
    fused: tuple[Fusion, ...]
    preserves_nn: bool
    vocab_map_total: bool
    classification: str
    reasons: tuple[str, ...] = field(default=())


# --------------------------------------------------------------------------
# loading


def _line_of(text: str, offset: int) -> int:
    return text.encode("utf-8")[:offset].count(b"\n") + 1


class _Loader:
    def __init__(self, text: str):
        self.text = text
        self.connectives: tuple[str, ...] = DEFAULT_CONNECTIVES

    def line(self, node) -> int:
        return _line_of(self.text, node.offset)

    def fail(self, msg: str, node) -> SpecError:
        return SpecError(msg, self.line(node))

    def head(self, node) -> str | None:
        if isinstance(node, SList) and isinstance(node.items[0], Sym):
            return node.items[0].text
        return None

    def sym(self, node, what: str) -> str:
        if not isinstance(node, Sym):
            raise self.fail(f"{what} must be a symbol", node)
        return node.text

    def syms(self, nodes, what: str) -> list[str]:
        return [self.sym(n, what) for n in nodes]

    def clauses(self, node: SList, start: int) -> dict[str, SList]:
        out = {}
        for item in node.items[start:]:
            key = self.head(item)
            if key is None:
                raise self.fail("expected a (keyword ...) clause", item)
            if key in out:
                raise self.fail(f"duplicate clause {key}", item)
            out[key] = item
        return out

    def body(self, items, mode: str, vocab: set[str], where: str, node):
        """Tokens or formula, checked against mode and vocabulary."""
        if not items:
            raise self.fail(f"{where}: empty statement", node)
        if mode == CONCRETE:
            if len(items) != 1 or not isinstance(items[0], SList):
                raise self.fail(f"{where}: concrete theory requires a formula "
                                f"(mode mixing)", node)
            try:
                f = formula_from_sexpr(items[0], self.text, closed=True)
            except ParseError as exc:
                raise SpecError(exc.message, _line_of(self.text, exc.offset)) from None
            unknown = sorted(symbols(f) - vocab)
            if unknown:
                raise self.fail(f"{where}: unknown vocabulary symbol {unknown[0]}", items[0])
            tokens = tuple(render(f).replace("(", " ").replace(")", " ").split())
            return tokens, f
        if any(isinstance(x, SList) for x in items):
            raise self.fail(f"{where}: abstract theory takes tokens, not formulas "
                            f"(mode mixing)", node)
        tokens = tuple(x.text for x in items)
        for t, x in zip(tokens, items):
            if t not in vocab and t not in self.connectives:
                raise self.fail(f"{where}: unknown vocabulary symbol {t}", x)
        return tokens, None

    def theory(self, node: SList) -> Theory:
        if len(node.items) < 2:
            raise self.fail("theory needs an id", node)
        tid = self.sym(node.items[1], "theory id")
        cl = self.clauses(node, 2)
        for key in ("mode", "vocabulary", "sentences"):
            if key not in cl:
                raise self.fail(f"theory {tid}: missing ({key} ...)", node)
        unknown = set(cl) - {"mode", "vocabulary", "sentences"}
        if unknown:
            raise self.fail(f"theory {tid}: unknown clause {sorted(unknown)[0]}", cl[sorted(unknown)[0]])

        mode_items = cl["mode"].items[1:]
        if len(mode_items) != 1 or self.sym(mode_items[0], "mode") not in (ABSTRACT, CONCRETE):
            raise self.fail(f"theory {tid}: mode must be abstract or concrete", cl["mode"])
        mode = mode_items[0].text

        vocab = self.syms(cl["vocabulary"].items[1:], "vocabulary entry")
        if not vocab:
            raise self.fail(f"theory {tid}: empty vocabulary", cl["vocabulary"])
        if len(set(vocab)) != len(vocab):
            dup = next(v for v in vocab if vocab.count(v) > 1)
            raise self.fail(f"theory {tid}: duplicate vocabulary symbol {dup}", cl["vocabulary"])

        sentences = []
        for item in cl["sentences"].items[1:]:
            if not isinstance(item, SList):
                raise self.fail("sentence must be (id ...)", item)
            sid = self.sym(item.items[0], "sentence id")
            if any(s.id == sid for s in sentences):
                raise self.fail(f"theory {tid}: duplicate sentence id {sid}", item)
            tokens, form = self.body(item.items[1:], mode, set(vocab), f"sentence {sid}", item)
            if form is not None:
                try:
                    assert_formula(KnowledgeBase(), form)
                except KnowledgeBaseError as exc:
                    raise self.fail(f"sentence {sid}: {exc}", item) from None
            sentences.append(Sentence(sid, tokens, form))
        if not sentences:
            raise self.fail(f"theory {tid}: empty sentence list", cl["sentences"])
        return Theory(tid, mode, tuple(vocab), tuple(sentences))

    def generalizations(self, node: SList, theories: dict[str, Theory]) -> list[Generalization]:
        out: list[Generalization] = []
        for item in node.items[1:]:
            if not isinstance(item, SList) or len(item.items) < 2:
                raise self.fail("generalization must be (id (in ...)...)", item)
            gid = self.sym(item.items[0], "generalization id")
            if any(g.id == gid for g in out):
                raise self.fail(f"duplicate generalization id {gid}", item)
            stmts = []
            for clause in item.items[1:]:
                if self.head(clause) != "in" or len(clause.items) < 3:
                    raise self.fail(f"generalization {gid}: expected (in <theory> ...)", clause)
                tid = self.sym(clause.items[1], "theory id")
                if tid not in theories:
                    raise self.fail(f"generalization {gid}: unknown theory {tid}", clause)
                if any(s.theory == tid for s in stmts):
                    raise self.fail(f"generalization {gid}: stated twice in {tid}", clause)
                th = theories[tid]
                rest = list(clause.items[2:])
                explained = []
                while rest and self.head(rest[-1]) == "explained-by":
                    explained.insert(0, rest.pop())
                if explained and th.mode == CONCRETE:
                    raise self.fail(f"generalization {gid}: explained-by is only for "
                                    f"abstract theories (mode mixing)", explained[0])
                subsets = []
                for ex in explained:
                    ids = self.syms(ex.items[1:], "sentence id")
                    for sid in ids:
                        if sid not in th.ids:
                            raise self.fail(f"generalization {gid}: unknown sentence {sid} "
                                            f"in theory {tid}", ex)
                    subsets.append(frozenset(ids))
                tokens, form = self.body(rest, th.mode, set(th.vocabulary),
                                         f"generalization {gid}", clause)
                for s in th.sentences:
                    same = (s.concrete_form == form) if form is not None else (s.tokens == tokens)
                    if same:
                        raise self.fail(f"generalization {gid} is a sentence ({s.id}) "
                                        f"of theory {tid}", clause)
                stmts.append(Statement(tid, tokens, form,
                                       tuple(sorted(set(subsets), key=sorted))))
            out.append(Generalization(gid, tuple(stmts)))
        return out

    def reduction(self, node: SList, t1: Theory, t0: Theory) -> Reduction:
        laws: list[BridgeLaw] = []
        vmap = None
        for item in node.items[1:]:
            key = self.head(item)
            if key == "vocab-map":
                if vmap is not None:
                    raise self.fail("duplicate vocab-map", item)
                vmap = {}
                for pair in item.items[1:]:
                    if not isinstance(pair, SList) or len(pair.items) < 2:
                        raise self.fail("vocab-map entry must be (A B...)", pair)
                    a = self.sym(pair.items[0], "vocabulary symbol")
                    bs = tuple(self.syms(pair.items[1:], "vocabulary symbol"))
                    if a not in t1.vocabulary:
                        raise self.fail(f"vocab-map: unknown vocabulary symbol {a} "
                                        f"in theory {t1.id}", pair)
                    for b in bs:
                        if b not in t0.vocabulary:
                            raise self.fail(f"vocab-map: unknown vocabulary symbol {b} "
                                            f"in theory {t0.id}", pair)
                    if a in vmap:
                        raise self.fail(f"vocab-map: {a} mapped twice", pair)
                    vmap[a] = bs
            elif key == "bridge":
                if len(item.items) < 2:
                    raise self.fail("bridge needs an id", item)
                bid = self.sym(item.items[1], "bridge id")
                cl = self.clauses(item, 2)
                if set(cl) != {"args", "to"}:
                    raise self.fail(f"bridge {bid}: expected (args ...) and (to ...)", item)
                args = tuple(self.syms(cl["args"].items[1:], "sentence id"))
                if not args:
                    raise self.fail(f"bridge {bid}: empty argument tuple", cl["args"])
                for sid in args:
                    if sid not in t1.ids:
                        raise self.fail(f"bridge {bid}: unknown sentence {sid} "
                                        f"in theory {t1.id}", cl["args"])
                to = self.syms(cl["to"].items[1:], "sentence id")
                if len(to) != 1:
                    raise self.fail(f"bridge {bid}: exactly one output sentence", cl["to"])
                if to[0] not in t0.ids:
                    raise self.fail(f"bridge {bid}: unknown sentence {to[0]} "
                                    f"in theory {t0.id}", cl["to"])
                law = BridgeLaw(bid, args, to[0])
                if law in laws:
                    raise self.fail(f"bridge {bid}: duplicate clause", item)
                laws.append(law)
            else:
                raise self.fail("reduction holds vocab-map and bridge clauses only", item)
        if not laws:
            raise self.fail("reduction has no bridge laws", node)
        vm = None if vmap is None else tuple(sorted(vmap.items()))
        return Reduction(tuple(laws), vm)

    def load(self) -> ReductionSpec:
        try:
            nodes = read_sexprs(self.text)
        except ParseError as exc:
            raise SpecError(exc.message, _line_of(self.text, exc.offset)) from None
        theories: list[Theory] = []
        gen_node = red_node = None
        for node in nodes:
            key = self.head(node)
            if key == "connectives":
                self.connectives = tuple(self.syms(node.items[1:], "connective"))
            elif key == "theory":
                pass
            elif key == "generalizations":
                if gen_node is not None:
                    raise self.fail("duplicate generalizations block", node)
                gen_node = node
            elif key == "reduction":
                if red_node is not None:
                    raise self.fail("duplicate reduction block", node)
                red_node = node
            else:
                raise self.fail("expected theory, generalizations or reduction", node)
        for node in nodes:
            if self.head(node) == "theory":
                th = self.theory(node)
                if any(t.id == th.id for t in theories):
                    raise self.fail(f"duplicate theory id {th.id}", node)
                theories.append(th)
        if len(theories) != 2:
            raise SpecError(f"expected exactly 2 theories, found {len(theories)}")
        t1, t0 = theories
        by_id = {t.id: t for t in theories}
        gens = self.generalizations(gen_node, by_id) if gen_node is not None else []
        if red_node is None:
            raise SpecError("missing reduction block")
        red = self.reduction(red_node, t1, t0)
        return ReductionSpec(t1, t0, tuple(gens), red, self.connectives)


def load_reduction_spec(text: str) -> ReductionSpec:
    """Parse and validate a reduction spec file; errors carry line numbers."""
    return _Loader(text).load()


# --------------------------------------------------------------------------
# structure of the bridge-law relation


def structural_report(R: Reduction, T1: Theory, T0: Theory) -> StructuralReport:
    covered = {x for law in R.laws for x in law.args}
    uncovered1 = tuple(x for x in T1.ids if x not in covered)

    table: dict[tuple[str, tuple[str, ...]], set[str]] = defaultdict(set)
    for law in R.laws:
        table[law.id, law.args].add(law.output)
    conflicts = tuple((fid, args, tuple(sorted(outs)))
                      for (fid, args), outs in table.items() if len(outs) > 1)

    preimages: dict[str, set[tuple[str, ...]]] = defaultdict(set)
    for law in R.laws:
        preimages[law.output].add(law.args)
    collisions = tuple((y, tuple(sorted(preimages[y])))
                       for y in T0.ids if len(preimages.get(y, ())) > 1)

    uncovered0 = tuple(y for y in T0.ids if y not in preimages)
    return StructuralReport(
        is_map=not uncovered1 and not conflicts,
        uncovered_reduced=uncovered1,
        conflicts=conflicts,
        injective=not collisions,
        collisions=collisions,
        onto=not uncovered0,
        uncovered_reducing=uncovered0,
    )


def translate_explanation(R: Reduction, X: Iterable[str]) -> frozenset[str]:
    """Outputs of every bridge law whose whole argument tuple lies inside X."""
    X = set(X)
    return frozenset(law.output for law in R.laws if set(law.args) <= X)


# --------------------------------------------------------------------------
# explanation


def _check_cap(cap: int) -> None:
    if not 1 <= cap <= MAX_CAP:
        raise ValueError(f"cap must be between 1 and {MAX_CAP}")


def proves(kb: KnowledgeBase, form: Formula, cfg: ChainConfig = ChainConfig()) -> bool:
    """Whether ``kb`` derives ``form``.

    Ground atoms and conjunctions of them are proved directly. A Horn rule is
    proved by instantiating its variables with fresh constants, adding the
    antecedents as facts and proving the consequent.
    """
    if isinstance(form, Atom):
        if not is_ground(form):
            raise ReductionError(f"cannot prove open atom {render(form)}")
        return backward_chain(kb, form, cfg).proven
    if isinstance(form, And):
        return all(proves(kb, x, cfg) for x in form.items)
    if isinstance(form, (ForAll, If)):
        try:
            rule = rule_from_formula(form)
        except KnowledgeBaseError as exc:
            raise ReductionError(str(exc)) from None
        fresh = {v: Const(f"sk!{v}") for v in rule.vars}
        hyp = kb.with_facts(substitute_atom(a, fresh) for a in rule.antecedents)
        return backward_chain(hyp, substitute_atom(rule.consequent, fresh), cfg).proven
    raise ReductionError(f"unsupported generalization form {render(form)}")


def derives(T: Theory, ids: Iterable[str], form: Formula,
            cfg: ChainConfig = ChainConfig()) -> bool:
    kb = KnowledgeBase()
    for sid in sorted(ids):
        kb = assert_formula(kb, T.sentence(sid).concrete_form)
    return proves(kb, form, cfg)


def _canonical(subsets: Iterable[frozenset[str]]) -> tuple[frozenset[str], ...]:
    return tuple(sorted(set(subsets), key=lambda s: tuple(sorted(s))))


def _result(subsets: Sequence[frozenset[str]]) -> ExplanationResult:
    subsets = _canonical(subsets)
    status = "none" if not subsets else "unique" if len(subsets) == 1 else "ambiguous"
    return ExplanationResult(status, subsets)


def explain(g: Generalization, T: Theory, cap: int = DEFAULT_CAP,
            cfg: ChainConfig = ChainConfig()) -> ExplanationResult:
    """Minimal subsets of T's sentences from which ``g`` follows.

    Abstract theories use the declared explanations. Concrete theories
    enumerate every subset of at most ``cap`` sentences, smallest first,
    skipping supersets of subsets that already work.
    """
    _check_cap(cap)
    st = g.statement_in(T.id)
    if st is None:
        raise ReductionError(f"generalization {g.id} is not stated in theory {T.id}")
    if T.mode == ABSTRACT:
        return _result(st.explained_by)
    if st.concrete_form is None:
        raise ReductionError(f"generalization {g.id} has no formula in theory {T.id}")
    minimal: list[frozenset[str]] = []
    ids = sorted(T.ids)
    for k in range(0, min(cap, len(ids)) + 1):
        for combo in combinations(ids, k):
            cand = frozenset(combo)
            if any(m <= cand for m in minimal):
                continue
            if derives(T, cand, st.concrete_form, cfg):
                minimal.append(cand)
    return _result(minimal)


def nomologically_necessary(g: Generalization, T: Theory, cap: int = DEFAULT_CAP) -> bool:
    return explain(g, T, cap).status == "unique"


def _stated(G: Iterable[Generalization], T: Theory) -> list[Generalization]:
    return [g for g in G if g.statement_in(T.id) is not None]


def explanatory_power(T: Theory, G: Sequence[Generalization],
                      cap: int = DEFAULT_CAP) -> tuple[bool, list[str]]:
    failing = [g.id for g in _stated(G, T) if not nomologically_necessary(g, T, cap)]
    return not failing, failing


def check_e_bijective(T: Theory, G: Sequence[Generalization],
                      cap: int = DEFAULT_CAP) -> tuple[bool, list[str]]:
    """Every generalization has exactly one explanation and no two share it."""
    witnesses = []
    owner: dict[frozenset[str], str] = {}
    for g in _stated(G, T):
        res = explain(g, T, cap)
        if res.status != "unique":
            witnesses.append(f"{g.id}: explanation {res.status}")
            continue
        x = res.explanation
        if x in owner:
            witnesses.append(f"{owner[x]} and {g.id} share explanation {fmt_set(x)}")
        else:
            owner[x] = g.id
    return not witnesses, witnesses


# --------------------------------------------------------------------------
# fusion and preservation of nomological necessity


def _translated(R: Reduction, T1: Theory, G, cap) -> dict[str, frozenset[str]]:
    out = {}
    for g in _stated(G, T1):
        res = explain(g, T1, cap)
        if res.status == "unique":
            out[g.id] = translate_explanation(R, res.explanation)
    return out


def _explains_in(T0: Theory, g: Generalization, Y: frozenset[str]) -> bool:
    st = g.statement_in(T0.id)
    if st is None:
        return False
    if T0.mode == ABSTRACT:
        return Y in st.explained_by
    return derives(T0, Y, st.concrete_form)


def detect_fusion(R: Reduction, T1: Theory, T0: Theory,
                  G: Sequence[Generalization], cap: int = DEFAULT_CAP) -> list[Fusion]:
    """Generalizations left degenerate by the reduction.

    Reason ``a``: two generalizations with different explanations in T1 end
    up with the same translated explanation. Reason ``b`` (concrete T0
    only): the translated explanation no longer derives the generalization.
    """
    images = _translated(R, T1, G, cap)
    found = []
    for g in G:
        if g.id not in images:
            continue
        Y = images[g.id]
        twins = [h for h, Yh in images.items() if h != g.id and Yh == Y]
        if twins:
            found.append(Fusion(g.id, "a", f"translated explanation {fmt_set(Y)} "
                                           f"coincides with that of {', '.join(twins)}"))
        if T0.mode == CONCRETE:
            st = g.statement_in(T0.id)
            if st is None:
                found.append(Fusion(g.id, "b", f"no statement in {T0.id}"))
            elif not derives(T0, Y, st.concrete_form):
                found.append(Fusion(g.id, "b", f"translated explanation {fmt_set(Y)} "
                                               f"does not derive {render(st.concrete_form)}"))
    return found


def preserves_nn(R: Reduction, T1: Theory, T0: Theory,
                 G: Sequence[Generalization], cap: int = DEFAULT_CAP) -> bool:
    """Whether the translated explanations explain every generalization in
    T0, one-to-one."""
    images = _translated(R, T1, G, cap)
    by_id = {g.id: g for g in G}
    for gid, Y in images.items():
        if not _explains_in(T0, by_id[gid], Y):
            return False
    return len(set(images.values())) == len(images)


def classify(R: Reduction, T1: Theory, T0: Theory, G: Sequence[Generalization],
             cap: int = DEFAULT_CAP) -> ReductionReport:
    _check_cap(cap)
    sr = structural_report(R, T1, T0)
    stated = _stated(G, T1)
    explanations = tuple((g.id, explain(g, T1, cap)) for g in stated)
    eb, ew = check_e_bijective(T1, G, cap)
    translated = tuple(_translated(R, T1, G, cap).items())
    fused = tuple(detect_fusion(R, T1, T0, G, cap))
    pnn = preserves_nn(R, T1, T0, G, cap)
    vmap = R.vocab_dict()
    total = R.vocab_map is not None and all(a in vmap for a in T1.vocabulary)

    reasons = []
    if not sr.is_map:
        reasons.append("not a map: some reduced sentence lacks an image or a "
                       "bridge law is not single-valued")
    if sr.onto:
        reasons.append("reduction is onto: every reducing sentence has a correspondent")
    if not eb:
        reasons.append(f"explanation map in {T1.id} is not bijective")
    if reasons:
        cls = "invalid"
    elif not total:
        cls = "invalid"
        reasons.append(f"no vocab-map covering the vocabulary of {T1.id}: "
                       f"not a standard reduction")
    else:
        cls = "strong" if pnn else "standard"
    return ReductionReport(
        reduced=T1.id, reducing=T0.id, structure=sr, explanations=explanations,
        e_bijective_in_reduced=eb, e_witnesses=tuple(ew), translated=translated,
        fused=fused, preserves_nn=pnn, vocab_map_total=total,
        classification=cls, reasons=tuple(reasons),
    )


def check_spec(spec: ReductionSpec, cap: int = DEFAULT_CAP) -> ReductionReport:
    return classify(spec.reduction, spec.reduced, spec.reducing, spec.generalizations, cap)


# --------------------------------------------------------------------------
# rendering


def fmt_set(ids: Iterable[str]) -> str:
    return "{" + " ".join(sorted(ids)) + "}"


def _yn(b: bool) -> str:
    return "yes" if b else "no"


def _list(items: Iterable[str]) -> str:
    items = list(items)
    return " ".join(items) if items else "-"


def render_report(rep: ReductionReport) -> str:
    sr = rep.structure
    out = [
        f"reduction: {rep.reduced} -> {rep.reducing}",
        "note: nomologically necessary = has exactly one minimal explanation (read as iff)",
        f"map: {_yn(sr.is_map)}",
        f"  uncovered: {_list(sr.uncovered_reduced)}",
    ]
    for fid, args, outs in sr.conflicts:
        out.append(f"  conflict: {fid}({' '.join(args)}) -> {' '.join(outs)}")
    out.append(f"injective: {_yn(sr.injective)}")
    for y, tuples in sr.collisions:
        pre = ", ".join("(" + " ".join(t) + ")" for t in tuples)
        out.append(f"  collision: {y} <- {pre}")
    out.append(f"onto: {_yn(sr.onto)}")
    out.append(f"  uncovered: {_list(sr.uncovered_reducing)}")
    out.append(f"requirements: {'met' if sr.requirements_met else 'violated'}")
    for gid, res in rep.explanations:
        subs = " ".join(fmt_set(s) for s in res.subsets)
        out.append(f"explain {gid} in {rep.reduced}: {res.status}" + (f" {subs}" if subs else ""))
    out.append(f"e-bijective in {rep.reduced}: {_yn(rep.e_bijective_in_reduced)}")
    for w in rep.e_witnesses:
        out.append(f"  witness: {w}")
    for gid, Y in rep.translated:
        out.append(f"translate {gid}: {fmt_set(Y)}")
    if rep.fused:
        for fu in rep.fused:
            out.append(f"fused: {fu.generalization} ({fu.reason}) {fu.detail}")
    else:
        out.append("fused: -")
    out.append(f"preserves-nn: {_yn(rep.preserves_nn)}")
    out.append(f"vocab-map: {'total' if rep.vocab_map_total else 'missing or partial'}")
    for r in rep.reasons:
        out.append(f"reason: {r}")
    out.append(f"classification: {rep.classification}")
    return "\n".join(out)
