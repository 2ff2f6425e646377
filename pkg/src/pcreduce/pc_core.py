"""Predicate-calculus syntax: terms, formulas, S-expression reading and
printing, substitution and unification.

Formulas are written in LISP style::

    (forall (z) (if (inst z elephant) (color z gray)))

Inside a quantifier the symbols of the binding list are variables; outside
any quantifier a symbol is a variable only if it starts with ``?``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union

KEYWORDS = frozenset({"and", "or", "not", "if", "forall", "exists"})


class ParseError(ValueError):
    """Malformed input. ``offset`` is a byte offset into the UTF-8 text."""

    def __init__(self, message: str, offset: int, text: str | None = None):
        self.message = message
        self.offset = offset
        self.line = None
        if text is not None:
            prefix = text.encode("utf-8")[:offset].decode("utf-8", "replace")
            self.line = prefix.count("\n") + 1
        super().__init__(f"error: {message} at offset {offset}")


# --------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Compound:
    """Function term such as ``(f a ?x)``; only used where nesting is needed."""

    functor: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return render_term(self)


Term = Union[Const, Var, Compound]
Substitution = Mapping[str, Term]


# --------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class And:
    items: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("and needs at least 2 children")


@dataclass(frozen=True)
class Or:
    items: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("or needs at least 2 children")


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class If:
    antecedent: Formula
    consequent: Formula


@dataclass(frozen=True)
class ForAll:
    vars: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class Exists:
    vars: tuple[str, ...]
    body: Formula


Formula = Union[Atom, And, Or, Not, If, ForAll, Exists]


# --------------------------------------------------------------------------
# S-expression reader


@dataclass(frozen=True)
class Sym:
    text: str
    offset: int


@dataclass(frozen=True)
class SList:
    items: tuple[Union[Sym, "SList"], ...]
    offset: int


SExpr = Union[Sym, SList]


def _byte_offsets(text: str) -> list[int]:
    out = [0] * (len(text) + 1)
    n = 0
    for i, ch in enumerate(text):
        out[i] = n
        n += len(ch.encode("utf-8"))
    out[len(text)] = n
    return out


def read_sexprs(text: str) -> list[SExpr]:
    """Read every top-level S-expression in ``text``.

    ``;`` starts a comment running to end of line. Offsets in the returned
    nodes (and in raised errors) are UTF-8 byte offsets.
    """
    boff = _byte_offsets(text)
    i, n = 0, len(text)
    stack: list[tuple[int, list]] = []
    top: list[SExpr] = []

    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch == "(":
            stack.append((i, []))
            i += 1
        elif ch == ")":
            if not stack:
                raise ParseError("unbalanced parentheses: unexpected ')'", boff[i], text)
            start, items = stack.pop()
            if not items:
                raise ParseError("empty list", boff[start], text)
            node = SList(tuple(items), boff[start])
            (stack[-1][1] if stack else top).append(node)
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            node = Sym(text[i:j], boff[i])
            (stack[-1][1] if stack else top).append(node)
            i = j
    if stack:
        raise ParseError("unbalanced parentheses: missing ')'", boff[stack[-1][0]], text)
    return top


# --------------------------------------------------------------------------
# S-expression -> Formula


def _term(node: SExpr, bound: frozenset[str], closed: bool, text: str) -> Term:
    if isinstance(node, Sym):
        name = node.text
        if name in bound:
            return Var(name)
        if name.startswith("?"):
            if closed:
                raise ParseError(f"unbound variable {name}", node.offset, text)
            return Var(name)
        return Const(name)
    head = node.items[0]
    if not isinstance(head, Sym):
        raise ParseError("function symbol expected", head.offset, text)
    args = tuple(_term(x, bound, closed, text) for x in node.items[1:])
    return Compound(head.text, args)


def _binding_list(node: SExpr, text: str) -> tuple[str, ...]:
    if not isinstance(node, SList):
        raise ParseError("quantifier expects a binding list", node.offset, text)
    names = []
    for item in node.items:
        if not isinstance(item, Sym):
            raise ParseError("binding list holds symbols only", item.offset, text)
        if item.text in KEYWORDS:
            raise ParseError(f"keyword {item.text} cannot be a variable", item.offset, text)
        names.append(item.text)
    return tuple(names)


def formula_from_sexpr(node: SExpr, text: str = "", closed: bool = False,
                       bound: frozenset[str] = frozenset()) -> Formula:
    """Build a Formula from an already-read S-expression."""
    if isinstance(node, Sym):
        raise ParseError(f"expected a parenthesized formula, got {node.text!r}", node.offset, text)
    head = node.items[0]
    if not isinstance(head, Sym):
        raise ParseError("formula must start with a symbol", head.offset, text)
    op, rest = head.text, node.items[1:]

    def sub(x: SExpr, b: frozenset[str] = bound) -> Formula:
        return formula_from_sexpr(x, text, closed, b)

    if op in ("and", "or"):
        if len(rest) < 2:
            raise ParseError(f"{op} needs at least 2 children", node.offset, text)
        items = tuple(sub(x) for x in rest)
        return And(items) if op == "and" else Or(items)
    if op == "not":
        if len(rest) != 1:
            raise ParseError("not takes exactly 1 argument", node.offset, text)
        return Not(sub(rest[0]))
    if op == "if":
        if len(rest) != 2:
            raise ParseError("if takes exactly 2 arguments", node.offset, text)
        return If(sub(rest[0]), sub(rest[1]))
    if op in ("forall", "exists"):
        if len(rest) != 2:
            raise ParseError(f"{op} takes a binding list and a body", node.offset, text)
        names = _binding_list(rest[0], text)
        body = sub(rest[1], bound | frozenset(names))
        return ForAll(names, body) if op == "forall" else Exists(names, body)
    return Atom(op, tuple(_term(x, bound, closed, text) for x in rest))


def parse(text: str, closed: bool = False) -> Formula:
    """Parse exactly one formula.

    With ``closed=True`` every ``?``-variable must be bound by an enclosing
    quantifier.
    """
    nodes = read_sexprs(text)
    if not nodes:
        raise ParseError("no formula found", len(text.encode("utf-8")), text)
    if len(nodes) > 1:
        raise ParseError("trailing input after formula", nodes[1].offset, text)
    return formula_from_sexpr(nodes[0], text, closed)


def parse_many(text: str, closed: bool = False) -> list[tuple[Formula, int]]:
    """Parse a whole file of formulas; returns ``(formula, byte_offset)`` pairs."""
    return [(formula_from_sexpr(n, text, closed), n.offset) for n in read_sexprs(text)]


# --------------------------------------------------------------------------
# printing


def render_term(t: Term) -> str:
    if isinstance(t, Compound):
        return "(" + " ".join([t.functor, *map(render_term, t.args)]) + ")"
    return t.name


def render(f: Formula) -> str:
    """Canonical single-space S-expression."""
    if isinstance(f, Atom):
        return "(" + " ".join([f.predicate, *map(render_term, f.args)]) + ")"
    if isinstance(f, (And, Or)):
        op = "and" if isinstance(f, And) else "or"
        return "(" + " ".join([op, *map(render, f.items)]) + ")"
    if isinstance(f, Not):
        return f"(not {render(f.body)})"
    if isinstance(f, If):
        return f"(if {render(f.antecedent)} {render(f.consequent)})"
    if isinstance(f, (ForAll, Exists)):
        op = "forall" if isinstance(f, ForAll) else "exists"
        return f"({op} ({' '.join(f.vars)}) {render(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# variables


def term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, Compound):
        for a in t.args:
            yield from term_vars(a)


def atom_vars(a: Atom) -> list[str]:
    """Variables of ``a`` in first-occurrence order, without repeats."""
    seen: dict[str, None] = {}
    for t in a.args:
        for v in term_vars(t):
            seen.setdefault(v)
    return list(seen)


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return set(atom_vars(f))
    if isinstance(f, (And, Or)):
        return set().union(*(free_vars(x) for x in f.items))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, If):
        return free_vars(f.antecedent) | free_vars(f.consequent)
    return free_vars(f.body) - set(f.vars)


def is_ground(a: Atom) -> bool:
    return not atom_vars(a)


def symbols(f: Formula) -> set[str]:
    """Predicate, function and constant symbols (variables excluded)."""
    out: set[str] = set()

    def walk_term(t: Term) -> None:
        if isinstance(t, Const):
            out.add(t.name)
        elif isinstance(t, Compound):
            out.add(t.functor)
            for a in t.args:
                walk_term(a)

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            out.add(g.predicate)
            for t in g.args:
                walk_term(t)
        elif isinstance(g, (And, Or)):
            for x in g.items:
                walk(x)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, If):
            walk(g.antecedent)
            walk(g.consequent)
        else:
            walk(g.body)

    walk(f)
    return out


# --------------------------------------------------------------------------
# substitution


def _walk(t: Term, s: Substitution) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def substitute_term(t: Term, s: Substitution) -> Term:
    t = _walk(t, s)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(substitute_term(a, s) for a in t.args))
    return t


def substitute_atom(a: Atom, s: Substitution) -> Atom:
    if not s:
        return a
    return Atom(a.predicate, tuple(substitute_term(t, s) for t in a.args))


def _fresh(name: str, avoid: set[str]) -> str:
    k = 1
    while f"{name}{k}" in avoid:
        k += 1
    return f"{name}{k}"


def apply_substitution(f: Formula, s: Substitution) -> Formula:
    """Replace free variables of ``f`` according to ``s``.

    Quantified variables are shielded; a bound variable that would capture a
    variable of an incoming term is renamed first.
    """
    if not s:
        return f
    if isinstance(f, Atom):
        return substitute_atom(f, s)
    if isinstance(f, And):
        return And(tuple(apply_substitution(x, s) for x in f.items))
    if isinstance(f, Or):
        return Or(tuple(apply_substitution(x, s) for x in f.items))
    if isinstance(f, Not):
        return Not(apply_substitution(f.body, s))
    if isinstance(f, If):
        return If(apply_substitution(f.antecedent, s), apply_substitution(f.consequent, s))

    inner = {k: v for k, v in s.items() if k not in f.vars}
    incoming = {v for k in free_vars(f.body) if k in inner
                for v in term_vars(substitute_term(Var(k), inner))}
    names = list(f.vars)
    clash = [v for v in names if v in incoming]
    body = f.body
    if clash:
        avoid = incoming | free_vars(f.body) | set(names) | set(inner)
        renaming = {}
        for v in clash:
            new = _fresh(v, avoid)
            avoid.add(new)
            renaming[v] = Var(new)
            names[names.index(v)] = new
        # fresh names cannot chain, so renaming before substituting is safe
        body = apply_substitution(body, renaming)
    body = apply_substitution(body, inner)
    return type(f)(tuple(names), body)


def compose(s: Substitution, extra: Substitution) -> dict[str, Term]:
    """Fully resolved union of two substitutions; the result is idempotent."""
    merged = {**s, **extra}
    return {k: substitute_term(v, merged) for k, v in merged.items()}


# --------------------------------------------------------------------------
# unification


def _occurs(name: str, t: Term, s: Substitution) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, Compound):
        return any(_occurs(name, a, s) for a in t.args)
    return False


def _unify_terms(x: Term, y: Term, s: dict[str, Term]) -> bool:
    x, y = _walk(x, s), _walk(y, s)
    if x == y:
        return True
    if isinstance(x, Var):
        if _occurs(x.name, y, s):
            return False
        s[x.name] = y
        return True
    if isinstance(y, Var):
        if _occurs(y.name, x, s):
            return False
        s[y.name] = x
        return True
    if isinstance(x, Compound) and isinstance(y, Compound):
        if x.functor != y.functor or len(x.args) != len(y.args):
            return False
        return all(_unify_terms(a, b, s) for a, b in zip(x.args, y.args))
    return False


def unify(a: Atom, b: Atom, s: Substitution | None = None) -> dict[str, Term] | None:
    """Most general unifier of ``a`` and ``b`` extending ``s``; ``None`` on failure.

    The occurs check is always on. The returned substitution is idempotent.
    """
    if a.predicate != b.predicate or len(a.args) != len(b.args):
        return None
    work: dict[str, Term] = dict(s or {})
    for x, y in zip(a.args, b.args):
        if not _unify_terms(x, y, work):
            return None
    return {k: substitute_term(v, work) for k, v in work.items()}


def _rename_term(t: Term, mapping: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(_rename_term(a, mapping) for a in t.args))
    return t


def rename_atom(a: Atom, mapping: Mapping[str, str]) -> Atom:
    """Simultaneous variable renaming (no chaining through the mapping)."""
    return Atom(a.predicate, tuple(_rename_term(t, mapping) for t in a.args))
