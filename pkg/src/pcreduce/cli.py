"""Command-line interface.

Exit codes: 0 success (query proven, reduction strong), 1 query not proven
or reduction not strong, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import IO, Iterable, Sequence

from .inference import ChainConfig, saturate, semantic_network, show
from .knowledge_base import (
    KnowledgeBase, KnowledgeBaseError, assert_formula, dump_kb, load_kb, stats,
)
from .pc_core import Atom, Compound, ParseError, parse, render, render_term
from .reduction import (
    DEFAULT_CAP, MAX_CAP, ReductionError, SpecError, check_spec,
    load_reduction_spec, render_report,
)
from .self_watcher import WatcherConfig, run_watcher

DEPTH_ENV = "PCREDUCE_DEPTH"
OK, NOT_PROVEN, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def default_depth() -> int:
    raw = os.environ.get(DEPTH_ENV)
    if raw is None:
        return ChainConfig().depth_limit
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"error: {DEPTH_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"error: {DEPTH_ENV} must be >= 1")
    return value


def parse_goal(text: str) -> Atom:
    """Parse a query; ``(Show (p a))`` is accepted as a synonym for ``(p a)``."""
    f = parse(text)
    if isinstance(f, Atom) and f.predicate == "Show" and len(f.args) == 1 \
            and isinstance(f.args[0], Compound):
        inner = f.args[0]
        f = Atom(inner.functor, inner.args)
    if not isinstance(f, Atom):
        raise UsageError(f"error: query must be an atomic formula: {render(f)}")
    return f


def load_files(paths: Iterable[str]) -> KnowledgeBase:
    kb = KnowledgeBase()
    for p in paths:
        with open(p, encoding="utf-8") as fh:
            text = fh.read()
        try:
            kb = load_kb(text, kb)
        except ParseError as exc:
            raise UsageError(f"{p}:{exc.line}: {exc}") from None
        except KnowledgeBaseError as exc:
            raise UsageError(f"{p}: {exc}") from None
    return kb


# --------------------------------------------------------------------------
# commands shared by batch mode and the REPL; each returns (lines, kb, code)


def cmd_query(kb: KnowledgeBase, goal_text: str, cfg: ChainConfig, trace: bool = False):
    goal = parse_goal(goal_text)
    result, kb2 = show(kb, goal, cfg)
    lines = []
    for b in result.bindings:
        if b:
            lines.append(", ".join(f"{v} = {render_term(t)}" for v, t in b.items()))
    lines.append("proven." if result.proven else "not proven.")
    if result.depth_limited and not result.proven:
        lines.append(f"note: depth limit {cfg.depth_limit} reached")
    if trace:
        for node in result.proofs:
            lines.append(node.render())
    return lines, kb2, OK if result.proven else NOT_PROVEN


def cmd_assert(kb: KnowledgeBase, text: str):
    kb2 = assert_formula(kb, parse(text, closed=True))
    return (["ok."] if kb2 is not kb else ["already known."]), kb2, OK


def cmd_saturate(kb: KnowledgeBase, cfg: ChainConfig):
    res = saturate(kb, cfg)
    lines = [render(a) for a in res.derived]
    if res.reached_fixpoint:
        lines.append(f"fixpoint after {res.rounds} rounds, {len(res.derived)} derived")
    else:
        lines.append(f"stopped after {res.rounds} rounds (max-rounds), "
                     f"{len(res.derived)} derived")
    return lines, res.kb, OK


def cmd_network(kb: KnowledgeBase, cfg: ChainConfig):
    net = semantic_network(kb, cfg)
    lines = [f"{render(e.premise)} -> {render(e.conclusion)}" for e in net.edges]
    if not lines:
        lines.append("no edges")
    loops = [render(n) for n in net.nodes if n in net.loop_nodes]
    lines += [f"loop: {n}" for n in loops] or ["loops: none"]
    return lines, kb, OK


def cmd_watch(kb: KnowledgeBase, wcfg: WatcherConfig):
    kb2, report = run_watcher(kb, wcfg)
    return report.render().splitlines(), kb2, OK


def cmd_stats(kb: KnowledgeBase):
    st = stats(kb)
    return [
        f"facts: {st.fact_count}",
        f"rules: {st.rule_count}",
        f"derived: {st.derived_count}",
        f"watcher: {st.watcher_fact_count}",
        f"predicates: {' '.join(st.predicate_names) or '-'}",
    ], kb, OK


def cmd_reduce(path: str, cap: int):
    with open(path, encoding="utf-8") as fh:
        spec = load_reduction_spec(fh.read())
    rep = check_spec(spec, cap)
    return render_report(rep).splitlines(), OK if rep.classification == "strong" else NOT_PROVEN


# --------------------------------------------------------------------------
# REPL

HELP = """\
(formula)            assert a fact or rule
?- (goal)            query; proven answers are cached (also: (Show (goal)))
:query (goal)        same as ?-
:trace (goal)        query and print proof trees
:saturate            forward-chain to the fixpoint
:network             print the semantic network
:watch [n]           run the self-watcher for n generations
:stats               data-base statistics
:load <path>         load a KB file into the session
:save <path>         write the session data-base in KB file format
:reduce <path>       check a reduction spec
:quit                leave"""


def _balanced(text: str) -> bool:
    depth = 0
    for line in text.splitlines():
        for ch in line.split(";", 1)[0]:
            depth += (ch == "(") - (ch == ")")
    return depth <= 0


def repl(kb: KnowledgeBase, cfg: ChainConfig, inp: IO[str], out: IO[str],
         cap: int = DEFAULT_CAP, prompt: str = "pc> ") -> KnowledgeBase:
    """Read-eval-print loop over one growing data-base."""
    interactive = inp.isatty() if hasattr(inp, "isatty") else False
    buf = ""
    while True:
        if interactive:
            out.write(prompt if not buf else "... ")
            out.flush()
        line = inp.readline()
        if not line:
            break
        buf += line
        if not _balanced(buf):
            continue
        cmd, buf = buf.strip(), ""
        if not cmd or cmd.startswith(";"):
            continue
        try:
            lines, kb = _repl_step(kb, cmd, cfg, cap)
        except _Quit:
            break
        except (ParseError, KnowledgeBaseError, SpecError, ReductionError,
                UsageError, OSError, ValueError) as exc:
            msg = str(exc)
            lines = [msg if msg.startswith("error") else f"error: {msg}"]
        out.write("\n".join(lines) + "\n")
    return kb


class _Quit(Exception):
    pass


def _repl_step(kb: KnowledgeBase, cmd: str, cfg: ChainConfig, cap: int):
    if cmd.startswith("?-"):
        lines, kb, _ = cmd_query(kb, cmd[2:], cfg)
        return lines, kb
    if cmd.startswith("("):
        f = parse(cmd)
        if isinstance(f, Atom) and f.predicate == "Show":
            lines, kb, _ = cmd_query(kb, cmd, cfg)
        else:
            lines, kb, _ = cmd_assert(kb, cmd)
        return lines, kb
    word, _, arg = cmd.partition(" ")
    arg = arg.strip()
    if word in (":quit", ":q", ":exit"):
        raise _Quit
    if word == ":help":
        return HELP.splitlines(), kb
    if word in (":query", ":trace"):
        lines, kb, _ = cmd_query(kb, arg, cfg, trace=word == ":trace")
        return lines, kb
    if word == ":saturate":
        lines, kb, _ = cmd_saturate(kb, cfg)
        return lines, kb
    if word == ":network":
        return cmd_network(kb, cfg)[0], kb
    if word == ":watch":
        n = int(arg) if arg else WatcherConfig().max_generations
        lines, kb, _ = cmd_watch(kb, WatcherConfig(max_generations=n))
        return lines, kb
    if word == ":stats":
        return cmd_stats(kb)[0], kb
    if word == ":load":
        return ["ok."], load_files_into(kb, arg)
    if word == ":save":
        with open(arg, "w", encoding="utf-8") as fh:
            fh.write(dump_kb(kb))
        return [f"saved {len(kb.facts)} facts, {len(kb.rules)} rules to {arg}"], kb
    if word == ":reduce":
        return cmd_reduce(arg, cap)[0], kb
    raise UsageError(f"error: unknown command {word} (try :help)")


def load_files_into(kb: KnowledgeBase, path: str) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return load_kb(fh.read(), kb)


# --------------------------------------------------------------------------
# argument parsing


def _positive(name: str, upper: int | None = None):
    def conv(raw: str) -> int:
        try:
            value = int(raw)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if value < 1 or (upper is not None and value > upper):
            bound = f"between 1 and {upper}" if upper else ">= 1"
            raise argparse.ArgumentTypeError(f"{name} must be {bound}")
        return value
    return conv


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pcreduce",
                                description="Predicate-calculus data-base and reduction checker")
    sub = p.add_subparsers(dest="command", required=True)

    def chain_flags(sp):
        sp.add_argument("--depth", type=_positive("depth"), default=None,
                        help=f"backward-chaining depth limit (default 32, env {DEPTH_ENV})")
        sp.add_argument("--max-rounds", type=_positive("max-rounds"), default=64)
        sp.add_argument("--no-cache", action="store_true",
                        help="do not add proven answers to the data-base")

    sp = sub.add_parser("assert", help="assert a formula and print the resulting KB")
    sp.add_argument("files", nargs="*", metavar="KB")
    sp.add_argument("formula")
    sp.add_argument("-o", "--output", help="write the KB here instead of stdout")

    sp = sub.add_parser("query", help="prove a goal by backward chaining")
    sp.add_argument("files", nargs="*", metavar="KB")
    sp.add_argument("goal")
    sp.add_argument("--trace", action="store_true", help="print proof trees")
    chain_flags(sp)

    sp = sub.add_parser("saturate", help="forward-chain to the fixpoint")
    sp.add_argument("files", nargs="*", metavar="KB")
    chain_flags(sp)

    sp = sub.add_parser("network", help="print the semantic network")
    sp.add_argument("files", nargs="*", metavar="KB")
    chain_flags(sp)

    sp = sub.add_parser("watch", help="run the self-watcher")
    sp.add_argument("files", nargs="*", metavar="KB")
    sp.add_argument("--generations", type=_positive("generations"), default=4)
    sp.add_argument("--threshold", type=_positive("threshold"), default=2)

    sp = sub.add_parser("reduce-check", help="check a reduction spec")
    sp.add_argument("spec")
    sp.add_argument("--cap", type=_positive("cap", MAX_CAP), default=DEFAULT_CAP)

    sp = sub.add_parser("repl", help="interactive session")
    sp.add_argument("files", nargs="*", metavar="KB")
    sp.add_argument("--cap", type=_positive("cap", MAX_CAP), default=DEFAULT_CAP)
    chain_flags(sp)
    return p


def _chain_config(args) -> ChainConfig:
    depth = args.depth if args.depth is not None else default_depth()
    return ChainConfig(depth_limit=depth, max_rounds=args.max_rounds,
                       cache_derived=not args.no_cache)


def run(argv: Sequence[str] | None = None, stdin: IO[str] | None = None,
        stdout: IO[str] | None = None, stderr: IO[str] | None = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK

    try:
        code = _dispatch(args, stdin, stdout)
    except (ParseError, KnowledgeBaseError, SpecError, ReductionError) as exc:
        stderr.write(f"{exc}\n")
        return USAGE
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return USAGE
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
        return USAGE
    return code


def _dispatch(args, stdin, stdout) -> int:
    def emit(lines):
        stdout.write("\n".join(lines) + "\n")

    if args.command == "reduce-check":
        lines, code = cmd_reduce(args.spec, args.cap)
        emit(lines)
        return code

    kb = load_files(args.files)
    if args.command == "assert":
        _, kb, code = cmd_assert(kb, args.formula)
        text = dump_kb(kb)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        return code
    if args.command == "watch":
        lines, _, code = cmd_watch(kb, WatcherConfig(max_generations=args.generations,
                                                     awareness_threshold=args.threshold))
        emit(lines)
        return code

    cfg = _chain_config(args)
    if args.command == "query":
        lines, _, code = cmd_query(kb, args.goal, cfg, args.trace)
    elif args.command == "saturate":
        lines, _, code = cmd_saturate(kb, cfg)
    elif args.command == "network":
        lines, _, code = cmd_network(kb, cfg)
    else:
        repl(kb, cfg, stdin, stdout, cap=args.cap)
        return OK
    emit(lines)
    return code


def main() -> None:
    sys.exit(run())
