import io
import subprocess
import sys
from pathlib import Path

import pytest

from pcreduce.cli import run
from pcreduce.knowledge_base import load_kb

DATA = Path(__file__).resolve().parents[1] / "data"
ELEPHANTS = str(DATA / "elephants.kb")


def call(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), io.StringIO(stdin), out, err)
    return code, out.getvalue(), err.getvalue()


def test_query_proven():
    code, out, _ = call("query", ELEPHANTS, "(color Clyde gray)")
    assert (code, out) == (0, "proven.\n")


def test_query_with_bindings():
    code, out, _ = call("query", ELEPHANTS, "(color ?x ?c)")
    assert (code, out) == (0, "?x = Clyde, ?c = gray\nproven.\n")


def test_query_show_form():
    assert call("query", ELEPHANTS, "(Show (color Clyde gray))")[:2] == (0, "proven.\n")


def test_query_not_proven():
    assert call("query", ELEPHANTS, "(color Clyde pink)")[:2] == (1, "not proven.\n")


def test_query_trace():
    code, out, _ = call("query", ELEPHANTS, "(color Clyde gray)", "--trace")
    assert code == 0
    assert out.splitlines() == [
        "proven.",
        "(color Clyde gray)  <= rule (forall (z) (if (inst z elephant) (color z gray)))",
        "  (inst Clyde elephant)  <= fact",
    ]


def test_depth_limit_note(tmp_path):
    kb = tmp_path / "loop.kb"
    kb.write_text("(forall (x) (if (p x) (p x)))\n")
    code, out, _ = call("query", str(kb), "(p a)", "--depth", "3")
    assert code == 1
    assert out == "not proven.\nnote: depth limit 3 reached\n"


def test_depth_from_environment(tmp_path, monkeypatch):
    kb = tmp_path / "loop.kb"
    kb.write_text("(forall (x) (if (p x) (p x)))\n")
    monkeypatch.setenv("PCREDUCE_DEPTH", "5")
    assert "depth limit 5" in call("query", str(kb), "(p a)")[1]
    # the flag wins over the environment
    assert "depth limit 2" in call("query", str(kb), "(p a)", "--depth", "2")[1]
    monkeypatch.setenv("PCREDUCE_DEPTH", "zero")
    assert call("query", str(kb), "(p a)")[0] == 2


def test_saturate():
    code, out, _ = call("saturate", ELEPHANTS)
    assert (code, out) == (0, "(color Clyde gray)\nfixpoint after 1 rounds, 1 derived\n")


def test_network():
    code, out, _ = call("network", ELEPHANTS)
    assert out == "(inst Clyde elephant) -> (color Clyde gray)\nloops: none\n"


def test_watch():
    code, out, _ = call("watch", ELEPHANTS)
    assert code == 0
    assert out.splitlines()[-1] == "awareness: (have-impression-of mind) at generation 2"
    assert call("watch", ELEPHANTS, "--generations", "1")[1].endswith("awareness: none\n")


def test_assert_prints_kb(tmp_path):
    code, out, _ = call("assert", ELEPHANTS, "(inst Dumbo elephant)")
    assert code == 0
    kb = load_kb(out)
    assert len(kb.facts) == 2 and len(kb.rules) == 1
    target = tmp_path / "out.kb"
    call("assert", ELEPHANTS, "(inst Dumbo elephant)", "-o", str(target))
    assert target.read_text() == out


def test_reduce_check_exit_codes():
    code, out, _ = call("reduce-check", str(DATA / "mirrored.red"))
    assert code == 0 and out.endswith("classification: strong\n")
    code, out, _ = call("reduce-check", str(DATA / "apple-happy.red"))
    assert code == 1 and out.endswith("classification: standard\n")


@pytest.mark.parametrize("argv", [
    ["query", ELEPHANTS, "(color Clyde"],
    ["query", ELEPHANTS, "(and (p a) (q a))"],
    ["query", ELEPHANTS, "(p a)", "--depth", "0"],
    ["reduce-check", str(DATA / "mirrored.red"), "--cap", "7"],
    ["reduce-check", str(DATA / "mirrored.red"), "--cap", "0"],
    ["watch", ELEPHANTS, "--generations", "-1"],
    ["query", "/nonexistent.kb", "(p a)"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv):
    assert call(*argv)[0] == 2


def test_parse_error_reports_offset():
    code, _, err = call("query", ELEPHANTS, "(color Clyde")
    assert code == 2
    assert err.startswith("error: ") and "at offset 0" in err


def test_bad_kb_file_reports_location(tmp_path):
    kb = tmp_path / "bad.kb"
    kb.write_text("(p a)\n(p ?x)\n")
    code, _, err = call("query", str(kb), "(p a)")
    assert code == 2
    assert err.startswith(f"{kb}:2: error: unbound variable ?x")


def test_bad_spec_reports_line(tmp_path):
    spec = tmp_path / "bad.red"
    spec.write_text((DATA / "mirrored.red").read_text().replace("(to y2)", "(to y9)"))
    code, _, err = call("reduce-check", str(spec))
    assert code == 2 and "at line 22" in err


SESSION = """\
(forall (z) (if (inst z elephant) (color z gray)))
(inst Clyde elephant)
?- (color Clyde gray)
:stats
(Show (color Clyde gray))
:trace (color Clyde gray)
"""


def test_repl_session():
    code, out, _ = call("repl", stdin=SESSION)
    assert code == 0
    assert out.splitlines() == [
        "ok.", "ok.", "proven.",
        "facts: 2", "rules: 1", "derived: 1", "watcher: 0",
        "predicates: color inst",
        "proven.",
        "proven.",
        "(color Clyde gray)  <= fact",
    ]


def test_repl_multiline_and_errors():
    code, out, _ = call("repl", stdin="(forall (z)\n  (if (inst z elephant)\n"
                                         "      (color z gray)))\n(p ?x)\n:bogus\n:stats\n")
    lines = out.splitlines()
    assert lines[0] == "ok."
    assert lines[1].startswith("error: unbound variable ?x")
    assert lines[2].startswith("error: unknown command :bogus")
    assert lines[4] == "rules: 1"


@pytest.mark.parametrize("goal", ["(color Clyde gray)", "(color ?x ?c)", "(color Clyde pink)"])
def test_repl_matches_batch_query(goal):
    _, batch, _ = call("query", ELEPHANTS, goal)
    _, session, _ = call("repl", ELEPHANTS, stdin=f"?- {goal}\n")
    assert session == batch


def test_repl_matches_batch_saturate_and_reduce():
    assert call("repl", ELEPHANTS, stdin=":saturate\n")[1] == call("saturate", ELEPHANTS)[1]
    spec = str(DATA / "apple-happy.red")
    assert call("repl", stdin=f":reduce {spec}\n")[1] == call("reduce-check", spec)[1]


def test_repl_save_and_load(tmp_path):
    target = tmp_path / "session.kb"
    call("repl", ELEPHANTS, stdin=f"?- (color Clyde gray)\n:save {target}\n")
    kb = load_kb(target.read_text())
    assert len(kb.facts) == 2
    _, out, _ = call("repl", stdin=f":load {target}\n:stats\n")
    assert "facts: 2" in out.splitlines()


def test_repl_quit_stops_reading():
    _, out, _ = call("repl", stdin=":quit\n(p a)\n")
    assert out == ""


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pcreduce", "query", ELEPHANTS,
                           "(color Clyde gray)"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "proven.\n"
