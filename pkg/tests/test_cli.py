import io
import json
import subprocess
import sys

import pytest

from lnlfpc import corpus_files, corpus_source
from lnlfpc.cli import (
    EXIT_ERROR, EXIT_FUEL, EXIT_OK, EXIT_STUCK, EXIT_USAGE, CliConfig, Session, main,
)
from lnlfpc.core import STAR, App
from lnlfpc.evaluator import evaluate


@pytest.fixture
def corpus(tmp_path):
    """Write a corpus file into a scratch directory and return its path."""
    def write(name):
        path = tmp_path / name
        path.write_text(corpus_source(name), encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def source(tmp_path):
    def write(text, name="scratch.lnl"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


def test_run_factorial(corpus, capsys):
    assert main(["run", corpus("factorial.lnl"), "--decode", "nat"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "120"


def test_bad_copy_is_rejected(corpus, capsys):
    assert main(["check", corpus("bad_copy.lnl")]) == EXIT_ERROR
    err = capsys.readouterr().err
    assert "E-LINEAR-REUSED" in err
    assert "bad_copy.lnl:3:" in err


def test_bad_copy_json(corpus, capsys):
    assert main(["check", corpus("bad_copy.lnl"), "--json"]) == EXIT_ERROR
    (diag,) = json.loads(capsys.readouterr().out)
    assert set(diag) == {"code", "severity", "span", "message", "definition"}
    assert set(diag["span"]) == {"line", "col", "len"}
    assert (diag["code"], diag["severity"], diag["definition"]) == ("E-LINEAR-REUSED", "error", "copy")
    assert diag["span"]["line"] == 3


def test_diverge_runs_out_of_fuel(corpus, capsys):
    assert main(["run", corpus("diverge.lnl"), "--fuel", "1000"]) == EXIT_FUEL
    assert "out of fuel" in capsys.readouterr().err


def test_check_prints_types(corpus, capsys):
    assert main(["check", corpus("factorial.lnl")]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["factorial : Nat -o Nat", "main : Nat"]


def test_check_json_success(corpus, capsys):
    assert main(["check", corpus("factorial.lnl"), "--json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == []


def test_run_list(corpus, capsys):
    assert main(["run", corpus("streams.lnl"), "--decode", "list-nat"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "[0, 0, 0, 0, 0]"


def test_run_prints_sexpr_by_default(source, capsys):
    assert main(["run", source("main = zero;")]) == EXIT_OK
    assert capsys.readouterr().out.strip().startswith("(fold (mu ")


def test_stuck_exit_code(source):
    # run refuses ill-typed programs, so drive the outcome printer directly
    session = Session(CliConfig("run", source("main = star;")), io.StringIO(), io.StringIO())
    assert session.show_outcome(evaluate(App(STAR, STAR), 10), None) == EXIT_STUCK
    assert "stuck" in session.err.getvalue()


def test_type_errors_block_run(source, capsys):
    assert main(["run", source("main = unfold star;")]) == EXIT_ERROR
    assert "E-NOT-MU" in capsys.readouterr().err


def test_missing_main(source, capsys):
    assert main(["run", source("def two : Nat = 2;")]) == EXIT_ERROR
    assert "E-NO-MAIN" in capsys.readouterr().err


def test_parse_error(source, capsys):
    assert main(["check", source("main = (star;")]) == EXIT_ERROR
    assert "E-PARSE" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["check", "x.lnl", "--decode", "nat"],
    ["run", "x.lnl", "--fuel", "0"],
    ["run", "x.lnl", "--fuel", "lots"],
    ["frobnicate"],
    [],
    ["run"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_missing_file(capsys, tmp_path):
    assert main(["check", str(tmp_path / "nope.lnl")]) == EXIT_USAGE


def test_fuel_accepts_scientific_notation(corpus, capsys):
    assert main(["run", corpus("factorial.lnl"), "--fuel", "1e6", "--decode", "nat"]) == EXIT_OK


def test_elab_prints_program(source, capsys):
    text = "type I = !((mu Z. Z) -o (mu Z. Z));\ndef star : I = lift \\x:(mu Z. Z). x;\nmain = star;"
    assert main(["elab", source(text), "--no-prelude"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith('(program\n  (def "star" (bang (lolli (mu "Z" (tvar 0)) (mu "Z" (tvar 0))))')
    assert out.rstrip().endswith("(main (lift (lam \"x\" (mu \"Z\" (tvar 0)) (var 0 \"x\")))))")


def test_no_prelude_hides_definitions(source, capsys):
    assert main(["check", source("main = zero;"), "--no-prelude"]) == EXIT_ERROR
    assert "E-UNKNOWN-NAME" in capsys.readouterr().err


# -- repl ------------------------------------------------------------------------

def repl(lines, file=None):
    out, err = io.StringIO(), io.StringIO()
    code = Session(CliConfig("repl", file), out, err).cmd_repl(lines)
    return code, out.getvalue(), err.getvalue()


def test_repl_prints_type_and_decoded_value():
    code, out, _ = repl(["fact 4", "take 3 const0", "star"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[:4] == ["- : Nat", "24", "- : ListNat", "[0, 0, 0]"]
    assert lines[4] == "- : I"


def test_repl_continues_after_errors():
    code, out, err = repl(["unfold star", "-- comment", "", "zero"])
    assert code == EXIT_OK
    assert "E-NOT-MU" in err
    assert out.splitlines() == ["- : Nat", "0"]


def test_repl_sees_file_definitions(corpus):
    _, out, _ = repl(["factorial 3"], corpus("factorial.lnl"))
    assert out.splitlines() == ["- : Nat", "6"]


@pytest.mark.parametrize("expr, decode", [
    ("mult 3 4", "nat"), ("take 2 const0", "list-nat"), ("succ", None), ("lift zero", None),
])
def test_repl_matches_batch_run(expr, decode, source, capsys):
    _, out, _ = repl([expr])
    repl_value = out.splitlines()[1]
    argv = ["run", source(f"main = {expr};")] + (["--decode", decode] if decode else [])
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out.strip() == repl_value


# -- end to end ------------------------------------------------------------------

@pytest.mark.parametrize("name", [n for n in corpus_files() if n not in ("bad_copy.lnl", "prelude.lnl")])
def test_corpus_check_then_run_never_stuck(name, corpus, capsys):
    path = corpus(name)
    assert main(["check", path]) == EXIT_OK
    assert main(["run", path, "--fuel", "100000"]) in (EXIT_OK, EXIT_FUEL)


def test_module_entry_point(corpus):
    proc = subprocess.run([sys.executable, "-m", "lnlfpc", "run", corpus("head.lnl"), "--decode", "nat"],
                          capture_output=True, text=True, timeout=120)
    assert (proc.returncode, proc.stdout.strip()) == (0, "1")


def test_oracle_grid_command(capsys):
    assert main(["oracle-grid", "--max-size", "4", "--json"]) == EXIT_OK
    stats = json.loads(capsys.readouterr().out)
    assert stats["disagreements"] == 0 and stats["contexts"] == 21
