import pytest

from lnlfpc import corpus_files, corpus_source, load_program, parse_module
from lnlfpc.core import (
    NAT, STAR, STREAM_NAT, UNIT, App, Bang, Fold, Force, Lam, Left, Lift, Lolli, Mu, Pair, Right,
    TVar, Unfold, Var, free_vars, is_closed, is_value, shift_term, shift_type,
)
from lnlfpc.diagnostics import ElaborationError
from lnlfpc.elaborator import desugar_rec, elaborate, expand_numeral
from lnlfpc.evaluator import Value, evaluate
from lnlfpc.pretty import program_to_source
from lnlfpc.typechecker import EMPTY, TypingContext, synth, type_of

ENDO = Lolli(UNIT, UNIT)


def test_numerals():
    assert expand_numeral(0) == Fold(NAT, Left(UNIT, NAT, STAR))
    assert expand_numeral(1) == Fold(NAT, Right(UNIT, NAT, expand_numeral(0)))
    assert all(is_value(expand_numeral(n)) for n in range(21))


def test_numeral_one_is_succ_zero():
    program = load_program("main = succ zero;")
    assert evaluate(program.main, 20) == Value(expand_numeral(1))


def test_numeral_literal_in_source():
    assert load_program("main = 3;").main == expand_numeral(3)


def test_desugar_rec_shape():
    a = NAT
    body = Force(Var(0, "z"))
    out = desugar_rec("z", Bang(a), body)
    r = Mu("X", Lolli(Bang(TVar(0)), shift_type(a, 1)))
    x = Var(0, "x")
    alpha = Lift(Fold(r, Lam("x", Bang(r), App(
        Lam("z", Bang(a), shift_term(body, 1, 1)),
        Lift(App(Unfold(Force(x)), x))))))
    assert out == App(Unfold(Force(alpha)), alpha)
    assert out.fn.body.body is out.arg


def test_desugar_rec_requires_bang():
    with pytest.raises(ElaborationError) as info:
        desugar_rec("z", NAT, Var(0))
    assert info.value.code == "E-REC-ANNOT"


def test_desugar_rec_adds_no_free_variables():
    # body mentions z (index 0) and an outer variable (index 1)
    body = Pair(Force(Var(0, "z")), Var(1, "w"))
    out = desugar_rec("z", Bang(NAT), body)
    assert free_vars(out) == {0}


def test_rec_typing_in_open_context():
    # under w : Nat, rec z:!Nat. w has type Nat
    out = desugar_rec("z", Bang(NAT), Var(1, "w"))
    ctx = TypingContext.from_bindings([("w", NAT)])
    assert synth(ctx, out) == (NAT, frozenset())


def test_simplest_diverging_program():
    loop = desugar_rec("z", Bang(UNIT), Force(Var(0, "z")))
    assert type_of(loop) == UNIT
    assert is_closed(loop)


def test_const0_encoding_types():
    program = load_program("main = const0;")
    assert type_of(program.main) == STREAM_NAT


def test_prelude_elaborates_cleanly():
    program = load_program("")
    names = [d.name for d in program.definitions]
    assert names[:3] == ["star", "zero", "succ"]
    assert all(is_closed(d.body) for d in program.definitions)


def test_alias_cycle():
    with pytest.raises(ElaborationError) as info:
        elaborate(parse_module("type A = B * I; type B = A + I;"))
    assert "E-ALIAS-CYCLE" in {d.code for d in info.value.diagnostics}


def test_self_referencing_alias():
    with pytest.raises(ElaborationError) as info:
        elaborate(parse_module("type T = T * T;"))
    assert info.value.code == "E-ALIAS-CYCLE"


def test_unknown_names():
    with pytest.raises(ElaborationError) as info:
        load_program("def f : Nat = nope; def g : Wat = zero;")
    assert [d.code for d in info.value.diagnostics] == ["E-UNKNOWN-NAME", "E-UNKNOWN-NAME"]
    assert [d.definition for d in info.value.diagnostics] == ["f", "g"]


def test_definition_cycle():
    with pytest.raises(ElaborationError) as info:
        load_program("type U = mu X. X; def f : U = g; def g : U = f;", prelude=False)
    assert info.value.code == "E-DEF-CYCLE"


def test_duplicate_definition():
    with pytest.raises(ElaborationError) as info:
        load_program("def zero : Nat = 1;")
    assert info.value.code == "E-DUPLICATE"


def test_binders_shadow_definitions():
    program = load_program(r"def f : Nat -o Nat = \zero:Nat. zero;")
    assert program.lookup("f").body == Lam("zero", NAT, Var(0))


def test_definitions_are_inlined():
    program = load_program("def one : Nat = succ zero; main = one;")
    succ = program.lookup("succ").body
    zero = program.lookup("zero").body
    assert program.main == App(succ, zero)


def test_factorial_is_rec_free_and_typed():
    program = load_program(corpus_source("factorial.lnl"))
    fact = program.lookup("factorial")
    assert synth(EMPTY, fact.body) == (Lolli(NAT, NAT), frozenset())
    assert [site.definition for site in program.rec_sites if site.definition == "factorial"] == ["factorial"]


@pytest.mark.parametrize("name", [n for n in corpus_files() if n != "bad_copy.lnl"])
def test_elaboration_is_idempotent(name):
    prelude = name != "prelude.lnl"
    program = load_program(corpus_source(name), prelude=prelude)
    again = elaborate(parse_module(program_to_source(program)))
    assert again == program


def test_rec_sites_carry_the_body():
    program = load_program("")
    sites = {s.definition: s for s in program.rec_sites}
    assert set(sites) >= {"add", "mult", "fact", "const0", "take"}
    assert sites["const0"].annot == Bang(STREAM_NAT)
    assert all(s.depth == 0 for s in program.rec_sites)
