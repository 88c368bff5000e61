import pytest

from lnlfpc import load_program
from lnlfpc.core import (
    LIST_NAT, NAT, STAR, UNIT, VOID, Bang, Fold, Lam, Left, Lift, Lolli, Mu, Pair, Right, Sum, TVar,
    Tensor, Var, is_value, stream_type,
)
from lnlfpc.diagnostics import LnlError
from lnlfpc.elaborator import expand_numeral
from lnlfpc.evaluator import Value, evaluate
from lnlfpc.oracle import (
    DecodeError, TermEnumerator, count_derivations, decode_list_nat, decode_nat, derivable,
    encode_list_nat, enum_closed_values, run_grid,
)
from lnlfpc.typechecker import EMPTY, accepts

ENDO = Lolli(UNIT, UNIT)
CELL = Tensor(NAT, LIST_NAT)


def test_pair_with_a_non_linear_variable_has_two_derivations():
    ctx = (ENDO, NAT)  # y : I -o I innermost, x : Nat outermost
    term = Pair(Var(1, "x"), Var(0, "y"))
    assert derivable(ctx, term, Tensor(NAT, ENDO))
    assert count_derivations(ctx, term, Tensor(NAT, ENDO)) == 2


def test_contraction_is_not_admissible_for_functions():
    assert not derivable((ENDO,), Pair(Var(0), Var(0)), Tensor(ENDO, ENDO))


def test_star_is_derivable():
    assert derivable((), STAR, UNIT)
    assert count_derivations((), STAR, UNIT) == 1


def test_judgement_that_needs_sharing():
    # both premises of the pair need x, so only the shared part can supply it
    assert derivable((NAT,), Pair(Var(0), Var(0)), Tensor(NAT, NAT))


def test_weakening_needs_non_linear_type():
    assert derivable((NAT,), STAR, UNIT)
    assert not derivable((ENDO,), STAR, UNIT)


def test_lift_rejects_linear_context():
    assert not derivable((ENDO,), Lift(Var(0)), Bang(ENDO))
    assert derivable((NAT,), Lift(Var(0)), Bang(NAT))


def test_search_bound():
    with pytest.raises(LnlError) as info:
        derivable((), expand_numeral(10), NAT, max_size=20)
    assert info.value.code == "E-TOO-LARGE"


# -- closed values --------------------------------------------------------------

def test_no_closed_values_without_a_base_case():
    assert enum_closed_values(Mu("X", Tensor(NAT, TVar(0))), 6) == []


def test_void_is_empty():
    assert enum_closed_values(VOID, 6) == []


def test_numerals_are_rediscovered():
    values = enum_closed_values(NAT, 4)
    assert expand_numeral(0) in values
    assert expand_numeral(1) in values


@pytest.mark.parametrize("ty", [NAT, UNIT, Sum(UNIT, NAT), Tensor(NAT, UNIT), Bang(NAT),
                                Lolli(NAT, NAT), LIST_NAT, stream_type(NAT)])
def test_enumerated_values_are_typed_fixed_points(ty):
    values = enum_closed_values(ty, 4)
    assert values
    for v in values:
        assert is_value(v)
        assert accepts(EMPTY, v, ty)
        assert evaluate(v, 10) == Value(v)


def test_depth_limit():
    with pytest.raises(ValueError):
        enum_closed_values(NAT, 7)


# -- codecs ---------------------------------------------------------------------

def test_decode_round_trip():
    for k in range(101):
        assert decode_nat(expand_numeral(k)) == k


def test_decode_one_built_by_hand():
    one = Fold(NAT, Right(UNIT, NAT, Fold(NAT, Left(UNIT, NAT, STAR))))
    assert decode_nat(one) == 1


def test_decode_rejects_non_numerals():
    with pytest.raises(DecodeError) as info:
        decode_nat(STAR)
    assert info.value.code == "E-NOT-NUMERAL"


def test_decode_lists():
    nil = Fold(LIST_NAT, Left(UNIT, CELL, STAR))
    zero = expand_numeral(0)
    two_zeros = Fold(LIST_NAT, Right(UNIT, CELL, Pair(zero, Fold(LIST_NAT, Right(UNIT, CELL, Pair(zero, nil))))))
    assert decode_list_nat(nil) == []
    assert decode_list_nat(two_zeros) == [0, 0]
    assert encode_list_nat([0, 0]) == two_zeros
    assert decode_list_nat(encode_list_nat([3, 1, 4])) == [3, 1, 4]


def test_decode_list_rejects_numerals():
    with pytest.raises(DecodeError) as info:
        decode_list_nat(expand_numeral(0))
    assert info.value.code == "E-NOT-LIST"


def test_prelude_list_matches_codec():
    program = load_program("main = take 2 const0;")
    outcome = evaluate(program.main, 10**6)
    assert decode_list_nat(outcome.term) == [0, 0]


# -- grid -----------------------------------------------------------------------

def test_enumerator_sizes_count_annotations():
    enum = TermEnumerator()
    sizes = {}
    for size in range(1, 5):
        for term, _ in enum.terms((NAT,), size):
            sizes[term] = size
    assert sizes[Var(0)] == 1
    assert sizes[Lam("x", UNIT, Var(0))] == 3
    assert sizes[Left(NAT, UNIT, Var(0))] == 4


def test_small_grid_agrees():
    report = run_grid(max_size=5)
    assert report.contexts == 21
    assert report.judgements > 1000
    assert 0 < report.accepted < report.judgements
    assert report.disagreements == []
    assert report.agreement == 1.0
