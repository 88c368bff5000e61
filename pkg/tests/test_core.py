from functools import lru_cache
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from lnlfpc.core import (
    LIST_NAT, NAT, STAR, STREAM_NAT, UNIT, VOID, App, Bang, Case, Fold, Force, Lam, Left,
    LetPair, Lift, Lolli, Mu, Pair, Right, Sum, TVar, Tensor, Unfold, Var, free_vars,
    is_closed, is_non_linear, is_value, sexpr, shift_term, shift_type, stream_type,
    subst_pair, subst_term, subst_type, term_depth, term_size, type_eq, type_wf, unroll,
)
from lnlfpc.elaborator import expand_numeral

ENDO = Lolli(UNIT, UNIT)


# -- a reference implementation on named syntax ------------------------------
# ("var", X) | ("sum"/"tensor"/"lolli", a, b) | ("bang", a) | ("mu", X, a)

def named_free(ty):
    match ty:
        case ("var", x):
            return {x}
        case ("bang", a):
            return named_free(a)
        case ("mu", x, a):
            return named_free(a) - {x}
        case (_, a, b):
            return named_free(a) | named_free(b)


def named_subst(ty, x, repl):
    match ty:
        case ("var", y):
            return repl if y == x else ty
        case ("bang", a):
            return ("bang", named_subst(a, x, repl))
        case ("mu", y, a):
            if y == x:
                return ty
            if y in named_free(repl):
                fresh = y + "'"
                while fresh in named_free(repl) | named_free(a):
                    fresh += "'"
                a, y = named_subst(a, y, ("var", fresh)), fresh
            return ("mu", y, named_subst(a, x, repl))
        case (tag, a, b):
            return (tag, named_subst(a, x, repl), named_subst(b, x, repl))


def to_debruijn(ty, env):
    """``env`` lists binder names, innermost first."""
    match ty:
        case ("var", x):
            return TVar(env.index(x))
        case ("bang", a):
            return Bang(to_debruijn(a, env))
        case ("mu", x, a):
            return Mu(x, to_debruijn(a, [x] + env))
        case ("sum", a, b):
            return Sum(to_debruijn(a, env), to_debruijn(b, env))
        case ("tensor", a, b):
            return Tensor(to_debruijn(a, env), to_debruijn(b, env))
        case ("lolli", a, b):
            return Lolli(to_debruijn(a, env), to_debruijn(b, env))


NAMES = ["X", "Y", "Z"]


def named_types(free):
    leaf = st.sampled_from([("var", v) for v in free] or [("var", "X")])

    def extend(inner):
        return st.one_of(
            st.tuples(st.sampled_from(["sum", "tensor", "lolli"]), inner, inner),
            st.tuples(st.just("bang"), inner),
            st.tuples(st.just("mu"), st.sampled_from(NAMES), inner),
        )
    return st.recursive(leaf, extend, max_leaves=6)


def closes_over(ty, env):
    return named_free(ty) <= set(env)


# -- substType -----------------------------------------------------------------

def test_subst_unrolls_nat():
    assert subst_type(Sum(UNIT, TVar(0)), NAT) == Sum(UNIT, NAT)


def test_subst_variable_is_replacement():
    b = Tensor(NAT, UNIT)
    assert subst_type(TVar(0), b) == b


def test_subst_under_binder_shifts():
    body = Mu("Y", Tensor(TVar(1), TVar(0)))
    assert subst_type(body, Bang(UNIT)) == Mu("Y", Tensor(Bang(UNIT), TVar(0)))


def test_subst_matches_named_reference_example():
    # (mu Y. X * Y)[!I / X] against the named version with renaming
    named = ("mu", "Y", ("tensor", ("var", "X"), ("var", "Y")))
    repl = ("bang", ("var", "Y"))  # captures unless Y is renamed
    env = ["X", "Y"]
    expected = to_debruijn(named_subst(named, "X", repl), ["Y"])
    assert subst_type(to_debruijn(named, env), to_debruijn(repl, ["Y"])) == expected


@settings(max_examples=300, deadline=None)
@given(named_types(["X", "Y"]), named_types(["Y"]))
def test_subst_agrees_with_named_substitution(body, repl):
    if not closes_over(body, ["X", "Y"]) or not closes_over(repl, ["Y"]):
        return
    expected = to_debruijn(named_subst(body, "X", repl), ["Y"])
    assert subst_type(to_debruijn(body, ["X", "Y"]), to_debruijn(repl, ["Y"])) == expected


def test_unroll_nat():
    assert type_eq(unroll(NAT), Sum(UNIT, NAT))


# -- alpha-equivalence ----------------------------------------------------------

def test_type_eq_ignores_hints():
    assert type_eq(Mu("X", Sum(UNIT, TVar(0))), Mu("Y", Sum(UNIT, TVar(0))))
    assert hash(Mu("X", TVar(0))) == hash(Mu("Q", TVar(0)))


def test_type_eq_is_not_commutative():
    assert not type_eq(Tensor(NAT, UNIT), Tensor(UNIT, NAT))


def test_term_eq_ignores_hints():
    assert Lam("x", NAT, Var(0, "x")) == Lam("y", NAT, Var(0, "y"))


def test_fold_requires_mu():
    with pytest.raises(ValueError):
        Fold(UNIT, STAR)


# -- classifiers -----------------------------------------------------------------

@pytest.mark.parametrize("ty", [VOID, UNIT, NAT, LIST_NAT, STREAM_NAT, Bang(ENDO), TVar(0)])
def test_non_linear_types(ty):
    assert is_non_linear(ty)


@pytest.mark.parametrize("ty", [Lolli(NAT, NAT), ENDO, stream_type(ENDO), Sum(NAT, ENDO),
                                Tensor(ENDO, UNIT), Mu("X", Lolli(TVar(0), TVar(0)))])
def test_linear_types(ty):
    assert not is_non_linear(ty)


def test_values():
    assert is_value(Lift(App(STAR, STAR)))
    assert not is_value(Force(Lift(STAR)))
    assert is_value(Fold(NAT, Left(UNIT, NAT, STAR)))
    assert is_value(Lam("x", NAT, Unfold(Var(0))))
    assert not is_value(Pair(STAR, Force(STAR)))
    assert all(is_value(expand_numeral(n)) for n in range(21))


# -- substTerm -------------------------------------------------------------------

def test_subst_term_hit():
    assert subst_term(Var(0), STAR) == STAR


def test_subst_term_duplicates_closed_value():
    two = expand_numeral(2)
    assert subst_term(Pair(Var(0), Var(0)), two) == Pair(two, two)


def test_subst_term_under_lambda_shifts_open_value():
    # (\y:A. x)[v/x] with v = z (free, index 0 outside) becomes \y:A. z at index 1
    v = Var(0, "z")
    result = subst_term(Lam("y", NAT, Var(1, "x")), v)
    assert result == Lam("y", NAT, Var(1, "z"))
    assert result == Lam("y", NAT, shift_term(v, 1))


def test_subst_term_decrements_other_free_variables():
    assert subst_term(Pair(Var(0), Var(3)), STAR) == Pair(STAR, Var(2))


def test_subst_term_leaves_types_alone():
    body = Left(NAT, UNIT, Var(0))
    assert subst_term(body, expand_numeral(1)).annot_left == NAT


def test_subst_closed_body_is_identity():
    body = Lam("x", NAT, Pair(Var(0), STAR))
    assert subst_term(body, expand_numeral(3)) == body


def test_subst_pair_order():
    # let <x, y> = ... in <x, y>: y is index 0, x is index 1
    one, two = expand_numeral(1), expand_numeral(2)
    assert subst_pair(Pair(Var(1), Var(0)), one, two) == Pair(one, two)


def test_free_vars_and_closedness():
    t = Lam("x", NAT, Pair(Var(0), Var(2)))
    assert free_vars(t) == {1}
    assert not is_closed(t)
    assert is_closed(STAR)


def test_size_and_depth():
    assert term_size(STAR) == 3
    assert term_depth(STAR) == 3
    assert term_depth(expand_numeral(1000)) == 2 * 1000 + 5


def test_deep_numeral_substitution_does_not_overflow():
    big = expand_numeral(5000)
    assert subst_term(Pair(Var(0), STAR), big).first is big


# -- s-expressions ---------------------------------------------------------------

def test_sexpr_nat_golden():
    nat = Mu("X", Sum(Bang(Lolli(Mu("Z", TVar(0)), Mu("Z", TVar(0)))), TVar(0)))
    assert sexpr(nat) == '(mu "X" (sum (bang (lolli (mu "Z" (tvar 0)) (mu "Z" (tvar 0)))) (tvar 0)))'
    assert nat == NAT


def test_sexpr_terms():
    t = Case(Var(0, "b"), "u", Var(0, "u"), "v", Var(0, "v"))
    assert sexpr(t) == '(case (var 0 "b") "u" (var 0 "u") "v" (var 0 "v"))'
    assert sexpr(LetPair(Var(0, "p"), "a", "b", Var(1, "a"))) == '(letpair (var 0 "p") "a" "b" (var 1 "a"))'


# -- type substitution keeps types well formed and non-linear --------------------

@lru_cache(maxsize=None)
def types_of_size(size: int, nvars: int) -> tuple:
    if size == 1:
        return tuple(TVar(i) for i in range(nvars))
    out = [Bang(a) for a in types_of_size(size - 1, nvars)]
    out += [Mu("X", a) for a in types_of_size(size - 1, nvars + 1)]
    for s1 in range(1, size - 1):
        for a, b in itertools.product(types_of_size(s1, nvars), types_of_size(size - 1 - s1, nvars)):
            out += [Sum(a, b), Tensor(a, b), Lolli(a, b)]
    return tuple(out)


def test_substitution_preserves_well_formedness_and_non_linearity():
    # A over n+1 = 2 variables up to size 6, B over n = 1 variable up to size 3
    bodies = [a for s in range(1, 7) for a in types_of_size(s, 2)]
    repls = [b for s in range(1, 4) for b in types_of_size(s, 1)]
    assert len(bodies) > 5_000
    checked = 0
    for a in bodies:
        for b in repls:
            out = subst_type(a, b)
            assert type_wf(out, 1)
            if is_non_linear(a) and is_non_linear(b):
                assert is_non_linear(out)
            checked += 1
    assert checked == len(bodies) * len(repls)


@pytest.mark.parametrize("a", [NAT, UNIT, ENDO, Lolli(NAT, NAT), VOID, Bang(ENDO), Sum(NAT, ENDO)])
def test_stream_is_non_linear_iff_element_is(a):
    assert is_non_linear(stream_type(a)) == is_non_linear(a)


def test_shift_type_respects_binders():
    assert shift_type(Mu("X", Sum(TVar(0), TVar(1))), 2) == Mu("X", Sum(TVar(0), TVar(3)))
