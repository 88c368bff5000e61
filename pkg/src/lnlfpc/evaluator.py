"""Fuel-bounded call-by-value big-step evaluation by substitution.

The big-step rules are run on an explicit continuation stack, so the depth of
the derivation never turns into native recursion.  Every rule application
(every "evaluate this term" request) costs one unit of fuel.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    App, Case, CoreTerm, Fold, Force, Lam, Left, LetPair, Lift, Pair, Right, Unfold, Var,
    subst_pair, subst_term,
)
from .deep import run_deep
from .diagnostics import Diagnostic, LnlError

DEFAULT_FUEL = 1_000_000


@dataclass(frozen=True)
class Value:
    term: CoreTerm


@dataclass(frozen=True)
class OutOfFuel:
    pass


@dataclass(frozen=True)
class Stuck:
    location: CoreTerm
    reason: str


EvalOutcome = Value | OutOfFuel | Stuck


class _Stuck(Exception):
    def __init__(self, location: CoreTerm, reason: str):
        self.location = location
        self.reason = reason


# Continuation frames.  Each frame receives the value of the subterm evaluated
# last and either returns a term to evaluate next (tail position) or a value.

_REBUILD, _PAIR_SECOND, _PAIR_DONE, _CASE, _LET, _APP_ARG, _APP_CALL, _FORCE, _UNFOLD = range(9)


def _free_occurrence(term: CoreTerm) -> Var:
    """Some variable occurrence of ``term`` that no binder inside ``term`` captures."""
    pending = [(term, 0)]
    while pending:
        t, depth = pending.pop()
        if t.bound <= depth:
            continue
        match t:
            case Var():
                return t
            case Left(_, _, m) | Right(_, _, m) | Lift(m) | Force(m) | Fold(_, m) | Unfold(m):
                pending.append((m, depth))
            case Case(m, _, n, _, p):
                pending += [(m, depth), (n, depth + 1), (p, depth + 1)]
            case Pair(m, n) | App(m, n):
                pending += [(m, depth), (n, depth)]
            case LetPair(m, _, _, n):
                pending += [(m, depth), (n, depth + 2)]
            case Lam(_, _, m):
                pending.append((m, depth + 1))
    raise ValueError("term is closed")


def _evaluate(term: CoreTerm, fuel: int) -> EvalOutcome:
    # Evaluation never opens a closed term, so one check up front covers every
    # free variable the rules could reach.
    if term.bound > 0:
        var = _free_occurrence(term)
        return Stuck(var, f"free variable {var.name!r}")
    stack: list[tuple] = []
    current: CoreTerm | None = term
    result: CoreTerm | None = None

    while True:
        if current is not None:
            # evaluate `current`
            if fuel <= 0:
                return OutOfFuel()
            fuel -= 1
            t = current
            current = None
            if t.is_value:
                result = t
            else:
                match t:
                    case Left(_, _, m) | Right(_, _, m) | Fold(_, m):
                        stack.append((_REBUILD, t))
                        current = m
                    case Pair(m, _):
                        stack.append((_PAIR_SECOND, t))
                        current = m
                    case Case(m, _, _, _, _):
                        stack.append((_CASE, t))
                        current = m
                    case LetPair(m, _, _, _):
                        stack.append((_LET, t))
                        current = m
                    case App(m, _):
                        stack.append((_APP_ARG, t))
                        current = m
                    case Force(m):
                        stack.append((_FORCE, t))
                        current = m
                    case Unfold(m):
                        stack.append((_UNFOLD, t))
                        current = m
                    case _:
                        raise TypeError(f"not a core term: {t!r}")
                continue

        # return `result` to the innermost frame
        if not stack:
            return Value(result)
        kind, t, *extra = stack.pop()
        v = result
        if kind == _REBUILD:
            match t:
                case Left(a, b, _):
                    result = Left(a, b, v)
                case Right(a, b, _):
                    result = Right(a, b, v)
                case Fold(a, _):
                    result = Fold(a, v)
        elif kind == _PAIR_SECOND:
            stack.append((_PAIR_DONE, t, v))
            current = t.second
        elif kind == _PAIR_DONE:
            result = Pair(extra[0], v)
        elif kind == _CASE:
            match v:
                case Left(_, _, w):
                    current = subst_term(t.left, w)
                case Right(_, _, w):
                    current = subst_term(t.right, w)
                case _:
                    return Stuck(t, "case scrutinee is not an injection")
        elif kind == _LET:
            if not isinstance(v, Pair):
                return Stuck(t, "let-pair scrutinee is not a pair")
            current = subst_pair(t.body, v.first, v.second)
        elif kind == _APP_ARG:
            if not isinstance(v, Lam):
                return Stuck(t, "applying a non-function")
            stack.append((_APP_CALL, t, v))
            current = t.arg
        elif kind == _APP_CALL:
            current = subst_term(extra[0].body, v)
        elif kind == _FORCE:
            if not isinstance(v, Lift):
                return Stuck(t, "force of a non-lifted value")
            current = v.body
        elif kind == _UNFOLD:
            if not isinstance(v, Fold):
                return Stuck(t, "unfold of a non-folded value")
            result = v.body


def evaluate(term: CoreTerm, fuel: int = DEFAULT_FUEL) -> EvalOutcome:
    """Evaluate a closed term with at most ``fuel`` rule applications."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    return run_deep(_evaluate, term, fuel)


def run_main(program, fuel: int = DEFAULT_FUEL) -> EvalOutcome:
    if program.main is None:
        raise LnlError(Diagnostic("E-NO-MAIN", "the program has no main term"))
    return evaluate(program.main, fuel)
