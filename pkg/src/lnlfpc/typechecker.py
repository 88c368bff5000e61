"""Algorithmic linear type checking.

Instead of guessing how to split the context at every multi-premise rule, the
checker synthesizes, for each subterm, its type together with the *use set*:
the context indices of the linear variables it consumes.  Non-linear
variables are never tracked, which makes weakening and contraction for them
implicit.  Premises that share a context must have disjoint use sets; binders
of linear type must be consumed by their scope; ``lift`` may consume nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import (
    App, Bang, Case, CoreTerm, CoreType, Fold, Force, Lam, Left, LetPair, Lift, Lolli, Mu,
    Pair, Right, Sum, Tensor, Unfold, Var, is_non_linear, type_eq, unroll,
)
from .diagnostics import Diagnostic, LnlError, TypeCheckError
from .pretty import show_core_type

UseSet = frozenset


@dataclass(frozen=True)
class TypingContext:
    """Term context; ``entries[0]`` is the innermost binder (De Bruijn index 0)."""
    entries: tuple[tuple[str, CoreType], ...] = ()

    @classmethod
    def from_bindings(cls, bindings: Iterable[tuple[str, CoreType]]) -> TypingContext:
        """Build from bindings written left to right, so the last one is index 0."""
        return cls(tuple(reversed(list(bindings))))

    def extend(self, name: str, ty: CoreType) -> TypingContext:
        return TypingContext(((name, ty),) + self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> tuple[str, CoreType]:
        return self.entries[index]

    def linear_indices(self) -> frozenset[int]:
        return frozenset(i for i, (_, ty) in enumerate(self.entries) if not is_non_linear(ty))


EMPTY = TypingContext()


def _unbind(uses: frozenset[int], count: int) -> frozenset[int]:
    return frozenset(i - count for i in uses if i >= count)


def _fail(code: str, message: str, term: CoreTerm):
    raise TypeCheckError(Diagnostic(code, message, term.span))


def _names(ctx: TypingContext, indices) -> str:
    return ", ".join(repr(ctx[i][0]) for i in sorted(indices))


def synth(ctx: TypingContext, term: CoreTerm) -> tuple[CoreType, frozenset[int]]:
    """Synthesize ``(type, use set)`` for ``term`` or raise ``TypeCheckError``."""
    match term:
        case Var(i, name):
            if not 0 <= i < len(ctx):
                _fail("E-UNBOUND", f"unbound variable {name!r}", term)
            ty = ctx[i][1]
            return ty, (UseSet() if is_non_linear(ty) else UseSet({i}))

        case Left(a, b, m) | Right(a, b, m):
            expected = a if isinstance(term, Left) else b
            ty, uses = synth(ctx, m)
            if not type_eq(ty, expected):
                side = "left" if isinstance(term, Left) else "right"
                _fail("E-TYPE-MISMATCH", f"{side} injection expects {show_core_type(expected)}, "
                      f"got {show_core_type(ty)}", term)
            return Sum(a, b), uses

        case Case(m, x, n, y, p):
            scrut, um = synth(ctx, m)
            if not isinstance(scrut, Sum):
                _fail("E-NOT-SUM", f"case on a value of type {show_core_type(scrut)}", m)
            tn, un = synth(ctx.extend(x, scrut.left), n)
            tp, up = synth(ctx.extend(y, scrut.right), p)
            if not is_non_linear(scrut.left) and 0 not in un:
                _fail("E-LINEAR-UNUSED", f"linear variable {x!r} is not used in its branch", n)
            if not is_non_linear(scrut.right) and 0 not in up:
                _fail("E-LINEAR-UNUSED", f"linear variable {y!r} is not used in its branch", p)
            un, up = _unbind(un, 1), _unbind(up, 1)
            if un != up:
                _fail("E-BRANCH-MISMATCH", "case branches consume different linear variables: "
                      f"{{{_names(ctx, un)}}} vs {{{_names(ctx, up)}}}", term)
            if not type_eq(tn, tp):
                _fail("E-BRANCH-MISMATCH", f"case branches have different types: "
                      f"{show_core_type(tn)} vs {show_core_type(tp)}", term)
            if um & un:
                _fail("E-LINEAR-REUSED", f"linear variable(s) {_names(ctx, um & un)} used more than once", term)
            return tn, um | un

        case Pair(m, n):
            tm, um = synth(ctx, m)
            tn, un = synth(ctx, n)
            if um & un:
                _fail("E-LINEAR-REUSED", f"linear variable(s) {_names(ctx, um & un)} used more than once", term)
            return Tensor(tm, tn), um | un

        case LetPair(m, x, y, n):
            scrut, um = synth(ctx, m)
            if not isinstance(scrut, Tensor):
                _fail("E-NOT-PAIR", f"let-pair on a value of type {show_core_type(scrut)}", m)
            tn, un = synth(ctx.extend(x, scrut.left).extend(y, scrut.right), n)
            if not is_non_linear(scrut.left) and 1 not in un:
                _fail("E-LINEAR-UNUSED", f"linear variable {x!r} is never used", term)
            if not is_non_linear(scrut.right) and 0 not in un:
                _fail("E-LINEAR-UNUSED", f"linear variable {y!r} is never used", term)
            un = _unbind(un, 2)
            if um & un:
                _fail("E-LINEAR-REUSED", f"linear variable(s) {_names(ctx, um & un)} used more than once", term)
            return tn, um | un

        case Lam(x, a, m):
            tm, um = synth(ctx.extend(x, a), m)
            if not is_non_linear(a) and 0 not in um:
                _fail("E-LINEAR-UNUSED", f"linear variable {x!r} is never used", term)
            return Lolli(a, tm), _unbind(um, 1)

        case App(m, n):
            tm, um = synth(ctx, m)
            if not isinstance(tm, Lolli):
                _fail("E-NOT-FUNCTION", f"applying a value of type {show_core_type(tm)}", m)
            tn, un = synth(ctx, n)
            if not type_eq(tn, tm.domain):
                _fail("E-TYPE-MISMATCH", f"argument has type {show_core_type(tn)}, "
                      f"expected {show_core_type(tm.domain)}", n)
            if um & un:
                _fail("E-LINEAR-REUSED", f"linear variable(s) {_names(ctx, um & un)} used more than once", term)
            return tm.codomain, um | un

        case Lift(m):
            tm, um = synth(ctx, m)
            if um:
                _fail("E-LIFT-LINEAR", f"lift body uses linear variable(s) {_names(ctx, um)}", term)
            return Bang(tm), um

        case Force(m):
            tm, um = synth(ctx, m)
            if not isinstance(tm, Bang):
                _fail("E-NOT-BANG", f"force on a value of type {show_core_type(tm)}", m)
            return tm.body, um

        case Fold(a, m):
            tm, um = synth(ctx, m)
            expected = unroll(a)
            if not type_eq(tm, expected):
                _fail("E-TYPE-MISMATCH", f"fold[{show_core_type(a)}] expects {show_core_type(expected)}, "
                      f"got {show_core_type(tm)}", term)
            return a, um

        case Unfold(m):
            tm, um = synth(ctx, m)
            if not isinstance(tm, Mu):
                _fail("E-NOT-MU", f"unfold on a value of type {show_core_type(tm)}", m)
            return unroll(tm), um

    raise TypeError(f"not a core term: {term!r}")


def check_judgement(ctx: TypingContext, term: CoreTerm, expected: CoreType) -> None:
    """Accept ``ctx |- term : expected`` or raise ``TypeCheckError``.

    Every linear variable of ``ctx`` must be consumed exactly once.
    """
    ty, uses = synth(ctx, term)
    if not type_eq(ty, expected):
        _fail("E-TYPE-MISMATCH", f"expected {show_core_type(expected)}, got {show_core_type(ty)}", term)
    leftover = ctx.linear_indices() - uses
    if leftover:
        _fail("E-LINEAR-UNUSED", f"linear variable(s) {_names(ctx, leftover)} never used", term)


def accepts(ctx: TypingContext, term: CoreTerm, expected: CoreType) -> bool:
    try:
        check_judgement(ctx, term, expected)
    except TypeCheckError:
        return False
    return True


def type_of(term: CoreTerm) -> CoreType:
    """Type of a closed term (raises ``TypeCheckError`` if ill-typed)."""
    ty, _ = synth(EMPTY, term)
    return ty


def check_program(program) -> list[tuple[str, CoreType]]:
    """Check every definition against its declared type and synthesize main's type.

    Returns ``[(name, type), ...]`` (with ``("main", type)`` last when present);
    raises ``TypeCheckError`` aggregating the first failure of each definition.
    """
    results: list[tuple[str, CoreType]] = []
    errors: list[Diagnostic] = []
    for d in program.definitions:
        try:
            check_judgement(EMPTY, d.body, d.type)
            results.append((d.name, d.type))
        except LnlError as exc:
            diag = exc.diagnostic
            if diag.span is None:
                diag = Diagnostic(diag.code, diag.message, d.span, diag.severity)
            errors.append(diag.with_definition(d.name))
    if program.main is not None:
        try:
            results.append(("main", type_of(program.main)))
        except LnlError as exc:
            errors.append(exc.diagnostic.with_definition("main"))
    if errors:
        raise TypeCheckError(errors)
    return results
