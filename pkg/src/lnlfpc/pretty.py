"""Readable rendering of core syntax back into surface syntax.

Bound names come from the hints, renamed where needed so that printing and
re-parsing gives back the same De Bruijn term.  Closed types that coincide
with a known alias may be printed under the alias name.
"""

from __future__ import annotations

from .core import (
    NAT, UNIT, VOID, LIST_NAT, STREAM_NAT, App, Bang, Case, CoreTerm, CoreType, Fold,
    Force, Lam, Left, LetPair, Lift, Lolli, Mu, Pair, Right, Sum, TVar, Tensor, Unfold, Var,
    type_wf,
)
from .parser import KEYWORDS
from .surface import (
    Definition, SApp, SBang, SCase, SFold, SForce, SLam, SLeft, SLetPair, SLift, SLolli,
    SMu, SName, SPair, SRight, SSum, STensor, SUnfold, SVar, SurfaceModule, show_module,
    show_term, show_type,
)

STANDARD_ALIASES: tuple[tuple[str, CoreType], ...] = (
    ("Void", VOID),
    ("I", UNIT),
    ("Nat", NAT),
    ("ListNat", LIST_NAT),
    ("StreamNat", STREAM_NAT),
)


def _fresh(hint: str, taken) -> str:
    base = hint if hint and hint not in KEYWORDS else "v"
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def surface_type(ty: CoreType, aliases=(), bound: tuple[str, ...] = (), reserved=frozenset()):
    """``bound`` lists names of enclosing mu binders, innermost last."""
    if aliases and type_wf(ty, 0):
        for name, aty in aliases:
            if aty == ty:
                return SName(name)
    match ty:
        case TVar(i):
            return SName(bound[-1 - i]) if i < len(bound) else SName(f"?{i}")
        case Sum(a, b):
            return SSum(surface_type(a, aliases, bound, reserved), surface_type(b, aliases, bound, reserved))
        case Tensor(a, b):
            return STensor(surface_type(a, aliases, bound, reserved), surface_type(b, aliases, bound, reserved))
        case Lolli(a, b):
            return SLolli(surface_type(a, aliases, bound, reserved), surface_type(b, aliases, bound, reserved))
        case Bang(a):
            return SBang(surface_type(a, aliases, bound, reserved))
        case Mu(name, a):
            fresh = _fresh(name, set(bound) | set(reserved) | {n for n, _ in aliases})
            return SMu(fresh, surface_type(a, aliases, bound + (fresh,), reserved))
    raise TypeError(f"not a core type: {ty!r}")


def surface_term(term: CoreTerm, aliases=(), env: tuple[str, ...] = (), reserved=frozenset()):
    """``env`` lists names of enclosing term binders, innermost last."""
    def ty(t):
        return surface_type(t, aliases, (), reserved)

    def go(t, env):
        taken = set(env) | set(reserved)
        match t:
            case Var(i):
                return SVar(env[-1 - i]) if i < len(env) else SVar(f"?{i}")
            case Left(a, b, m):
                return SLeft(ty(a), ty(b), go(m, env))
            case Right(a, b, m):
                return SRight(ty(a), ty(b), go(m, env))
            case Case(m, x, n, y, p):
                fx, fy = _fresh(x, taken), _fresh(y, taken)
                return SCase(go(m, env), fx, go(n, env + (fx,)), fy, go(p, env + (fy,)))
            case Pair(m, n):
                return SPair(go(m, env), go(n, env))
            case LetPair(m, x, y, n):
                fx = _fresh(x, taken)
                fy = _fresh(y, taken | {fx})
                return SLetPair(go(m, env), fx, fy, go(n, env + (fx, fy)))
            case Lam(x, a, m):
                fx = _fresh(x, taken)
                return SLam(fx, ty(a), go(m, env + (fx,)))
            case App(m, n):
                return SApp(go(m, env), go(n, env))
            case Lift(m):
                return SLift(go(m, env))
            case Force(m):
                return SForce(go(m, env))
            case Fold(a, m):
                return SFold(ty(a), go(m, env))
            case Unfold(m):
                return SUnfold(go(m, env))
        raise TypeError(f"not a core term: {t!r}")

    return go(term, tuple(env))


def show_core_type(ty: CoreType, aliases=STANDARD_ALIASES) -> str:
    return show_type(surface_type(ty, aliases))


def show_core_term(term: CoreTerm, aliases=STANDARD_ALIASES) -> str:
    return show_term(surface_term(term, aliases))


def program_to_surface(program) -> SurfaceModule:
    """Alias-free surface module whose elaboration is ``program`` again."""
    reserved = frozenset(d.name for d in program.definitions)
    defs = tuple(
        Definition(d.name, surface_type(d.type, (), (), reserved), surface_term(d.body, (), (), reserved))
        for d in program.definitions
    )
    main = surface_term(program.main, (), (), reserved) if program.main is not None else None
    return SurfaceModule((), defs, main)


def program_to_source(program) -> str:
    return show_module(program_to_surface(program))
