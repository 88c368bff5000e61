"""Surface-to-core elaboration.

Type aliases are expanded, decimal literals become Nat numerals, references
to definitions are inlined (every definition body is closed), and ``rec`` is
replaced by its encoding through the recursive type ``mu X. !X -o A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    NAT, STAR, UNIT, App, Bang, Case, CoreTerm, CoreType, Fold, Force, Lam, Left, LetPair,
    Lift, Lolli, Mu, Pair, Right, Sum, TVar, Tensor, Unfold, Var, shift_term, shift_type,
)
from .diagnostics import Diagnostic, ElaborationError, Span
from .surface import (
    SApp, SBang, SCase, SFold, SForce, SLam, SLeft, SLetPair, SLift, SLolli, SMu, SName,
    SNat, SPair, SRec, SRight, SSum, STensor, SUnfold, SVar, SurfaceModule,
)


@dataclass(frozen=True)
class CoreDefinition:
    name: str
    type: CoreType
    body: CoreTerm
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class RecSite:
    """One ``rec z : !A. m`` occurrence, kept for checking the encoding."""
    definition: str | None
    name: str
    annot: Bang
    body: CoreTerm          # m, with z at index 0
    term: CoreTerm          # the encoded term
    depth: int              # number of enclosing term binders
    span: Span | None = field(default=None, compare=False)


@dataclass
class CoreProgram:
    definitions: list[CoreDefinition] = field(default_factory=list)
    main: CoreTerm | None = None
    aliases: dict[str, CoreType] = field(default_factory=dict)
    rec_sites: list[RecSite] = field(default_factory=list)

    def lookup(self, name: str) -> CoreDefinition:
        for d in self.definitions:
            if d.name == name:
                return d
        raise KeyError(name)

    def __eq__(self, other):
        if not isinstance(other, CoreProgram):
            return NotImplemented
        return self.definitions == other.definitions and self.main == other.main


def desugar_rec(hint: str, annot: CoreType, body: CoreTerm, span: Span | None = None) -> CoreTerm:
    """Encode ``rec hint : !A. body`` as ``(unfold force a) a`` with

    ``a = lift fold[R] \\x:!R. (\\hint:!A. body) (lift (unfold force x) x)``
    and ``R = mu X. !X -o A``.  Both occurrences of ``a`` are the same object.
    """
    if not isinstance(annot, Bang):
        raise ElaborationError(Diagnostic(
            "E-REC-ANNOT", "the variable bound by rec must have a type of the form !A", span))
    result = annot.body
    r = Mu("X", Lolli(Bang(TVar(0)), shift_type(result, 1)))
    x = Var(0, "x", span)
    # body moves under the extra binder x, which sits just outside hint
    inner = App(
        Lam(hint, annot, shift_term(body, 1, 1), span),
        Lift(App(Unfold(Force(x, span), span), x, span), span),
        span,
    )
    alpha = Lift(Fold(r, Lam("x", Bang(r), inner, span), span), span)
    return App(Unfold(Force(alpha, span), span), alpha, span)


def expand_numeral(n: int, span: Span | None = None) -> CoreTerm:
    """The Nat value for ``n``: ``n`` right-injections under fold around ``left *``."""
    if n < 0:
        raise ValueError("numerals are natural numbers")
    value: CoreTerm = Fold(NAT, Left(UNIT, NAT, STAR, span), span)
    for _ in range(n):
        value = Fold(NAT, Right(UNIT, NAT, value, span), span)
    return value


class _Fail(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic


_VISITING = object()
_FAILED = object()


class Elaborator:
    """Holds alias and definition tables for one (possibly merged) module."""

    def __init__(self, module: SurfaceModule):
        self.module = module
        self.alias_src = {}
        self.def_src = {}
        self.aliases: dict[str, object] = {}
        self.defs: dict[str, object] = {}
        self.def_types: dict[str, CoreType] = {}
        self.rec_sites: list[RecSite] = []
        self.errors: list[Diagnostic] = []
        self._current_def: str | None = None

    # -- types ---------------------------------------------------------------

    def alias(self, name: str, span: Span | None) -> CoreType:
        state = self.aliases.get(name)
        if state is _VISITING:
            raise _Fail(Diagnostic("E-ALIAS-CYCLE", f"type alias {name!r} refers to itself", span))
        if state is _FAILED:
            raise _Fail(Diagnostic("E-UNKNOWN-NAME", f"type alias {name!r} is ill-formed", span))
        if state is not None:
            return state
        self.aliases[name] = _VISITING
        try:
            ty = self.resolve_type(self.alias_src[name].body, [])
        except _Fail:
            self.aliases[name] = _FAILED
            raise
        self.aliases[name] = ty
        return ty

    def resolve_type(self, sty, bound: list[str]) -> CoreType:
        match sty:
            case SName(name):
                for i, b in enumerate(reversed(bound)):
                    if b == name:
                        return TVar(i)
                if name in self.alias_src:
                    # aliases are closed, so they need no shifting
                    return self.alias(name, sty.span)
                raise _Fail(Diagnostic("E-UNKNOWN-NAME", f"unknown type {name!r}", sty.span))
            case SSum(a, b):
                return Sum(self.resolve_type(a, bound), self.resolve_type(b, bound))
            case STensor(a, b):
                return Tensor(self.resolve_type(a, bound), self.resolve_type(b, bound))
            case SLolli(a, b):
                return Lolli(self.resolve_type(a, bound), self.resolve_type(b, bound))
            case SBang(a):
                return Bang(self.resolve_type(a, bound))
            case SMu(name, body):
                return Mu(name, self.resolve_type(body, bound + [name]))
        raise TypeError(f"not a surface type: {sty!r}")

    def closed_type(self, sty) -> CoreType:
        return self.resolve_type(sty, [])

    # -- terms ---------------------------------------------------------------

    def definition(self, name: str, span: Span | None) -> CoreTerm:
        state = self.defs.get(name)
        if state is _VISITING:
            raise _Fail(Diagnostic("E-DEF-CYCLE", f"definition {name!r} depends on itself (use rec)", span))
        if state is _FAILED:
            raise _Fail(Diagnostic("E-UNKNOWN-NAME", f"definition {name!r} failed to elaborate", span))
        if state is not None:
            return state
        self._elaborate_definition(name)
        state = self.defs[name]
        if state is _FAILED:
            raise _Fail(Diagnostic("E-UNKNOWN-NAME", f"definition {name!r} failed to elaborate", span))
        return state

    def _elaborate_definition(self, name: str) -> None:
        src = self.def_src[name]
        outer = self._current_def
        self._current_def = name
        self.defs[name] = _VISITING
        try:
            self.def_types[name] = self.closed_type(src.annot)
            self.defs[name] = self.term(src.body, [])
        except _Fail as exc:
            self.defs[name] = _FAILED
            self.errors.append(exc.diagnostic.with_definition(name))
        finally:
            self._current_def = outer

    def term(self, st, env: list[str]) -> CoreTerm:
        sp = st.span
        match st:
            case SVar(name):
                for i, b in enumerate(reversed(env)):
                    if b == name:
                        return Var(i, name, sp)
                if name in self.def_src:
                    return self.definition(name, sp)
                raise _Fail(Diagnostic("E-UNKNOWN-NAME", f"unbound identifier {name!r}", sp))
            case SNat(n):
                return expand_numeral(n, sp)
            case SLeft(a, b, m):
                return Left(self.closed_type(a), self.closed_type(b), self.term(m, env), sp)
            case SRight(a, b, m):
                return Right(self.closed_type(a), self.closed_type(b), self.term(m, env), sp)
            case SCase(m, x, n, y, p):
                return Case(self.term(m, env), x, self.term(n, env + [x]),
                            y, self.term(p, env + [y]), sp)
            case SPair(m, n):
                return Pair(self.term(m, env), self.term(n, env), sp)
            case SLetPair(m, x, y, n):
                return LetPair(self.term(m, env), x, y, self.term(n, env + [x, y]), sp)
            case SLam(x, a, m):
                return Lam(x, self.closed_type(a), self.term(m, env + [x]), sp)
            case SApp(m, n):
                return App(self.term(m, env), self.term(n, env), sp)
            case SLift(m):
                return Lift(self.term(m, env), sp)
            case SForce(m):
                return Force(self.term(m, env), sp)
            case SFold(a, m):
                annot = self.closed_type(a)
                if not isinstance(annot, Mu):
                    raise _Fail(Diagnostic("E-TYPE-MISMATCH", "fold needs a recursive (mu) type annotation", a.span or sp))
                return Fold(annot, self.term(m, env), sp)
            case SUnfold(m):
                return Unfold(self.term(m, env), sp)
            case SRec(x, a, m):
                annot = self.closed_type(a)
                body = self.term(m, env + [x])
                try:
                    encoded = desugar_rec(x, annot, body, sp)
                except ElaborationError as exc:
                    raise _Fail(exc.diagnostic) from None
                self.rec_sites.append(RecSite(self._current_def, x, annot, body, encoded, len(env), sp))
                return encoded
        raise TypeError(f"not a surface term: {st!r}")

    # -- driver --------------------------------------------------------------

    def run(self) -> CoreProgram:
        for a in self.module.aliases:
            if a.name in self.alias_src:
                self.errors.append(Diagnostic("E-DUPLICATE", f"type alias {a.name!r} is defined twice", a.span))
            self.alias_src.setdefault(a.name, a)
        for d in self.module.definitions:
            if d.name in self.def_src:
                self.errors.append(Diagnostic("E-DUPLICATE", f"definition {d.name!r} is defined twice",
                                              d.span, definition=d.name))
            self.def_src.setdefault(d.name, d)

        for a in self.module.aliases:
            try:
                self.alias(a.name, a.span)
            except _Fail as exc:
                self.errors.append(exc.diagnostic)

        for d in self.module.definitions:
            if d.name not in self.defs:
                self._elaborate_definition(d.name)

        main = None
        if self.module.main is not None:
            try:
                main = self.term(self.module.main, [])
            except _Fail as exc:
                self.errors.append(exc.diagnostic.with_definition("main"))

        if self.errors:
            raise ElaborationError(self.errors)
        program = CoreProgram(
            [CoreDefinition(d.name, self.def_types[d.name], self.defs[d.name], d.span)
             for d in self.module.definitions],
            main,
            {name: ty for name, ty in self.aliases.items()},
            list(self.rec_sites),
        )
        return program

    def elaborate_term(self, st) -> CoreTerm:
        """Elaborate a closed term against this module's aliases and definitions."""
        self.errors = []
        try:
            return self.term(st, [])
        except _Fail as exc:
            raise ElaborationError([exc.diagnostic]) from None


def elaborate(module: SurfaceModule) -> CoreProgram:
    """Elaborate a parsed module; raises ``ElaborationError`` listing every failure."""
    return Elaborator(module).run()
