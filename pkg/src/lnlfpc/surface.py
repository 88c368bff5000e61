"""Named surface syntax produced by the parser, and its pretty printer.

Spans are excluded from equality so that ``parse(pretty(ast)) == ast``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Span

_SPAN = dict(default=None, compare=False, repr=False)


# -- types -------------------------------------------------------------------

@dataclass(frozen=True)
class SName:
    name: str
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SSum:
    left: object
    right: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class STensor:
    left: object
    right: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SLolli:
    domain: object
    codomain: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SBang:
    body: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SMu:
    name: str
    body: object
    span: Span | None = field(**_SPAN)


SurfaceType = SName | SSum | STensor | SLolli | SBang | SMu


# -- terms -------------------------------------------------------------------

@dataclass(frozen=True)
class SVar:
    name: str
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SNat:
    value: int
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SLeft:
    annot_left: SurfaceType
    annot_right: SurfaceType
    body: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SRight:
    annot_left: SurfaceType
    annot_right: SurfaceType
    body: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SCase:
    scrutinee: object
    left_name: str
    left: object
    right_name: str
    right: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SPair:
    first: object
    second: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SLetPair:
    scrutinee: object
    first_name: str
    second_name: str
    body: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SLam:
    name: str
    annot: SurfaceType
    body: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SRec:
    name: str
    annot: SurfaceType
    body: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SApp:
    fn: object
    arg: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SLift:
    body: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SForce:
    body: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SFold:
    annot: SurfaceType
    body: object
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SUnfold:
    body: object
    span: Span | None = field(**_SPAN)


SurfaceTerm = (SVar | SNat | SLeft | SRight | SCase | SPair | SLetPair | SLam | SRec
               | SApp | SLift | SForce | SFold | SUnfold)


# -- modules -----------------------------------------------------------------

@dataclass(frozen=True)
class TypeAlias:
    name: str
    body: SurfaceType
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class Definition:
    name: str
    annot: SurfaceType
    body: SurfaceTerm
    span: Span | None = field(**_SPAN)


@dataclass(frozen=True)
class SurfaceModule:
    aliases: tuple[TypeAlias, ...] = ()
    definitions: tuple[Definition, ...] = ()
    main: SurfaceTerm | None = None

    def merged_with(self, other: SurfaceModule) -> SurfaceModule:
        """``self`` followed by ``other``; ``other``'s main wins."""
        return SurfaceModule(
            self.aliases + other.aliases,
            self.definitions + other.definitions,
            other.main if other.main is not None else self.main,
        )


# -- printing ----------------------------------------------------------------
# Precedence levels for types: 0 mu/top, 1 arrow, 2 sum, 3 prod, 4 bang, 5 atom.

def show_type(ty: SurfaceType, level: int = 0) -> str:
    match ty:
        case SName(name):
            return name
        case SMu(name, body):
            s, own = f"mu {name}. {show_type(body, 0)}", 0
        case SLolli(a, b):
            s, own = f"{show_type(a, 2)} -o {show_type(b, 1)}", 1
        case SSum(a, b):
            s, own = f"{show_type(a, 2)} + {show_type(b, 3)}", 2
        case STensor(a, b):
            s, own = f"{show_type(a, 3)} * {show_type(b, 4)}", 3
        case SBang(a):
            s, own = f"!{show_type(a, 4)}", 4
        case _:
            raise TypeError(f"not a surface type: {ty!r}")
    return f"({s})" if own < level else s


# Term levels: 0 binder forms (extend to the right), 1 application, 2 prefix, 3 atom.

def show_term(term: SurfaceTerm, level: int = 0) -> str:
    match term:
        case SVar(name):
            return name
        case SNat(n):
            return str(n)
        case SPair(m, n):
            return f"<{show_term(m)}, {show_term(n)}>"
        case SLam(x, a, m):
            s, own = f"\\{x}:{show_type(a)}. {show_term(m)}", 0
        case SRec(x, a, m):
            s, own = f"rec {x}:{show_type(a)}. {show_term(m)}", 0
        case SCase(m, x, n, y, p):
            s = (f"case {show_term(m)} of {{ left {x} -> {show_term(n)}"
                 f" | right {y} -> {show_term(p)} }}")
            own = 0
        case SLetPair(m, x, y, n):
            s, own = f"let <{x}, {y}> = {show_term(m)} in {show_term(n)}", 0
        case SApp(m, n):
            s, own = f"{show_term(m, 1)} {show_term(n, 2)}", 1
        case SLeft(a, b, m):
            s, own = f"left[{show_type(a)}, {show_type(b)}] {show_term(m, 2)}", 2
        case SRight(a, b, m):
            s, own = f"right[{show_type(a)}, {show_type(b)}] {show_term(m, 2)}", 2
        case SFold(a, m):
            s, own = f"fold[{show_type(a)}] {show_term(m, 2)}", 2
        case SUnfold(m):
            s, own = f"unfold {show_term(m, 2)}", 2
        case SLift(m):
            s, own = f"lift {show_term(m, 2)}", 2
        case SForce(m):
            s, own = f"force {show_term(m, 2)}", 2
        case _:
            raise TypeError(f"not a surface term: {term!r}")
    return f"({s})" if own < level else s


def show_module(module: SurfaceModule) -> str:
    lines = [f"type {a.name} = {show_type(a.body)};" for a in module.aliases]
    lines += [f"def {d.name} : {show_type(d.annot)} = {show_term(d.body)};"
              for d in module.definitions]
    if module.main is not None:
        lines.append(f"main = {show_term(module.main)};")
    return "\n".join(lines) + "\n"
