"""Core abstract syntax of LNL-FPC in De Bruijn form.

Both type variables and term variables are De Bruijn indices (0 is the
innermost binder).  Binder names are carried only as hints for printing and
diagnostics; they are excluded from equality and hashing, so structural
equality of two nodes is exactly alpha-equivalence.

Every term node caches two facts at construction time:

* ``bound`` -- all free term variables have index ``< bound``
  (``bound == 0`` means the term is closed), used to skip untouched
  subtrees during shifting and substitution;
* ``is_value`` -- membership in the value grammar.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .diagnostics import Span

# ---------------------------------------------------------------------------
# Types


class CoreType:
    __slots__ = ()


@dataclass(frozen=True)
class TVar(CoreType):
    index: int


@dataclass(frozen=True)
class Sum(CoreType):
    left: CoreType
    right: CoreType


@dataclass(frozen=True)
class Tensor(CoreType):
    left: CoreType
    right: CoreType


@dataclass(frozen=True)
class Lolli(CoreType):
    domain: CoreType
    codomain: CoreType


@dataclass(frozen=True)
class Bang(CoreType):
    body: CoreType


@dataclass(frozen=True)
class Mu(CoreType):
    name: str = field(compare=False)
    body: CoreType


def shift_type(ty: CoreType, amount: int, cutoff: int = 0) -> CoreType:
    """Add ``amount`` to every type variable with index ``>= cutoff``."""
    match ty:
        case TVar(i):
            return TVar(i + amount) if i >= cutoff else ty
        case Sum(a, b):
            return Sum(shift_type(a, amount, cutoff), shift_type(b, amount, cutoff))
        case Tensor(a, b):
            return Tensor(shift_type(a, amount, cutoff), shift_type(b, amount, cutoff))
        case Lolli(a, b):
            return Lolli(shift_type(a, amount, cutoff), shift_type(b, amount, cutoff))
        case Bang(a):
            return Bang(shift_type(a, amount, cutoff))
        case Mu(name, a):
            return Mu(name, shift_type(a, amount, cutoff + 1))
    raise TypeError(f"not a core type: {ty!r}")


def _subst_type(ty: CoreType, depth: int, replacement: CoreType) -> CoreType:
    match ty:
        case TVar(i):
            if i == depth:
                return shift_type(replacement, depth)
            if i > depth:
                return TVar(i - 1)
            return ty
        case Sum(a, b):
            return Sum(_subst_type(a, depth, replacement), _subst_type(b, depth, replacement))
        case Tensor(a, b):
            return Tensor(_subst_type(a, depth, replacement), _subst_type(b, depth, replacement))
        case Lolli(a, b):
            return Lolli(_subst_type(a, depth, replacement), _subst_type(b, depth, replacement))
        case Bang(a):
            return Bang(_subst_type(a, depth, replacement))
        case Mu(name, a):
            return Mu(name, _subst_type(a, depth + 1, replacement))
    raise TypeError(f"not a core type: {ty!r}")


def subst_type(body: CoreType, replacement: CoreType) -> CoreType:
    """Replace type variable 0 in ``body`` by ``replacement``.

    ``body`` is the scope of a binder that has just been removed, so the
    remaining free variables are decremented by one.
    """
    return _subst_type(body, 0, replacement)


def unroll(mu: Mu) -> CoreType:
    """One-step unrolling ``A[mu X.A / X]`` of a recursive type."""
    return subst_type(mu.body, mu)


def type_eq(a: CoreType, b: CoreType) -> bool:
    return a == b


def type_wf(ty: CoreType, n: int = 0) -> bool:
    """True iff every free type variable of ``ty`` is bound in a context of length ``n``."""
    match ty:
        case TVar(i):
            return 0 <= i < n
        case Sum(a, b) | Tensor(a, b) | Lolli(a, b):
            return type_wf(a, n) and type_wf(b, n)
        case Bang(a):
            return type_wf(a, n)
        case Mu(_, a):
            return type_wf(a, n + 1)
    return False


def is_non_linear(ty: CoreType) -> bool:
    match ty:
        case TVar():
            return True
        case Sum(a, b) | Tensor(a, b):
            return is_non_linear(a) and is_non_linear(b)
        case Bang():
            return True
        case Lolli():
            return False
        case Mu(_, a):
            return is_non_linear(a)
    raise TypeError(f"not a core type: {ty!r}")


def is_linear(ty: CoreType) -> bool:
    return not is_non_linear(ty)


def type_size(ty: CoreType) -> int:
    match ty:
        case TVar():
            return 1
        case Sum(a, b) | Tensor(a, b) | Lolli(a, b):
            return 1 + type_size(a) + type_size(b)
        case Bang(a) | Mu(_, a):
            return 1 + type_size(a)
    raise TypeError(f"not a core type: {ty!r}")


# ---------------------------------------------------------------------------
# Terms


def _freeze(obj, **facts):
    for key, value in facts.items():
        object.__setattr__(obj, key, value)


class CoreTerm:
    bound: int
    is_value: bool


_SPAN = dict(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var(CoreTerm):
    index: int
    name: str = field(default="x", compare=False)
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        _freeze(self, bound=self.index + 1, is_value=True)


@dataclass(frozen=True)
class Left(CoreTerm):
    annot_left: CoreType
    annot_right: CoreType
    body: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        _freeze(self, bound=self.body.bound, is_value=self.body.is_value)


@dataclass(frozen=True)
class Right(CoreTerm):
    annot_left: CoreType
    annot_right: CoreType
    body: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        _freeze(self, bound=self.body.bound, is_value=self.body.is_value)


@dataclass(frozen=True)
class Case(CoreTerm):
    scrutinee: CoreTerm
    left_name: str = field(compare=False)
    left: CoreTerm
    right_name: str = field(compare=False)
    right: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        b = max(self.scrutinee.bound, self.left.bound - 1, self.right.bound - 1)
        _freeze(self, bound=b, is_value=False)


@dataclass(frozen=True)
class Pair(CoreTerm):
    first: CoreTerm
    second: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        _freeze(self, bound=max(self.first.bound, self.second.bound),
                is_value=self.first.is_value and self.second.is_value)


@dataclass(frozen=True)
class LetPair(CoreTerm):
    """``let <x, y> = scrutinee in body``; in ``body`` y is index 0 and x is index 1."""
    scrutinee: CoreTerm
    first_name: str = field(compare=False)
    second_name: str = field(compare=False)
    body: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        _freeze(self, bound=max(self.scrutinee.bound, self.body.bound - 2), is_value=False)


@dataclass(frozen=True)
class Lam(CoreTerm):
    name: str = field(compare=False)
    annot: CoreType
    body: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        _freeze(self, bound=max(0, self.body.bound - 1), is_value=True)


@dataclass(frozen=True)
class App(CoreTerm):
    fn: CoreTerm
    arg: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        _freeze(self, bound=max(self.fn.bound, self.arg.bound), is_value=False)


@dataclass(frozen=True)
class Lift(CoreTerm):
    body: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        _freeze(self, bound=self.body.bound, is_value=True)


@dataclass(frozen=True)
class Force(CoreTerm):
    body: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        _freeze(self, bound=self.body.bound, is_value=False)


@dataclass(frozen=True)
class Fold(CoreTerm):
    annot: Mu
    body: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        if not isinstance(self.annot, Mu):
            raise ValueError(f"fold annotation must be a mu type, got {self.annot!r}")
        _freeze(self, bound=self.body.bound, is_value=self.body.is_value)


@dataclass(frozen=True)
class Unfold(CoreTerm):
    body: CoreTerm
    span: Span | None = field(**_SPAN)

    def __post_init__(self):
        _freeze(self, bound=self.body.bound, is_value=False)


AnyCore = Union[CoreType, CoreTerm]


def _memoize_hash(cls):
    # the generated hash walks the whole tree on every call; nodes are
    # immutable, so remember it after the first time
    structural = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = structural(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__


for _cls in (TVar, Sum, Tensor, Lolli, Bang, Mu,
             Var, Left, Right, Case, Pair, LetPair, Lam, App, Lift, Force, Fold, Unfold):
    _memoize_hash(_cls)


def is_value(term: CoreTerm) -> bool:
    return term.is_value


def is_closed(term: CoreTerm) -> bool:
    return term.bound == 0


def shift_term(term: CoreTerm, amount: int, cutoff: int = 0) -> CoreTerm:
    """Add ``amount`` to every free term variable with index ``>= cutoff``."""
    if term.bound <= cutoff or amount == 0:
        return term
    match term:
        case Var(i, name):
            return Var(i + amount, name, term.span)
        case Left(a, b, m):
            return Left(a, b, shift_term(m, amount, cutoff), term.span)
        case Right(a, b, m):
            return Right(a, b, shift_term(m, amount, cutoff), term.span)
        case Case(m, x, n, y, p):
            return Case(shift_term(m, amount, cutoff), x, shift_term(n, amount, cutoff + 1),
                        y, shift_term(p, amount, cutoff + 1), term.span)
        case Pair(m, n):
            return Pair(shift_term(m, amount, cutoff), shift_term(n, amount, cutoff), term.span)
        case LetPair(m, x, y, n):
            return LetPair(shift_term(m, amount, cutoff), x, y,
                           shift_term(n, amount, cutoff + 2), term.span)
        case Lam(x, a, m):
            return Lam(x, a, shift_term(m, amount, cutoff + 1), term.span)
        case App(m, n):
            return App(shift_term(m, amount, cutoff), shift_term(n, amount, cutoff), term.span)
        case Lift(m):
            return Lift(shift_term(m, amount, cutoff), term.span)
        case Force(m):
            return Force(shift_term(m, amount, cutoff), term.span)
        case Fold(a, m):
            return Fold(a, shift_term(m, amount, cutoff), term.span)
        case Unfold(m):
            return Unfold(shift_term(m, amount, cutoff), term.span)
    raise TypeError(f"not a core term: {term!r}")


def _subst(term: CoreTerm, depth: int, value: CoreTerm) -> CoreTerm:
    if term.bound <= depth:
        return term
    match term:
        case Var(i, name):
            if i == depth:
                return shift_term(value, depth)
            return Var(i - 1, name, term.span)
        case Left(a, b, m):
            return Left(a, b, _subst(m, depth, value), term.span)
        case Right(a, b, m):
            return Right(a, b, _subst(m, depth, value), term.span)
        case Case(m, x, n, y, p):
            return Case(_subst(m, depth, value), x, _subst(n, depth + 1, value),
                        y, _subst(p, depth + 1, value), term.span)
        case Pair(m, n):
            return Pair(_subst(m, depth, value), _subst(n, depth, value), term.span)
        case LetPair(m, x, y, n):
            return LetPair(_subst(m, depth, value), x, y, _subst(n, depth + 2, value), term.span)
        case Lam(x, a, m):
            return Lam(x, a, _subst(m, depth + 1, value), term.span)
        case App(m, n):
            return App(_subst(m, depth, value), _subst(n, depth, value), term.span)
        case Lift(m):
            return Lift(_subst(m, depth, value), term.span)
        case Force(m):
            return Force(_subst(m, depth, value), term.span)
        case Fold(a, m):
            return Fold(a, _subst(m, depth, value), term.span)
        case Unfold(m):
            return Unfold(_subst(m, depth, value), term.span)
    raise TypeError(f"not a core term: {term!r}")


def subst_term(body: CoreTerm, value: CoreTerm) -> CoreTerm:
    """Replace term variable 0 in ``body`` by ``value``, decrementing the rest.

    ``value`` lives in the context outside the removed binder and is shifted
    as it moves under binders.  Type annotations are never touched.
    """
    return _subst(body, 0, value)


def subst_pair(body: CoreTerm, first: CoreTerm, second: CoreTerm) -> CoreTerm:
    """Substitute the two variables bound by ``let <x, y>``: x (index 1) := first, y (index 0) := second."""
    return subst_term(subst_term(body, shift_term(second, 1)), first)


def free_vars(term: CoreTerm) -> frozenset[int]:
    """Indices (relative to the context of ``term``) of its free term variables."""
    out: set[int] = set()

    def go(t: CoreTerm, depth: int) -> None:
        if t.bound <= depth:
            return
        match t:
            case Var(i):
                out.add(i - depth)
            case Left(_, _, m) | Right(_, _, m) | Lift(m) | Force(m) | Fold(_, m) | Unfold(m):
                go(m, depth)
            case Case(m, _, n, _, p):
                go(m, depth)
                go(n, depth + 1)
                go(p, depth + 1)
            case Pair(m, n) | App(m, n):
                go(m, depth)
                go(n, depth)
            case LetPair(m, _, _, n):
                go(m, depth)
                go(n, depth + 2)
            case Lam(_, _, m):
                go(m, depth + 1)

    go(term, 0)
    return frozenset(out)


def children(term: CoreTerm) -> tuple[CoreTerm, ...]:
    match term:
        case Var():
            return ()
        case Left(_, _, m) | Right(_, _, m) | Lift(m) | Force(m) | Fold(_, m) | Unfold(m) | Lam(_, _, m):
            return (m,)
        case Case(m, _, n, _, p):
            return (m, n, p)
        case Pair(m, n) | App(m, n) | LetPair(m, _, _, n):
            return (m, n)
    raise TypeError(f"not a core term: {term!r}")


def term_size(term: CoreTerm) -> int:
    """Number of term nodes (type annotations are not counted)."""
    total = 0
    stack = [term]
    while stack:
        t = stack.pop()
        total += 1
        stack.extend(children(t))
    return total


def term_depth(term: CoreTerm) -> int:
    best = 0
    stack = [(term, 1)]
    while stack:
        t, d = stack.pop()
        best = max(best, d)
        stack.extend((c, d + 1) for c in children(t))
    return best


def strip_spans(term: CoreTerm) -> CoreTerm:
    """Rebuild ``term`` without source spans (spans never affect equality)."""
    match term:
        case Var(i, name):
            return Var(i, name)
        case Left(a, b, m):
            return Left(a, b, strip_spans(m))
        case Right(a, b, m):
            return Right(a, b, strip_spans(m))
        case Case(m, x, n, y, p):
            return Case(strip_spans(m), x, strip_spans(n), y, strip_spans(p))
        case Pair(m, n):
            return Pair(strip_spans(m), strip_spans(n))
        case LetPair(m, x, y, n):
            return LetPair(strip_spans(m), x, y, strip_spans(n))
        case Lam(x, a, m):
            return Lam(x, a, strip_spans(m))
        case App(m, n):
            return App(strip_spans(m), strip_spans(n))
        case Lift(m):
            return Lift(strip_spans(m))
        case Force(m):
            return Force(strip_spans(m))
        case Fold(a, m):
            return Fold(a, strip_spans(m))
        case Unfold(m):
            return Unfold(strip_spans(m))
    raise TypeError(f"not a core term: {term!r}")


# ---------------------------------------------------------------------------
# Standard closed types and values

VOID = Mu("Z", TVar(0))
UNIT = Bang(Lolli(VOID, VOID))
NAT = Mu("X", Sum(UNIT, TVar(0)))
LIST_NAT = Mu("X", Sum(UNIT, Tensor(NAT, TVar(0))))
STREAM_NAT = Mu("X", Tensor(NAT, Bang(TVar(0))))

STAR = Lift(Lam("x", VOID, Var(0, "x")))


def list_type(elem: CoreType) -> Mu:
    return Mu("X", Sum(UNIT, Tensor(shift_type(elem, 1), TVar(0))))


def stream_type(elem: CoreType) -> Mu:
    return Mu("X", Tensor(shift_type(elem, 1), Bang(TVar(0))))


# ---------------------------------------------------------------------------
# S-expression form (stable golden format)


def _q(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def type_sexpr(ty: CoreType) -> str:
    match ty:
        case TVar(i):
            return f"(tvar {i})"
        case Sum(a, b):
            return f"(sum {type_sexpr(a)} {type_sexpr(b)})"
        case Tensor(a, b):
            return f"(tensor {type_sexpr(a)} {type_sexpr(b)})"
        case Lolli(a, b):
            return f"(lolli {type_sexpr(a)} {type_sexpr(b)})"
        case Bang(a):
            return f"(bang {type_sexpr(a)})"
        case Mu(name, a):
            return f"(mu {_q(name)} {type_sexpr(a)})"
    raise TypeError(f"not a core type: {ty!r}")


def term_sexpr(term: CoreTerm) -> str:
    match term:
        case Var(i, name):
            return f"(var {i} {_q(name)})"
        case Left(a, b, m):
            return f"(left {type_sexpr(a)} {type_sexpr(b)} {term_sexpr(m)})"
        case Right(a, b, m):
            return f"(right {type_sexpr(a)} {type_sexpr(b)} {term_sexpr(m)})"
        case Case(m, x, n, y, p):
            return f"(case {term_sexpr(m)} {_q(x)} {term_sexpr(n)} {_q(y)} {term_sexpr(p)})"
        case Pair(m, n):
            return f"(pair {term_sexpr(m)} {term_sexpr(n)})"
        case LetPair(m, x, y, n):
            return f"(letpair {term_sexpr(m)} {_q(x)} {_q(y)} {term_sexpr(n)})"
        case Lam(x, a, m):
            return f"(lam {_q(x)} {type_sexpr(a)} {term_sexpr(m)})"
        case App(m, n):
            return f"(app {term_sexpr(m)} {term_sexpr(n)})"
        case Lift(m):
            return f"(lift {term_sexpr(m)})"
        case Force(m):
            return f"(force {term_sexpr(m)})"
        case Fold(a, m):
            return f"(fold {type_sexpr(a)} {term_sexpr(m)})"
        case Unfold(m):
            return f"(unfold {term_sexpr(m)})"
    raise TypeError(f"not a core term: {term!r}")


def sexpr(node: AnyCore) -> str:
    if isinstance(node, CoreType):
        return type_sexpr(node)
    return term_sexpr(node)
