"""Brute-force instruments used to cross-check the main pipeline.

``derivable`` searches for a typing derivation directly from the declarative
rules: at every rule with several premises it tries every way of handing the
linear variables in scope to the premises, while non-linear variables are
given to all premises.  It shares no code with the use-set checker.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache

from .core import (
    LIST_NAT, NAT, STAR, UNIT, VOID, App, Bang, Case, CoreTerm, CoreType, Fold, Force, Lam,
    Left, LetPair, Lift, Lolli, Mu, Pair, Right, Sum, Tensor, Unfold, Var, is_non_linear,
    term_size, unroll,
)
from .diagnostics import Diagnostic, LnlError
from .elaborator import desugar_rec
from .typechecker import EMPTY, TypingContext, accepts

DEFAULT_MAX_SIZE = 12


class DecodeError(LnlError):
    pass


# ---------------------------------------------------------------------------
# Unrestricted typing (linearity ignored) -- fixes the cut types of App/Case/...


def shape_type(ctx: tuple[CoreType, ...], term: CoreTerm) -> CoreType | None:
    """Type of ``term`` ignoring linearity; ``ctx[0]`` is the innermost variable."""
    match term:
        case Var(i):
            return ctx[i] if i < len(ctx) else None
        case Left(a, b, m):
            return Sum(a, b) if shape_type(ctx, m) == a else None
        case Right(a, b, m):
            return Sum(a, b) if shape_type(ctx, m) == b else None
        case Case(m, _, n, _, p):
            s = shape_type(ctx, m)
            if not isinstance(s, Sum):
                return None
            tn = shape_type((s.left,) + ctx, n)
            tp = shape_type((s.right,) + ctx, p)
            return tn if tn is not None and tn == tp else None
        case Pair(m, n):
            a, b = shape_type(ctx, m), shape_type(ctx, n)
            return Tensor(a, b) if a is not None and b is not None else None
        case LetPair(m, _, _, n):
            s = shape_type(ctx, m)
            if not isinstance(s, Tensor):
                return None
            return shape_type((s.right, s.left) + ctx, n)
        case Lam(_, a, m):
            b = shape_type((a,) + ctx, m)
            return Lolli(a, b) if b is not None else None
        case App(m, n):
            f = shape_type(ctx, m)
            if isinstance(f, Lolli) and shape_type(ctx, n) == f.domain:
                return f.codomain
            return None
        case Lift(m):
            a = shape_type(ctx, m)
            return Bang(a) if a is not None else None
        case Force(m):
            a = shape_type(ctx, m)
            return a.body if isinstance(a, Bang) else None
        case Fold(mu, m):
            return mu if shape_type(ctx, m) == unroll(mu) else None
        case Unfold(m):
            a = shape_type(ctx, m)
            return unroll(a) if isinstance(a, Mu) else None
    return None


# ---------------------------------------------------------------------------
# Declarative derivation search


def _extend(present: frozenset[int], count: int = 1) -> frozenset[int]:
    return frozenset(range(count)) | frozenset(i + count for i in present)


def _splits(ctx, present):
    """Every way to hand the linear variables of ``present`` to two premises.

    Non-linear variables go to both premises.
    """
    shared = frozenset(i for i in present if is_non_linear(ctx[i]))
    linear = sorted(present - shared)
    for choice in itertools.product((0, 1), repeat=len(linear)):
        g1 = frozenset(v for v, c in zip(linear, choice) if c == 0)
        g2 = frozenset(v for v, c in zip(linear, choice) if c == 1)
        yield shared | g1, shared | g2


@lru_cache(maxsize=200_000)
def _der(ctx: tuple[CoreType, ...], present: frozenset[int], term: CoreTerm, ty: CoreType) -> bool:
    match term:
        case Var(i):
            return (i in present and ctx[i] == ty
                    and all(is_non_linear(ctx[j]) for j in present if j != i))
        case Left(a, b, m):
            return ty == Sum(a, b) and _der(ctx, present, m, a)
        case Right(a, b, m):
            return ty == Sum(a, b) and _der(ctx, present, m, b)
        case Case(m, _, n, _, p):
            s = shape_type(ctx, m)
            if not isinstance(s, Sum):
                return False
            return any(
                _der(ctx, g, m, s)
                and _der((s.left,) + ctx, _extend(d), n, ty)
                and _der((s.right,) + ctx, _extend(d), p, ty)
                for g, d in _splits(ctx, present)
            )
        case Pair(m, n):
            if not isinstance(ty, Tensor):
                return False
            return any(_der(ctx, g, m, ty.left) and _der(ctx, d, n, ty.right)
                       for g, d in _splits(ctx, present))
        case LetPair(m, _, _, n):
            s = shape_type(ctx, m)
            if not isinstance(s, Tensor):
                return False
            inner = (s.right, s.left) + ctx
            return any(_der(ctx, g, m, s) and _der(inner, _extend(d, 2), n, ty)
                       for g, d in _splits(ctx, present))
        case Lam(_, a, m):
            if not isinstance(ty, Lolli) or ty.domain != a:
                return False
            return _der((a,) + ctx, _extend(present), m, ty.codomain)
        case App(m, n):
            a = shape_type(ctx, n)
            if a is None:
                return False
            return any(_der(ctx, g, m, Lolli(a, ty)) and _der(ctx, d, n, a)
                       for g, d in _splits(ctx, present))
        case Lift(m):
            if not isinstance(ty, Bang):
                return False
            return all(is_non_linear(ctx[j]) for j in present) and _der(ctx, present, m, ty.body)
        case Force(m):
            return _der(ctx, present, m, Bang(ty))
        case Fold(mu, m):
            return ty == mu and _der(ctx, present, m, unroll(mu))
        case Unfold(m):
            s = shape_type(ctx, m)
            return isinstance(s, Mu) and unroll(s) == ty and _der(ctx, present, m, s)
    return False


def _ctx_types(ctx) -> tuple[CoreType, ...]:
    if isinstance(ctx, TypingContext):
        return tuple(ty for _, ty in ctx.entries)
    return tuple(ctx)


def _guard_size(term: CoreTerm, max_size: int) -> None:
    size = term_size(term)
    if size > max_size:
        raise LnlError(Diagnostic("E-TOO-LARGE", f"term of size {size} exceeds the search bound {max_size}"))


def derivable(ctx, term: CoreTerm, ty: CoreType, max_size: int = DEFAULT_MAX_SIZE) -> bool:
    """True iff ``ctx |- term : ty`` has a derivation in the declarative system."""
    _guard_size(term, max_size)
    types = _ctx_types(ctx)
    return _der(types, frozenset(range(len(types))), term, ty)


def count_derivations(ctx, term: CoreTerm, ty: CoreType, max_size: int = DEFAULT_MAX_SIZE) -> int:
    """Number of distinct derivation trees, splitting contexts literally.

    At a rule with two context parts every variable is placed either in the
    shared non-linear part (only if its type is non-linear) or in exactly one
    of the two premises' private parts.
    """
    _guard_size(term, max_size)
    types = _ctx_types(ctx)

    def assignments(ctx_, present):
        vs = sorted(present)
        opts = [((0, 1, 2) if is_non_linear(ctx_[v]) else (1, 2)) for v in vs]
        for choice in itertools.product(*opts):
            g = frozenset(v for v, c in zip(vs, choice) if c in (0, 1))
            d = frozenset(v for v, c in zip(vs, choice) if c in (0, 2))
            yield g, d

    def count(ctx_, present, t, ty) -> int:
        match t:
            case Var(i):
                ok = (i in present and ctx_[i] == ty
                      and all(is_non_linear(ctx_[j]) for j in present if j != i))
                return int(ok)
            case Left(a, b, m):
                return count(ctx_, present, m, a) if ty == Sum(a, b) else 0
            case Right(a, b, m):
                return count(ctx_, present, m, b) if ty == Sum(a, b) else 0
            case Case(m, _, n, _, p):
                s = shape_type(ctx_, m)
                if not isinstance(s, Sum):
                    return 0
                return sum(count(ctx_, g, m, s)
                           * count((s.left,) + ctx_, _extend(d), n, ty)
                           * count((s.right,) + ctx_, _extend(d), p, ty)
                           for g, d in assignments(ctx_, present))
            case Pair(m, n):
                if not isinstance(ty, Tensor):
                    return 0
                return sum(count(ctx_, g, m, ty.left) * count(ctx_, d, n, ty.right)
                           for g, d in assignments(ctx_, present))
            case LetPair(m, _, _, n):
                s = shape_type(ctx_, m)
                if not isinstance(s, Tensor):
                    return 0
                return sum(count(ctx_, g, m, s) * count((s.right, s.left) + ctx_, _extend(d, 2), n, ty)
                           for g, d in assignments(ctx_, present))
            case Lam(_, a, m):
                if not isinstance(ty, Lolli) or ty.domain != a:
                    return 0
                return count((a,) + ctx_, _extend(present), m, ty.codomain)
            case App(m, n):
                a = shape_type(ctx_, n)
                if a is None:
                    return 0
                return sum(count(ctx_, g, m, Lolli(a, ty)) * count(ctx_, d, n, a)
                           for g, d in assignments(ctx_, present))
            case Lift(m):
                if not isinstance(ty, Bang) or not all(is_non_linear(ctx_[j]) for j in present):
                    return 0
                return count(ctx_, present, m, ty.body)
            case Force(m):
                return count(ctx_, present, m, Bang(ty))
            case Fold(mu, m):
                return count(ctx_, present, m, unroll(mu)) if ty == mu else 0
            case Unfold(m):
                s = shape_type(ctx_, m)
                if isinstance(s, Mu) and unroll(s) == ty:
                    return count(ctx_, present, m, s)
                return 0
        return 0

    return count(types, frozenset(range(len(types))), term, ty)


# ---------------------------------------------------------------------------
# Closed values


def value_depth(v: CoreTerm) -> int:
    """Depth counting injections and pairs; fold is transparent, lift/lambda are leaves."""
    match v:
        case Left(_, _, w) | Right(_, _, w):
            return 1 + value_depth(w)
        case Pair(a, b):
            return 1 + max(value_depth(a), value_depth(b))
        case Fold(_, w):
            return value_depth(w)
        case Lift() | Lam():
            return 1
    return 1


def enum_closed_values(ty: CoreType, max_depth: int) -> list[CoreTerm]:
    """All closed values of ``ty`` with ``value_depth <= max_depth`` built from the value grammar.

    Bodies under ``lift`` and ``\\x.`` come from a small pool: smaller values of
    the right type, the bound variable itself, and a diverging term.
    """
    if max_depth > 6:
        raise ValueError("max_depth is limited to 6")
    memo: dict[tuple[CoreType, int], list[CoreTerm]] = {}
    active: set[tuple[CoreType, int]] = set()

    def vals(t: CoreType, d: int) -> list[CoreTerm]:
        if d <= 0:
            return []
        key = (t, d)
        if key in memo:
            return memo[key]
        if key in active:
            # an unguarded cycle of folds: no finite value lies on it
            return []
        active.add(key)
        out: list[CoreTerm] = []
        match t:
            case Sum(a, b):
                out += [Left(a, b, v) for v in vals(a, d - 1)]
                out += [Right(a, b, v) for v in vals(b, d - 1)]
            case Tensor(a, b):
                out += [Pair(v, w) for v in vals(a, d - 1) for w in vals(b, d - 1)]
            case Mu():
                out += [Fold(t, v) for v in vals(unroll(t), d)]
            case Bang(a):
                bodies = vals(a, d - 1) + [desugar_rec("z", t, Force(Var(0, "z")))]
                out += [Lift(m) for m in bodies]
            case Lolli(a, b):
                bodies = [Var(0, "x")] if a == b else []
                if is_non_linear(a):
                    bodies += vals(b, d - 1)
                out += [Lam("x", a, m) for m in bodies]
        active.discard(key)
        result = [v for v in out if accepts(EMPTY, v, t)]
        memo[key] = result
        return result

    return vals(ty, max_depth)


# ---------------------------------------------------------------------------
# Codecs


def decode_nat(v: CoreTerm) -> int:
    n = 0
    t = v
    while isinstance(t, Fold) and t.annot == NAT and isinstance(t.body, Right) \
            and t.body.annot_left == UNIT and t.body.annot_right == NAT:
        n += 1
        t = t.body.body
    if t == Fold(NAT, Left(UNIT, NAT, STAR)):
        return n
    raise DecodeError(Diagnostic("E-NOT-NUMERAL", "value is not a Nat numeral"))


def decode_list_nat(v: CoreTerm) -> list[int]:
    elems = []
    t = v
    cell = Tensor(NAT, LIST_NAT)
    while isinstance(t, Fold) and t.annot == LIST_NAT and isinstance(t.body, Right) \
            and t.body.annot_left == UNIT and t.body.annot_right == cell and isinstance(t.body.body, Pair):
        try:
            elems.append(decode_nat(t.body.body.first))
        except DecodeError:
            raise DecodeError(Diagnostic("E-NOT-LIST", "list element is not a Nat numeral")) from None
        t = t.body.body.second
    if t == Fold(LIST_NAT, Left(UNIT, cell, STAR)):
        return elems
    raise DecodeError(Diagnostic("E-NOT-LIST", "value is not a list of Nat"))


def encode_list_nat(items) -> CoreTerm:
    from .elaborator import expand_numeral
    cell = Tensor(NAT, LIST_NAT)
    out: CoreTerm = Fold(LIST_NAT, Left(UNIT, cell, STAR))
    for n in reversed(list(items)):
        out = Fold(LIST_NAT, Right(UNIT, cell, Pair(expand_numeral(n), out)))
    return out


# ---------------------------------------------------------------------------
# Exhaustive term grid

GRID_ATOMS: tuple[CoreType, ...] = (UNIT, VOID, Lolli(UNIT, UNIT), NAT)


def grid_contexts(atoms=GRID_ATOMS, max_entries: int = 2) -> list[tuple[CoreType, ...]]:
    out = []
    for k in range(max_entries + 1):
        out += list(itertools.product(atoms, repeat=k))
    return out


class TermEnumerator:
    """Bottom-up enumeration of every term up to a size whose unrestricted type exists.

    Size counts every AST node, type annotations included: each atom is a
    single leaf, compound annotations are built from atoms, and a fold's type
    is one of the atoms that are mu types.  So ``\\x:A. m`` has size
    ``1 + |A| + |m|`` and ``left[A, B] m`` has size ``1 + |A| + |B| + |m|``.
    """

    def __init__(self, atoms=GRID_ATOMS):
        self.atoms = tuple(atoms)
        self.mus = tuple(a for a in atoms if isinstance(a, Mu))
        self.memo: dict[tuple[tuple[CoreType, ...], int], list[tuple[CoreTerm, CoreType]]] = {}
        self._types: dict[int, list[CoreType]] = {}

    def type_size(self, ty: CoreType) -> int:
        if ty in self.atoms:
            return 1
        match ty:
            case Sum(a, b) | Tensor(a, b) | Lolli(a, b):
                return 1 + self.type_size(a) + self.type_size(b)
            case Bang(a) | Mu(_, a):
                return 1 + self.type_size(a)
        return 1

    def types(self, size: int) -> list[CoreType]:
        """Annotation types of exactly ``size`` nodes over the atoms."""
        if size not in self._types:
            if size <= 0:
                out = []
            elif size == 1:
                out = list(self.atoms)
            else:
                out = [Bang(a) for a in self.types(size - 1)]
                for s1 in range(1, size - 1):
                    for a in self.types(s1):
                        for b in self.types(size - 1 - s1):
                            out += [Sum(a, b), Tensor(a, b), Lolli(a, b)]
            self._types[size] = out
        return self._types[size]

    def terms(self, ctx: tuple[CoreType, ...], size: int) -> list[tuple[CoreTerm, CoreType]]:
        key = (ctx, size)
        if key not in self.memo:
            self.memo[key] = self._build(ctx, size)
        return self.memo[key]

    def _build(self, ctx, size):
        if size <= 0:
            return []
        if size == 1:
            return [(Var(i, f"v{i}"), ty) for i, ty in enumerate(ctx)]
        out = []
        for m, t in self.terms(ctx, size - 1):
            out.append((Lift(m), Bang(t)))
            if isinstance(t, Bang):
                out.append((Force(m), t.body))
            if isinstance(t, Mu):
                out.append((Unfold(m), unroll(t)))
        for m, t in self.terms(ctx, size - 2):
            for mu in self.mus:
                if unroll(mu) == t:
                    out.append((Fold(mu, m), mu))
        for sm in range(1, size - 2):
            for m, t in self.terms(ctx, sm):
                for b in self.types(size - 1 - sm - self.type_size(t)):
                    out.append((Left(t, b, m), Sum(t, b)))
                    out.append((Right(b, t, m), Sum(b, t)))
        for sa in range(1, size - 1):
            for a in self.types(sa):
                for m, t in self.terms((a,) + ctx, size - 1 - sa):
                    out.append((Lam("x", a, m), Lolli(a, t)))
        for s1 in range(1, size - 1):
            s2 = size - 1 - s1
            left_terms = self.terms(ctx, s1)
            right_terms = self.terms(ctx, s2)
            for m, tm in left_terms:
                for n, tn in right_terms:
                    out.append((Pair(m, n), Tensor(tm, tn)))
                    if isinstance(tm, Lolli) and tm.domain == tn:
                        out.append((App(m, n), tm.codomain))
                if isinstance(tm, Tensor):
                    for n, tn in self.terms((tm.right, tm.left) + ctx, s2):
                        out.append((LetPair(m, "x", "y", n), tn))
        for s1 in range(1, size - 2):
            for s2 in range(1, size - 1 - s1):
                s3 = size - 1 - s1 - s2
                for m, tm in self.terms(ctx, s1):
                    if not isinstance(tm, Sum):
                        continue
                    rights = {}
                    for p, tp in self.terms((tm.right,) + ctx, s3):
                        rights.setdefault(tp, []).append(p)
                    for n, tn in self.terms((tm.left,) + ctx, s2):
                        for p in rights.get(tn, ()):
                            out.append((Case(m, "x", n, "y", p), tn))
        return out

    def upto(self, ctx, max_size: int):
        for size in range(1, max_size + 1):
            yield from self.terms(ctx, size)


@dataclass
class GridReport:
    max_size: int
    contexts: int = 0
    judgements: int = 0
    accepted: int = 0
    disagreements: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def agreement(self) -> float:
        if not self.judgements:
            return 1.0
        return 1.0 - len(self.disagreements) / self.judgements


def run_grid(max_size: int = 7, atoms=GRID_ATOMS, max_entries: int = 2, contexts=None,
             progress=None) -> GridReport:
    """Compare ``accepts`` with ``derivable`` on every enumerated judgement."""
    start = time.perf_counter()
    report = GridReport(max_size)
    enum = TermEnumerator(atoms)
    ctxs = contexts if contexts is not None else grid_contexts(atoms, max_entries)
    for ctx_types in ctxs:
        report.contexts += 1
        tctx = TypingContext(tuple((f"v{i}", t) for i, t in enumerate(ctx_types)))
        for term, ty in enum.upto(tuple(ctx_types), max_size):
            fast = accepts(tctx, term, ty)
            slow = _der(tuple(ctx_types), frozenset(range(len(ctx_types))), term, ty)
            report.judgements += 1
            report.accepted += fast
            if fast != slow:
                report.disagreements.append((ctx_types, term, ty, fast, slow))
        _der.cache_clear()
        enum.memo.clear()
        if progress is not None:
            progress(report)
    report.seconds = time.perf_counter() - start
    return report
