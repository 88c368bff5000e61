"""Random well-typed terms, built by running the typing rules backwards.

A goal is ``(ctx, type, linear set, depth)``: produce a term of that type
whose free linear variables are exactly the given set.  Each typing rule whose
conclusion matches the goal is a candidate; multi-premise rules split the
linear set at random between their premises.  Dead ends backtrack within a
step budget, and a fresh attempt starts when the budget runs out.
"""

from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field

from .core import (
    LIST_NAT, NAT, STREAM_NAT, UNIT, VOID, App, Bang, Case, CoreTerm, CoreType, Fold, Force,
    Lam, Left, LetPair, Lift, Lolli, Mu, Pair, Right, Sum, TVar, Tensor, Unfold, Var,
    is_non_linear, shift_type, term_depth, unroll,
)

# name hints are irrelevant here, so one-step unrollings can be shared
_unroll = lru_cache(maxsize=None)(unroll)

ENDO_I = Lolli(UNIT, UNIT)
# a non-linear recursive function type, the one behind self-application
SELF_I = Mu("X", Lolli(Bang(TVar(0)), UNIT))

MU_POOL: tuple[Mu, ...] = (NAT, LIST_NAT, STREAM_NAT, VOID, SELF_I)

GOAL_TYPES: tuple[CoreType, ...] = (
    UNIT, NAT, Sum(UNIT, UNIT), Tensor(NAT, UNIT), Lolli(NAT, NAT), ENDO_I,
    Lolli(ENDO_I, UNIT), Bang(NAT), Tensor(ENDO_I, NAT), LIST_NAT, Sum(NAT, ENDO_I), UNIT,
    NAT, Bang(ENDO_I),
)

CUT_TYPES: tuple[CoreType, ...] = (
    UNIT, NAT, ENDO_I, Sum(UNIT, NAT), Tensor(UNIT, NAT), Bang(UNIT), Lolli(NAT, UNIT),
    Sum(ENDO_I, UNIT), Tensor(ENDO_I, UNIT), Bang(SELF_I), SELF_I,
)


class _DeadEnd(Exception):
    pass


_INF = 10**6


def _min_depth(ctx: tuple, ty: CoreType, _busy=frozenset()) -> int:
    """Lower bound on the depth of any term of type ``ty`` over ``ctx``.

    Only variables and introduction rules are considered, so the bound is
    exact for values and optimistic otherwise (which is all pruning needs).
    """
    key = (ctx, ty)
    if key in _MIN_DEPTH:
        return _MIN_DEPTH[key]
    if ty in ctx:
        return 1
    if key in _busy:
        return _INF
    busy = _busy | {key}
    match ty:
        case Sum(a, b):
            best = 1 + min(_min_depth(ctx, a, busy), _min_depth(ctx, b, busy))
        case Tensor(a, b):
            best = 1 + max(_min_depth(ctx, a, busy), _min_depth(ctx, b, busy))
        case Lolli(a, b):
            best = 2 if a == b else 1 + _min_depth((a,) + ctx, b, busy)
        case Bang(a):
            best = 1 + _min_depth(ctx, a, busy)
        case Mu():
            best = 1 + _min_depth(ctx, _unroll(ty), busy)
        case _:
            best = _INF
    best = min(best, _INF)
    if not _busy:
        _MIN_DEPTH[key] = best
    return best


_MIN_DEPTH: dict = {}


def _shift(lin: frozenset[int], count: int = 1) -> frozenset[int]:
    return frozenset(i + count for i in lin)


@dataclass
class TermGenerator:
    rng: random.Random = field(default_factory=random.Random)
    max_depth: int = 8
    budget: int = 1000
    goal_types: tuple = GOAL_TYPES
    cut_types: tuple = CUT_TYPES
    divergence: float = 0.4
    _steps: int = 0

    def _split(self, lin):
        left, right = set(), set()
        for v in lin:
            (left if self.rng.random() < 0.5 else right).add(v)
        return frozenset(left), frozenset(right)

    def _cut_type(self, ctx, pred=None) -> CoreType:
        pool = [t for t in tuple(ctx) + self.cut_types if pred is None or pred(t)]
        if not pool:
            raise _DeadEnd
        return self.rng.choice(pool)

    def term(self, ctx: tuple, ty: CoreType, lin: frozenset[int], depth: int,
             values_only: bool = False) -> CoreTerm:
        """A term with ``ctx |- term : ty`` consuming exactly the linear ``lin``."""
        self._steps += 1
        if self._steps > self.budget or depth < _min_depth(ctx, ty):
            raise _DeadEnd
        rules = self._rules(ctx, ty, lin, depth, values_only)
        # weighted order without replacement: rule r comes first with
        # probability weight(r) / total
        rules.sort(key=lambda r: -self.rng.random() ** (1.0 / r[0]))
        for _, build in rules:
            try:
                return build()
            except _DeadEnd:
                if self._steps > self.budget:
                    raise
        raise _DeadEnd

    def _rules(self, ctx, ty, lin, depth, values_only):
        rules = []
        d = depth - 1

        for i, t in enumerate(ctx):
            if t == ty and (lin == {i} or (not lin and is_non_linear(t))):
                rules.append((3.0, lambda i=i: Var(i, f"v{i}")))

        # introduction rules, chosen by the goal type
        match ty:
            case Sum(a, b):
                rules.append((1.0, lambda: Left(a, b, self.term(ctx, a, lin, d, values_only))))
                rules.append((1.0, lambda: Right(a, b, self.term(ctx, b, lin, d, values_only))))
            case Tensor(a, b):
                def pair():
                    l1, l2 = self._split(lin)
                    return Pair(self.term(ctx, a, l1, d, values_only), self.term(ctx, b, l2, d, values_only))
                rules.append((1.5, pair))
            case Lolli(a, b):
                inner = _shift(lin) | (frozenset() if is_non_linear(a) else frozenset({0}))
                rules.append((1.5, lambda: Lam("x", a, self.term((a,) + ctx, b, inner, d))))
            case Bang(a):
                if not lin:
                    rules.append((1.5, lambda: Lift(self.term(ctx, a, lin, d))))
            case Mu():
                rules.append((1.5, lambda: Fold(ty, self.term(ctx, _unroll(ty), lin, d, values_only))))

        if values_only or depth < 2:
            return rules

        # elimination rules, which invent the type being eliminated
        def app():
            a = self._cut_type(ctx)
            l1, l2 = self._split(lin)
            return App(self.term(ctx, Lolli(a, ty), l1, d), self.term(ctx, a, l2, d))

        def force():
            return Force(self.term(ctx, Bang(ty), lin, d))

        def case():
            s = self._cut_type(ctx, lambda t: isinstance(t, Sum))
            ls, lb = self._split(lin)
            lx = _shift(lb) | (frozenset() if is_non_linear(s.left) else frozenset({0}))
            ly = _shift(lb) | (frozenset() if is_non_linear(s.right) else frozenset({0}))
            m = self.term(ctx, s, ls, d)
            return Case(m, "x", self.term((s.left,) + ctx, ty, lx, d),
                        "y", self.term((s.right,) + ctx, ty, ly, d))

        def let_pair():
            s = self._cut_type(ctx, lambda t: isinstance(t, Tensor))
            ls, lb = self._split(lin)
            inner = (_shift(lb, 2)
                     | (frozenset() if is_non_linear(s.left) else frozenset({1}))
                     | (frozenset() if is_non_linear(s.right) else frozenset({0})))
            m = self.term(ctx, s, ls, d)
            return LetPair(m, "x", "y", self.term((s.right, s.left) + ctx, ty, inner, d))

        # eliminate a pending linear variable directly, binding what it yields
        def use(v):
            t = ctx[v]
            rest = lin - {v}
            match t:
                case Sum(a, b):
                    lx = _shift(rest) | (frozenset() if is_non_linear(a) else frozenset({0}))
                    ly = _shift(rest) | (frozenset() if is_non_linear(b) else frozenset({0}))
                    return Case(Var(v, f"v{v}"), "x", self.term((a,) + ctx, ty, lx, d),
                                "y", self.term((b,) + ctx, ty, ly, d))
                case Tensor(a, b):
                    inner = (_shift(rest, 2)
                             | (frozenset() if is_non_linear(a) else frozenset({1}))
                             | (frozenset() if is_non_linear(b) else frozenset({0})))
                    return LetPair(Var(v, f"v{v}"), "x", "y", self.term((b, a) + ctx, ty, inner, d))
                case Lolli(a, b):
                    l_arg, l_rest = self._split(rest)
                    produced = App(Var(v, f"v{v}"), self.term(ctx, a, l_arg, d - 1))
                case Mu():
                    l_rest = rest
                    b = _unroll(t)
                    produced = Unfold(Var(v, f"v{v}"))
                case _:
                    raise _DeadEnd
            inner = _shift(l_rest) | (frozenset() if is_non_linear(b) else frozenset({0}))
            return App(Lam("z", b, self.term((b,) + ctx, ty, inner, d - 1)), produced)

        for v in lin:
            rules.append((2.0, lambda v=v: use(v)))

        # eliminations are favoured near the root and fade out towards the leaves
        w = 2.0 * depth / self.max_depth
        if depth >= SELF_APPLICATION_DEPTH and not lin:
            rules.append((self.divergence, lambda: self_application(ty)))
        rules += [(1.2 * w, app), (0.6 * w, force), (1.0 * w, case), (0.7 * w, let_pair)]
        for mu in MU_POOL:
            if _unroll(mu) == ty:
                rules.append((0.6 * w, lambda mu=mu: Unfold(self.term(ctx, mu, lin, d))))
        return rules

    def attempt(self, ctx, ty, lin, values_only=False) -> CoreTerm | None:
        self._steps = 0
        try:
            return self.term(tuple(ctx), ty, frozenset(lin), self.max_depth, values_only)
        except _DeadEnd:
            return None

    def closed(self, ty: CoreType | None = None, tries: int = 200) -> tuple[CoreTerm, CoreType]:
        """A random closed well-typed term, with its type."""
        for _ in range(tries):
            goal = ty if ty is not None else self.rng.choice(self.goal_types)
            t = self.attempt((), goal, frozenset())
            if t is not None:
                return t, goal
        raise RuntimeError("no closed term found; the goal may be uninhabited")


def closed_terms(count: int, seed: int = 0, max_depth: int = 8) -> list[tuple[CoreTerm, CoreType]]:
    """``count`` random closed well-typed terms of depth at most ``max_depth``."""
    gen = TermGenerator(random.Random(seed), max_depth=max_depth)
    out = [gen.closed() for _ in range(count)]
    assert all(term_depth(t) <= max_depth for t, _ in out)
    return out


SELF_APPLICATION_DEPTH = 8


def self_application(result: CoreType = UNIT) -> CoreTerm:
    """A diverging closed term of type ``result``, at depth 8.

    ``(\\y:!R. (unfold force y) y) (lift fold[R] \\x:!R. (unfold force x) x)``
    with ``R = mu X. !X -o result``.
    """
    r = Mu("X", Lolli(Bang(TVar(0)), shift_type(result, 1)))
    body = App(Unfold(Force(Var(0, "x"))), Var(0, "x"))
    delta = Fold(r, Lam("x", Bang(r), body))
    return App(Lam("y", Bang(r), App(Unfold(Force(Var(0, "y"))), Var(0, "y"))), Lift(delta))
