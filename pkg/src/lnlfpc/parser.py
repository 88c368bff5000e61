"""Lexer and recursive-descent parser for ``.lnl`` source files.

Grammar (ASCII concrete syntax)::

    type   := "mu" IDENT "." type | arrow
    arrow  := sum ("-o" arrow)?
    sum    := prod ("+" prod)*
    prod   := bang ("*" bang)*
    bang   := "!" bang | IDENT | "(" type ")"

    term   := "\\" IDENT ":" type "." term
            | "rec" IDENT ":" type "." term
            | "case" term "of" "{" "left" IDENT "->" term "|" "right" IDENT "->" term "}"
            | "let" "<" IDENT "," IDENT ">" "=" term "in" term
            | appseq
    appseq := prefix+ [binder]
    prefix := ("left" | "right") "[" type "," type "]" operand
            | "fold" "[" type "]" operand
            | ("unfold" | "lift" | "force") operand
            | IDENT | NAT | "<" term "," term ">" | "(" term ")"
    operand:= prefix | binder

    item   := "type" IDENT "=" type ";"
            | "def" IDENT ":" type "=" term ";"
            | "main" "=" term ";"

A binder form (lambda, rec, case, let) may appear as the operand of a prefix
keyword or as the last argument of an application; it extends as far right
as possible, so ``lift fold[R] \\x:!R. m`` needs no parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagnostics import Diagnostic, ParseError, Span
from .surface import (
    Definition, SApp, SBang, SCase, SFold, SForce, SLam, SLeft, SLetPair, SLift,
    SLolli, SMu, SName, SNat, SPair, SRec, SRight, SSum, STensor, SUnfold, SVar,
    SurfaceModule, TypeAlias,
)

KEYWORDS = frozenset({
    "mu", "rec", "case", "of", "left", "right", "let", "in",
    "fold", "unfold", "lift", "force", "type", "def", "main",
})

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<sym>-o|->|[\\.:+*!()\[\],<>{}|=;])
  | (?P<nat>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str       # "ident", "kw", "nat", "sym", "error", "eof"
    text: str
    offset: int
    line: int
    col: int

    @property
    def span(self) -> Span:
        return Span(self.line, self.col, max(1, len(self.text)))

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        return repr(self.text)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            tokens.append(Token("error", source[pos], pos, line, pos - line_start + 1))
            pos += 1
            continue
        kind = m.lastgroup
        text = m.group()
        if kind == "ident":
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, pos, line, pos - line_start + 1))
        elif kind in ("sym", "nat"):
            tokens.append(Token(kind, text, pos, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", pos, line, pos - line_start + 1))
    return tokens


class _Failure(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic


_PREFIX_KW = frozenset({"left", "right", "fold", "unfold", "lift", "force"})
_BINDER_KW = frozenset({"rec", "case", "let"})


class Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "kw") and t.text == text

    def fail(self, message: str, token: Token | None = None):
        token = token or self.tok
        if token.kind == "error":
            message = f"unexpected character {token.text!r}"
        raise _Failure(Diagnostic("E-PARSE", message, token.span))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.describe()}")
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail(f"expected an identifier, found {self.tok.describe()}")
        return self.advance()

    def span_from(self, start: Token) -> Span:
        prev = self.tokens[self.pos - 1] if self.pos > 0 else start
        end = max(prev.offset + len(prev.text), start.offset + 1)
        return Span(start.line, start.col, end - start.offset)

    # -- types ---------------------------------------------------------------

    def parse_type(self):
        start = self.tok
        if self.at("mu"):
            self.advance()
            name = self.ident().text
            self.expect(".")
            body = self.parse_type()
            return SMu(name, body, self.span_from(start))
        return self.parse_arrow()

    def parse_arrow(self):
        start = self.tok
        left = self.parse_sum()
        if self.at("-o"):
            self.advance()
            right = self.parse_arrow()
            return SLolli(left, right, self.span_from(start))
        return left

    def parse_sum(self):
        start = self.tok
        left = self.parse_prod()
        while self.at("+"):
            self.advance()
            left = SSum(left, self.parse_prod(), self.span_from(start))
        return left

    def parse_prod(self):
        start = self.tok
        left = self.parse_bang()
        while self.at("*"):
            self.advance()
            left = STensor(left, self.parse_bang(), self.span_from(start))
        return left

    def parse_bang(self):
        start = self.tok
        if self.at("!"):
            self.advance()
            return SBang(self.parse_bang(), self.span_from(start))
        if self.tok.kind == "ident":
            t = self.advance()
            return SName(t.text, t.span)
        if self.at("("):
            self.advance()
            ty = self.parse_type()
            self.expect(")")
            return ty
        self.fail(f"expected a type, found {self.tok.describe()}")

    # -- terms ---------------------------------------------------------------

    def starts_binder(self) -> bool:
        return self.at("\\") or (self.tok.kind == "kw" and self.tok.text in _BINDER_KW)

    def starts_prefix(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "nat"):
            return True
        if t.kind == "kw":
            return t.text in _PREFIX_KW
        return t.kind == "sym" and t.text in ("<", "(")

    def parse_term(self):
        if self.starts_binder():
            return self.parse_binder()
        return self.parse_appseq()

    def parse_binder(self):
        start = self.tok
        if self.at("\\") or self.at("rec"):
            is_rec = self.advance().text == "rec"
            name = self.ident().text
            self.expect(":")
            annot = self.parse_type()
            self.expect(".")
            body = self.parse_term()
            node = SRec if is_rec else SLam
            return node(name, annot, body, self.span_from(start))
        if self.at("case"):
            self.advance()
            scrutinee = self.parse_term()
            self.expect("of")
            self.expect("{")
            self.expect("left")
            x = self.ident().text
            self.expect("->")
            left = self.parse_term()
            self.expect("|")
            self.expect("right")
            y = self.ident().text
            self.expect("->")
            right = self.parse_term()
            self.expect("}")
            return SCase(scrutinee, x, left, y, right, self.span_from(start))
        if self.at("let"):
            self.advance()
            self.expect("<")
            x = self.ident().text
            self.expect(",")
            y = self.ident().text
            self.expect(">")
            self.expect("=")
            scrutinee = self.parse_term()
            self.expect("in")
            body = self.parse_term()
            return SLetPair(scrutinee, x, y, body, self.span_from(start))
        self.fail(f"expected a term, found {self.tok.describe()}")

    def parse_appseq(self):
        start = self.tok
        if not self.starts_prefix():
            self.fail(f"expected a term, found {self.tok.describe()}")
        fn = self.parse_prefix()
        while True:
            if self.starts_prefix():
                arg = self.parse_prefix()
            elif self.starts_binder():
                arg = self.parse_binder()
            else:
                return fn
            fn = SApp(fn, arg, self.span_from(start))

    def parse_operand(self):
        if self.starts_binder():
            return self.parse_binder()
        if not self.starts_prefix():
            self.fail(f"expected a term, found {self.tok.describe()}")
        return self.parse_prefix()

    def parse_prefix(self):
        start = self.tok
        t = self.tok
        if t.kind == "kw" and t.text in ("left", "right"):
            self.advance()
            self.expect("[")
            a = self.parse_type()
            self.expect(",")
            b = self.parse_type()
            self.expect("]")
            body = self.parse_operand()
            node = SLeft if t.text == "left" else SRight
            return node(a, b, body, self.span_from(start))
        if self.at("fold"):
            self.advance()
            self.expect("[")
            a = self.parse_type()
            self.expect("]")
            return SFold(a, self.parse_operand(), self.span_from(start))
        if t.kind == "kw" and t.text in ("unfold", "lift", "force"):
            self.advance()
            node = {"unfold": SUnfold, "lift": SLift, "force": SForce}[t.text]
            return node(self.parse_operand(), self.span_from(start))
        if t.kind == "ident":
            self.advance()
            return SVar(t.text, t.span)
        if t.kind == "nat":
            self.advance()
            return SNat(int(t.text), t.span)
        if self.at("<"):
            self.advance()
            first = self.parse_term()
            self.expect(",")
            second = self.parse_term()
            self.expect(">")
            return SPair(first, second, self.span_from(start))
        if self.at("("):
            self.advance()
            inner = self.parse_term()
            self.expect(")")
            return inner
        self.fail(f"expected a term, found {self.tok.describe()}")

    # -- modules -------------------------------------------------------------

    def parse_item(self, module: dict) -> None:
        start = self.tok
        if self.at("type"):
            self.advance()
            name = self.ident()
            self.expect("=")
            body = self.parse_type()
            self.expect(";")
            module["aliases"].append(TypeAlias(name.text, body, name.span))
        elif self.at("def"):
            self.advance()
            name = self.ident()
            self.expect(":")
            annot = self.parse_type()
            self.expect("=")
            body = self.parse_term()
            self.expect(";")
            module["definitions"].append(Definition(name.text, annot, body, name.span))
        elif self.at("main"):
            self.advance()
            self.expect("=")
            body = self.parse_term()
            self.expect(";")
            if module["main"] is not None:
                raise _Failure(Diagnostic("E-DUPLICATE", "main is defined more than once", start.span))
            module["main"] = body
        else:
            self.fail(f"expected 'type', 'def' or 'main', found {self.tok.describe()}")

    def recover(self) -> None:
        """Skip to just past the next ';' (panic mode)."""
        while self.tok.kind != "eof" and not self.at(";"):
            self.advance()
        if self.at(";"):
            self.advance()

    def parse_module(self) -> SurfaceModule:
        module = {"aliases": [], "definitions": [], "main": None}
        errors: list[Diagnostic] = []
        while self.tok.kind != "eof":
            before = self.pos
            try:
                self.parse_item(module)
            except _Failure as exc:
                errors.append(exc.diagnostic)
                if self.pos == before and self.at(";"):
                    self.advance()
                else:
                    self.recover()
        if errors:
            raise ParseError(errors)
        return SurfaceModule(tuple(module["aliases"]), tuple(module["definitions"]), module["main"])

    def parse_whole(self, rule):
        try:
            result = rule()
            if self.tok.kind != "eof":
                self.fail(f"unexpected {self.tok.describe()} after end of input")
        except _Failure as exc:
            raise ParseError([exc.diagnostic]) from None
        return result


def parse_module(source: str) -> SurfaceModule:
    """Parse a whole ``.lnl`` file; raises ``ParseError`` with one diagnostic per bad item."""
    return Parser(source).parse_module()


def parse_term(source: str):
    p = Parser(source)
    return p.parse_whole(p.parse_term)


def parse_type(source: str):
    p = Parser(source)
    return p.parse_whole(p.parse_type)
