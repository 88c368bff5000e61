from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class Span:
    """Source location: 1-based line and column, length in characters."""
    line: int
    col: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Span | None = None
    severity: str = "error"
    definition: str | None = None

    def with_definition(self, name: str | None) -> Diagnostic:
        if self.definition is not None or name is None:
            return self
        return Diagnostic(self.code, self.message, self.span, self.severity, name)

    def to_json(self) -> dict:
        span = self.span or Span(1, 1, 0)
        return {
            "code": self.code,
            "severity": self.severity,
            "span": {"line": span.line, "col": span.col, "len": span.length},
            "message": self.message,
            "definition": self.definition,
        }

    def render(self, filename: str = "<input>") -> str:
        where = f"{filename}:{self.span}" if self.span else filename
        ctx = f" (in {self.definition})" if self.definition else ""
        return f"{where}: {self.severity}[{self.code}]: {self.message}{ctx}"


class LnlError(Exception):
    """Raised by every phase; carries one or more diagnostics."""

    def __init__(self, diagnostics: Diagnostic | Iterable[Diagnostic]):
        if isinstance(diagnostics, Diagnostic):
            diagnostics = [diagnostics]
        self.diagnostics: list[Diagnostic] = list(diagnostics)
        super().__init__("; ".join(f"[{d.code}] {d.message}" for d in self.diagnostics))

    @property
    def diagnostic(self) -> Diagnostic:
        return self.diagnostics[0]

    @property
    def code(self) -> str:
        return self.diagnostics[0].code


class ParseError(LnlError):
    pass


class ElaborationError(LnlError):
    pass


class TypeCheckError(LnlError):
    pass


def error(code: str, message: str, span: Span | None = None) -> Diagnostic:
    return Diagnostic(code, message, span)
