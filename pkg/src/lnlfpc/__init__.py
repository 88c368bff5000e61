"""LNL-FPC: a linear/non-linear language with recursive types.

Pipeline: ``parse_module`` -> ``elaborate`` -> ``check_program`` -> ``evaluate``.
"""

from __future__ import annotations

from importlib import resources

from .elaborator import CoreProgram, elaborate
from .parser import parse_module, parse_term, parse_type
from .surface import SurfaceModule

__version__ = "0.1.0"


def corpus_source(name: str) -> str:
    """Text of a shipped ``.lnl`` file, e.g. ``corpus_source("prelude.lnl")``."""
    return resources.files(__package__).joinpath("corpus", name).read_text(encoding="utf-8")


def corpus_files() -> list[str]:
    folder = resources.files(__package__).joinpath("corpus")
    return sorted(p.name for p in folder.iterdir() if p.name.endswith(".lnl"))


def prelude_module() -> SurfaceModule:
    return parse_module(corpus_source("prelude.lnl"))


def load_module(source: str, prelude: bool = True) -> SurfaceModule:
    module = parse_module(source)
    return prelude_module().merged_with(module) if prelude else module


def load_program(source: str, prelude: bool = True) -> CoreProgram:
    """Parse and elaborate ``source`` (after the prelude unless ``prelude`` is false)."""
    return elaborate(load_module(source, prelude))


__all__ = [
    "CoreProgram", "corpus_files", "corpus_source", "elaborate", "load_module", "load_program",
    "parse_module", "parse_term", "parse_type", "prelude_module",
]
