"""Exception hierarchy shared by all modules.

The CLI maps each family to its own exit status, so new errors should
subclass one of the four families below rather than ``KPError`` directly.
"""

from __future__ import annotations


class KPError(Exception):
    """Base class for every error raised by kpalg."""


class ParseError(KPError):
    """Malformed input text (expressions or config files)."""

    def __init__(self, message: str, text: str = "", pos: int | None = None,
                 line: int | None = None):
        self.text = text
        self.pos = pos
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"column {pos + 1}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class SemanticError(KPError, ValueError):
    """Well-formed input that does not make sense in its context."""


class ScopeError(SemanticError):
    """Operands belong to different generator scopes or ring contexts."""


class NotAUnitError(SemanticError, ZeroDivisionError):
    """Division by an element that is not a product of declared denominators."""


class VerificationError(KPError):
    """A required identity (Jacobi, KP relation, ...) does not hold."""


class ResourceLimitError(KPError):
    """A configured budget (Groebner pairs, term count, matrix size) was exceeded."""


class UnknownGeneratorError(SemanticError):
    """An expression names a generator that is not declared."""

    def __init__(self, name: str, text: str = "", pos: int | None = None):
        self.name = name
        self.text = text
        self.pos = pos
        where = f"column {pos + 1}: " if pos is not None else ""
        super().__init__(f"{where}unknown generator {name!r} in {text!r}")
