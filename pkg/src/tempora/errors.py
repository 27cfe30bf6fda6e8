"""Exception types shared across the package."""

from __future__ import annotations


class TemporaError(Exception):
    """Base class for all library errors."""


class ParseError(TemporaError):
    """Malformed input text; carries a 1-based line/column position."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, col {col})"
        super().__init__(message)


class ArityError(ParseError):
    """A predicate is used with two different arities."""


class SafetyError(ParseError):
    """A head variable is not safely bound in the rule body."""


class EmptyIntervalError(ParseError):
    """An interval that denotes no integer timepoint."""


class EngineError(TemporaError):
    """Base class for reasoning-time errors."""


class UnboundedDatasetError(EngineError):
    """An operation that requires finite interval endpoints got an infinite one."""


class NotNormalFormError(EngineError):
    """A fact set that must be in normal form is not."""


class DivergenceError(EngineError):
    """Materialization exceeded its iteration or endpoint caps.

    `reason` is "iterations" or "endpoint"; `detail` names the offending
    rule or atom when known.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        msg = f"materialization diverged ({reason})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class UnsupportedError(EngineError):
    """The requested computation is outside the engine's supported class."""


class CapExceededError(EngineError):
    """An enumeration produced more candidates or results than the cap allows."""


class InconsistentInputError(EngineError):
    """Classical query answering was asked about an inconsistent dataset."""


class NoRepairsError(EngineError):
    """A repair-based semantics was evaluated while no repair exists.

    Cannot occur for bounded datasets over the integer timeline; kept so the
    behaviour is defined if that precondition is ever relaxed.
    """


class WindowTooSmallError(EngineError):
    """The brute-force reference model touched its window boundary."""
