"""Exception taxonomy shared by every module.

Errors that carry context (row numbers, variable names, model kinds)
expose it as attributes so the CLI and HTTP layers can render precise
diagnostics without string parsing.
"""

from __future__ import annotations


class FreightWhatifError(Exception):
    """Base class for all package errors."""


# --- data substrate -------------------------------------------------------

class ParseError(FreightWhatifError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class DuplicateIndex(FreightWhatifError):
    def __init__(self, date):
        super().__init__(f"duplicate date {date}")
        self.date = date


class EmptyFrame(FreightWhatifError):
    pass


class InvalidWindow(FreightWhatifError):
    pass


class WindowTooLarge(FreightWhatifError):
    pass


class EmptySeries(FreightWhatifError):
    pass


class MissingVariable(FreightWhatifError):
    def __init__(self, variable: str):
        super().__init__(f"variable {variable!r} not in frame")
        self.variable = variable


# --- model fitting / forecasting ------------------------------------------

class SingularDesign(FreightWhatifError):
    pass


class InsufficientData(FreightWhatifError):
    pass


class FitDidNotConverge(FreightWhatifError):
    pass


class DivergedTraining(FreightWhatifError):
    pass


class MissingExogPath(FreightWhatifError):
    def __init__(self, variable: str, detail: str = ""):
        msg = f"missing or incomplete path for exogenous variable {variable!r}"
        super().__init__(msg + (f" ({detail})" if detail else ""))
        self.variable = variable


class InvalidHorizon(FreightWhatifError):
    pass


class CannotFixTarget(FreightWhatifError):
    pass


class InvalidSystem(FreightWhatifError):
    pass


class MissingData(FreightWhatifError):
    """Series handed to a dynamic model contains missing cells."""


# --- scenario engine -------------------------------------------------------

class InvalidScenario(FreightWhatifError):
    """Scenario violates its schema; ``field`` names the offending path."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(message)
        self.field = field


class ModelNotFitted(FreightWhatifError):
    def __init__(self, kind):
        super().__init__(f"model {kind} selected but not fitted")
        self.kind = kind


class ModelNotInRun(FreightWhatifError):
    def __init__(self, kind):
        super().__init__(f"model {kind} was not part of this run")
        self.kind = kind


# --- evaluation ------------------------------------------------------------

class EmptyInput(FreightWhatifError):
    pass


class ShapeError(FreightWhatifError):
    pass


# --- spatial ----------------------------------------------------------------

class InvalidCoordinate(FreightWhatifError):
    pass


class UndefinedBearing(FreightWhatifError):
    pass


class AlreadyInPort(FreightWhatifError):
    """Vessel is inside the port radius; treat as present, not approaching."""


class InvalidBBox(FreightWhatifError):
    pass


class InvalidVesselRecord(FreightWhatifError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


# --- service / config -------------------------------------------------------

class ConfigError(FreightWhatifError):
    pass
