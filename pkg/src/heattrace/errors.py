"""Exception hierarchy.

Two families matter to callers: ``ValidationError`` (bad input, exit code 2 in
the CLI) and ``NumericalGuardError`` (a numerical safety check tripped, exit
code 3).
"""

from __future__ import annotations

from dataclasses import dataclass


class HeatTraceError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(HeatTraceError, ValueError):
    pass


class NumericalGuardError(HeatTraceError, ArithmeticError):
    pass


class DomainError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class OddnessError(ValidationError):
    """A series that must be odd has a nonzero even-degree coefficient."""


class TruncationError(ValidationError):
    """A coefficient beyond the known truncation order was requested."""


class RadiusError(ValidationError):
    pass


class ParityError(ValidationError):
    """Operation is only defined for the other parity of the power."""


class PositivityError(ValidationError):
    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"lambda_{index} = {value!r} is not positive")


@dataclass(frozen=True)
class PoleReport:
    location: complex
    order: int
    residue: complex


class PoleError(NumericalGuardError):
    def __init__(self, report: PoleReport, what: str = "function"):
        self.report = report
        super().__init__(
            f"{what} has a pole of order {report.order} at {report.location} "
            f"(residue {report.residue})"
        )


class PoleProximity(NumericalGuardError):
    def __init__(self, s: complex, pole: complex, residue: complex | None = None):
        self.s = s
        self.pole = pole
        self.residue = residue
        super().__init__(f"s={s} lies within 1e-6 of the pole at {pole}")


class OrderError(NumericalGuardError):
    pass


class ConditionError(NumericalGuardError):
    pass


class DegenerateError(NumericalGuardError):
    pass
