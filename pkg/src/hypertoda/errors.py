"""Exception hierarchy shared by every module.

Numerical failures carry a short ``kind`` tag and the offending parameter so
the CLI can render them as structured records.
"""

from __future__ import annotations


class ConfigurationError(ValueError):
    """Unsupported root system or malformed setup."""


class NumericalError(ArithmeticError):
    kind = "numerical"

    def __init__(self, detail: str, offending_parameter: str | None = None):
        super().__init__(detail)
        self.detail = detail
        self.offending_parameter = offending_parameter

    def as_record(self) -> dict:
        return {
            "error_kind": self.kind,
            "detail": self.detail,
            "offending_parameter": self.offending_parameter,
        }


class PoleError(NumericalError):
    kind = "pole"


class ZeroByPole(NumericalError):
    """A Gamma function in a denominator sits on a pole; the ratio is zero."""

    kind = "zero-by-pole"


class ResonanceError(NumericalError):
    kind = "resonance"


class AccuracyError(NumericalError):
    kind = "accuracy"


class DomainError(NumericalError):
    kind = "domain"


class DegenerateCharacterError(DomainError):
    kind = "degenerate-character"
