"""Exception hierarchy shared by every paxkit package.

Every error raised on purpose derives from :class:`PaxkitError`; the CLI maps
it to exit code 1 (``UsageError`` maps to 2). Errors describing a bad input
value also derive from :class:`ValueError`.
"""

from __future__ import annotations

from typing import Sequence


class PaxkitError(Exception):
    """Base class for all domain errors."""

    exit_code = 1


class UsageError(PaxkitError):
    """Invalid command-line usage (bad flag values, missing inputs)."""

    exit_code = 2


# ---------- geometry ----------
class InvalidBox(PaxkitError, ValueError):
    """An oriented box violates its field invariants."""


class InvalidQuad(PaxkitError, ValueError):
    """Quad corners are not a simple polygon with positive area."""


class DegenerateQuad(PaxkitError, ValueError):
    """The minimum-area rectangle of a quad has a side shorter than tolerance."""


class DegeneratePointSet(PaxkitError, ValueError):
    """A point set has fewer than 3 points or all points are collinear."""


# ---------- axis codec ----------
class NonFiniteLogits(PaxkitError, ValueError):
    """An axis vector contains NaN or infinite entries."""


# ---------- losses ----------
class DegenerateTarget(PaxkitError, ValueError):
    """A point-axis target has a radial vector of (near) zero length."""


class InvalidK(PaxkitError, ValueError):
    """A point count or top-k size is out of range for the prediction."""


class LengthMismatch(PaxkitError, ValueError):
    """Two vectors that must have equal length do not."""


class IndexOutOfRange(PaxkitError, IndexError):
    """A class id is outside ``[-1, n_classes)``."""


class EmptyBatch(PaxkitError, ValueError):
    """A loss was asked to average over zero matched instances."""


# ---------- nn core ----------
class ShapeMismatch(PaxkitError, ValueError):
    """Operand shapes are incompatible for the requested op."""


class OddDimension(PaxkitError, ValueError):
    """A sinusoidal encoding width is not even."""


class RefPointOutOfRange(PaxkitError, ValueError):
    """A deformable-attention reference point lies outside ``[0, 1]^2``."""


# ---------- detector ----------
class TooSmallInput(PaxkitError, ValueError):
    """Image smaller than one patch."""


class NotEnoughCells(PaxkitError, ValueError):
    """Feature map has fewer cells than requested object queries."""


class GroupSizeMismatch(PaxkitError, ValueError):
    """Point queries do not come in groups of exactly K per owner."""


class CheckpointMismatch(PaxkitError):
    """A checkpoint does not fit the model or dataset it is applied to."""


class NonFiniteLoss(PaxkitError):
    """Training produced a NaN or infinite loss."""

    def __init__(self, step: int, value: float):
        """Record the offending optimisation step.

        :param step: Global optimisation step (1-based).
        :param value: Offending loss value.
        """
        super().__init__(f"non-finite loss {value!r} at step {step}")
        self.step = step
        self.value = value


# ---------- matching / eval ----------
class NonFiniteCost(PaxkitError, ValueError):
    """A cost matrix contains NaN or infinite entries."""


class UnknownProtocol(PaxkitError, ValueError):
    """AP protocol is not one of voc07, voc12, coco101."""


# ---------- data io ----------
class ParseError(PaxkitError, ValueError):
    """Malformed DOTA annotation line."""

    def __init__(self, message: str, line: int, column: int = 0):
        """Attach the 1-based line and column of the failure.

        :param message: Human readable reason.
        :param line: 1-based line number.
        :param column: 1-based token column (0 when not applicable).
        """
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class TooFewTokens(ParseError):
    """An annotation line has fewer than 9 tokens."""


class NonNumericCoordinate(ParseError):
    """One of the 8 coordinate tokens is not a number."""


class PlacementFailure(PaxkitError):
    """Synthetic generator could not place an object within the attempt budget."""


class UnknownKey(PaxkitError, KeyError):
    """Run config contains a key that no section declares."""

    def __init__(self, key: str):
        """Remember the offending key.

        :param key: Unknown config key.
        """
        super().__init__(key)
        self.key = key

    def __str__(self) -> str:
        return f"unknown config key '{self.key}'"


class ConfigTypeError(PaxkitError, TypeError):
    """A run-config value cannot be converted to its declared type."""


class InvalidConfig(PaxkitError, ValueError):
    """Config values violate a cross-field invariant."""


# ---------- verification ----------
class VerificationFailed(PaxkitError):
    """One or more oracle properties failed."""

    def __init__(self, failing: Sequence[str]):
        """List the failing property names.

        :param failing: Names of failing properties.
        """
        super().__init__("failing properties: " + ", ".join(failing))
        self.failing = list(failing)
