"""Exception hierarchy shared by every module of the package.

Each exception carries an ``exit_code`` so the command-line front end can map
failures onto its documented status codes without a lookup table of its own.
"""

from __future__ import annotations

from typing import Any


class AffineBodyError(Exception):
    """Base class for all package errors."""

    exit_code = 1


# -- configuration-space geometry -------------------------------------------

class SingularConfiguration(AffineBodyError):
    """The configuration matrix is (numerically) singular."""

    exit_code = 3


class OrientationError(AffineBodyError):
    """The configuration matrix has non-positive determinant."""

    exit_code = 2


class DegenerateFlag(AffineBodyError):
    """Deformation invariants coincide, so a two-polar quantity is not unique.

    ``partial`` holds whatever part of the result is still well defined.
    """

    exit_code = 3

    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


# -- numerics ----------------------------------------------------------------

class NumericalFailure(AffineBodyError):
    exit_code = 3


class Diverged(NumericalFailure):
    """Integration blew up; ``trajectory`` is the part computed before that."""

    def __init__(self, message: str, trajectory: Any = None):
        super().__init__(message)
        self.trajectory = trajectory


class Unconverged(NumericalFailure):
    pass


class DegenerateLegendre(NumericalFailure):
    pass


# -- models, labels, domains -------------------------------------------------

class InvalidModel(AffineBodyError):
    exit_code = 2


class InvalidLabel(AffineBodyError):
    exit_code = 2


class DomainError(AffineBodyError):
    exit_code = 2


class ShapeError(AffineBodyError):
    exit_code = 2


# -- configuration files -----------------------------------------------------

class ParseError(AffineBodyError):
    exit_code = 2

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(AffineBodyError):
    exit_code = 2

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class OutputError(AffineBodyError):
    """Reading or writing a result file failed; ``path`` names the file."""

    exit_code = 4

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
