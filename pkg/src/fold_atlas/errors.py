"""Exception hierarchy.

Each exception carries the process exit code the CLI maps it to.
"""


class FoldAtlasError(Exception):
    exit_code = 1


class InputError(FoldAtlasError, ValueError):
    """Malformed user input (bad JSON, non-Monge surface, bad family name)."""

    exit_code = 2


class DimensionError(InputError):
    """Operands live in polynomial rings with different numbers of variables."""


class CompositionDomainError(InputError):
    """An inner argument of a composition has a nonzero constant term."""


class NotARotationError(InputError):
    pass


class DegenerateDirectionError(InputError):
    """Fold direction parallel to the surface normal (v3**2 == 1)."""


class MirrorSymmetricError(InputError):
    """The odd part of the surface vanishes identically."""


class UndefinedFrameError(FoldAtlasError, ValueError):
    """Principal frame is undefined (umbilic) or not aligned with the axes."""

    exit_code = 2


class InsufficientJetError(FoldAtlasError, ValueError):
    exit_code = 3


class UnsupportedClassError(FoldAtlasError, ValueError):
    exit_code = 4


class InvariantError(FoldAtlasError, AssertionError):
    """Two independent routes disagree. Should be unreachable."""

    exit_code = 5

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload
