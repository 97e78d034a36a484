"""Exception hierarchy. Each class carries the process exit code used by the CLI."""


class QdbError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ScriptError(QdbError):
    """Op-script text could not be parsed."""

    exit_code = 2

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CircuitParseError(QdbError):
    """Circuit text could not be parsed."""

    exit_code = 2

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SemanticError(QdbError):
    """Operation arguments are inconsistent with the current state."""

    exit_code = 3


class ZeroProbabilityError(SemanticError):
    """Projection onto a subspace carrying (numerically) zero probability."""


class CapacityError(QdbError):
    """Qubit budget or index-creation capacity exceeded."""

    exit_code = 4


class VerificationError(QdbError):
    """A self-check (invariant suite or preflight) failed."""

    exit_code = 5
