"""Exception hierarchy; every error knows the CLI exit code it maps to."""


class GShiftError(Exception):
    exit_code = 1


class DocumentError(GShiftError, ValueError):
    """A map or configuration document could not be parsed."""

    exit_code = 2

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class InvariantViolation(GShiftError, ValueError):
    exit_code = 3


class AlphabetTooSmall(InvariantViolation):
    pass


class AlphabetMismatch(InvariantViolation):
    pass


class NonEscapingTailUnbounded(InvariantViolation):
    """Reserved for map classes whose bounded tails are not eventually monotone."""


class EmptyWindow(GShiftError, ValueError):
    exit_code = 3


class NotMaterializable(GShiftError, ValueError):
    exit_code = 3


class InapplicableWitness(GShiftError):
    """A witness was requested for a map whose profile rules it out."""

    exit_code = 4
    blocking_flag = ""

    def __init__(self, message: str):
        super().__init__(f"{message} (blocked by profile flag '{self.blocking_flag}')")


class NoEscapingPoint(InapplicableWitness):
    blocking_flag = "sensitive"


class PeriodicPointPresent(InapplicableWitness):
    blocking_flag = "li_yorke_sensitive"


class EscapingPointPresent(InapplicableWitness):
    blocking_flag = "sensitive"


class NoPeriodicPoint(InapplicableWitness):
    blocking_flag = "li_yorke_sensitive"


EXIT_OK = 0
EXIT_CLAIM_FAILED = 5
EXIT_INCONCLUSIVE = 6
