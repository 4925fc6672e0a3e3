"""Exception types raised across the package."""


class DdrsError(Exception):
    """Base class for all package errors."""


class InvalidPositionError(DdrsError, IndexError):
    pass


class UnknownSymbolError(DdrsError):
    pass


class OpenTermError(DdrsError, ValueError):
    """A closed term was required."""


class DdrsSyntaxError(DdrsError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class DuplicateTagError(DdrsError):
    pass


class RangeError(DdrsError):
    pass


class MetaDigitError(DdrsError):
    """A digit meta-operator was applied outside its domain (e.g. 9' or 0*)."""


class RuleError(DdrsError):
    """A rewrite rule violates its invariants (variable lhs, extra rhs variables)."""


class SignatureMismatchError(DdrsError):
    pass


class UnknownSystemError(DdrsError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown system"


class UnknownGrammarError(DdrsError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown grammar"


class StepLimitExceeded(DdrsError):
    """Normalisation did not reach a normal form within the step limit."""


class RewriteCycle(StepLimitExceeded):
    """Normalisation revisited a term it was still reducing."""
