"""Exception hierarchy shared by every engine module.

The CLI maps each family onto an exit code, so new errors should subclass
one of the four roots below rather than ``Exception`` directly.
"""


class NablaError(Exception):
    """Base class. ``kind`` is the machine-readable reason tag."""

    kind = "error"


class DomainError(NablaError, ValueError):
    """A point or argument lies outside the set the operation is defined on."""

    kind = "domain"


class PreconditionError(DomainError):
    """A theorem hypothesis required by an operation does not hold."""

    kind = "precondition"


class EvaluationError(DomainError, ArithmeticError):
    """An expression cannot be evaluated to a finite real at a point."""

    kind = "evaluation"


class NonRealPowerError(EvaluationError):
    kind = "non_real_power"


class ParseError(NablaError, ValueError):
    """Malformed time-scale, function or order text.

    ``column`` is 1-based when known.
    """

    kind = "parse"

    def __init__(self, message, column=None):
        self.column = column
        if column is not None:
            message = f"{message} at column {column}"
        super().__init__(message)


class NotDifferentiable(NablaError):
    """The dense-limit difference quotients did not settle.

    ``trace`` holds the quotient sequence(s) that were examined.
    """

    kind = "not_differentiable"

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or {}


class InconclusiveSearch(NablaError):
    """A witness or root search on a continuum found nothing certifiable.

    Existence may still hold; ``best`` carries the closest candidates.
    """

    kind = "inconclusive"

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best or {}


class NoWitness(InconclusiveSearch):
    """An exhaustive scan of a finite set proved that no witness exists."""

    kind = "no_witness"


class NotExact(NablaError):
    """Raised internally when exact rational evaluation is impossible."""

    kind = "not_exact"
