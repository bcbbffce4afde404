"""Exception taxonomy.

Every error carries a short machine-readable ``kind`` so the CLI can report
failures as structured JSON.
"""


class IndPolyError(Exception):
    kind = "error"


class InvalidInputError(IndPolyError, ValueError):
    kind = "invalid-input"


class ParseError(IndPolyError, ValueError):
    kind = "parse"


class GraphTooLargeError(IndPolyError):
    kind = "too-large"


class NodeBudgetExceeded(IndPolyError):
    kind = "budget"


class NearSingularError(IndPolyError, ArithmeticError):
    """A recursion denominator vanished (point at or outside the admissible polydisc)."""

    kind = "singularity"


class OutsideRegionError(IndPolyError, ArithmeticError):
    """An exact quantity is undefined because the point is outside the admissible region."""

    kind = "region"


class SlackViolationError(IndPolyError):
    """A caller-asserted slack turned out to be false."""

    kind = "slack-violation"


class IterationCapError(IndPolyError, RuntimeError):
    kind = "iteration-cap"


class NoFixedPointError(IndPolyError):
    kind = "no-fixed-point"


class ConvergenceError(IndPolyError, RuntimeError):
    kind = "non-convergence"
