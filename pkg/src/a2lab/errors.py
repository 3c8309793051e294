"""Exception hierarchy shared by every module.

The CLI maps ``InputError`` to exit code 2 and every ``ViolationError`` to
exit code 1.
"""


class A2LabError(Exception):
    """Base class for all errors raised by the package."""


class InputError(A2LabError):
    """Malformed input or a violated precondition."""


class DepthInsufficientError(A2LabError):
    """The ball or truncation is too small to decide the question.

    This is never a refutation: a larger radius may succeed.
    """


class ViolationError(A2LabError):
    """A mathematical claim failed on concrete data.

    ``witness`` carries a JSON-serialisable description of the failure.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness if witness is not None else {}


class ConstructionError(ViolationError):
    """Building-ball construction produced an inconsistent complex."""


class StructureError(ViolationError):
    """A link or complex failed a structural axiom."""


class SymmetryViolation(ViolationError):
    """Extension counts differ between two admissible base embeddings."""


class MeasureViolation(ViolationError):
    """An exact measure identity did not hold."""
