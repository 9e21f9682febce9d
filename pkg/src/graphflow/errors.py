"""Exception hierarchy.

``GraphflowError`` subclasses are domain errors (CLI exit code 1);
``ParseError`` covers malformed input (exit code 2).
"""


class GraphflowError(Exception):
    """Base class for domain errors."""

    code = "GraphflowError"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


def _make(name, doc):
    return type(name, (GraphflowError,), {"__doc__": doc, "code": name})


VertexOutOfRange = _make("VertexOutOfRange", "A vertex id outside 1..d.")
DuplicateEdge = _make("DuplicateEdge", "The same ordered pair given twice.")
EmptyVertexSet = _make("EmptyVertexSet", "A graph with no vertices.")
InvalidPath = _make("InvalidPath", "A vertex sequence that is not a path of the graph.")
EmptySet = _make("EmptySet", "An operation that needs a nonempty vertex set got none.")
NotAnLGraph = _make("NotAnLGraph", "Some vertex has out-degree zero.")
NotAnAttractor = _make("NotAnAttractor", "A set with omega(A) != A.")
NotStrictlyIncreasing = _make("NotStrictlyIncreasing", "Attractor sequence is not a strict chain from the empty set.")
InvalidMorseDecomposition = _make("InvalidMorseDecomposition", "Collection fails the Morse decomposition conditions.")
DimensionMismatch = _make("DimensionMismatch", "Matrix or vector sizes disagree.")
NotIrreducible = _make("NotIrreducible", "Matrix is not irreducible.")
NotACommunicatingClass = _make("NotACommunicatingClass", "Set is not a communicating class of the graph.")
NegativeEntry = _make("NegativeEntry", "Transition matrix has a negative entry.")
RowSumViolation = _make("RowSumViolation", "A row of the transition matrix does not sum to one.")
NotSquare = _make("NotSquare", "Matrix is not square.")
EmptyTarget = _make("EmptyTarget", "Hitting target is empty.")
HypothesisViolated = _make("HypothesisViolated", "Instance does not satisfy the hypotheses of the leaking bound.")
ThresholdExceeded = _make("ThresholdExceeded", "Exhaustive enumeration refused above the size threshold.")


class SingularSystem(GraphflowError):
    """Linear solve hit a pivot below the singularity threshold."""

    code = "SingularSystem"

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual

    def to_dict(self):
        out = super().to_dict()
        out["residual"] = self.residual
        return out


class ParseError(ValueError):
    """Input text does not follow the declared format."""
