"""Exception types raised across the package.

Every error that callers are expected to catch is a subclass of
:class:`SetwiseCDError`, grouped loosely by the module that raises it.
"""


class SetwiseCDError(Exception):
    """Base class for all package errors."""


# -- graph construction -------------------------------------------------

class GraphError(SetwiseCDError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class DisconnectedGraph(GraphError):
    pass


class OddDegree(GraphError):
    pass


class DegreeTooLarge(GraphError):
    pass


class TooManyEdges(GraphError):
    """Brute-force enumeration over assignments was asked for too many edges."""


class NoMatchingAvailable(GraphError):
    pass


# -- linear algebra ------------------------------------------------------

class EigensolverFailure(SetwiseCDError):
    pass


class MultipleZeroEigenvalues(SetwiseCDError):
    """More than one (near-)zero Laplacian eigenvalue: disconnected graph or
    numerical breakdown."""


class SingularAggregate(SetwiseCDError):
    """The summed quadratic Hessian is not positive definite."""


class DimensionMismatch(SetwiseCDError):
    pass


class NegativeQuadForm(SetwiseCDError):
    """A projected quadratic form came out negative beyond rounding noise."""


# -- simulation ----------------------------------------------------------

class IndexOutOfRange(SetwiseCDError, IndexError):
    pass


class NonPositiveStep(SetwiseCDError):
    pass


class IsolatedNode(SetwiseCDError):
    pass


class NegativeSuboptimality(SetwiseCDError):
    """Suboptimality fell below the -1e-9 numerical floor."""


# -- verification --------------------------------------------------------

class InequalityViolated(SetwiseCDError):
    """A verified inequality failed; carries a witness in ``args``."""


# -- rate estimation -----------------------------------------------------

class InsufficientPoints(SetwiseCDError):
    pass


class NonPositiveSuboptimality(SetwiseCDError):
    pass


# -- experiment configuration ---------------------------------------------

class InconsistentSetSpec(SetwiseCDError):
    pass
