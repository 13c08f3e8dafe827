"""Exception hierarchy shared across the package.

All analysis failures derive from DidGraphError so the CLI can map them
to a single nonzero exit code while usage errors stay separate.
"""

from __future__ import annotations


class DidGraphError(Exception):
    """Base class for all analysis errors raised by this package."""


class UnknownNodeError(DidGraphError):
    """A query referenced a node name absent from the diagram."""

    def __init__(self, name: str):
        super().__init__(f"unknown node: {name!r}")
        self.name = name


class FormError(DidGraphError):
    """An operation received a diagram in the wrong form."""


class CyclicGraphError(DidGraphError):
    """The diagram admits no topological order."""


class CapacityError(DidGraphError):
    """An exhaustive search exceeded its configured size cap."""


class TransformError(DidGraphError):
    """A delta construction or marginalization step is invalid."""


class AdmissibilityError(DidGraphError):
    """A coefficient assignment implies explained variance >= 1 at a node."""

    def __init__(self, node: str, explained: float):
        super().__init__(
            f"inadmissible assignment: node {node!r} has explained variance "
            f"{explained:.6f} >= 1"
        )
        self.node = node
        self.explained = explained


class AssignmentError(DidGraphError):
    """A coefficient assignment does not cover every symbol in the diagram."""


class SingularityError(DidGraphError):
    """A covariance submatrix is numerically singular."""


class ParseError(DidGraphError):
    """A symbolic expression or JSON document could not be parsed."""


class KernelError(DidGraphError):
    """Base class for numerical fitting failures."""


class RankDeficiencyError(KernelError):
    """A design matrix column is linearly dependent on earlier columns."""

    def __init__(self, column: str):
        super().__init__(f"rank-deficient design: column {column!r} is dependent")
        self.column = column


class SeparationError(KernelError):
    """A logistic-family fit diverged, indicating perfect separation."""


class PreconditionError(KernelError):
    """A fitting routine's input precondition was violated."""


class EstimatorError(DidGraphError):
    """An estimator could not produce an estimate."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"estimator {kind!r}: {message}")
        self.kind = kind


class ConfigError(DidGraphError):
    """A benchmark or CLI configuration violates its invariants."""
