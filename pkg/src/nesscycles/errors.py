"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures without a
lookup table: 3 validation, 4 resource cap, 5 numeric failure.
"""


class NessError(Exception):
    exit_code = 1


class ValidationError(NessError):
    """A process or flux field violates a structural invariant."""

    exit_code = 3

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NotSteadyStateError(ValidationError):
    """Flux field violates the node (Kirchhoff current) condition."""

    def __init__(self, worst_vertex, imbalance):
        super().__init__(
            f"flux field is not a steady state: node condition violated at "
            f"state {worst_vertex + 1} (imbalance {imbalance:.3e})"
        )
        self.worst_vertex = worst_vertex
        self.imbalance = imbalance


class ZeroRateEdgeError(ValidationError):
    def __init__(self, i, j):
        super().__init__(f"edge {i + 1}->{j + 1} has zero rate")
        self.edge = (i, j)


class DetailedBalanceRequiredError(ValidationError):
    pass


class UnreachableStateError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class DivergentEntropyError(ValidationError):
    """Entropy production diverges on a unidirectional edge carrying flux."""

    def __init__(self, i, j):
        super().__init__(
            f"entropy production diverges: edge {i + 1}->{j + 1} carries flux "
            f"but the reverse transition {j + 1}->{i + 1} has rate zero"
        )
        self.edge = (i, j)


class NotSelfAvoidingError(ValueError, NessError):
    pass


class InconsistencyError(NessError):
    """An internal identity that must hold exactly failed beyond tolerance."""

    exit_code = 5


class NumericalError(NessError):
    exit_code = 5

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CatalogExplosionError(NessError):
    exit_code = 4


class CombinatorialCapError(NessError):
    exit_code = 4
