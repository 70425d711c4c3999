"""Exception types raised by ptfesh."""


class StructureError(ValueError):
    """Matrix is neither Hermitian nor PT-symmetric in the requested form."""

    def __init__(self, message, violation=float("nan")):
        super().__init__(message)
        self.violation = violation


class PhaseUndefinedError(ValueError):
    """Vector is not an eigenstate of the PT operator (broken phase)."""


class PoleProximityError(ValueError):
    """Energy parameter sits on (or too close to) an eigenvalue of G."""

    def __init__(self, message, pole):
        super().__init__(message)
        self.pole = pole


class DegenerateIntervalError(ValueError):
    """Scan interval leaves no admissible grid point."""


class CoverageError(ValueError):
    """Scan interval misses part of the spectrum."""

    def __init__(self, message, eigenvalue):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class DegeneracyError(ArithmeticError):
    """Vanishing pseudo-norm: the level sits at an exceptional point."""

    def __init__(self, message, level):
        super().__init__(message)
        self.level = level


class RootCountError(RuntimeError):
    """Self-consistent roots and oracle spectrum cannot be reconciled."""


class OracleFailure(RuntimeError):
    """Dense eigensolver did not converge."""


class ContractError(ValueError):
    """Input data violates a documented precondition."""


class ConfigError(ValueError):
    """Run configuration violates one of its invariants."""
