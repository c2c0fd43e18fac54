"""Exception hierarchy shared by all nilspec modules."""


class NilspecError(Exception):
    """Base class for every error raised by this package."""


# --- algebra validation -------------------------------------------------

class AlgebraError(NilspecError):
    pass


class AntisymmetryViolation(AlgebraError):
    pass


class JacobiViolation(AlgebraError):
    pass


class NotNilpotent(AlgebraError):
    pass


class BasisNotAdapted(AlgebraError):
    pass


class NonpositiveRho(AlgebraError):
    pass


class UnsupportedStep(AlgebraError):
    """Raised by group-law / solver code restricted to step <= 2."""


# --- expression language ------------------------------------------------

class ExprError(NilspecError):
    pass


class ExprSyntaxError(ExprError):
    """Parse failure; carries the byte offset and the expected token set."""

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.expected = frozenset(expected)


class UnknownVariable(ExprError):
    def __init__(self, name, dim, offset):
        super().__init__(f"variable {name!r} out of range for dimension {dim}")
        self.offset = offset


class DepthExceeded(ExprError):
    pass


class EvaluationError(ExprError):
    """Division by zero or a non-finite intermediate value."""


# --- metric / grid / solver ----------------------------------------------

class NotPositiveDefinite(NilspecError):
    def __init__(self, point, eigenvalue):
        super().__init__(
            f"metric not positive definite at {point} (min eigenvalue {eigenvalue:.3e})"
        )
        self.point = point
        self.eigenvalue = eigenvalue


class PeriodicityViolation(NilspecError):
    pass


class ResolutionOutOfRange(NilspecError):
    pass


class SolverDiverged(NilspecError):
    def __init__(self, residual, iterations):
        super().__init__(
            f"iterative solver stalled at residual {residual:.3e} after {iterations} iterations"
        )
        self.residual = residual
        self.iterations = iterations


class SingularSystem(NilspecError):
    pass


class InconsistentFormulas(NilspecError):
    """Direct and Gram evaluations of the effective tensor disagree."""


class EmptyMask(NilspecError):
    pass


class NoConvergence(NilspecError):
    pass


class BallTouchesBoundary(NilspecError):
    pass


class BoxTooSmall(NilspecError):
    pass


class PatchTooSmall(NilspecError):
    pass


class ContainmentViolation(NilspecError):
    pass


class BoundViolated(NilspecError):
    pass


class InsufficientRhoRange(NilspecError):
    pass


# --- configuration -------------------------------------------------------

class ConfigError(NilspecError):
    def __init__(self, path, message):
        super().__init__(f"config error at {path}: {message}")
        self.path = path
