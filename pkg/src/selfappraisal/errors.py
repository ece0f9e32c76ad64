"""Exception hierarchy shared by every module of the package."""


class SelfAppraisalError(Exception):
    """Base class for all package errors."""


class InvalidMatrix(SelfAppraisalError, ValueError):
    pass


class NegativeEntry(InvalidMatrix):
    def __init__(self, i, j, value):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"entry ({i}, {j}) is negative: {value!r}")


class NonzeroDiagonal(InvalidMatrix):
    def __init__(self, i, value):
        self.i, self.value = i, value
        super().__init__(f"diagonal entry ({i}, {i}) is nonzero: {value!r}")


class RowSumViolation(InvalidMatrix):
    def __init__(self, i, deviation):
        self.i, self.deviation = i, deviation
        super().__init__(f"row {i} sums to 1 {deviation:+.3e}")


class NotOnSimplex(SelfAppraisalError, ValueError):
    def __init__(self, residual, message=None):
        self.residual = residual
        super().__init__(message or f"vector is off the simplex by {residual:.3e}")


class DimensionMismatch(SelfAppraisalError, ValueError):
    pass


class InvalidParameter(SelfAppraisalError, ValueError):
    pass


class OutOfHorizon(SelfAppraisalError, ValueError):
    pass


class NotDoublyStochastic(SelfAppraisalError):
    def __init__(self, matrix_index, deviation):
        self.matrix_index, self.deviation = matrix_index, deviation
        super().__init__(
            f"pool matrix {matrix_index} is not doubly stochastic "
            f"(max column-sum deviation {deviation:.3e})"
        )


class AssumptionViolated(SelfAppraisalError):
    pass


class InsufficientHorizon(SelfAppraisalError):
    pass


class SimplexBlowup(SelfAppraisalError, ArithmeticError):
    def __init__(self, t, violation):
        self.t, self.violation = t, violation
        super().__init__(f"state left the simplex by {violation:.3e} at t={t!r}")


class NoConvergence(SelfAppraisalError, ArithmeticError):
    pass


class ConvergedToVertex(SelfAppraisalError, ArithmeticError):
    pass


class NoFeasibleRoot(SelfAppraisalError, ArithmeticError):
    pass


class GenerationFailed(SelfAppraisalError):
    pass
