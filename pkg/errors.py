"""Exceptions raised by pencilk.

Every error carries the exit code the command line reports for it, so the
library can raise freely and the CLI only has to translate.
"""


class PencilkError(Exception):
    '''Base class of all pencilk errors.'''
    exit_code = 1

    def __init__(self, msg, diagnostics=None):
        super(PencilkError, self).__init__(msg)
        self.diagnostics = diagnostics or {}


class MatrixFileError(PencilkError):
    '''Raised when a matrix file cannot be parsed or violates the schema.'''
    exit_code = 2


class ConfigError(PencilkError):
    '''Raised when run settings are out of range.'''
    exit_code = 2


class UnknownExampleError(PencilkError):
    exit_code = 2


class MatrixShapeError(PencilkError):
    '''Raised on non-conformable, non-square or non-finite input.'''
    exit_code = 2


class InvalidOrderError(PencilkError):
    '''Raised when a compound order k is outside its admissible range.'''
    exit_code = 3


class NotAMemberError(InvalidOrderError):
    '''Raised when a tuple is not an element of Q(k, n).'''


class NotAnEigenpairError(PencilkError):
    exit_code = 3


class SingularPencilError(PencilkError):
    '''Raised when a pencil has a vanishing diagonal pair (alpha, beta) = (0, 0).'''
    exit_code = 4


class UntractableSystemError(PencilkError):
    exit_code = 4


class HypothesisViolatedError(PencilkError):
    '''Raised when the inputs are valid but a result's hypothesis does not hold.'''
    exit_code = 4


class GsdConvergenceError(PencilkError):
    '''Raised when the QZ reduction fails or its residuals are rejected.

    ``diagnostics`` holds the residuals measured on the returned factors.
    '''
    exit_code = 4


class IllConditionedCoreError(PencilkError):
    exit_code = 5


class InconsistentInitialConditionError(PencilkError):
    '''Raised when an initial condition lies outside the consistency subspace.'''
    exit_code = 6

    def __init__(self, msg, distance, column=None):
        super(InconsistentInitialConditionError, self).__init__(
            msg, {'distance': distance, 'column': column})
        self.distance = distance
        self.column = column


class InvariantViolationError(PencilkError):
    '''Raised when a law that holds in exact arithmetic fails numerically.'''
    exit_code = 1
