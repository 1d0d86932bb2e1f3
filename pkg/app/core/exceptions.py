class AppBaseException(Exception):
    """
    Base exception for all tpkit exceptions.

    This serves as a parent class for more specific exceptions,
    providing a common base for error handling in the services,
    the HTTP routers and the command line.
    """

    pass


class ValidationError(AppBaseException):
    """
    Exception raised for input validation failures.

    Attributes
    ----------
    errors : dict
        A dictionary containing validation error details.
    """

    def __init__(self, errors: dict):
        """
        Initialize the ValidationError.

        Parameters
        ----------
        errors : dict
            A dictionary of validation errors, where keys are field names
            and values are error messages.
        """
        self.errors = errors
        super().__init__(str(errors))


class MalformedPayloadError(ValidationError):
    """Payload inconsistent with the pattern kind it is checked against."""

    def __init__(self, message: str):
        self.message = message
        super().__init__({'payload': message})


class ShapeInsufficiencyError(AppBaseException):
    """
    Exception raised when a tree shape is too small for an operation.

    Attributes
    ----------
    message : str
        Names the operation, the required shape and the given shape.
    """

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class ShapeMismatchError(AppBaseException):
    """
    Exception raised when a node map is applied to a tree of another shape.
    """

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class InvalidInputError(AppBaseException):
    """
    Exception raised when a transform receives a certificate that fails
    verification.

    Attributes
    ----------
    message : str
        Description of the failed precondition.
    violations : list
        The violations reported by the verifier.
    """

    def __init__(self, message: str, violations: list | None = None):
        self.message = message
        self.violations = list(violations or [])
        super().__init__(self.message)


class TransformPostconditionError(AppBaseException):
    """
    Exception raised when the output of a transform does not verify.

    The finite constructions re-check what an indiscernible input would
    guarantee; inputs lacking that uniformity end up here.

    Attributes
    ----------
    message : str
        Names the transform and the case that fired.
    violations : list
        The violations of the output certificate.
    """

    def __init__(self, message: str, violations: list | None = None):
        self.message = message
        self.violations = list(violations or [])
        super().__init__(self.message)


class NoMinimalKError(AppBaseException):
    """
    Exception raised when no spine-branch count fits the tree's branching.
    """

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class BudgetExceededError(AppBaseException):
    """
    Exception raised when a search space or exploration exceeds its budget.

    Attributes
    ----------
    message : str
        A descriptive error message.
    space_size : int
        Size of the full assignment space.
    explored : int
        Number of partial assignments explored before giving up.
    """

    def __init__(self, message: str, space_size: int = 0, explored: int = 0):
        self.message = message
        self.space_size = space_size
        self.explored = explored
        super().__init__(self.message)


class DeadlineExceededError(AppBaseException):
    """Exception raised when a wall-clock deadline expires."""

    def __init__(self, message: str = 'Deadline exceeded'):
        self.message = message
        super().__init__(self.message)


class OracleError(AppBaseException):
    """
    Exception raised when a base-class oracle misbehaves or rejects input.
    """

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class InternalInvariantError(AppBaseException):
    """
    Exception raised when an implementation invariant does not hold.

    Examples are a restriction map that is not an isomorphism or per-parameter
    amalgams that do not share one object map.
    """

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)
