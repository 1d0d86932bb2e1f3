import pydantic

from core.exceptions import (
    BudgetExceededError,
    DeadlineExceededError,
    InvalidInputError,
    NoMinimalKError,
    OracleError,
    ShapeInsufficiencyError,
    ShapeMismatchError,
    TransformPostconditionError,
    ValidationError,
)

# Exception groups behind each HTTP status the routers use.
BAD_REQUEST = (ValidationError, ShapeInsufficiencyError, ShapeMismatchError, pydantic.ValidationError)
UNPROCESSABLE = (InvalidInputError, TransformPostconditionError, NoMinimalKError, OracleError)
TIMEOUT = (BudgetExceededError, DeadlineExceededError)
