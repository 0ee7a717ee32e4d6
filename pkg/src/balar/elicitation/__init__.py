from .budget import CallBudget, estimate_call_budget
from .chat import ChatElicitor
from .contract import CALL_KINDS, Elicitor, ProposedDimension, ProposedQuestion
from .dispatch import dispatch_parallel
from .schemas import SchemaValidationError, validate_and_retry
from .scripted import ScriptedOracle, load_fixture

__all__ = [
    "CALL_KINDS",
    "CallBudget",
    "ChatElicitor",
    "Elicitor",
    "ProposedDimension",
    "ProposedQuestion",
    "SchemaValidationError",
    "ScriptedOracle",
    "dispatch_parallel",
    "estimate_call_budget",
    "load_fixture",
    "validate_and_retry",
]
