"""Exception types shared across the engine."""

from __future__ import annotations


class BalarError(Exception):
    """Base class for all engine errors."""


class ConfigError(BalarError):
    """Invalid configuration or mismatched construction inputs."""


class ElicitationProtocolError(BalarError):
    """An elicited payload violates the contract (unknown label, ragged grid, bad counts)."""

    def __init__(self, message: str, call_kind: str | None = None):
        super().__init__(message)
        self.call_kind = call_kind


class ElicitationFailure(BalarError):
    """An elicitation call failed after exhausting retries or lookups."""

    def __init__(self, call_kind: str, detail: str, last_response: str | None = None):
        super().__init__(f"{call_kind}: {detail}")
        self.call_kind = call_kind
        self.detail = detail
        self.last_response = last_response


class DegenerateObservationError(BalarError):
    """Observation carries zero evidence mass under the current belief support."""


class ExpansionRefused(BalarError):
    """Extending the state space would exceed the configured state cap."""


class SpaceMismatchError(BalarError):
    """Operands were built over different state spaces."""


class InternalConsistencyError(BalarError):
    """An engine invariant was violated (missing table, wrong shape, bad ids)."""


class SessionStateError(BalarError):
    """Operation not valid for the session's current status or pending state."""
