"""Exception types shared across the package."""


class FieldseekError(Exception):
    """Base class for all package-specific errors."""


class EmptyTopic(FieldseekError):
    """Research topic text is empty after trimming."""


class DimensionMismatch(FieldseekError):
    """Two vectors of different dimensions were compared."""


class ZeroVector(FieldseekError):
    """A zero vector was used where a direction is required."""


class MissingEmbedding(FieldseekError):
    """A phrase or concept is missing its embedding."""


class FixtureMissing(FieldseekError):
    """Scripted provider has no fixture for the requested key."""

    def __init__(self, key: str, template_id: str):
        super().__init__(f"no fixture for template '{template_id}' (key {key})")
        self.key = key
        self.template_id = template_id


class ProviderError(FieldseekError):
    """Live LLM provider call failed after bounded retries."""

    def __init__(self, message: str, *, attempts: int = 1, retryable: bool = False):
        super().__init__(message)
        self.attempts = attempts
        self.retryable = retryable


class UnparseableCompletion(FieldseekError):
    """An LLM completion did not yield any valid structured output."""


class RateLimited(FieldseekError):
    """Search provider returned a rate-limit response."""

    def __init__(self, message: str = "rate limited", *, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class NetworkError(FieldseekError):
    """Transport-level failure talking to an external service."""


class MalformedResponse(FieldseekError):
    """External service returned a payload we cannot interpret."""


class NotFound(FieldseekError):
    """A referenced entity (paper, session, job) does not exist."""


class NoCoveredWords(FieldseekError):
    """No query word appears in the concreteness lexicon."""


class UnknownEntity(FieldseekError):
    """An edit referenced a collection, theme, or paper that does not exist."""


class CorruptState(FieldseekError):
    """A persisted session file failed its integrity check."""


class PreconditionFailed(FieldseekError):
    """An operation was invoked in a state that violates its precondition."""
