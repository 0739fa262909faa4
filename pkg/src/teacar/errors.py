"""Shared exception types."""


class ValidationError(ValueError):
    """Input violates a documented precondition (bad value, bad shape)."""


class KindMismatchError(TypeError):
    """Message payload does not match the topic's registered kind."""


class UnknownTopicError(KeyError):
    """Topic name was never registered on the bus."""


class ModeError(RuntimeError):
    """Operation not available in the bus's current mode."""


class StateError(RuntimeError):
    """Operation attempted on a device/component in the wrong state."""


class ConfigurationError(ValueError):
    """Inconsistent or incomplete configuration."""


class FormatError(ValueError):
    """Corrupt or mismatched on-disk artifact (weights, dataset)."""
