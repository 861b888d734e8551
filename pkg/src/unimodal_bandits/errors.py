"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument lies outside its documented domain."""


class StateError(RuntimeError):
    """An operation was invoked before the state it needs exists."""


class ConfigError(ValueError):
    """An experiment configuration is invalid."""
