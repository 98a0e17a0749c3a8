"""Shared exception types."""


class ConfigError(ValueError):
    """A requested configuration is invalid or internally inconsistent."""


class GenerationError(RuntimeError):
    """A random structure could not be generated within the allowed retries."""
