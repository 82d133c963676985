"""Exception hierarchy shared by all modules.

Separate classes (instead of bare ValueError everywhere) let the CLI map
failure kinds onto stable exit codes.
"""


class LiouepsError(Exception):
    """Base class for all package errors."""


class SpaceMismatchError(LiouepsError):
    """Raised when two operators live on different Hilbert spaces."""


class HermiticityError(LiouepsError):
    """Raised when an operator required to be Hermitian is not."""


class ModelBuildError(LiouepsError):
    """Raised when a model family is given invalid parameters."""


class SpectralError(LiouepsError):
    """Raised when a spectral analysis cannot produce a valid result."""


class NoEPBracketedError(LiouepsError):
    """Raised when a bracket contains no detectable exceptional point."""


class JordanOrderError(LiouepsError):
    """Raised when the shifted operator does not have rank deficiency one."""


class ConfigError(LiouepsError):
    """Raised on invalid run configuration. Carries all messages at once."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))
