"""Exception hierarchy shared by all modules."""


class HitlabError(Exception):
    """Base class for every error raised by the package."""


class DepthError(HitlabError, IndexError):
    """A continued fraction is too short for the requested index or window."""


class HorizonError(HitlabError):
    """A finite truncation cannot stand in for its irrational at this resolution."""


class DegenerateBallError(HitlabError, ValueError):
    """Ball radius outside (0, 1/2)."""


class ResourceError(HitlabError):
    """A construction or integration exceeded its configured budget."""


class EstimationError(HitlabError):
    """Not enough uncensored data to form an estimate."""


class UnsupportedSystemError(HitlabError, ValueError):
    """The requested map is not one of the supported systems."""


class NeverHitsError(HitlabError):
    """A flow can provably never enter the target."""


class ConfigError(HitlabError, ValueError):
    """Experiment configuration failed validation."""

    def __init__(self, message, path=()):
        super().__init__(message)
        self.path = tuple(path)


class InconsistentInputsError(HitlabError, ValueError):
    """Parameters violate a standing relation between them."""
