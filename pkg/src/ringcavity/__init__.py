"""Two-mode Jaynes-Cummings model of a two-level atom in a rotating ring cavity."""
from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DegenerateSteadyStateError,
    DomainError,
    SingularSystemError,
    StepSizeError,
    UnsupportedConfigurationError,
)
from .hilbert import HilbertConfig, Operators  # noqa: E402
from .model import PhysicalParams  # noqa: E402
