"""Custom exceptions for network construction and evaluation"""

from ..exceptions import StereoGanError


class ResolutionError(StereoGanError, ValueError):
    """Raised when a resolution or growth stage is not supported by a network"""

    pass
