"""Custom exceptions for data pipelines"""

from ..exceptions import StereoGanError


class DataValidationError(StereoGanError, ValueError):
    """Raised when data validation fails"""

    pass


class EmptyDatasetError(StereoGanError):
    """Raised when a dataset yields no usable image"""

    pass
