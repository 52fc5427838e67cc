"""Custom exceptions for the tensor engine"""

from ..exceptions import StereoGanError


class ShapeError(StereoGanError, ValueError):
    """Raised when operand shapes are incompatible"""

    pass


class GraphError(StereoGanError, RuntimeError):
    """Raised when the recorded tape cannot be differentiated"""

    pass


class NonFiniteError(StereoGanError, FloatingPointError):
    """Raised when a loss or gradient is NaN or infinite"""

    pass
