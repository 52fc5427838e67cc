"""Custom exceptions for training"""

from typing import Any

from ..exceptions import StereoGanError


class CheckpointError(StereoGanError):
    """Raised when a checkpoint cannot be written or read back"""

    pass


class NonFiniteLossError(StereoGanError):
    """Raised when a training loss is NaN or infinite"""

    def __init__(self, message: str, step: int = 0, stage: int = 1,
                 components: dict[str, Any] | None = None, eta: float | None = None):
        super().__init__(message)
        self.step = step
        self.stage = stage
        self.components = components or {}
        self.eta = eta
