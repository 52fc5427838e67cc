"""Custom exceptions for camera geometry"""

from ..exceptions import StereoGanError


class GeometryError(StereoGanError):
    """Raised for invalid poses, intrinsics or ray bounds"""

    pass
