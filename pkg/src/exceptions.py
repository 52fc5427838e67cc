"""Base exception shared by every package"""


class StereoGanError(Exception):
    """Root of all domain errors raised by this project"""

    pass
