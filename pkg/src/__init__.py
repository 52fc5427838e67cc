"""Stereo Radiance GAN - multi-view consistent 3D-aware image synthesis"""

__version__ = "0.1.0"
