"""Mapping network, radiance field, progressive decoder and discriminator"""

from .decoder import AdaIN, ProgressiveDecoder
from .discriminator import ProgressiveDiscriminator
from .exceptions import ResolutionError
from .field import RadianceField, positional_encoding
from .mapping import LATENT_DIM, MappingNetwork, sample_latents
from .module import Conv2d, Linear, Module

__all__ = [
    "LATENT_DIM",
    "AdaIN",
    "Conv2d",
    "Linear",
    "MappingNetwork",
    "Module",
    "ProgressiveDecoder",
    "ProgressiveDiscriminator",
    "RadianceField",
    "ResolutionError",
    "positional_encoding",
    "sample_latents",
]
