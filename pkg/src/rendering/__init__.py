"""Volume rendering: compositing weights and per-view renders"""

from .compositing import composite_color, composite_depth, composite_feature, composite_weights
from .renderer import RenderedView, RenderOptions, render_rays, render_view

__all__ = [
    "RenderOptions",
    "RenderedView",
    "composite_color",
    "composite_depth",
    "composite_feature",
    "composite_weights",
    "render_rays",
    "render_view",
]
