"""Reverse-mode automatic differentiation on numpy arrays"""

from .exceptions import GraphError, NonFiniteError, ShapeError
from .functional import avg_pool2d, bilinear_sample, bilinear_upsample, box_filter3x3, conv2d
from .tensor import (
    Function,
    Graph,
    Tensor,
    as_tensor,
    concat,
    elementwise,
    get_default_dtype,
    matmul,
    maximum,
    minimum,
    no_grad,
    precision,
    reduce,
    stack,
    where,
)

__all__ = [
    "Function",
    "Graph",
    "Tensor",
    "GraphError",
    "NonFiniteError",
    "ShapeError",
    "as_tensor",
    "avg_pool2d",
    "bilinear_sample",
    "bilinear_upsample",
    "box_filter3x3",
    "concat",
    "conv2d",
    "elementwise",
    "get_default_dtype",
    "matmul",
    "maximum",
    "minimum",
    "no_grad",
    "precision",
    "reduce",
    "stack",
    "where",
]
