"""Randomized fast sparsifying transform for arbitrary matrices.

Preprocess A against a Kerdock-set projective 2-design, then estimate the
hard threshold h_eps(A x) of streamed vectors x with a median-of-means
estimator over sampled sketch columns.
"""

from .kerdock import DesignIndex, DesignParams
from .sketch import LazySketch, Sketch, load, preprocess, save
from .streaming import StreamParams, TransformResult, choose_params, transform

__all__ = [
    "DesignIndex",
    "DesignParams",
    "LazySketch",
    "Sketch",
    "StreamParams",
    "TransformResult",
    "choose_params",
    "load",
    "preprocess",
    "save",
    "transform",
]
__version__ = "0.1.0"
