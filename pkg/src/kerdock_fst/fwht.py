"""In-place fast Walsh-Hadamard transform (natural/Hadamard ordering)."""

import math

import numpy as np

__all__ = ["fwht_unnormalized", "fwht_normalized", "hadamard_matrix"]


def _check(buf):
    if not isinstance(buf, np.ndarray) or buf.dtype != np.float64:
        raise TypeError("buffer must be a float64 numpy array")
    if not buf.flags.c_contiguous:
        raise ValueError("buffer must be C-contiguous to be transformed in place")
    d = buf.shape[-1]
    if d < 1 or d & (d - 1):
        raise ValueError(f"length {d} is not a power of two")
    return d


def fwht_unnormalized(buf: np.ndarray) -> np.ndarray:
    """out[q] = sum_x (-1)^{popcount(q & x)} in[x], along the last axis.

    Operates in place on ``buf`` (any leading batch shape) and returns it.
    """
    d = _check(buf)
    flat = buf.reshape(-1, d)
    h = 1
    while h < d:
        v = flat.reshape(flat.shape[0], d // (2 * h), 2, h)
        lo = v[:, :, 0, :]
        hi = v[:, :, 1, :]
        tmp = lo.copy()
        lo += hi
        np.subtract(tmp, hi, out=hi)
        h *= 2
    return buf


def fwht_normalized(buf: np.ndarray) -> np.ndarray:
    """Multiply by the orthogonal H^{(x)k}; an involution."""
    d = _check(buf)
    fwht_unnormalized(buf)
    buf *= 1.0 / math.sqrt(d)
    return buf


def hadamard_matrix(d: int) -> np.ndarray:
    """Dense unnormalized Sylvester-Hadamard matrix; O(d^2) reference."""
    j = np.arange(d)
    return 1.0 - 2.0 * (np.bitwise_count(j[:, None] & j[None, :]) & 1).astype(np.float64)
