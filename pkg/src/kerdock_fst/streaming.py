"""Streaming step: sampled design columns, median of means, refine, threshold."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kerdock import DesignIndex, DesignParams, kerdock_signs, projected_design_rows

__all__ = [
    "Estimate",
    "StreamParams",
    "TransformResult",
    "batch_means",
    "choose_params",
    "design_inner_products",
    "hard_threshold",
    "inner_product_with_design",
    "median_of_means",
    "sample_indices",
    "top_magnitude",
    "transform",
]

_MAX_SAMPLES = 2**62


@dataclass(frozen=True)
class StreamParams:
    epsilon: float
    delta: float = 0.0
    s: int = 1
    J: int = 1
    K: int = 1
    widen: int = 10
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon > self.delta >= 0:
            raise ValueError(f"need epsilon > delta >= 0, got {self.epsilon}, {self.delta}")
        for name in ("s", "J", "K", "widen"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")
        if self.J * self.K >= _MAX_SAMPLES:
            raise OverflowError(f"J*K = {self.J * self.K} samples is too many")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def N(self) -> int:
        return self.J * self.K


@dataclass
class Estimate:
    mu: np.ndarray
    samples_used: int


@dataclass
class TransformResult:
    support: np.ndarray
    values: np.ndarray
    candidates: np.ndarray
    estimate: Estimate | None = None

    def dense(self, m: int) -> np.ndarray:
        out = np.zeros(m)
        out[self.support] = self.values
        return out

    def to_csv(self) -> str:
        return "".join(f"{i},{v!r}\n" for i, v in zip(self.support.tolist(), self.values.tolist()))


def choose_params(row_norm_max: float, gamma: float, eta: float, m: int) -> tuple[int, int]:
    """Batch size J and count K sufficient for ||mu - Ax||_inf < gamma w.p. 1 - eta."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if not 0 < eta <= 1:
        raise ValueError("eta must lie in (0, 1]")
    J = max(1, math.ceil(4 * math.e**2 * row_norm_max**2 / gamma**2))
    K = max(1, math.ceil(2 * math.log(m / eta)))
    return J, K


def inner_product_with_design(x: np.ndarray, idx: DesignIndex, params: DesignParams) -> float:
    """s_l^T x by sign accumulation over the n coordinates."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    idx._check(params)
    if idx.is_identity:
        return math.sqrt(params.d) * float(x[idx.w]) if idx.w < n else 0.0
    chars = np.bitwise_count(np.arange(n) & idx.w).astype(np.int64) & 1
    sign = kerdock_signs(params)[idx.s, :n] * (1 - 2 * chars)
    return float(sign @ x)


def design_inner_products(params: DesignParams, indices: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Vectorized s_l^T x for many linear indices."""
    return projected_design_rows(params, indices, x.shape[0]) @ x


def sample_indices(L: int, N: int, seed: int) -> np.ndarray:
    """N design indices drawn uniformly with replacement (PCG64 stream)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.integers(0, L, size=N, dtype=np.int64)


def _median_axis0(means: np.ndarray) -> np.ndarray:
    K = means.shape[0]
    half = K // 2
    if K % 2:
        return np.partition(means, half, axis=0)[half]
    part = np.partition(means, (half - 1, half), axis=0)
    return 0.5 * (part[half - 1] + part[half])


def median_of_means(samples: np.ndarray, J: int, K: int) -> Estimate:
    """Entrywise median of K batch means; ``samples`` is (m, J*K), batch k in columns kJ..(k+1)J-1.

    Even K takes the midpoint of the two central batch means, so K=2 gives
    the plain sample mean.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[1] != J * K:
        raise ValueError(f"samples must be (m, {J * K}), got {samples.shape}")
    means = samples.reshape(samples.shape[0], K, J).mean(axis=2).T
    return Estimate(_median_axis0(means), J * K)


def batch_means(sk, indices: np.ndarray, x: np.ndarray, J: int, K: int,
                columns: np.ndarray | None = None) -> np.ndarray:
    """(K, m) batch means of y_j = (A s_lj)(s_lj^T x), accumulated batch by batch.

    ``columns`` may carry the already fetched (N, m) sketch columns.
    """
    out = np.empty((K, sk.m))
    for b in range(K):
        sl = slice(b * J, (b + 1) * J)
        idx = indices[sl]
        cols = sk.columns_at(idx) if columns is None else columns[sl]
        coeff = design_inner_products(sk.params, idx, x)
        np.divide(coeff @ cols, J, out=out[b])
    return out


def top_magnitude(v: np.ndarray, count: int) -> np.ndarray:
    """Sorted indices of the ``count`` largest |v_i|; ties go to smaller indices."""
    a = np.abs(v)
    m = a.shape[0]
    if count >= m:
        return np.arange(m)
    if count <= 0:
        return np.arange(0)
    t = np.partition(a, m - count)[m - count]
    above = np.flatnonzero(a > t)
    ties = np.flatnonzero(a == t)[: count - above.size]
    return np.sort(np.concatenate([above, ties]))


def hard_threshold(v: np.ndarray, eps: float) -> np.ndarray:
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    v = np.asarray(v, dtype=np.float64)
    return np.where(np.abs(v) >= eps, v, 0.0)


def transform(sk, x: np.ndarray, p: StreamParams, *, indices: np.ndarray | None = None,
              columns: np.ndarray | None = None, keep_estimate: bool = True) -> TransformResult:
    """Estimate h_eps(Ax) from N = J*K sampled sketch columns.

    ``indices``/``columns`` let a caller pre-draw the sample (as
    ``sample_indices(sk.L, p.N, p.seed)``) and pre-fetch its columns; the
    result is the same as drawing inside the call.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != sk.n:
        raise ValueError(f"x has shape {x.shape}, sketch expects ({sk.n},)")
    if indices is None:
        indices = sample_indices(sk.L, p.N, p.seed)
    elif indices.shape != (p.N,):
        raise ValueError(f"expected {p.N} pre-drawn indices, got {indices.shape}")
    if columns is not None and columns.shape != (p.N, sk.m):
        raise ValueError(f"pre-fetched columns have shape {columns.shape}")
    mu = _median_axis0(batch_means(sk, indices, x, p.J, p.K, columns))
    cand = top_magnitude(mu, min(p.widen * p.s, sk.m))
    vals = sk.matrix[cand] @ x
    keep = np.abs(vals) >= p.epsilon
    est = Estimate(mu, p.N) if keep_estimate else None
    return TransformResult(cand[keep], vals[keep], cand, est)
