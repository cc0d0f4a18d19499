"""Kerdock-set construction of a real projective 2-design.

Coordinates of R^d (d = 2**k) are indexed by j in [0, d); position j is the
vector x in F_2^k whose coordinates x_1..x_k are the bits of j read
big-endian (x_1 is the most significant bit). Design vectors are linearized
as ``l = s*d + w`` for the Kerdock bases (s a field element repr) followed by
``l = 2**(k-1) * d + w`` for the identity basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .gf2 import BitMatrix, FieldCtx, field_ctx, field_mul, field_trace

__all__ = [
    "DesignParams",
    "DesignIndex",
    "KerdockSet",
    "MubReport",
    "build_kerdock_set",
    "c_dk",
    "design_matrix",
    "design_moments",
    "design_vector",
    "kerdock_signs",
    "moments_pass",
    "projected_design_column",
    "projected_design_rows",
    "quadratic_form",
    "quadratic_form_table",
    "smallest_even_k",
    "verify_design_moments",
    "verify_mub",
]

DEFAULT_VERIFY_CAP = 8
EXHAUSTIVE_MAX_K = 6


def smallest_even_k(n: int) -> int:
    """Smallest even k >= 2 with 2**k >= n."""
    if n < 1:
        raise ValueError("n must be positive")
    k = 2
    while (1 << k) < n:
        k += 2
    return k


@dataclass(frozen=True)
class DesignParams:
    k: int
    d: int = field(init=False)
    L: int = field(init=False)
    ctx: FieldCtx = field(init=False, repr=False)

    def __post_init__(self):
        if self.k < 2 or self.k % 2:
            raise ValueError(f"k must be an even integer >= 2, got {self.k}")
        d = 1 << self.k
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "L", d * (d // 2 + 1))
        object.__setattr__(self, "ctx", field_ctx(self.k - 1))

    @classmethod
    def for_dimension(cls, n: int) -> "DesignParams":
        return cls(smallest_even_k(n))

    @property
    def n_kerdock(self) -> int:
        """Number of Kerdock bases, 2**(k-1)."""
        return self.d // 2

    @property
    def n_bases(self) -> int:
        return self.d // 2 + 1


@dataclass(frozen=True)
class DesignIndex:
    """A design vector: Kerdock(s, w) when ``s`` is set, else Identity(w)."""

    w: int
    s: int | None = None

    @classmethod
    def kerdock(cls, s: int, w: int) -> "DesignIndex":
        return cls(w=w, s=s)

    @classmethod
    def identity(cls, w: int) -> "DesignIndex":
        return cls(w=w)

    @property
    def is_identity(self) -> bool:
        return self.s is None

    def linear(self, params: DesignParams) -> int:
        self._check(params)
        block = params.n_kerdock if self.s is None else self.s
        return block * params.d + self.w

    @classmethod
    def from_linear(cls, params: DesignParams, ell: int) -> "DesignIndex":
        if not 0 <= ell < params.L:
            raise IndexError(f"design index {ell} outside [0, {params.L})")
        block, w = divmod(ell, params.d)
        if block == params.n_kerdock:
            return cls.identity(w)
        return cls.kerdock(block, w)

    def _check(self, params: DesignParams):
        if not 0 <= self.w < params.d:
            raise IndexError(f"w={self.w} outside [0, {params.d})")
        if self.s is not None and not 0 <= self.s < params.n_kerdock:
            raise IndexError(f"s={self.s} outside [0, {params.n_kerdock})")


@dataclass(frozen=True)
class KerdockSet:
    k: int
    matrices: tuple[BitMatrix, ...]

    def __len__(self):
        return len(self.matrices)

    def __getitem__(self, s: int) -> BitMatrix:
        return self.matrices[s]


def _dot(ctx: FieldCtx, u: tuple[int, int], v: tuple[int, int]) -> int:
    # (x, a) . (y, b) = tr(xy) + ab
    return field_trace(ctx, field_mul(ctx, u[0], v[0])) ^ (u[1] & v[1])


def _L(ctx: FieldCtx, s: int, v: tuple[int, int]) -> tuple[int, int]:
    # L_s(x, a) = (s^2 x + s tr(sx) + a s, tr(sx))
    x, a = v
    t = field_trace(ctx, field_mul(ctx, s, x))
    first = field_mul(ctx, field_mul(ctx, s, s), x)
    if t:
        first ^= s
    if a:
        first ^= s
    return first, t


def _basis(ctx: FieldCtx) -> list[tuple[int, int]]:
    return [(1 << i, 0) for i in range(ctx.q)] + [(0, 1)]


def build_kerdock_set(params: DesignParams) -> KerdockSet:
    return _kerdock_set(params.k)


@lru_cache(maxsize=None)
def _kerdock_set(k: int) -> KerdockSet:
    if k < 2 or k % 2:
        raise ValueError("Kerdock sets are built for even k >= 2 only")
    ctx = field_ctx(k - 1)
    B = _basis(ctx)
    mats = []
    for s in range(ctx.order):
        images = [_L(ctx, s, b) for b in B]
        rows = tuple(
            sum(_dot(ctx, b, img) << j for j, img in enumerate(images)) for b in B
        )
        mats.append(BitMatrix(rows, k))
    return KerdockSet(k, tuple(mats))


def _coords(x: int, k: int) -> list[int]:
    return [(x >> (k - 1 - i)) & 1 for i in range(k)]


def quadratic_form(M: BitMatrix, x: int) -> int:
    """Q_M(x) = sum_{i<j} M_ij x_i x_j mod 2, x given as a position in [0, 2**k)."""
    k = M.dim
    if not 0 <= x < (1 << k):
        raise ValueError(f"x={x} is not a vector of F_2^{k}")
    c = _coords(x, k)
    acc = 0
    for i in range(k):
        if not c[i]:
            continue
        for j in range(i + 1, k):
            acc ^= M[i, j] & c[j]
    return acc


def _bit_table(k: int) -> np.ndarray:
    j = np.arange(1 << k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return ((j[:, None] >> shifts[None, :]) & 1).astype(np.int64)


def quadratic_form_table(M: BitMatrix) -> np.ndarray:
    """Q_M at every position 0..2**k - 1 (vectorized direct evaluation)."""
    X = _bit_table(M.dim)
    upper = np.triu(M.to_array().astype(np.int64), 1)
    return (((X @ upper) * X).sum(axis=1) & 1).astype(np.int8)


@lru_cache(maxsize=8)
def _sign_table(k: int) -> np.ndarray:
    ks = _kerdock_set(k)
    table = np.empty((len(ks), 1 << k), dtype=np.int8)
    for s, M in enumerate(ks.matrices):
        table[s] = 1 - 2 * quadratic_form_table(M)
    table.setflags(write=False)
    return table


def kerdock_signs(params: DesignParams) -> np.ndarray:
    """Read-only (2**(k-1), d) int8 array of (-1)^{Q_{M_s}(x)}."""
    return _sign_table(params.k)


def _parity(a: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(a) & 1).astype(np.int64)


def design_vector(params: DesignParams, idx: DesignIndex) -> np.ndarray:
    idx._check(params)
    d = params.d
    if idx.is_identity:
        out = np.zeros(d)
        out[idx.w] = 1.0
        return out
    signs = kerdock_signs(params)[idx.s].astype(np.float64)
    chi = 1 - 2 * _parity(np.arange(d) & idx.w)
    return signs * chi * 2.0 ** (-params.k / 2)


def projected_design_column(params: DesignParams, n: int, idx: DesignIndex) -> np.ndarray:
    """s_l = sqrt(d) * (first n coordinates of the design vector)."""
    if not 1 <= n <= params.d:
        raise ValueError(f"n={n} outside [1, {params.d}]")
    return math.sqrt(params.d) * design_vector(params, idx)[:n]


def projected_design_rows(params: DesignParams, indices: np.ndarray, n: int) -> np.ndarray:
    """Rows s_l (length n, scaled by sqrt(d)) for an array of linear indices.

    O(n) work per index; Kerdock rows are +-1, identity rows sqrt(d) e_w or 0.
    """
    d = params.d
    if not 1 <= n <= d:
        raise ValueError(f"n={n} outside [1, {d}]")
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size and (indices.min() < 0 or indices.max() >= params.L):
        raise IndexError("design index out of range")
    block, w = np.divmod(indices, d)
    out = np.zeros((indices.size, n))
    ker = block < params.n_kerdock
    if ker.any():
        pos = np.arange(n)
        signs = kerdock_signs(params)[:, :n][block[ker]]
        chi = 1 - 2 * _parity(w[ker, None] & pos[None, :])
        out[ker] = signs * chi
    ident = np.flatnonzero(~ker)
    inside = w[ident] < n
    out[ident[inside], w[ident[inside]]] = math.sqrt(d)
    return out


def design_matrix(params: DesignParams, n: int | None = None, scaled: bool = False) -> np.ndarray:
    """All L design vectors as rows (optionally projected to n and scaled by sqrt(d)).

    Built entry by entry from the sign patterns, independently of the FWHT.
    """
    d = params.d
    n = d if n is None else n
    if not 1 <= n <= d:
        raise ValueError(f"n={n} outside [1, {d}]")
    pos = np.arange(n)
    chi = 1 - 2 * _parity(np.arange(d)[:, None] & pos[None, :])  # (w, x)
    signs = kerdock_signs(params)[:, :n]
    U = np.zeros((params.L, n))
    kerd = (signs[:, None, :] * chi[None, :, :]).reshape(-1, n)
    U[: params.n_kerdock * d] = kerd * 2.0 ** (-params.k / 2)
    base = params.n_kerdock * d
    U[base + pos, pos] = 1.0
    if scaled:
        U *= math.sqrt(d)
    return U


# ---------- verification


def c_dk(d: int, k: int) -> float:
    """Moment constant 1*3*...*(2k-1) / (d (d+2) ... (d+2(k-1)))."""
    num = math.prod(range(1, 2 * k, 2))
    den = math.prod(d + 2 * i for i in range(k))
    return num / den


@dataclass
class MubReport:
    k: int
    within_dev: float
    cross_dev: float
    cross_values: tuple[float, ...]
    pairs_checked: int
    exhaustive: bool

    def passed(self, tol: float = 1e-10) -> bool:
        return self.within_dev <= tol and self.cross_dev <= tol


def _basis_block(params: DesignParams, b: int) -> np.ndarray:
    d = params.d
    if b == params.n_kerdock:
        return np.eye(d)
    return np.stack([design_vector(params, DesignIndex.kerdock(b, w)) for w in range(d)])


def _check_cap(params: DesignParams, cap: int):
    if params.k > cap:
        raise ValueError(f"k={params.k} exceeds verification cap {cap}")


def _basis_pairs(params: DesignParams, exhaustive: bool | None, samples: int, seed: int):
    nb = params.n_bases
    if exhaustive is None:
        exhaustive = params.k <= EXHAUSTIVE_MAX_K
    if exhaustive:
        return [(a, b) for a in range(nb) for b in range(a, nb)], True
    rng = np.random.default_rng(seed)
    pairs = {(a, a) for a in range(nb)}
    while len(pairs) < min(nb + samples, nb * (nb + 1) // 2):
        a, b = sorted(int(v) for v in rng.integers(0, nb, size=2))
        pairs.add((a, b))
    return sorted(pairs), False


def verify_mub(
    params: DesignParams,
    cap: int = DEFAULT_VERIFY_CAP,
    exhaustive: bool | None = None,
    samples: int = 256,
    seed: int = 0,
) -> MubReport:
    """Check orthonormality within each basis and unbiasedness across bases.

    Exhaustive over basis pairs for k <= 6 by default; above that a random
    sample of cross-basis pairs is checked (every basis is still checked
    against itself).
    """
    _check_cap(params, cap)
    d = params.d
    blocks = [_basis_block(params, b) for b in range(params.n_bases)]
    pairs, exhaustive = _basis_pairs(params, exhaustive, samples, seed)
    within = 0.0
    cross = 0.0
    values: set[float] = set()
    eye = np.eye(d)
    for a, b in pairs:
        G = blocks[a] @ blocks[b].T
        if a == b:
            within = max(within, float(np.abs(G - eye).max()))
        else:
            G2 = G * G
            cross = max(cross, float(np.abs(G2 - 1.0 / d).max()))
            values.update(np.round(np.unique(G2), 12).tolist())
    return MubReport(params.k, within, cross, tuple(sorted(values)), len(pairs), exhaustive)


def design_moments(U: np.ndarray) -> tuple[float, float]:
    """(1/L^2) sum <u_l, u_l'>^2 and ^4 over all ordered pairs of rows of U."""
    U = np.asarray(U, dtype=np.float64)
    L = U.shape[0]
    s2 = 0.0
    s4 = 0.0
    step = 1024
    for i in range(0, L, step):
        G = U[i : i + step] @ U.T
        G2 = G * G
        s2 += float(G2.sum())
        s4 += float((G2 * G2).sum())
    return s2 / L**2, s4 / L**2


def verify_design_moments(params: DesignParams, cap: int = DEFAULT_VERIFY_CAP) -> tuple[float, float]:
    _check_cap(params, cap)
    return design_moments(design_matrix(params))


def moments_pass(m1: float, m2: float, d: int, tol: float = 1e-9) -> bool:
    return abs(m1 - c_dk(d, 1)) <= tol and abs(m2 - c_dk(d, 2)) <= tol
