"""Preprocessing: the sketch {A s_l} and its on-disk format.

Sketch file (little-endian)::

    b"FSTK" | u32 version=1 | u64 m | u64 n | u64 k | u64 d | u64 L | u8 hasA
    L columns of m float64 (DesignIndex linear order)
    [m*n float64 row-major A, if hasA]

Matrix file::

    b"FSTM" | u32 version=1 | u64 m | u64 n | m*n float64 row-major
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .fwht import fwht_unnormalized
from .kerdock import DesignParams, kerdock_signs, projected_design_rows

__all__ = [
    "LazySketch",
    "MagicMismatch",
    "MalformedHeader",
    "Sketch",
    "SketchFormatError",
    "SketchMemoryError",
    "TruncatedPayload",
    "UnsupportedVersion",
    "load",
    "load_matrix",
    "preprocess",
    "row_norm_max",
    "save",
    "save_matrix",
]

SKETCH_MAGIC = b"FSTK"
MATRIX_MAGIC = b"FSTM"
VERSION = 1
_SKETCH_HEADER = struct.Struct("<4sIQQQQQB")
_MATRIX_HEADER = struct.Struct("<4sIQQ")
_F8 = np.dtype("<f8")


class SketchFormatError(ValueError):
    pass


class MagicMismatch(SketchFormatError):
    pass


class UnsupportedVersion(SketchFormatError):
    pass


class MalformedHeader(SketchFormatError):
    pass


class TruncatedPayload(SketchFormatError):
    pass


class SketchMemoryError(MemoryError):
    def __init__(self, nbytes: int):
        super().__init__(f"sketch needs {nbytes} bytes ({nbytes / 2**30:.2f} GiB)")
        self.nbytes = nbytes


def row_norm_max(A: np.ndarray) -> float:
    """||A||_{2->inf}: the largest row l2 norm."""
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return 0.0
    return float(np.sqrt((A * A).sum(axis=1)).max())


@dataclass
class Sketch:
    """Precomputed columns A s_l, stored one column per contiguous row of ``columns``."""

    m: int
    n: int
    k: int
    columns: np.ndarray  # shape (L, m)
    A: np.ndarray | None = None
    params: DesignParams = field(init=False, repr=False)

    def __post_init__(self):
        self.params = DesignParams(self.k)
        if self.n > self.params.d:
            raise ValueError(f"n={self.n} exceeds d={self.params.d}")
        if self.columns.shape != (self.params.L, self.m):
            raise ValueError(f"columns shape {self.columns.shape} != {(self.params.L, self.m)}")
        if self.A is not None and self.A.shape != (self.m, self.n):
            raise ValueError("embedded matrix has the wrong shape")

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def L(self) -> int:
        return self.params.L

    @property
    def matrix(self) -> np.ndarray:
        """The embedded A, or A recovered exactly from the identity block."""
        if self.A is not None:
            return self.A
        base = self.params.n_kerdock * self.d
        # sqrt(d) = 2**(k/2), so this division is exact
        return np.ascontiguousarray(self.columns[base : base + self.n].T) / math.sqrt(self.d)

    @property
    def row_norm_max(self) -> float:
        return row_norm_max(self.matrix)

    def column(self, ell: int) -> np.ndarray:
        if not 0 <= ell < self.L:
            raise IndexError(f"column {ell} outside [0, {self.L})")
        return self.columns[ell]

    def columns_at(self, indices: np.ndarray) -> np.ndarray:
        """(len(indices), m) array of the requested columns."""
        return self.columns[np.asarray(indices, dtype=np.int64)]


class LazySketch:
    """Column source with the Sketch interface that computes A s_l on request.

    Costs O(mn) per fetched column instead of O(mL) storage; meant for sizes
    where the full sketch does not fit in memory.
    """

    def __init__(self, A: np.ndarray, k: int | None = None):
        self.A = np.ascontiguousarray(A, dtype=np.float64)
        self.m, self.n = self.A.shape
        self.params = DesignParams(k) if k is not None else DesignParams.for_dimension(self.n)
        if self.n > self.params.d:
            raise ValueError(f"n={self.n} exceeds d={self.params.d}")
        self.k = self.params.k

    d = Sketch.d
    L = Sketch.L

    @property
    def matrix(self) -> np.ndarray:
        return self.A

    @property
    def row_norm_max(self) -> float:
        return row_norm_max(self.A)

    def columns_at(self, indices: np.ndarray) -> np.ndarray:
        rows = projected_design_rows(self.params, indices, self.n)
        return rows @ self.A.T

    def column(self, ell: int) -> np.ndarray:
        if not 0 <= ell < self.L:
            raise IndexError(f"column {ell} outside [0, {self.L})")
        return self.columns_at(np.array([ell]))[0]


def _fill_columns(A: np.ndarray, params: DesignParams, cols: np.ndarray):
    m, n = A.shape
    d = params.d
    signs = kerdock_signs(params)
    buf = np.zeros((m, d))
    for s in range(params.n_kerdock):
        # row i of A sqrt(d) Pi D_M H^{(x)k}; sqrt(d) * 2^{-k/2} == 1
        buf[:, n:] = 0.0
        np.multiply(A, signs[s, :n], out=buf[:, :n])
        fwht_unnormalized(buf)
        cols[s * d : (s + 1) * d] = buf.T
    base = params.n_kerdock * d
    cols[base : base + n] = math.sqrt(d) * A.T
    cols[base + n : base + d] = 0.0


def preprocess(
    A: np.ndarray,
    k: int | None = None,
    path: str | os.PathLike | None = None,
    embed: bool = True,
) -> Sketch:
    """Compute the sketch of ``A`` with one FWHT per (Kerdock matrix, row).

    With ``path`` the sketch is written straight into a file-backed array and
    returned memory-mapped, so only O(m d) working memory is needed.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    if A.ndim != 2 or min(A.shape) < 1:
        raise ValueError(f"A must be a nonempty 2-d matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError("A has non-finite entries")
    m, n = A.shape
    params = DesignParams(k) if k is not None else DesignParams.for_dimension(n)
    if params.d < n:
        raise ValueError(f"k={params.k} gives d={params.d} < n={n}")
    nbytes = params.L * m * 8
    if path is not None:
        _write_header(path, m, n, params, embed)
        cols = np.memmap(path, dtype=_F8, mode="r+", offset=_SKETCH_HEADER.size,
                         shape=(params.L, m))
        _fill_columns(A, params, cols)
        cols.flush()
        del cols
        if embed:
            with open(path, "ab") as f:
                f.write(A.astype(_F8).tobytes())
        return load(path)
    try:
        cols = np.empty((params.L, m))
    except MemoryError:
        raise SketchMemoryError(nbytes) from None
    _fill_columns(A, params, cols)
    return Sketch(m, n, params.k, cols, A.copy() if embed else None)


# ---------- persistence


def _write_header(path, m, n, params, has_a):
    with open(path, "wb") as f:
        f.write(_SKETCH_HEADER.pack(SKETCH_MAGIC, VERSION, m, n, params.k, params.d,
                                    params.L, int(bool(has_a))))
        f.truncate(_SKETCH_HEADER.size + params.L * m * 8)


def save(sk: Sketch, path: str | os.PathLike) -> None:
    with open(path, "wb") as f:
        f.write(_SKETCH_HEADER.pack(SKETCH_MAGIC, VERSION, sk.m, sk.n, sk.k, sk.d, sk.L,
                                    int(sk.A is not None)))
        f.write(np.ascontiguousarray(sk.columns, dtype=_F8).tobytes())
        if sk.A is not None:
            f.write(np.ascontiguousarray(sk.A, dtype=_F8).tobytes())


def _read_prefix(path, header: struct.Struct, magic: bytes):
    with open(path, "rb") as f:
        raw = f.read(header.size)
    if len(raw) >= 4 and raw[:4] != magic:
        raise MagicMismatch(f"{path}: expected magic {magic!r}, found {raw[:4]!r}")
    if len(raw) < header.size:
        raise MalformedHeader(f"{path}: header is {len(raw)} bytes, need {header.size}")
    fields = header.unpack(raw)
    if fields[1] != VERSION:
        raise UnsupportedVersion(f"{path}: version {fields[1]} (supported: {VERSION})")
    return fields


def load(path: str | os.PathLike, mmap: bool = True) -> Sketch:
    """Read a sketch file; columns are memory-mapped read-only by default."""
    _, _, m, n, k, d, L, has_a = _read_prefix(path, _SKETCH_HEADER, SKETCH_MAGIC)
    if k < 2 or k % 2 or k > 62 or d != 1 << k or L != d * (d // 2 + 1):
        raise MalformedHeader(f"{path}: inconsistent k={k}, d={d}, L={L}")
    if has_a not in (0, 1) or m < 1 or not 1 <= n <= d:
        raise MalformedHeader(f"{path}: bad fields m={m}, n={n}, hasA={has_a}")
    off = _SKETCH_HEADER.size
    need = off + 8 * (L * m + (m * n if has_a else 0))
    size = os.path.getsize(path)
    if size < need:
        raise TruncatedPayload(f"{path}: {size} bytes, expected {need}")
    if mmap:
        cols = np.memmap(path, dtype=_F8, mode="r", offset=off, shape=(L, m))
    else:
        cols = np.fromfile(path, dtype=_F8, count=L * m, offset=off).reshape(L, m)
    A = None
    if has_a:
        A = np.fromfile(path, dtype=_F8, count=m * n, offset=off + 8 * L * m).reshape(m, n)
    return Sketch(int(m), int(n), int(k), cols, A)


def save_matrix(path: str | os.PathLike, A: np.ndarray) -> None:
    A = np.asarray(A, dtype=_F8)
    if A.ndim == 1:
        A = A[None, :]
    if A.ndim != 2:
        raise ValueError("only matrices and vectors can be saved")
    with open(path, "wb") as f:
        f.write(_MATRIX_HEADER.pack(MATRIX_MAGIC, VERSION, A.shape[0], A.shape[1]))
        f.write(np.ascontiguousarray(A).tobytes())


def load_matrix(path: str | os.PathLike) -> np.ndarray:
    _, _, m, n = _read_prefix(path, _MATRIX_HEADER, MATRIX_MAGIC)
    need = _MATRIX_HEADER.size + 8 * m * n
    size = os.path.getsize(path)
    if size < need:
        raise TruncatedPayload(f"{path}: {size} bytes, expected {need}")
    return np.fromfile(path, dtype=_F8, count=m * n, offset=_MATRIX_HEADER.size).reshape(m, n)
