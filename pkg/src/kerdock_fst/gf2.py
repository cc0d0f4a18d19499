"""Linear algebra over GF(2) and arithmetic in GF(2^q).

Binary matrices are stored as tuples of Python ints, one int per row, with
column ``j`` held in bit ``j`` of the row word. Field elements are ints in
``[0, 2**q)`` holding polynomial-basis coefficients (bit ``i`` is the
coefficient of ``alpha**i``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BitMatrix",
    "FieldCtx",
    "MODULI",
    "field_ctx",
    "field_mul",
    "field_square",
    "field_trace",
    "gf2_rank",
    "poly_degree",
    "poly_mod",
    "poly_mulmod",
    "poly_gcd",
    "verify_irreducible",
]


# Candidate irreducible moduli for the odd degrees q = k - 1 that arise when
# k is even. The test suite checks each entry with verify_irreducible.
MODULI: dict[int, int] = {
    1: 0b11,  # x + 1
    3: 0b1011,  # x^3 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    7: 0b10000011,  # x^7 + x + 1
    9: 0b1000010001,  # x^9 + x^4 + 1
    11: 0b100000000101,  # x^11 + x^2 + 1
    13: 0b10000000011011,  # x^13 + x^4 + x^3 + x + 1
    15: 0b1000000000000011,  # x^15 + x + 1
}


@dataclass(frozen=True)
class BitMatrix:
    """Square matrix over GF(2), row-packed into ints."""

    rows: tuple[int, ...]
    dim: int

    def __post_init__(self):
        if len(self.rows) != self.dim:
            raise ValueError(f"expected {self.dim} rows, got {len(self.rows)}")
        mask = (1 << self.dim) - 1
        for r in self.rows:
            if r < 0 or r & ~mask:
                raise ValueError("row has bits beyond the matrix dimension")

    @classmethod
    def zeros(cls, dim: int) -> "BitMatrix":
        return cls((0,) * dim, dim)

    @classmethod
    def identity(cls, dim: int) -> "BitMatrix":
        return cls(tuple(1 << i for i in range(dim)), dim)

    @classmethod
    def from_array(cls, arr: Sequence[Sequence[int]] | np.ndarray) -> "BitMatrix":
        arr = np.asarray(arr, dtype=np.int64) & 1
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("BitMatrix must be square")
        dim = arr.shape[0]
        rows = tuple(
            sum(int(arr[i, j]) << j for j in range(dim)) for i in range(dim)
        )
        return cls(rows, dim)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.dim):
                out[i, j] = (r >> j) & 1
        return out

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return BitMatrix(tuple(a ^ b for a, b in zip(self.rows, other.rows)), self.dim)

    def transpose(self) -> "BitMatrix":
        rows = []
        for j in range(self.dim):
            rows.append(sum(((r >> j) & 1) << i for i, r in enumerate(self.rows)))
        return BitMatrix(tuple(rows), self.dim)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def is_skew_symmetric(self) -> bool:
        """Zero diagonal and symmetric (the GF(2) notion of skew-symmetry)."""
        if any((self.rows[i] >> i) & 1 for i in range(self.dim)):
            return False
        return self.rows == self.transpose().rows


def gf2_rank(M: BitMatrix | Iterable[int]) -> int:
    """Rank over GF(2) by Gaussian elimination on packed row words.

    Works on a scratch list; the argument is left untouched.
    """
    rows = list(M.rows) if isinstance(M, BitMatrix) else list(M)
    rank = 0
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
    return rank


# ---------- polynomials over GF(2), ints as coefficient vectors


def poly_degree(a: int) -> int:
    return a.bit_length() - 1


def poly_mod(a: int, m: int) -> int:
    dm = poly_degree(m)
    while a and poly_degree(a) >= dm:
        a ^= m << (poly_degree(a) - dm)
    return a


def _clmul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mulmod(a: int, b: int, m: int) -> int:
    return poly_mod(_clmul(a, b), m)


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def verify_irreducible(poly: int, degree: int) -> bool:
    """Return True iff ``poly`` (of the given degree) is irreducible over GF(2).

    Uses the gcd criterion: a degree-q polynomial f is irreducible iff
    gcd(x^(2^i) - x mod f, f) = 1 for every 1 <= i <= q // 2.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if poly_degree(poly) != degree:
        raise ValueError("leading coefficient of poly does not match degree")
    x = 0b10
    t = x
    for _ in range(degree // 2):
        t = poly_mulmod(t, t, poly)
        if poly_gcd(poly, t ^ x) != 1:
            return False
    return True


# ---------- the field GF(2^q)


@dataclass(frozen=True)
class FieldCtx:
    """GF(2^q) in the polynomial basis defined by ``modulus``."""

    q: int
    modulus: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("field degree must be >= 1")
        if not verify_irreducible(self.modulus, self.q):
            raise ValueError(f"modulus {self.modulus:#b} is not irreducible")

    @property
    def order(self) -> int:
        return 1 << self.q

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not an element of GF(2^{self.q})")
        return a


def field_ctx(q: int) -> FieldCtx:
    """Field context from the shipped modulus table."""
    try:
        return FieldCtx(q, MODULI[q])
    except KeyError:
        raise ValueError(f"no modulus shipped for degree {q}") from None


def field_mul(ctx: FieldCtx, a: int, b: int) -> int:
    """Shift-and-reduce multiplication in GF(2^q)."""
    top = 1 << ctx.q
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= ctx.modulus
    return out


def field_square(ctx: FieldCtx, a: int) -> int:
    return field_mul(ctx, a, a)


def field_trace(ctx: FieldCtx, a: int) -> int:
    """Absolute trace a + a^2 + a^4 + ... + a^(2^(q-1)), an element of GF(2)."""
    acc = 0
    t = a
    for _ in range(ctx.q):
        acc ^= t
        t = field_square(ctx, t)
    if acc not in (0, 1):
        raise ArithmeticError(f"trace landed outside GF(2): {acc}")
    return acc
