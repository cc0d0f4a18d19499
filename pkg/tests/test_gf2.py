import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerdock_fst.gf2 import (
    MODULI,
    BitMatrix,
    FieldCtx,
    field_ctx,
    field_mul,
    field_trace,
    gf2_rank,
    verify_irreducible,
)


# ---------- independent oracles (coefficient lists, no bit tricks)


def poly_to_list(a):
    return [(a >> i) & 1 for i in range(max(a.bit_length(), 1))]


def list_to_poly(c):
    return sum(int(b) << i for i, b in enumerate(c))


def oracle_polymul(a, b):
    ca, cb = poly_to_list(a), poly_to_list(b)
    out = [0] * (len(ca) + len(cb))
    for i, x in enumerate(ca):
        for j, y in enumerate(cb):
            out[i + j] ^= x & y
    return list_to_poly(out)


def oracle_polyrem(a, m):
    c = poly_to_list(a)
    cm = poly_to_list(m)
    dm = len(cm) - 1
    for top in range(len(c) - 1, dm - 1, -1):
        if c[top]:
            for i, b in enumerate(cm):
                c[top - dm + i] ^= b
    return list_to_poly(c[:dm])


def oracle_irreducible(poly, q):
    # trial division by every polynomial of degree 1..q//2
    for deg in range(1, q // 2 + 1):
        for f in range(1 << deg, 1 << (deg + 1)):
            if oracle_polyrem(poly, f) == 0:
                return False
    return True


def oracle_rank(arr):
    a = np.array(arr, dtype=np.uint8) % 2
    r = 0
    rows, cols = a.shape
    for c in range(cols):
        piv = [i for i in range(r, rows) if a[i, c]]
        if not piv:
            continue
        a[[r, piv[0]]] = a[[piv[0], r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


# ---------- rank


def test_rank_examples():
    assert gf2_rank(BitMatrix.zeros(4)) == 0
    assert gf2_rank(BitMatrix.identity(4)) == 4
    assert gf2_rank(BitMatrix.from_array([[0, 1], [1, 0]])) == 2


def test_rank_does_not_modify_input():
    M = BitMatrix.from_array([[1, 1, 0], [1, 1, 0], [0, 0, 1]])
    before = M.rows
    assert gf2_rank(M) == 2
    assert M.rows == before


@settings(max_examples=200)
@given(st.integers(1, 12), st.data())
def test_rank_matches_oracle_and_transpose(k, data):
    bits = data.draw(st.lists(st.integers(0, 1), min_size=k * k, max_size=k * k))
    arr = np.array(bits).reshape(k, k)
    M = BitMatrix.from_array(arr)
    assert gf2_rank(M) == oracle_rank(arr)
    assert gf2_rank(M) == gf2_rank(M.T)


def test_bitmatrix_roundtrip_and_packing():
    arr = np.array([[0, 1, 1], [1, 0, 0], [1, 0, 0]])
    M = BitMatrix.from_array(arr)
    assert M.rows[0] == 0b110  # column j in bit j
    assert (M.to_array() == arr).all()
    assert M.is_skew_symmetric()
    assert not BitMatrix.identity(3).is_skew_symmetric()
    with pytest.raises(ValueError):
        BitMatrix((0b100,), 1)


# ---------- irreducibility


@pytest.mark.parametrize("poly,q,expected", [
    (0b111, 2, True),  # x^2+x+1
    (0b101, 2, False),  # x^2+1 = (x+1)^2
    (0b1011, 3, True),  # x^3+x+1
    (0b1001, 3, False),  # x^3+1
    (0b10001, 4, False),  # x^4+1
    (0b10011, 4, True),  # x^4+x+1
    (0b10101, 4, False),  # (x^2+x+1)^2
])
def test_verify_irreducible_examples(poly, q, expected):
    assert verify_irreducible(poly, q) is expected


@pytest.mark.parametrize("q", range(1, 10))
def test_verify_irreducible_matches_trial_division(q):
    for poly in range(1 << q, 1 << (q + 1)):
        assert verify_irreducible(poly, q) == oracle_irreducible(poly, q), bin(poly)


@pytest.mark.parametrize("q", sorted(MODULI))
def test_shipped_moduli_are_irreducible(q):
    poly = MODULI[q]
    assert poly.bit_length() - 1 == q
    assert verify_irreducible(poly, q)
    if q <= 11:
        assert oracle_irreducible(poly, q)


def test_field_ctx_rejects_reducible():
    with pytest.raises(ValueError):
        FieldCtx(2, 0b101)
    with pytest.raises(ValueError):
        field_ctx(4)


# ---------- field arithmetic


def test_field_mul_examples():
    ctx = field_ctx(3)
    assert field_mul(ctx, 2, 4) == 3  # alpha * alpha^2 = alpha + 1
    for b in range(8):
        assert field_mul(ctx, 1, b) == b
        assert field_mul(ctx, 0, b) == 0


@pytest.mark.parametrize("q", [1, 3, 5, 7])
def test_field_mul_matches_polynomial_oracle(q):
    ctx = field_ctx(q)
    rng = np.random.default_rng(q)
    pairs = itertools.product(range(ctx.order), repeat=2) if q <= 5 else \
        rng.integers(0, ctx.order, size=(2000, 2)).tolist()
    for a, b in pairs:
        assert field_mul(ctx, a, b) == oracle_polyrem(oracle_polymul(a, b), ctx.modulus)


@pytest.mark.parametrize("q", [1, 3])
def test_field_axioms_exhaustive(q):
    ctx = field_ctx(q)
    E = range(ctx.order)
    for a, b, c in itertools.product(E, E, E):
        assert field_mul(ctx, a, b) == field_mul(ctx, b, a)
        assert field_mul(ctx, field_mul(ctx, a, b), c) == field_mul(ctx, a, field_mul(ctx, b, c))
        assert field_mul(ctx, a, b ^ c) == field_mul(ctx, a, b) ^ field_mul(ctx, a, c)


@pytest.mark.parametrize("q", [5, 7])
def test_field_axioms_sampled(q):
    ctx = field_ctx(q)
    rng = np.random.default_rng(7)
    for a, b, c in rng.integers(0, ctx.order, size=(3000, 3)).tolist():
        assert field_mul(ctx, a, b) == field_mul(ctx, b, a)
        assert field_mul(ctx, field_mul(ctx, a, b), c) == field_mul(ctx, a, field_mul(ctx, b, c))
        assert field_mul(ctx, a, b ^ c) == field_mul(ctx, a, b) ^ field_mul(ctx, a, c)


def test_trace_examples():
    ctx = field_ctx(3)
    assert field_trace(ctx, 0) == 0
    assert field_trace(ctx, 1) == 1
    assert field_trace(ctx, 2) == 0  # tr(alpha) = alpha + alpha^2 + alpha^4, alpha^4 = alpha^2 + alpha


@pytest.mark.parametrize("q", [1, 3, 5, 7, 9])
def test_trace_linear_frobenius_balanced(q):
    ctx = field_ctx(q)
    tr = [field_trace(ctx, a) for a in range(ctx.order)]
    assert tr[1] == q % 2
    for a in range(ctx.order):
        assert field_trace(ctx, field_mul(ctx, a, a)) == tr[a]
    rng = np.random.default_rng(q)
    for a, b in rng.integers(0, ctx.order, size=(500, 2)).tolist():
        assert tr[a ^ b] == tr[a] ^ tr[b]
    # a nonzero linear functional takes the value 1 on exactly half the field
    if q > 1:
        assert sum(tr) == ctx.order // 2
