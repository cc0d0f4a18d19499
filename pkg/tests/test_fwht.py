import numpy as np
import pytest

from kerdock_fst.fwht import fwht_normalized, fwht_unnormalized, hadamard_matrix


def naive_wht(v):
    d = len(v)
    return np.array([sum((-1) ** bin(q & x).count("1") * v[x] for x in range(d)) for q in range(d)])


def test_examples():
    assert np.array_equal(fwht_unnormalized(np.array([1.0, 0, 0, 0])), [1, 1, 1, 1])
    assert np.array_equal(fwht_unnormalized(np.array([1.0, 2, 3, 4])), [10, -2, -4, 0])
    assert np.array_equal(fwht_unnormalized(np.array([3.0, 5.0])), [8, -2])
    assert np.allclose(fwht_normalized(np.array([1.0, 0, 0, 0])), 0.5)
    assert np.allclose(fwht_normalized(np.array([1.0, 2, 3, 4])), [5, -1, -2, 0])
    assert np.array_equal(fwht_unnormalized(np.array([7.0])), [7.0])


def test_in_place():
    buf = np.arange(8.0)
    out = fwht_unnormalized(buf)
    assert out is buf
    assert np.array_equal(buf, naive_wht(np.arange(8.0)))


@pytest.mark.parametrize("d", [2, 4, 8, 16, 32, 64])
def test_matches_naive(d):
    rng = np.random.default_rng(d)
    v = rng.standard_normal(d)
    assert np.abs(fwht_unnormalized(v.copy()) - naive_wht(v)).max() <= 1e-10
    assert np.abs(fwht_unnormalized(v.copy()) - hadamard_matrix(d) @ v).max() <= 1e-10


def test_batched_rows():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((5, 3, 32))
    H = hadamard_matrix(32)
    assert np.abs(fwht_unnormalized(X.copy()) - X @ H.T).max() <= 1e-10


@pytest.mark.parametrize("k", [1, 4, 10, 16])
def test_involution_and_norm(k):
    rng = np.random.default_rng(k)
    v = rng.standard_normal(2**k)
    w = fwht_normalized(v.copy())
    assert abs(np.linalg.norm(w) - np.linalg.norm(v)) <= 1e-12 * np.linalg.norm(v)
    back = fwht_normalized(w)
    assert np.abs(back - v).max() <= 1e-12 * np.abs(v).max() * 10


def test_rejects_bad_buffers():
    with pytest.raises(ValueError):
        fwht_unnormalized(np.zeros(6))
    with pytest.raises(TypeError):
        fwht_unnormalized(np.zeros(4, dtype=np.float32))
    with pytest.raises(ValueError):
        fwht_unnormalized(np.zeros((4, 8))[:, ::2])
