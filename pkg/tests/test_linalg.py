from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodnorm.errors import DimensionError, InputError
from prodnorm.linalg import (
    Bipartition,
    is_projector,
    is_unitary,
    kron,
    max_entangled,
    partial_trace,
    polar_maximizer,
    projector_range,
    random_unitary,
    rank_one,
    schmidt,
    svd,
    weyl_basis,
)
from prodnorm.restarts import make_rng


def _gaussian(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def test_partial_trace_of_product() -> None:
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    b = np.array([[5, 0], [0, 7]], dtype=complex)
    out = partial_trace(np.kron(a, b), (2, 2), {1})
    assert np.allclose(out, 12 * a)


def test_partial_trace_first_factor() -> None:
    a = np.diag([1.0, 2.0]).astype(complex)
    b = np.arange(9).reshape(3, 3).astype(complex)
    assert np.allclose(partial_trace(np.kron(a, b), (2, 3), [0]), 3 * b)


def test_partial_trace_everything_is_trace() -> None:
    x = _gaussian(make_rng(1), 6, 6)
    out = partial_trace(x, (2, 3), {0, 1})
    assert out.shape == (1, 1)
    assert np.isclose(out[0, 0], np.trace(x))


def test_partial_trace_errors() -> None:
    x = np.eye(4, dtype=complex)
    with pytest.raises(InputError):
        partial_trace(x, (2, 2), {2})
    with pytest.raises(DimensionError):
        partial_trace(x, (2, 3), {0})
    with pytest.raises(DimensionError):
        partial_trace(np.ones((2, 3)), (2, 3), {0})


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_partial_trace_duality(d1: int, d2: int, seed: int) -> None:
    # Tr(X·Tr₂(Y)) = Tr((X⊗I)·Y)
    rng = make_rng(seed)
    x = _gaussian(rng, d1, d1)
    y = _gaussian(rng, d1 * d2, d1 * d2)
    lhs = np.trace(x @ partial_trace(y, (d1, d2), {1}))
    rhs = np.trace(np.kron(x, np.eye(d2)) @ y)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_schmidt_invariants(d1: int, d2: int, seed: int) -> None:
    rng = make_rng(seed)
    u = _gaussian(rng, d1 * d2, 1).reshape(-1)
    dec = schmidt(u, Bipartition(d1, d2))
    assert np.all(np.diff(dec.raw_coefficients) <= 1e-12)
    assert math.isclose(
        float(np.sum(dec.raw_coefficients**2)), float(np.vdot(u, u).real), rel_tol=1e-10
    )
    assert np.allclose(dec.reconstruct(), u, atol=1e-10)
    k = min(d1, d2)
    assert np.allclose(dec.left_basis.conj().T @ dec.left_basis, np.eye(k), atol=1e-10)
    assert np.allclose(dec.right_basis.conj().T @ dec.right_basis, np.eye(k), atol=1e-10)


def test_schmidt_of_product_and_epr() -> None:
    part = Bipartition(2, 2)
    product = np.kron([1, 0], [0, 1]).astype(complex)
    assert schmidt(product, part).rank == 1
    epr = max_entangled(2)
    assert np.allclose(schmidt(epr, part).coefficients, [1 / math.sqrt(2)] * 2)


def test_schmidt_length_mismatch() -> None:
    with pytest.raises(DimensionError):
        schmidt(np.ones(5), Bipartition(2, 2))


def test_bipartition_rejects_non_positive() -> None:
    with pytest.raises(DimensionError):
        Bipartition(0, 2)


def test_svd_reconstructs_and_rejects_nan() -> None:
    a = _gaussian(make_rng(3), 3, 5)
    res = svd(a)
    assert np.allclose(res.reconstruct(), a)
    bad = a.copy()
    bad[0, 0] = np.nan
    with pytest.raises(InputError):
        svd(bad)


def test_polar_maximizer_attains_trace_norm() -> None:
    rng = make_rng(5)
    a = _gaussian(rng, 4, 4)
    u, value = polar_maximizer(a)
    assert is_unitary(u)
    assert np.isclose(np.trace(u @ a), value)
    assert np.isclose(value, np.linalg.svd(a, compute_uv=False).sum())
    for k in range(20):
        other = random_unitary(4, k)
        assert abs(np.trace(other @ a)) <= value + 1e-10


def test_random_unitary_is_deterministic() -> None:
    u = random_unitary(5, 123)
    assert is_unitary(u)
    assert np.array_equal(u, random_unitary(5, 123))
    assert not np.allclose(u, random_unitary(5, 124))


def test_weyl_basis_spans_and_is_unitary() -> None:
    basis = weyl_basis(3)
    assert len(basis) == 9
    assert all(is_unitary(w) for w in basis)
    stacked = np.array([w.reshape(-1) for w in basis])
    assert np.linalg.matrix_rank(stacked) == 9


def test_projector_range_and_checks() -> None:
    pi = np.diag([1, 0, 1, 0]).astype(complex)
    assert is_projector(pi)
    iso = projector_range(pi)
    assert iso.shape == (4, 2)
    assert np.allclose(iso @ iso.conj().T, pi)

    v = max_entangled(2)
    dense = rank_one(v, v)
    assert is_projector(dense)
    iso = projector_range(dense)
    assert iso.shape == (4, 1)
    assert np.allclose(iso @ iso.conj().T, dense)

    assert not is_projector(np.diag([0.5, 1.0]).astype(complex))
    assert not is_unitary(np.ones((2, 3)))


def test_kron_matches_numpy() -> None:
    a = np.arange(4).reshape(2, 2)
    b = np.eye(3)
    assert np.array_equal(kron(a, b), np.kron(a, b))


def test_weyl_basis_gram_matrix() -> None:
    basis = weyl_basis(3)
    gram = np.array([[np.trace(a.conj().T @ b) for b in basis] for a in basis])
    assert np.allclose(gram, 3 * np.eye(9), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    st.tuples(
        st.integers(min_value=1, max_value=3),
        st.integers(min_value=1, max_value=3),
        st.integers(min_value=1, max_value=3),
    ),
    st.sets(st.integers(min_value=0, max_value=2), min_size=1, max_size=2),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_partial_trace_keeps_the_trace(
    factors: tuple[int, int, int], traced: set[int], seed: int
) -> None:
    dim = math.prod(factors)
    x = _gaussian(make_rng(seed), dim, dim)
    out = partial_trace(x, factors, traced)
    kept = math.prod(d for i, d in enumerate(factors) if i not in traced)
    assert out.shape == (kept, kept)
    assert abs(np.trace(out) - np.trace(x)) <= 1e-9 * max(1.0, abs(np.trace(x)))


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_schmidt_coefficients_ignore_local_unitaries(d1: int, d2: int, seed: int) -> None:
    u = _gaussian(make_rng(seed), d1 * d2, 1).reshape(-1)
    w = np.kron(random_unitary(d1, seed), random_unitary(d2, seed + 1))
    part = Bipartition(d1, d2)
    before = schmidt(u, part).raw_coefficients
    after = schmidt(w @ u, part).raw_coefficients
    assert np.allclose(before, after, atol=1e-10)
