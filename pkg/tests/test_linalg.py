"""Kernel tests: eigensolvers, Rayleigh quotients, complements, compressions."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specpol.errors import BasisNotOrthonormal, DimensionMismatch, NotHermitian
from specpol.linalg import (
    ComplexMatrix,
    UnitVector,
    compress,
    general_eig,
    hermitian_eig,
    orthonormal_complement_basis,
    rayleigh,
)


def test_hermitian_eig_diagonal():
    dec = hermitian_eig(ComplexMatrix(np.diag([1.0, 2.0, 3.0]).astype(complex)))
    np.testing.assert_allclose(dec.values.real, [1, 2, 3], atol=1e-14)
    for j, v in enumerate(dec.vectors):
        assert abs(abs(v.components[j]) - 1) < 1e-12


def test_hermitian_eig_2x2_characteristic_polynomial():
    # [[n^2, 1], [1, 1]] with n = 2: roots of x^2 - 5x + 3
    dec = hermitian_eig(ComplexMatrix.from_rows([[4, 1], [1, 1]]))
    expected = [(5 - np.sqrt(13)) / 2, (5 + np.sqrt(13)) / 2]
    np.testing.assert_allclose(dec.values.real, expected, atol=1e-12)


def test_hermitian_eig_swap():
    dec = hermitian_eig(ComplexMatrix.from_rows([[0, 1], [1, 0]]))
    np.testing.assert_allclose(dec.values.real, [-1, 1], atol=1e-14)


def test_hermitian_eig_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(ComplexMatrix.from_rows([[0, 1], [0, 0]]))


def test_general_eig_triangular_block():
    # block [[1, 0], [n, n^2]] with n = 3 is triangular: eigenvalues 1 and 9
    dec = general_eig(ComplexMatrix.from_rows([[1, 0], [3, 9]]))
    np.testing.assert_allclose(sorted(dec.values.real), [1, 9], atol=1e-12)
    assert np.abs(dec.values.imag).max() < 1e-12


def test_general_eig_jordan_block():
    dec = general_eig(ComplexMatrix.from_rows([[0, 1], [0, 0]]))
    np.testing.assert_allclose(np.abs(dec.values), [0, 0], atol=1e-8)


def test_general_eig_companion_matrix():
    # companion of z^2 - (3+i) z + (2+2i); quadratic-formula oracle
    b, c = -(3 + 1j), 2 + 2j
    disc = np.sqrt(b * b - 4 * c)
    roots = sorted([(-b + disc) / 2, (-b - disc) / 2], key=lambda z: (z.real, z.imag))
    comp = ComplexMatrix.from_rows([[0, -c], [1, -b]])
    dec = general_eig(comp)
    np.testing.assert_allclose(dec.values, roots, atol=1e-12)


def test_general_eig_vectors_and_residuals():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    dec = general_eig(ComplexMatrix(a), want_vectors=True)
    bound = 1e-9 * (1 + np.linalg.norm(a))
    assert dec.residuals.max() <= bound
    for lam, v in zip(dec.values, dec.vectors):
        assert abs(rayleigh(a, v) - lam) < 1e-8


def test_rayleigh_diagonal_examples():
    M = ComplexMatrix(np.diag([0.0, 1.0]).astype(complex))
    assert rayleigh(M, UnitVector(np.array([1.0, 0.0], dtype=complex))) == 0
    mid = UnitVector(np.array([1, 1], dtype=complex) / np.sqrt(2))
    assert abs(rayleigh(M, mid) - 0.5) < 1e-15


def test_rayleigh_conjugation_convention():
    # <Mx, x> is conjugate-linear in the second slot
    M = ComplexMatrix.from_rows([[100, 0], [10, 1]])
    x = UnitVector(np.array([-0.1j, 1.0]) / np.sqrt(1.01))
    expected = (2 - 1j) / 1.01
    assert abs(rayleigh(M, x) - expected) < 1e-14


def test_rayleigh_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        rayleigh(ComplexMatrix(np.eye(3, dtype=complex)), UnitVector(np.array([1.0 + 0j, 0])))


def test_complement_of_coordinate_vector():
    basis = orthonormal_complement_basis([np.array([1.0, 0.0], dtype=complex)], 2)
    assert len(basis) == 1
    assert abs(abs(basis[0].components[1]) - 1) < 1e-12


def test_complement_of_diagonal_vector():
    v = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    basis = orthonormal_complement_basis([v], 2)
    assert len(basis) == 1
    w = basis[0].components
    assert abs(np.vdot(v, w)) < 1e-12
    assert abs(abs(w[0]) - 1 / np.sqrt(2)) < 1e-12


def test_complement_random_gram_identity(rng):
    vecs = [c / np.linalg.norm(c) for c in
            (rng.standard_normal((3, 8)) + 1j * rng.standard_normal((3, 8)))]
    basis = orthonormal_complement_basis(vecs, 8)
    assert len(basis) == 5
    B = np.column_stack([b.components for b in basis])
    np.testing.assert_allclose(B.conj().T @ B, np.eye(5), atol=1e-10)
    for v in vecs:
        assert np.abs(B.conj().T @ v).max() < 1e-10


def test_compress_coordinate_selection():
    M = ComplexMatrix(np.diag([1.0, 2.0, 3.0]).astype(complex))
    e = np.eye(3, dtype=complex)
    out = compress(M, [e[:, 0], e[:, 2]])
    np.testing.assert_allclose(out.data, np.diag([1.0, 3.0]), atol=0)


def test_compress_identity_basis(rng):
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    out = compress(ComplexMatrix(a), np.eye(4, dtype=complex))
    np.testing.assert_allclose(out.data, a, atol=1e-14)


def test_compress_rank_one():
    M = ComplexMatrix.from_rows([[1, 0], [2, 4]])
    v = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    out = compress(M, [v])
    assert abs(out.data[0, 0] - 3.5) < 1e-14


def test_compress_rejects_skewed_basis():
    with pytest.raises(BasisNotOrthonormal):
        compress(ComplexMatrix(np.eye(2, dtype=complex)),
                 [np.array([1.0, 0.0], dtype=complex), np.array([0.9, 0.1], dtype=complex)])


def test_hermitian_matches_general_on_hermitian_input(rng):
    a = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    h = (a + a.conj().T) / 2
    dh = hermitian_eig(ComplexMatrix(h))
    dg = general_eig(ComplexMatrix(h))
    np.testing.assert_allclose(np.sort(dh.values.real), np.sort(dg.values.real), atol=1e-8)


def test_tower_property(rng):
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    q, _ = np.linalg.qr(rng.standard_normal((8, 5)) + 1j * rng.standard_normal((8, 5)))
    q2, _ = np.linalg.qr(rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3)))
    inner = compress(compress(ComplexMatrix(a), q), q2)
    direct = compress(ComplexMatrix(a), q @ q2)
    np.testing.assert_allclose(inner.data, direct.data, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=10), st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_trace_equals_eigenvalue_sum(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    vals = general_eig(ComplexMatrix(a)).values
    tr = np.trace(a)
    assert abs(vals.sum() - tr) <= 1e-8 * (1 + abs(tr))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=8), st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_eigenpair_residual_bound(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    dec = general_eig(ComplexMatrix(a), want_vectors=True)
    assert dec.residuals.max() <= 1e-9 * (1 + np.linalg.norm(a))
