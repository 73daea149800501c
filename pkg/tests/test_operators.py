import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurcomm.errors import DimMismatch, FunctionUndefinedAtSpectrum, NotHermitian, NotSquare
from schurcomm.operators import (
    BoundedOperator,
    HermitianOperator,
    apply_function,
    commutator,
    iterated_commutator,
    make_hermitian,
    operator_norm,
)

from conftest import random_hermitian, random_matrix


def test_make_hermitian_diagonal():
    D = make_hermitian(np.diag([1.0, 2.0]))
    np.testing.assert_array_equal(D.eigenvalues, [1.0, 2.0])
    np.testing.assert_allclose(np.abs(D.eigenvectors), np.eye(2), atol=1e-15)


def test_make_hermitian_pauli_x():
    D = make_hermitian([[0, 1], [1, 0]])
    np.testing.assert_allclose(D.eigenvalues, [-1.0, 1.0], atol=1e-15)


def test_make_hermitian_reconstruction(rng):
    a = random_matrix(rng, 8, unit=False)
    D = make_hermitian(a + a.conj().T)
    u, w = D.eigenvectors, D.eigenvalues
    rebuilt = u @ np.diag(w) @ u.conj().T
    scale = np.linalg.norm(D.matrix, 2)
    assert np.linalg.norm(rebuilt - D.matrix, 2) < 1e-10 * scale
    assert np.linalg.norm(u.conj().T @ u - np.eye(8), 2) < 1e-10
    assert np.all(np.diff(w) >= 0)


def test_make_hermitian_errors():
    with pytest.raises(NotSquare):
        make_hermitian(np.zeros((2, 3)))
    with pytest.raises(NotHermitian) as info:
        make_hermitian([[0, 1], [0, 0]])
    assert info.value.max_asymmetry == pytest.approx(1.0)


def test_make_hermitian_accepts_rounding_level_asymmetry():
    m = np.array([[1.0, 2.0], [2.0 + 1e-14, 3.0]])
    make_hermitian(m)


def test_operator_is_immutable(rng):
    D = random_hermitian(rng, 4)
    with pytest.raises(ValueError):
        D.matrix[0, 0] = 1.0
    with pytest.raises(ValueError):
        D.eigenvalues[0] = 1.0


def test_apply_function_examples():
    out = apply_function(make_hermitian(np.diag([-3.0, 2.0])), np.abs)
    np.testing.assert_allclose(out.matrix, np.diag([3.0, 2.0]))
    out = apply_function(make_hermitian(np.diag([1.0, np.e])), np.log)
    np.testing.assert_allclose(out.matrix, np.diag([0.0, 1.0]), atol=1e-15)


def test_apply_function_identity_reproduces_D(rng):
    D = random_hermitian(rng, 10)
    out = apply_function(D, lambda t: t)
    assert np.linalg.norm(out.matrix - D.matrix, 2) < 1e-10 * np.linalg.norm(D.matrix, 2)


def test_apply_function_undefined():
    D = make_hermitian(np.diag([0.0, 1.0]))
    with pytest.raises(FunctionUndefinedAtSpectrum) as info:
        apply_function(D, np.log)
    assert info.value.eigenvalue == 0.0
    with pytest.raises(FunctionUndefinedAtSpectrum):
        apply_function(D, lambda t: 1.0 / t)


def test_apply_function_affine_composition(rng):
    D = random_hermitian(rng, 9)
    shifted = HermitianOperator.from_spectrum(2.0 * D.eigenvalues - 3.0, D.eigenvectors)
    lhs = apply_function(D, lambda t: np.sin(2.0 * t - 3.0))
    rhs = apply_function(shifted, np.sin)
    np.testing.assert_allclose(lhs.matrix, rhs.matrix, atol=1e-12)


def test_functional_calculus_is_basis_independent_in_eigenspaces(rng):
    # degenerate eigenvalue 2 (multiplicity 3): rotate inside the eigenspace
    u = np.linalg.qr(random_matrix(rng, 5))[0]
    w = np.array([2.0, 2.0, 2.0, -1.0, 4.0])
    D1 = HermitianOperator.from_spectrum(w, u)
    v = np.linalg.qr(random_matrix(rng, 3))[0]
    u2 = u.copy()
    idx = np.flatnonzero(w == 2.0)
    u2[:, idx] = u[:, idx] @ v
    D2 = HermitianOperator.from_spectrum(w, u2)
    np.testing.assert_allclose(D1.matrix, D2.matrix, atol=1e-13)
    np.testing.assert_allclose(apply_function(D1, np.exp).matrix,
                               apply_function(D2, np.exp).matrix, atol=1e-11)


def test_commutator_examples(rng):
    y = random_matrix(rng, 3)
    np.testing.assert_array_equal(commutator(np.eye(3), y).matrix, 0)
    np.testing.assert_array_equal(commutator(y, y).matrix, 0)
    out = commutator(np.diag([0.0, 5.0]), [[0, 1], [0, 0]])
    np.testing.assert_array_equal(out.matrix, [[0, -5], [0, 0]])
    with pytest.raises(DimMismatch):
        commutator(np.eye(2), np.eye(3))


def test_iterated_commutator_examples(rng):
    D = make_hermitian(np.diag([0.0, 5.0]))
    y = np.array([[0, 1], [0, 0]], dtype=complex)
    np.testing.assert_array_equal(iterated_commutator(D, y, 0).matrix, y)
    np.testing.assert_array_equal(iterated_commutator(D, y, 2).matrix, [[0, 25], [0, 0]])
    # anything diagonal in D's eigenbasis commutes
    E = random_hermitian(rng, 6)
    z = apply_function(E, np.cos)
    for k in (1, 2, 3):
        assert operator_norm(iterated_commutator(E, z, k)) < 1e-9
    with pytest.raises(ValueError):
        iterated_commutator(D, y, -1)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_iterated_commutator_diagonal_entry_formula(rng, k):
    d = rng.uniform(-10, 10, 7)
    y = random_matrix(rng, 7, unit=False)
    expected = (d[:, None] - d[None, :]) ** k * y
    out = iterated_commutator(np.diag(d), y, k).matrix
    assert np.max(np.abs(out - expected)) <= 1e-12 * np.max(np.abs(expected))


def test_operator_norm_examples():
    assert operator_norm(np.diag([-3.0, 2.0])) == pytest.approx(3.0, rel=1e-15)
    x = np.array([[0, -5], [0, 0]])
    oracle = np.sqrt(np.max(np.linalg.eigvalsh(x.conj().T @ x)))
    assert operator_norm(x) == pytest.approx(oracle, rel=1e-14)
    assert operator_norm(x) == pytest.approx(5.0)
    assert operator_norm(np.zeros((4, 4))) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_hermitian_norm_is_max_abs_eigenvalue(dim, seed):
    rng = np.random.default_rng(seed)
    D = random_hermitian(rng, dim)
    expected = np.max(np.abs(D.eigenvalues))
    assert operator_norm(D) == pytest.approx(expected, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_submultiplicative(dim, seed):
    rng = np.random.default_rng(seed)
    a, b = random_matrix(rng, dim, False), random_matrix(rng, dim, False)
    assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) * (1 + 1e-9)


def test_bounded_operator_arithmetic(rng):
    a, b = BoundedOperator(random_matrix(rng, 3)), BoundedOperator(random_matrix(rng, 3))
    np.testing.assert_allclose((a @ b - b @ a).matrix, commutator(a, b).matrix)
    np.testing.assert_allclose((2 * a + (-a)).matrix, a.matrix)
    np.testing.assert_allclose(a.H.matrix, a.matrix.conj().T)
