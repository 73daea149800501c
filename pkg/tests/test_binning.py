import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurcomm.binning import bin_index, build_binning
from schurcomm.operators import HermitianOperator, apply_function, commutator, make_hermitian, operator_norm

from conftest import random_hermitian


def test_bin_index_half_open():
    assert bin_index(0.49) == 0
    assert bin_index(0.5) == 1
    assert bin_index(-0.5) == 0
    assert bin_index(3.0) == 3
    assert bin_index(-1.5) == -1
    assert bin_index(-1.51) == -2


def test_bin_index_grid_length():
    assert bin_index(0.3, h=0.5) == 1
    assert bin_index(0.24, h=0.5) == 0


def test_build_binning_small_example():
    B = build_binning(make_hermitian(np.diag([0.3, 0.7, 2.1])))
    assert B.bins == {0: (0,), 1: (1,), 2: (2,)}
    assert B.occupied == (0, 1, 2)
    np.testing.assert_allclose(B.b_values, [0.3, -0.3, 0.1], atol=1e-15)
    np.testing.assert_allclose(np.diag(B.b.matrix).real, [0.3, -0.3, 0.1], atol=1e-15)


def test_build_binning_integer_diagonal():
    D = make_hermitian(np.diag([-2.0, 0.0, 3.0, 3.0]))
    B = build_binning(D)
    np.testing.assert_allclose(B.Dbar.matrix, D.matrix)
    assert operator_norm(B.b) == 0.0 and operator_norm(B.c) == 0.0
    assert B.bins[3] == (2, 3)


def test_build_binning_negative_scalar():
    B = build_binning(make_hermitian([[-1.4]]))
    np.testing.assert_allclose(B.Dbar.matrix, [[-1.0]])
    np.testing.assert_allclose(B.b.matrix, [[-0.4]], atol=1e-15)
    np.testing.assert_allclose(B.c.matrix, [[0.4]], atol=1e-15)


def test_empty_bins_are_dropped():
    B = build_binning(make_hermitian(np.diag([-7.0, 0.2, 9.6])))
    assert B.occupied == (-7, 0, 10)
    assert B.bin_size(5) == 0
    np.testing.assert_array_equal(B.projection(5), 0)


def test_boundary_eigenvalues_not_snapped():
    w = np.array([0.5, 0.5 - 1e-15, 1.5 + 1e-15])
    B = build_binning(HermitianOperator.from_spectrum(w, np.eye(3)))
    assert B.labels.tolist() == [0, 1, 2]


def test_grid_length_exploration():
    D = make_hermitian(np.diag([0.3, 0.7]))
    B = build_binning(D, h=0.5)
    np.testing.assert_allclose(B.grid_values, [0.5, 0.5])
    assert operator_norm(B.b) <= 0.25 + 1e-15
    with pytest.raises(ValueError):
        build_binning(D, h=0.0)


def _check_invariants(D, tol=1e-12):
    B = build_binning(D)
    scale = max(operator_norm(D), 1.0)
    n = D.dim
    assert sorted(i for v in B.bins.values() for i in v) == list(range(n))
    proj = {k: B.projection(k) for k in B.occupied}
    np.testing.assert_allclose(sum(proj.values()), np.eye(n), atol=tol * 10)
    for a in B.occupied:
        e = proj[a]
        np.testing.assert_allclose(e @ e, e, atol=1e-12)
        np.testing.assert_allclose(e, e.conj().T, atol=1e-12)
        for b in B.occupied:
            if a != b:
                assert np.max(np.abs(e @ proj[b])) < 1e-12
    assert operator_norm(D.matrix - B.Dbar.matrix - B.b.matrix) <= tol * scale
    assert operator_norm(B.b) <= 0.5 + tol
    absD = apply_function(D, np.abs)
    absDbar = apply_function(B.Dbar, np.abs)
    assert operator_norm(absD.matrix - absDbar.matrix - B.c.matrix) <= tol * scale
    assert operator_norm(B.c) <= 0.5 + tol
    np.testing.assert_array_equal(B.Dbar.eigenvalues, B.labels)
    for x, z in [(D, B.Dbar), (D, B.b), (B.Dbar, B.c), (B.b, B.c)]:
        assert operator_norm(commutator(x, z)) <= 1e-10 * scale**2


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 24), st.integers(0, 2**32 - 1))
def test_binning_invariants(dim, seed):
    _check_invariants(random_hermitian(np.random.default_rng(seed), dim))


def test_functional_calculus_moves_by_holder_amount(rng):
    # |g(D) - g(Dbar)| <= A + B (1/2)^alpha for a (1/2, 1, 1) bounded g
    g = lambda t: np.sqrt(np.abs(t)) + 0.5 * np.sign(t)  # noqa: E731
    for _ in range(20):
        D = random_hermitian(rng, 12)
        B = build_binning(D)
        diff = apply_function(D, g).matrix - apply_function(B.Dbar, g).matrix
        sup = np.max(np.abs(g(D.eigenvalues) - g(B.grid_values)))
        assert operator_norm(diff) == pytest.approx(sup, abs=1e-10)
        assert sup <= 1.0 + 0.5**0.5
