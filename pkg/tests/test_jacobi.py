import numpy as np
import pytest
from hypothesis import given, strategies as st

from plapspec.errors import DimensionError
from plapspec.jacobi import jacobi_eigenvalues


@given(st.integers(1, 12), st.integers(0, 2**31))
def test_matches_lapack_on_random_symmetric(n, seed):
    a = np.random.default_rng(seed).standard_normal((n, n))
    a = a + a.T
    np.testing.assert_allclose(jacobi_eigenvalues(a), np.linalg.eigvalsh(a), atol=1e-11 * (1 + np.abs(a).max()))


def test_diagonal_and_repeated_eigenvalues():
    np.testing.assert_array_equal(jacobi_eigenvalues(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])
    J = np.ones((5, 5))
    np.testing.assert_allclose(jacobi_eigenvalues(J), [0, 0, 0, 0, 5], atol=1e-12)


def test_tiny_off_diagonal_does_not_overflow():
    a = np.array([[1.0, 1e-310], [1e-310, 2.0]])
    with np.errstate(over="raise", invalid="raise"):
        ev = jacobi_eigenvalues(a)
    np.testing.assert_allclose(ev, [1.0, 2.0])


def test_rejects_non_symmetric():
    with pytest.raises(DimensionError):
        jacobi_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DimensionError):
        jacobi_eigenvalues(np.zeros((2, 3)))
