import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trionlambda.errors import SingularMatrixError
from trionlambda.operators import (
    TRION_SPACE,
    HilbertSpace,
    dagger,
    eig_hermitian,
    is_hermitian,
    kron,
    projector,
    solve_linear,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_hilbert_space_defaults():
    assert TRION_SPACE.dim == 3
    assert [TRION_SPACE.index(x) for x in "spt"] == [0, 1, 2]


@pytest.mark.parametrize("kwargs", [dict(dim=2), dict(dim=2, labels=("a", "a")), dict(dim=0, labels=())])
def test_hilbert_space_rejects_bad_labels(kwargs):
    with pytest.raises(ValueError):
        HilbertSpace(**kwargs)


def test_projector_entries():
    m = projector(TRION_SPACE, 0, 2)
    expected = np.zeros((3, 3))
    expected[0, 2] = 1
    np.testing.assert_array_equal(m, expected)


def test_projector_identities():
    for i in range(3):
        pii = projector(TRION_SPACE, i, i)
        np.testing.assert_array_equal(pii @ pii, pii)
    np.testing.assert_array_equal(
        projector(TRION_SPACE, 0, 2) @ projector(TRION_SPACE, 2, 0), projector(TRION_SPACE, 0, 0)
    )


@pytest.mark.parametrize("ij", [(3, 0), (0, -1), (5, 5)])
def test_projector_out_of_range(ij):
    with pytest.raises(ValueError):
        projector(TRION_SPACE, *ij)


def test_kron_identity_and_blocks():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))
    rng = np.random.default_rng(1)
    a, b = random_complex(rng, 2, 3), random_complex(rng, 4, 2)
    k = kron(a, b)
    assert k.shape == (8, 6)
    for p in range(2):
        for q in range(3):
            np.testing.assert_array_equal(k[4 * p:4 * p + 4, 2 * q:2 * q + 2], a[p, q] * b)


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_kron_trace_factorizes(seed):
    rng = np.random.default_rng(seed)
    a, b = random_complex(rng, 3, 3), random_complex(rng, 3, 3)
    k = kron(a, b)
    # elementwise oracle: diagonal of kron is a[i,i] * b[j,j]
    brute = sum(a[i, i] * b[j, j] for i in range(3) for j in range(3))
    assert abs(np.trace(k) - brute) <= 1e-12 * (1 + abs(brute))
    assert abs(np.trace(k) - np.trace(a) * np.trace(b)) <= 1e-12 * (1 + abs(brute))


@given(seeds, st.integers(1, 6), st.integers(1, 6), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_dagger_of_product(seed, n, m, k):
    rng = np.random.default_rng(seed)
    a, b = random_complex(rng, n, m), random_complex(rng, m, k)
    assert np.max(np.abs(dagger(a @ b) - dagger(b) @ dagger(a))) <= 1e-12
    np.testing.assert_array_equal(dagger(dagger(a)), a)


def test_is_hermitian():
    assert is_hermitian(np.array([[1, 1j], [-1j, 2]]))
    assert not is_hermitian(np.array([[1, 1j], [1j, 2]]))
    assert not is_hermitian(np.ones((2, 3)))


def test_solve_identity():
    b = np.array([1 + 2j, -3, 0.5j])
    np.testing.assert_allclose(solve_linear(np.eye(3), b), b, rtol=0, atol=1e-15)


def test_solve_random_9x9_residual():
    rng = np.random.default_rng(9)
    a = random_complex(rng, 9, 9) + 6 * np.eye(9)
    b = random_complex(rng, 9)
    x = solve_linear(a, b)
    assert np.max(np.abs(a @ x - b)) <= 1e-10 * (1 + np.max(np.abs(b)))


@given(seeds, st.integers(1, 256))
@settings(max_examples=25, deadline=None)
def test_solve_roundtrip_up_to_256(seed, n):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, n, n) + 2 * np.sqrt(n) * np.eye(n)
    x_true = random_complex(rng, n)
    x = solve_linear(a, a @ x_true)
    assert np.max(np.abs(x - x_true)) <= 1e-9 * (1 + np.max(np.abs(x_true)))


def test_solve_pivoting_needed():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(solve_linear(a, np.array([2.0, 3.0])), [3.0, 2.0])


@pytest.mark.parametrize("a", [np.zeros((3, 3)), np.array([[1.0, 2.0], [2.0, 4.0]])])
def test_solve_singular(a):
    with pytest.raises(SingularMatrixError):
        solve_linear(a, np.ones(a.shape[0]))


def test_eig_diagonal():
    w, v = eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(w, [1, 2, 3])


def test_eig_sigma_x():
    w, _ = eig_hermitian(np.array([[0, 1], [1, 0]]))
    np.testing.assert_allclose(w, [-1, 1], atol=1e-15)


@pytest.mark.parametrize("omega,delta", [(1.0, 0.0), (2.0, 1.5), (0.3, -4.0)])
def test_eig_driven_two_level_splitting(omega, delta):
    w, _ = eig_hermitian(np.array([[0, omega / 2], [omega / 2, -delta]]))
    # quadratic formula: roots of x^2 + delta x - omega^2/4
    disc = np.sqrt(delta**2 + omega**2)
    roots = sorted([(-delta - disc) / 2, (-delta + disc) / 2])
    np.testing.assert_allclose(w, roots, atol=1e-12)
    assert w[1] - w[0] == pytest.approx(np.hypot(omega, delta), abs=1e-12)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


@given(seeds, st.integers(1, 16))
@settings(max_examples=40, deadline=None)
def test_eig_reconstruction(seed, n):
    rng = np.random.default_rng(seed)
    m = random_complex(rng, n, n)
    a = m + dagger(m)
    w, v = eig_hermitian(a)
    assert np.all(np.diff(w) >= 0)
    norm = np.max(np.sum(np.abs(a), axis=1))
    assert np.max(np.abs(a @ v - v * w)) <= 1e-9 * max(norm, 1)
    assert np.max(np.abs(a - v @ np.diag(w) @ dagger(v))) <= 1e-9 * max(norm, 1)
    assert np.max(np.abs(dagger(v) @ v - np.eye(n))) <= 1e-9
