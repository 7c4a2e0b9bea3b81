import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbench.errors import DimensionMismatchError, SizeGuardError
from hyperbench.findim.algebras import (
    MultilinearMap,
    commutative_sup,
    cyclic_group_algebra,
    matrix_algebra,
    regular_bimodule,
)
from hyperbench.findim.cochains import (
    coboundary_matrix,
    coboundary_space,
    cocycle_space,
    delta_n,
    inner_derivation,
    lambda_check,
    lift_last_argument,
    normalize_cochain,
    star_actions,
)

ALGEBRAS = [commutative_sup(2), commutative_sup(3), matrix_algebra(2), cyclic_group_algebra(3)]
seeds = st.integers(min_value=0, max_value=2**31 - 1)


def test_first_coboundary_formula():
    A = matrix_algebra(2)
    X = regular_bimodule(A)
    rng = np.random.default_rng(0)
    T = MultilinearMap.random(1, 4, 4, rng)
    a, b = rng.standard_normal(4), rng.standard_normal(4)
    expected = A.mul(a, T(b)) - T(A.mul(a, b)) + A.mul(T(a), b)
    assert np.allclose(delta_n(T, A, X)(a, b), expected)


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: A.name)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_chain_complex(A, n):
    X = regular_bimodule(A)
    T = MultilinearMap.random(n, X.dim, A.dim, np.random.default_rng(n))
    square = delta_n(delta_n(T, A, X), A, X)
    assert np.abs(square.tensor).max() <= 1e-10


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: A.name)
@settings(max_examples=10, deadline=None)
@given(seed=seeds, n=st.integers(min_value=1, max_value=2))
def test_currying_intertwines_coboundaries(A, seed, n):
    X = regular_bimodule(A)
    T = MultilinearMap.random(n, X.dim, A.dim, np.random.default_rng(seed))
    assert lambda_check(T, A, X) <= 1e-10


def test_lift_last_argument_layout():
    T = MultilinearMap.random(2, 3, 2, np.random.default_rng(1))
    lifted = lift_last_argument(T)
    a, b = np.array([1.0, -2.0]), np.array([0.5, 3.0])
    # lifted(a) is the map b -> T(a, b), stored as a (3 x 2) matrix
    assert np.allclose(lifted(a).reshape(3, 2) @ b, T(a, b))
    with pytest.raises(ValueError):
        lift_last_argument(MultilinearMap(degree=0, tensor=np.ones(3)))


def test_cocycle_dimensions():
    M2 = matrix_algebra(2)
    assert cocycle_space(M2, regular_bimodule(M2), 1).dim == 3
    assert coboundary_space(M2, regular_bimodule(M2), 1).dim == 3
    C2 = commutative_sup(2)
    assert cocycle_space(C2, regular_bimodule(C2), 1).dim == 0


def test_coboundaries_are_cocycles():
    A = matrix_algebra(2)
    X = regular_bimodule(A)
    B = coboundary_space(A, X, 2)
    for S in B.maps:
        assert np.abs(delta_n(S, A, X).tensor).max() <= 1e-10


@given(seeds)
def test_inner_derivations(seed):
    A = matrix_algebra(2)
    X = regular_bimodule(A)
    rng = np.random.default_rng(seed)
    x, a, b = rng.standard_normal(4), rng.standard_normal(4), rng.standard_normal(4)
    D = inner_derivation(x, A, X)
    assert np.allclose(D(a), A.mul(a, x) - A.mul(x, a))
    assert np.allclose(D(A.mul(a, b)), A.mul(a, D(b)) + A.mul(D(a), b))


def test_star_actions_first_degree():
    A = matrix_algebra(2)
    X = regular_bimodule(A)
    rng = np.random.default_rng(2)
    T = MultilinearMap.random(1, 4, 4, rng)
    a, b = rng.standard_normal(4), rng.standard_normal(4)
    left, right = star_actions(a, T, A, X)
    assert np.allclose(left(b), A.mul(a, T(b)))
    assert np.allclose(right(b), T(A.mul(a, b)) - A.mul(T(a), b))
    with pytest.raises(DimensionMismatchError):
        star_actions(np.ones(3), T, A, X)


@pytest.mark.parametrize("A", [commutative_sup(3), matrix_algebra(2), cyclic_group_algebra(3)], ids=lambda A: A.name)
def test_normalized_cochain_vanishes_on_unit(A):
    rng = np.random.default_rng(3)
    T = normalize_cochain(MultilinearMap.random(2, A.dim, A.dim, rng), A)
    a = rng.standard_normal(A.dim)
    assert np.allclose(T(A.unit, a), 0.0)
    assert np.allclose(T(a, A.unit), 0.0)
    assert np.allclose(normalize_cochain(T, A).tensor, T.tensor)


def test_size_guard():
    A = matrix_algebra(3)
    with pytest.raises(SizeGuardError):
        coboundary_matrix(A, regular_bimodule(A), 3)


def test_mismatched_map_is_rejected():
    A = commutative_sup(2)
    with pytest.raises(DimensionMismatchError):
        delta_n(MultilinearMap.zeros(1, 3, 2), A, regular_bimodule(A))
