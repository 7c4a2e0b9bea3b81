from pathlib import Path

import numpy as np
import pytest

from hyperbench.errors import DimensionMismatchError, InvalidGroupTableError, NoLocalUnitError
from hyperbench.findim.algebras import (
    AlgebraSpec,
    MultilinearMap,
    SubspaceBasis,
    algebra_from_name,
    check_module_axioms,
    commutative_sup,
    cyclic_group_algebra,
    format_algebra,
    group_algebra,
    load_algebra,
    load_cayley_table,
    local_unit_bound,
    matrix_algebra,
    operator_bimodule,
    parse_algebra,
    parse_cayley_table,
    regular_bimodule,
    scalars,
    sigma_extend,
    unitize,
    unitize_bimodule,
)
from hyperbench.findim.cochains import delta_n
from hyperbench.findim.norms import op_norm

SPECS = Path(__file__).resolve().parent.parent / "specs"


def test_matrix_algebra_multiplies_matrices():
    A = matrix_algebra(2)
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal(4), rng.standard_normal(4)
    assert np.allclose(A.mul(a, b), (a.reshape(2, 2) @ b.reshape(2, 2)).reshape(-1))
    assert np.allclose(A.left_matrix(a) @ b, A.mul(a, b))
    assert np.allclose(A.right_matrix(b) @ a, A.mul(a, b))
    assert not A.is_commutative


def test_group_algebra_convolves():
    A = cyclic_group_algebra(3)
    assert np.allclose(A.mul(np.eye(3)[1], np.eye(3)[2]), np.eye(3)[0])
    assert A.is_commutative
    assert A.norm(np.array([1.0, -2.0, 0.5])) == 3.5


def test_rejects_non_associative_structure():
    c = np.zeros((2, 2, 2))
    c[0, 0, 1] = 1.0
    c[1, 1, 0] = 1.0
    c[0, 1, 0] = 1.0
    with pytest.raises(ValueError):
        AlgebraSpec(dim=2, structure=c)


def test_rejects_false_unit():
    with pytest.raises(ValueError):
        AlgebraSpec(dim=2, structure=commutative_sup(2).structure, unit=np.array([1.0, 0.0]))


def test_rejects_bad_shape():
    with pytest.raises(ValueError):
        AlgebraSpec(dim=3, structure=np.zeros((2, 2, 2)))


@pytest.mark.parametrize(
    "table",
    [
        [[0, 1], [1, 1]],
        [[0, 1, 2], [1, 0, 2], [2, 2, 0]],
        [[0, 2, 1], [2, 1, 0], [1, 0, 2]],
        [[0, 1, 2], [1, 2, 3], [2, 3, 0]],
    ],
)
def test_invalid_group_tables(table):
    with pytest.raises(InvalidGroupTableError):
        group_algebra(table)


@pytest.mark.parametrize(
    "A", [commutative_sup(3), matrix_algebra(2), cyclic_group_algebra(4)], ids=lambda A: A.name
)
def test_module_axioms(A):
    assert check_module_axioms(A, regular_bimodule(A)) <= 1e-12
    assert check_module_axioms(A, operator_bimodule(A, regular_bimodule(A))) <= 1e-10


def test_operator_bimodule_actions():
    A = matrix_algebra(2)
    X = regular_bimodule(A)
    B = operator_bimodule(A, X)
    rng = np.random.default_rng(4)
    T = rng.standard_normal((4, 4))
    a, b = rng.standard_normal(4), rng.standard_normal(4)
    # (a.T)(b) = a T(b)
    aT = B.act_left(a, T.reshape(-1)).reshape(4, 4)
    assert np.allclose(aT @ b, A.mul(a, T @ b))
    # (T.a)(b) = T(ab) - T(a) b
    Ta = B.act_right(T.reshape(-1), a).reshape(4, 4)
    assert np.allclose(Ta @ b, T @ A.mul(a, b) - A.mul(T @ a, b))


def test_unitization():
    A = unitize(commutative_sup(2))
    assert A.dim == 3 and A.unit.tolist() == [0.0, 0.0, 1.0]
    assert A.norm(np.array([1.0, -2.0, 3.0])) == 5.0
    X = unitize_bimodule(regular_bimodule(commutative_sup(2)))
    assert check_module_axioms(A, X) <= 1e-12
    x = np.array([4.0, 5.0])
    assert np.allclose(X.act_left(A.unit, x), x) and np.allclose(X.act_right(x, A.unit), x)


def test_sigma_extend_vanishes_on_adjoined_unit():
    A = commutative_sup(2)
    T = MultilinearMap.random(2, 2, 2, np.random.default_rng(5))
    S = sigma_extend(T, A)
    e = unitize(A).unit
    assert np.allclose(S(e, np.array([1.0, 2.0, 0.0])), 0.0)
    assert np.allclose(S(np.array([1.0, 2.0, 0.0]), np.array([0.5, 1.0, 0.0])), T(np.array([1.0, 2.0]), np.array([0.5, 1.0])))


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("A", [commutative_sup(2), commutative_sup(3), cyclic_group_algebra(3)], ids=lambda A: A.name)
def test_coboundary_norm_grows_under_unitization(A, n):
    X = regular_bimodule(A)
    T = MultilinearMap.random(n, X.dim, A.dim, np.random.default_rng(n))
    left = op_norm(delta_n(T, A, X), A, X, seed=0)
    As, Xs = unitize(A), unitize_bimodule(X)
    extended = delta_n(sigma_extend(T, A), As, Xs)
    right = op_norm(extended, As, Xs, seed=0)
    assert left.value <= right.upper + 1e-9
    # on arguments from A the extended coboundary is the original one
    inner = extended.tensor[(slice(None),) + (slice(0, A.dim),) * (n + 1)]
    assert np.allclose(inner, delta_n(T, A, X).tensor)


def test_local_unit_bound():
    assert local_unit_bound(matrix_algebra(2)).value == pytest.approx(1.0)
    assert local_unit_bound(cyclic_group_algebra(3)).value == 1.0
    inferred = local_unit_bound(AlgebraSpec(dim=2, structure=commutative_sup(2).structure))
    assert inferred.heuristic
    assert inferred.value == pytest.approx(1.0)


def test_local_unit_missing():
    nilpotent = np.zeros((2, 2, 2))
    nilpotent[0, 0, 1] = 1.0
    with pytest.raises(NoLocalUnitError):
        local_unit_bound(AlgebraSpec(dim=2, structure=nilpotent))


def test_multilinear_map_shapes():
    with pytest.raises(ValueError):
        MultilinearMap(degree=2, tensor=np.zeros((2, 3)))
    T = MultilinearMap.zeros(1, 2, 3)
    with pytest.raises(DimensionMismatchError):
        T(np.ones(3), np.ones(3))
    assert (2 * MultilinearMap(degree=1, tensor=np.ones((2, 3)))).tensor.max() == 2.0


def test_subspace_basis_rejects_dependent_maps():
    T = MultilinearMap(degree=1, tensor=np.ones((2, 2)))
    with pytest.raises(ValueError):
        SubspaceBasis(degree=1, shape=(2, 2), maps=[T, T * 2.0])


def test_parse_and_format_agree():
    A = matrix_algebra(2)
    B = parse_algebra(format_algebra(A))
    assert np.array_equal(A.structure, B.structure)
    assert B.norm_kind == "matrix_p" and B.p == 2.0
    assert np.array_equal(A.unit, B.unit)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_algebra("2\n0 0 0\n")
    with pytest.raises(ValueError):
        parse_algebra("# only a comment\n")


def test_sample_files():
    assert np.array_equal(load_algebra(SPECS / "c2.alg").structure, commutative_sup(2).structure)
    assert np.array_equal(load_algebra(SPECS / "m2.alg").structure, matrix_algebra(2).structure)
    s3 = load_cayley_table(SPECS / "s3.cayley")
    assert not np.array_equal(s3, s3.T)
    assert np.array_equal(load_cayley_table(SPECS / "z4.cayley"), parse_cayley_table("0 1 2 3\n1 2 3 0\n2 3 0 1\n3 0 1 2"))


@pytest.mark.parametrize(
    "name, dim, kind",
    [("scalars", 1, "sup"), ("ck:3", 3, "sup"), ("m2", 4, "matrix_p"), ("m:2:inf", 4, "matrix_p"), ("l1z:4", 4, "group_l1")],
)
def test_algebra_from_name(name, dim, kind):
    A = algebra_from_name(name)
    assert (A.dim, A.norm_kind) == (dim, kind)


def test_algebra_from_unknown_name():
    with pytest.raises(ValueError):
        algebra_from_name("no-such-algebra")


def test_scalars_without_unit():
    assert scalars(unital=False).unit is None
