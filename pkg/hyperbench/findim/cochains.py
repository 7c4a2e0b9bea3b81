"""Hochschild cochains: the connecting maps, the module actions on cochains and cocycle spaces."""

import numpy as np
from scipy import linalg

from hyperbench import config
from hyperbench.errors import DimensionMismatchError, SizeGuardError
from hyperbench.findim.algebras import (
    RANK_TOL,
    AlgebraSpec,
    BimoduleSpec,
    MultilinearMap,
    SubspaceBasis,
    operator_bimodule,
)


def _check(T: MultilinearMap, A: AlgebraSpec, X: BimoduleSpec) -> None:
    if X.algebra_dim != A.dim:
        raise DimensionMismatchError(f"bimodule acts by a {X.algebra_dim}-dim algebra, got {A.dim}")
    if T.out_dim != X.dim:
        raise DimensionMismatchError(f"map takes values in a {T.out_dim}-dim space, bimodule has dim {X.dim}")
    if T.degree and T.arg_dim != A.dim:
        raise DimensionMismatchError(f"map takes {T.arg_dim}-dim arguments, algebra has dim {A.dim}")


def delta_n(T: MultilinearMap, A: AlgebraSpec, X: BimoduleSpec) -> MultilinearMap:
    """delta^n T (a_1..a_{n+1}) = a_1 T(a_2..) + sum_j (-1)^j T(.., a_j a_{j+1}, ..) + (-1)^{n+1} T(a_1..a_n) a_{n+1}.

    Degree 0 maps are elements x of X, with delta^0 x (a) = a x - x a.
    """
    _check(T, A, X)
    n = T.degree
    t = T.tensor
    # a_1 T(a_2, ...): result axes (k, i_1, i_2, ...)
    out = np.moveaxis(np.tensordot(X.left, t, axes=([1], [0])), 1, 0)
    for j in range(1, n + 1):
        merged = np.tensordot(t, A.structure, axes=([j], [2]))
        out = out + (-1) ** j * np.moveaxis(merged, [-2, -1], [j, j + 1])
    last = np.moveaxis(np.tensordot(t, X.right, axes=([0], [0])), -1, 0)
    out = out + (-1) ** (n + 1) * last
    return MultilinearMap(degree=n + 1, tensor=out)


def inner_derivation(x: np.ndarray, A: AlgebraSpec, X: BimoduleSpec) -> MultilinearMap:
    """ad_x: a -> a x - x a."""
    return delta_n(MultilinearMap(degree=0, tensor=np.asarray(x, dtype=float)), A, X)


def left_star(a: np.ndarray, T: MultilinearMap, X: BimoduleSpec) -> MultilinearMap:
    """(a * T)(a_1..a_n) = a T(a_1..a_n)."""
    La = np.einsum("i,ikK->Kk", a, X.left)
    return MultilinearMap(degree=T.degree, tensor=np.tensordot(La, T.tensor, axes=([1], [0])))


def right_star(T: MultilinearMap, a: np.ndarray, A: AlgebraSpec, X: BimoduleSpec) -> MultilinearMap:
    """(T * a)(a_1..a_n) = a T(a_1..a_n) - delta^n T (a, a_1, ..., a_n).

    For n = 1 this is T(a b) - T(a) b.
    """
    coboundary = delta_n(T, A, X).tensor
    fixed = np.tensordot(coboundary, a, axes=([1], [0]))
    return MultilinearMap(degree=T.degree, tensor=left_star(a, T, X).tensor - fixed)


def star_actions(a: np.ndarray, T: MultilinearMap, A: AlgebraSpec, X: BimoduleSpec) -> tuple[MultilinearMap, MultilinearMap]:
    """(a * T, T * a): the bimodule structure on n-cochains."""
    _check(T, A, X)
    a = np.asarray(a, dtype=float)
    if a.shape != (A.dim,):
        raise DimensionMismatchError(f"algebra element must have shape {(A.dim,)}, got {a.shape}")
    return left_star(a, T, X), right_star(T, a, A, X)


def lift_last_argument(T: MultilinearMap) -> MultilinearMap:
    """Curry the last argument: an n-cochain into X becomes an (n-1)-cochain into B(A, X)."""
    if T.degree < 1:
        raise ValueError("only maps of degree >= 1 can be curried")
    moved = np.moveaxis(T.tensor, -1, 1)
    m, d = moved.shape[0], moved.shape[1]
    return MultilinearMap(degree=T.degree - 1, tensor=moved.reshape((m * d,) + moved.shape[2:]))


def lambda_check(T: MultilinearMap, A: AlgebraSpec, X: BimoduleSpec) -> float:
    """Max deviation between currying delta T and the coboundary of the curried T over B(A, X)."""
    _check(T, A, X)
    curried_coboundary = lift_last_argument(delta_n(T, A, X))
    coboundary_of_curried = delta_n(lift_last_argument(T), A, operator_bimodule(A, X))
    return float(np.abs(curried_coboundary.tensor - coboundary_of_curried.tensor).max())


def coboundary_matrix(A: AlgebraSpec, X: BimoduleSpec, n: int) -> np.ndarray:
    """Matrix of delta^n on flattened coefficient tensors."""
    d, m = A.dim, X.dim
    cols = m * d**n
    rows = m * d ** (n + 1)
    if rows * cols > config.SIZE_GUARD:
        raise SizeGuardError(f"delta^{n} matrix has {rows * cols} entries, guard is {config.SIZE_GUARD}")
    shape = (m,) + (d,) * n
    matrix = np.empty((rows, cols))
    for col in range(cols):
        basis = np.zeros(cols)
        basis[col] = 1.0
        matrix[:, col] = delta_n(MultilinearMap(degree=n, tensor=basis.reshape(shape)), A, X).flat
    return matrix


def cocycle_space(A: AlgebraSpec, X: BimoduleSpec, n: int) -> SubspaceBasis:
    """Orthonormal basis of ker delta^n."""
    if n < 1:
        raise ValueError(f"cocycle degree must be >= 1, got {n}")
    if X.algebra_dim != A.dim:
        raise DimensionMismatchError(f"bimodule acts by a {X.algebra_dim}-dim algebra, got {A.dim}")
    kernel = linalg.null_space(coboundary_matrix(A, X, n), rcond=RANK_TOL)
    return SubspaceBasis.from_columns(kernel, degree=n, shape=(X.dim,) + (A.dim,) * n)


def coboundary_space(A: AlgebraSpec, X: BimoduleSpec, n: int) -> SubspaceBasis:
    """Orthonormal basis of the image of delta^{n-1} (inner derivations for n = 1)."""
    image = linalg.orth(coboundary_matrix(A, X, n - 1), rcond=RANK_TOL)
    return SubspaceBasis.from_columns(image, degree=n, shape=(X.dim,) + (A.dim,) * n)


def normalize_cochain(T: MultilinearMap, A: AlgebraSpec) -> MultilinearMap:
    """T(P a_1, ..., P a_n) with P a = a - phi(a) 1, so the result vanishes when any argument is 1.

    phi is the coordinate functional at the largest unit coordinate, scaled so phi(1) = 1.
    """
    if A.unit is None:
        raise ValueError("normalizing a cochain needs a unital algebra")
    i = int(np.argmax(np.abs(A.unit)))
    phi = np.zeros(A.dim)
    phi[i] = 1.0 / A.unit[i]
    P = np.eye(A.dim) - np.outer(A.unit, phi)
    out = T.tensor
    for axis in range(1, T.degree + 1):
        out = np.moveaxis(np.tensordot(out, P, axes=([axis], [0])), -1, axis)
    return MultilinearMap(degree=T.degree, tensor=out)
