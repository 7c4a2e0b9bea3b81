"""Finite-dimensional Banach algebras and bimodules given by structure constants."""

import math
import re
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import linalg, optimize

from hyperbench.errors import DimensionMismatchError, InvalidGroupTableError, NoLocalUnitError
from hyperbench.findim.norms import NormedSpace, apply

AXIOM_TOL = 1e-12
RANK_TOL = 1e-9
LOCAL_UNIT_TOL = 1e-6


def _as_float_array(v) -> np.ndarray:
    arr = np.array(v, dtype=float)
    arr.flags.writeable = False
    return arr


def _scaled_tol(*arrays: np.ndarray) -> float:
    scale = max((float(np.abs(a).max()) for a in arrays if a.size), default=1.0)
    return AXIOM_TOL * max(1.0, scale * scale)


class AlgebraSpec(NormedSpace):
    """Basis products e_i e_j = sum_k structure[i, j, k] e_k."""

    structure: np.ndarray
    unit: Optional[np.ndarray] = None
    name: str = ""

    @field_validator("structure", "unit", mode="before")
    @classmethod
    def as_array(cls, v):
        return None if v is None else _as_float_array(v)

    @model_validator(mode="after")
    def check_axioms(self):
        d = self.dim
        if self.structure.shape != (d, d, d):
            raise DimensionMismatchError(f"structure must have shape {(d, d, d)}, got {self.structure.shape}")
        c = self.structure
        left = np.einsum("ijl,lkm->ijkm", c, c)
        right = np.einsum("jkl,ilm->ijkm", c, c)
        deviation = float(np.abs(left - right).max())
        if deviation > _scaled_tol(c):
            raise ValueError(f"structure constants are not associative (deviation {deviation:.3g})")
        if self.unit is not None:
            if self.unit.shape != (d,):
                raise DimensionMismatchError(f"unit must have shape {(d,)}, got {self.unit.shape}")
            eye = np.eye(d)
            as_left = np.einsum("i,ijk->jk", self.unit, c)
            as_right = np.einsum("j,ijk->ik", self.unit, c)
            if max(np.abs(as_left - eye).max(), np.abs(as_right - eye).max()) > _scaled_tol(c, self.unit):
                raise ValueError("unit is not a two-sided identity")
        return self

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", a, b, self.structure)

    def left_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix of x -> a x."""
        return np.einsum("i,ijk->kj", a, self.structure)

    def right_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix of x -> x a."""
        return np.einsum("j,ijk->ki", a, self.structure)

    @property
    def is_commutative(self) -> bool:
        c = self.structure
        return bool(np.abs(c - c.transpose(1, 0, 2)).max() <= _scaled_tol(c))


class BimoduleSpec(NormedSpace):
    """Actions a_i x_j = sum_k left[i, j, k] x_k and x_j a_i = sum_k right[j, i, k] x_k."""

    left: np.ndarray
    right: np.ndarray
    name: str = ""

    @field_validator("left", "right", mode="before")
    @classmethod
    def as_array(cls, v):
        return _as_float_array(v)

    @model_validator(mode="after")
    def check_shapes(self):
        m = self.dim
        if self.left.ndim != 3 or self.left.shape[1:] != (m, m):
            raise DimensionMismatchError(f"left action must have shape (d, {m}, {m}), got {self.left.shape}")
        d = self.left.shape[0]
        if self.right.shape != (m, d, m):
            raise DimensionMismatchError(f"right action must have shape {(m, d, m)}, got {self.right.shape}")
        return self

    @property
    def algebra_dim(self) -> int:
        return self.left.shape[0]

    def act_left(self, a: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", a, x, self.left)

    def act_right(self, x: np.ndarray, a: np.ndarray) -> np.ndarray:
        return np.einsum("j,i,jik->k", x, a, self.right)

    def left_matrices(self) -> np.ndarray:
        """Stack of matrices of x -> a_i x."""
        return self.left.transpose(0, 2, 1)

    def right_matrices(self) -> np.ndarray:
        """Stack of matrices of x -> x a_i."""
        return self.right.transpose(1, 2, 0)


class MultilinearMap(BaseModel):
    """T: A^(n) -> X as a tensor of shape (X.dim, d, ..., d); degree 0 is an element of X."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    degree: int = Field(ge=0)
    tensor: np.ndarray

    @field_validator("tensor", mode="before")
    @classmethod
    def as_array(cls, v):
        return _as_float_array(v)

    @model_validator(mode="after")
    def check_shape(self):
        if self.tensor.ndim != self.degree + 1:
            raise DimensionMismatchError(
                f"degree {self.degree} map needs a {self.degree + 1}-d tensor, got {self.tensor.ndim}-d"
            )
        if len(set(self.tensor.shape[1:])) > 1:
            raise DimensionMismatchError(f"argument axes differ in length: {self.tensor.shape}")
        return self

    @property
    def out_dim(self) -> int:
        return self.tensor.shape[0]

    @property
    def arg_dim(self) -> Optional[int]:
        return self.tensor.shape[1] if self.degree else None

    @property
    def flat(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def __call__(self, *args: np.ndarray) -> np.ndarray:
        if len(args) != self.degree:
            raise DimensionMismatchError(f"expected {self.degree} arguments, got {len(args)}")
        return apply(self.tensor, list(args))

    def _like(self, tensor: np.ndarray) -> "MultilinearMap":
        return MultilinearMap(degree=self.degree, tensor=tensor)

    def __add__(self, other: "MultilinearMap") -> "MultilinearMap":
        return self._like(self.tensor + other.tensor)

    def __sub__(self, other: "MultilinearMap") -> "MultilinearMap":
        return self._like(self.tensor - other.tensor)

    def __mul__(self, factor: float) -> "MultilinearMap":
        return self._like(self.tensor * factor)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, degree: int, out_dim: int, arg_dim: int) -> "MultilinearMap":
        return cls(degree=degree, tensor=np.zeros((out_dim,) + (arg_dim,) * degree))

    @classmethod
    def random(cls, degree: int, out_dim: int, arg_dim: int, rng: np.random.Generator) -> "MultilinearMap":
        return cls(degree=degree, tensor=rng.standard_normal((out_dim,) + (arg_dim,) * degree))


class SubspaceBasis(BaseModel):
    """A linearly independent family of maps of equal degree and shape."""

    degree: int = Field(ge=0)
    shape: tuple[int, ...]
    maps: list[MultilinearMap] = []

    @model_validator(mode="after")
    def check_independent(self):
        for T in self.maps:
            if T.degree != self.degree or T.tensor.shape != self.shape:
                raise DimensionMismatchError(f"basis map of shape {T.tensor.shape} does not match {self.shape}")
        if self.maps:
            s = np.linalg.svd(self.matrix, compute_uv=False)
            if s[-1] <= RANK_TOL * max(1.0, s[0]):
                raise ValueError("subspace basis is numerically rank deficient")
        return self

    @property
    def dim(self) -> int:
        return len(self.maps)

    @property
    def matrix(self) -> np.ndarray:
        """Basis maps as columns of a (prod(shape) x dim) matrix."""
        size = int(np.prod(self.shape))
        if not self.maps:
            return np.zeros((size, 0))
        return np.stack([T.flat for T in self.maps], axis=1)

    def combination(self, coeffs: np.ndarray) -> MultilinearMap:
        flat = self.matrix @ np.asarray(coeffs, dtype=float) if self.maps else np.zeros(int(np.prod(self.shape)))
        return MultilinearMap(degree=self.degree, tensor=flat.reshape(self.shape))

    def evaluate(self, args: list[np.ndarray]) -> np.ndarray:
        """Columns S_j(a_1, ..., a_n)."""
        if not self.maps:
            return np.zeros((self.shape[0], 0))
        return np.stack([apply(T.tensor, args) for T in self.maps], axis=1)

    @classmethod
    def from_columns(cls, columns: np.ndarray, degree: int, shape: tuple[int, ...]) -> "SubspaceBasis":
        maps = [MultilinearMap(degree=degree, tensor=col.reshape(shape)) for col in columns.T]
        return cls(degree=degree, shape=shape, maps=maps)


# --- factories ----------------------------------------------------------------------


def scalars(unital: bool = True) -> AlgebraSpec:
    """The one-dimensional algebra; with unital=False the unit is not declared."""
    return AlgebraSpec(
        dim=1, norm_kind="sup", structure=np.ones((1, 1, 1)), unit=np.ones(1) if unital else None, name="scalars"
    )


def commutative_sup(k: int) -> AlgebraSpec:
    """C^k with pointwise product and the sup norm."""
    c = np.zeros((k, k, k))
    for i in range(k):
        c[i, i, i] = 1.0
    return AlgebraSpec(dim=k, norm_kind="sup", structure=c, unit=np.ones(k), name=f"ck:{k}")


def matrix_algebra(n: int, p: float = 2.0) -> AlgebraSpec:
    """M_n with matrix units E_ab at index a*n + b and the operator p-norm."""
    d = n * n
    c = np.zeros((d, d, d))
    for a in range(n):
        for b in range(n):
            for e in range(n):
                # E_ab E_be = E_ae
                c[a * n + b, b * n + e, a * n + e] = 1.0
    return AlgebraSpec(
        dim=d, norm_kind="matrix_p", p=p, structure=c, unit=np.eye(n).reshape(-1), name=f"m{n}"
    )


def cyclic_group_table(k: int) -> np.ndarray:
    idx = np.arange(k)
    return (idx[:, None] + idx[None, :]) % k


def validate_group_table(table) -> np.ndarray:
    """Check that table[g, h] = gh is a group law; return it as an int array."""
    try:
        table = np.asarray(table, dtype=int)
    except (TypeError, ValueError) as exc:
        raise InvalidGroupTableError(f"group table is not an integer array: {exc}") from exc
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise InvalidGroupTableError(f"group table must be square, got shape {table.shape}")
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        raise InvalidGroupTableError("group table entries must lie in 0..n-1")
    full = np.arange(n)
    for axis in (0, 1):
        if not np.all(np.sort(table, axis=axis) == (full[:, None] if axis == 0 else full[None, :])):
            raise InvalidGroupTableError("group table is not a Latin square")
    identities = [e for e in range(n) if np.all(table[e] == full) and np.all(table[:, e] == full)]
    if not identities:
        raise InvalidGroupTableError("group table has no identity element")
    # (gh)k = g(hk)
    grouped_left = table[table[:, :, None], full[None, None, :]]
    grouped_right = table[full[:, None, None], table[None, :, :]]
    if not np.array_equal(grouped_left, grouped_right):
        raise InvalidGroupTableError("group table is not associative")
    return table


def group_identity(table: np.ndarray) -> int:
    full = np.arange(table.shape[0])
    return next(e for e in range(table.shape[0]) if np.all(table[e] == full))


def group_algebra(table, name: str = "") -> AlgebraSpec:
    """l1(G) with convolution delta_g * delta_h = delta_{gh}."""
    table = validate_group_table(table)
    n = table.shape[0]
    c = np.zeros((n, n, n))
    g, h = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    c[g, h, table] = 1.0
    unit = np.zeros(n)
    unit[group_identity(table)] = 1.0
    return AlgebraSpec(dim=n, norm_kind="group_l1", structure=c, unit=unit, name=name or f"l1g:{n}")


def cyclic_group_algebra(k: int) -> AlgebraSpec:
    return group_algebra(cyclic_group_table(k), name=f"l1z:{k}")


def regular_bimodule(A: AlgebraSpec) -> BimoduleSpec:
    """A as a bimodule over itself."""
    return BimoduleSpec(
        dim=A.dim, norm_kind=A.norm_kind, p=A.p, base=A.base, left=A.structure, right=A.structure, name=A.name
    )


def operator_bimodule(A: AlgebraSpec, X: BimoduleSpec) -> BimoduleSpec:
    """B(A, X) with (a.T)(b) = a T(b) and (T.a)(b) = T(ab) - T(a) b.

    A linear map T is stored as the coordinates T[k, j] of T(e_j), flattened row major.
    Carries the Hilbert-Schmidt norm on those coordinates.
    """
    _check_pair(A, X)
    d, m = A.dim, X.dim
    eye_d, eye_m = np.eye(d), np.eye(m)
    left = np.einsum("ikK,jJ->ikjKJ", X.left, eye_d).reshape(d, m * d, m * d)
    shift = np.einsum("ilj,kK->kjiKl", A.structure, eye_m)
    tail = np.einsum("ji,klK->kjiKl", eye_d, X.right)
    right = (shift - tail).reshape(m * d, d, m * d)
    return BimoduleSpec(
        dim=m * d, norm_kind="grid_custom", p=2.0, left=left, right=right, name=f"B({A.name},{X.name})"
    )


def _check_pair(A: AlgebraSpec, X: BimoduleSpec) -> None:
    if X.algebra_dim != A.dim:
        raise DimensionMismatchError(f"bimodule acts by a {X.algebra_dim}-dim algebra, got {A.dim}")


def check_module_axioms(A: AlgebraSpec, X: BimoduleSpec) -> float:
    """Largest deviation in a(bx) = (ab)x, (xa)b = x(ab), (ax)b = a(xb) over basis triples."""
    _check_pair(A, X)
    c = A.structure
    L, R = X.left_matrices(), X.right_matrices()
    lhs_l = np.einsum("iKk,jkl->ijKl", L, L)
    rhs_l = np.einsum("ijp,pKl->ijKl", c, L)
    lhs_r = np.einsum("jKk,ikl->ijKl", R, R)
    rhs_r = np.einsum("ijp,pKl->ijKl", c, R)
    lhs_m = np.einsum("jKk,ikl->ijKl", R, L)
    rhs_m = np.einsum("iKk,jkl->ijKl", L, R)
    deviation = max(
        float(np.abs(lhs_l - rhs_l).max()), float(np.abs(lhs_r - rhs_r).max()), float(np.abs(lhs_m - rhs_m).max())
    )
    if deviation > _scaled_tol(c, X.left, X.right):
        raise ValueError(f"module axioms fail (deviation {deviation:.3g})")
    return deviation


def unitize(A: AlgebraSpec) -> AlgebraSpec:
    """A# = A + C1 with norm ||a|| + |lambda|; the adjoined unit is the last coordinate."""
    d = A.dim
    c = np.zeros((d + 1, d + 1, d + 1))
    c[:d, :d, :d] = A.structure
    for i in range(d + 1):
        c[d, i, i] = 1.0
        c[i, d, i] = 1.0
    unit = np.zeros(d + 1)
    unit[d] = 1.0
    return AlgebraSpec(dim=d + 1, norm_kind="unitized", base=A.space(), structure=c, unit=unit, name=f"{A.name}#")


def unitize_bimodule(X: BimoduleSpec) -> BimoduleSpec:
    """X as a unital bimodule over A#: the adjoined unit acts as the identity."""
    d, m = X.algebra_dim, X.dim
    left = np.zeros((d + 1, m, m))
    left[:d] = X.left
    left[d] = np.eye(m)
    right = np.zeros((m, d + 1, m))
    right[:, :d] = X.right
    right[:, d] = np.eye(m)
    return BimoduleSpec(dim=m, norm_kind=X.norm_kind, p=X.p, base=X.base, left=left, right=right, name=X.name)


def sigma_extend(T: MultilinearMap, A: AlgebraSpec) -> MultilinearMap:
    """Extend T to A# so that it vanishes whenever an argument is the adjoined unit."""
    d, n = A.dim, T.degree
    if n and T.arg_dim != d:
        raise DimensionMismatchError(f"map takes {T.arg_dim}-dim arguments, algebra has dim {d}")
    tensor = np.zeros((T.out_dim,) + (d + 1,) * n)
    tensor[(slice(None),) + (slice(0, d),) * n] = T.tensor
    return MultilinearMap(degree=n, tensor=tensor)


# --- local units --------------------------------------------------------------------


class LocalUnitBound(BaseModel):
    value: float
    heuristic: bool
    unit: list[float]


def local_unit_bound(A: AlgebraSpec) -> LocalUnitBound:
    """Norm of a (local) unit of A.

    For a declared unit this is exact. Otherwise an element e with e a_j = a_j = a_j e on
    the basis is searched for and its norm minimized over the solution set; the result is
    flagged heuristic.
    """
    if A.unit is not None:
        return LocalUnitBound(value=A.norm(A.unit), heuristic=False, unit=A.unit.tolist())
    d, c = A.dim, A.structure
    # rows (j, k) of e -> e e_j and e -> e_j e
    system = np.vstack([c.transpose(1, 2, 0).reshape(d * d, d), c.transpose(0, 2, 1).reshape(d * d, d)])
    target = np.concatenate([np.eye(d).reshape(-1), np.eye(d).reshape(-1)])
    e0, *_ = np.linalg.lstsq(system, target, rcond=None)
    if np.abs(system @ e0 - target).max() > LOCAL_UNIT_TOL:
        raise NoLocalUnitError(f"no element acts as a unit on the basis of {A.name or 'the algebra'}")
    free = linalg.null_space(system, rcond=RANK_TOL)
    e = e0
    if free.size:
        res = optimize.minimize(lambda z: A.norm(e0 + free @ z), np.zeros(free.shape[1]), method="Powell")
        if A.norm(e0 + free @ res.x) < A.norm(e0):
            e = e0 + free @ res.x
    return LocalUnitBound(value=A.norm(e), heuristic=True, unit=e.tolist())


# --- text formats -------------------------------------------------------------------


def _content_lines(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def parse_algebra(text: str, name: str = "") -> AlgebraSpec:
    """Parse the structure-constant format.

    First line: the dimension. Then ``i j k value`` lines, a norm line
    (``sup``, ``group_l1``, ``matrix_p <p>`` or ``grid_custom <p>``) and optionally
    ``unit v_1 ... v_d``.
    """
    lines = _content_lines(text)
    if not lines:
        raise ValueError("empty algebra file")
    dim = int(lines[0].split()[-1])
    structure = np.zeros((dim, dim, dim))
    norm_kind, p, unit = "sup", 2.0, None
    for line in lines[1:]:
        tokens = line.split()
        head = tokens[0]
        if head in ("sup", "group_l1", "matrix_p", "grid_custom"):
            norm_kind = head
            if len(tokens) > 1:
                p = math.inf if tokens[1] in ("inf", "infinity") else float(tokens[1])
        elif head == "unit":
            unit = np.array([float(t) for t in tokens[1:]])
        elif len(tokens) == 4:
            i, j, k = (int(t) for t in tokens[:3])
            structure[i, j, k] = float(tokens[3])
        else:
            raise ValueError(f"cannot parse algebra line: {line!r}")
    return AlgebraSpec(dim=dim, norm_kind=norm_kind, p=p, structure=structure, unit=unit, name=name)


def load_algebra(path: Path) -> AlgebraSpec:
    path = Path(path)
    return parse_algebra(path.read_text(encoding="utf-8"), name=path.stem)


def parse_cayley_table(text: str) -> np.ndarray:
    rows = [[int(t) for t in line.split()] for line in _content_lines(text)]
    return validate_group_table(rows)


def load_cayley_table(path: Path) -> np.ndarray:
    return parse_cayley_table(Path(path).read_text(encoding="utf-8"))


def format_algebra(A: AlgebraSpec) -> str:
    """Inverse of parse_algebra."""
    lines = [str(A.dim)]
    for i, j, k in zip(*np.nonzero(A.structure)):
        lines.append(f"{i} {j} {k} {A.structure[i, j, k]:.17g}")
    if A.norm_kind in ("matrix_p", "grid_custom"):
        lines.append(f"{A.norm_kind} {'inf' if math.isinf(A.p) else f'{A.p:g}'}")
    else:
        lines.append(A.norm_kind)
    if A.unit is not None:
        lines.append("unit " + " ".join(f"{v:.17g}" for v in A.unit))
    return "\n".join(lines) + "\n"


_NAMED = re.compile(r"^(?P<kind>ck|m|l1z):?(?P<size>\d+)(?::(?P<p>[\d.]+|inf))?$")


def algebra_from_name(name: str) -> AlgebraSpec:
    """``scalars``, ``ck:<k>``, ``m<n>`` or ``m:<n>:<p>``, ``l1z:<k>``, or a path to an algebra file."""
    match = _NAMED.match(name)
    if name == "scalars":
        return scalars()
    if match:
        size = int(match["size"])
        if match["kind"] == "ck":
            return commutative_sup(size)
        if match["kind"] == "l1z":
            return cyclic_group_algebra(size)
        p = match["p"]
        return matrix_algebra(size, math.inf if p == "inf" else float(p) if p else 2.0)
    path = Path(name)
    if path.exists():
        return load_algebra(path)
    raise ValueError(f"unknown algebra {name!r}")
