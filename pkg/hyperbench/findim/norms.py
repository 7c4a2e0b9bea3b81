"""Norm oracles for finite-dimensional spaces and operator norms of multilinear maps.

Every space knows how to evaluate its norm, maximize a linear functional over its unit
ball, produce a norming functional (subgradient) and, for polyhedral balls, list the
extreme points of the ball and of the dual ball. op_norm is exact whenever one of these
enumerations applies and falls back to alternating ascent otherwise.
"""

import itertools
import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import linalg

from hyperbench import config

NormKind = Literal["sup", "group_l1", "matrix_p", "grid_custom", "unitized"]

VERTEX_BUDGET = 200_000
MAX_SIGN_DIM = 16
ASCENT_TOL = 1e-8
ASCENT_MAX_ITER = 200


def _sign(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0, 1.0, -1.0)


def _dual_exponent(p: float) -> float:
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def sign_vectors(dim: int) -> np.ndarray:
    """All 2^dim vectors with entries +-1, one per row."""
    return np.array(list(itertools.product((1.0, -1.0), repeat=dim)))


class NormedSpace(BaseModel):
    """R^dim with one of the supported norms.

    ``sup`` and ``group_l1`` are the coordinate max and l1 norms, ``grid_custom`` the
    coordinate l^p norm, ``matrix_p`` the operator p-norm on n x n matrices stored row
    major, and ``unitized`` the norm ||a|| + |lambda| on base + one extra coordinate.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim: int = Field(ge=1)
    norm_kind: NormKind = "sup"
    p: float = 2.0
    base: Optional["NormedSpace"] = None

    @model_validator(mode="after")
    def check_norm(self):
        if self.norm_kind == "matrix_p":
            n = math.isqrt(self.dim)
            if n * n != self.dim:
                raise ValueError(f"matrix_p needs a square dimension, got {self.dim}")
            if self.p not in (1.0, 2.0, math.inf):
                raise ValueError(f"matrix_p supports p in {{1, 2, inf}}, got {self.p}")
        if self.norm_kind == "grid_custom" and self.p < 1.0:
            raise ValueError(f"grid_custom needs p >= 1, got {self.p}")
        if self.norm_kind == "unitized" and (self.base is None or self.base.dim != self.dim - 1):
            raise ValueError("unitized norm needs a base space of dimension dim - 1")
        return self

    @property
    def matrix_size(self) -> int:
        return math.isqrt(self.dim)

    @property
    def effective_p(self) -> float:
        """The coordinate exponent for the lp-type kinds."""
        if self.norm_kind == "sup":
            return math.inf
        if self.norm_kind == "group_l1":
            return 1.0
        return self.p

    @property
    def is_coordinate_lp(self) -> bool:
        return self.norm_kind in ("sup", "group_l1", "grid_custom")

    def space(self) -> "NormedSpace":
        """This norm as a plain NormedSpace."""
        return NormedSpace(dim=self.dim, norm_kind=self.norm_kind, p=self.p, base=self.base)

    # --- evaluation ---------------------------------------------------------------

    def norm(self, x: np.ndarray) -> float:
        return float(self.norm_many(np.asarray(x, dtype=float).reshape(self.dim, 1))[0])

    def norm_many(self, z: np.ndarray) -> np.ndarray:
        """Norms of the columns of z (shape dim x N)."""
        z = np.asarray(z, dtype=float)
        if self.is_coordinate_lp:
            return np.linalg.norm(z, ord=self.effective_p, axis=0)
        if self.norm_kind == "matrix_p":
            n = self.matrix_size
            mats = z.T.reshape(-1, n, n)
            return np.linalg.norm(mats, ord=self.p, axis=(1, 2))
        return self.base.norm_many(z[:-1]) + np.abs(z[-1])

    # --- oracles ------------------------------------------------------------------

    def lmo(self, g: np.ndarray) -> np.ndarray:
        """A unit-ball point maximizing <g, x>."""
        g = np.asarray(g, dtype=float)
        if self.is_coordinate_lp:
            p = self.effective_p
            if math.isinf(p):
                return _sign(g)
            if p == 1.0:
                x = np.zeros(self.dim)
                i = int(np.argmax(np.abs(g)))
                x[i] = 1.0 if g[i] >= 0 else -1.0
                return x
            q = _dual_exponent(p)
            gq = np.linalg.norm(g, ord=q)
            if gq == 0:
                return np.zeros(self.dim)
            return np.sign(g) * (np.abs(g) / gq) ** (q - 1.0)
        if self.norm_kind == "matrix_p":
            n = self.matrix_size
            G = g.reshape(n, n)
            if self.p == 2.0:
                U, _ = linalg.polar(G)
                return U.reshape(-1)
            X = np.zeros((n, n))
            if self.p == 1.0:
                rows = np.argmax(np.abs(G), axis=0)
                cols = np.arange(n)
                X[rows, cols] = _sign(G[rows, cols])
            else:
                cols = np.argmax(np.abs(G), axis=1)
                rows = np.arange(n)
                X[rows, cols] = _sign(G[rows, cols])
            return X.reshape(-1)
        xa = self.base.lmo(g[:-1])
        if float(g[:-1] @ xa) >= abs(g[-1]):
            return np.append(xa, 0.0)
        out = np.zeros(self.dim)
        out[-1] = 1.0 if g[-1] >= 0 else -1.0
        return out

    def dual_norm(self, g: np.ndarray) -> float:
        g = np.asarray(g, dtype=float)
        return float(g @ self.lmo(g))

    def subgradient(self, z: np.ndarray) -> np.ndarray:
        """A functional y with dual norm <= 1 and <y, z> = ||z||."""
        z = np.asarray(z, dtype=float)
        if not np.any(z):
            return np.zeros(self.dim)
        if self.is_coordinate_lp:
            p = self.effective_p
            if math.isinf(p):
                y = np.zeros(self.dim)
                i = int(np.argmax(np.abs(z)))
                y[i] = np.sign(z[i])
                return y
            if p == 1.0:
                return np.sign(z)
            zp = np.linalg.norm(z, ord=p)
            return np.sign(z) * (np.abs(z) / zp) ** (p - 1.0)
        if self.norm_kind == "matrix_p":
            n = self.matrix_size
            Z = z.reshape(n, n)
            Y = np.zeros((n, n))
            if self.p == 2.0:
                U, _, Vt = np.linalg.svd(Z)
                Y = np.outer(U[:, 0], Vt[0])
            elif self.p == 1.0:
                j = int(np.argmax(np.abs(Z).sum(axis=0)))
                Y[:, j] = np.sign(Z[:, j])
            else:
                i = int(np.argmax(np.abs(Z).sum(axis=1)))
                Y[i, :] = np.sign(Z[i, :])
            return Y.reshape(-1)
        return np.append(self.base.subgradient(z[:-1]), np.sign(z[-1]))

    # --- polyhedral structure -----------------------------------------------------

    def vertices(self) -> Optional[np.ndarray]:
        """Extreme points of the unit ball (rows), when the ball is an enumerable polytope."""
        if self.is_coordinate_lp:
            p = self.effective_p
            if math.isinf(p) and self.dim <= MAX_SIGN_DIM:
                return sign_vectors(self.dim)
            if p == 1.0:
                eye = np.eye(self.dim)
                return np.vstack([eye, -eye])
            return None
        if self.norm_kind == "matrix_p":
            if self.p == 2.0:
                return None
            n = self.matrix_size
            if (2 * n) ** n > VERTEX_BUDGET:
                return None
            # each column (p=1) or row (p=inf) ranges over the l1 vertices
            lines = np.vstack([np.eye(n), -np.eye(n)])
            out = []
            for choice in itertools.product(range(2 * n), repeat=n):
                M = np.stack([lines[c] for c in choice])
                out.append((M.T if self.p == 1.0 else M).reshape(-1))
            return np.array(out)
        base = self.base.vertices()
        if base is None:
            return None
        unit = np.zeros((2, self.dim))
        unit[0, -1], unit[1, -1] = 1.0, -1.0
        return np.vstack([np.hstack([base, np.zeros((base.shape[0], 1))]), unit])

    def dual_vertices(self) -> Optional[np.ndarray]:
        """Extreme points of the dual ball, so that ||z|| = max_w <w, z>."""
        if self.is_coordinate_lp:
            p = self.effective_p
            if math.isinf(p):
                eye = np.eye(self.dim)
                return np.vstack([eye, -eye])
            if p == 1.0 and self.dim <= MAX_SIGN_DIM:
                return sign_vectors(self.dim)
            return None
        if self.norm_kind == "unitized":
            base = self.base.dual_vertices()
            if base is None:
                return None
            rows = [np.append(w, s) for w in base for s in (1.0, -1.0)]
            return np.array(rows)
        return None

    # --- norm equivalence constants ------------------------------------------------

    def l2_to_norm(self) -> float:
        """c with ||z|| <= c ||z||_2."""
        if self.is_coordinate_lp:
            p = self.effective_p
            return self.dim ** max(0.0, (0.0 if math.isinf(p) else 1.0 / p) - 0.5)
        if self.norm_kind == "matrix_p":
            return 1.0 if self.p == 2.0 else math.sqrt(self.matrix_size)
        return math.hypot(self.base.l2_to_norm(), 1.0)

    def norm_to_l2(self) -> float:
        """t with ||z||_2 <= t ||z||."""
        if self.is_coordinate_lp:
            p = self.effective_p
            return self.dim ** max(0.0, 0.5 - (0.0 if math.isinf(p) else 1.0 / p))
        if self.norm_kind == "matrix_p":
            return math.sqrt(self.matrix_size)
        return max(self.base.norm_to_l2(), 1.0)

    def coordinate_bound(self) -> float:
        """sup of ||a||_inf over the unit ball."""
        return max(self.dual_norm(e) for e in np.eye(self.dim))

    def random_unit(self, rng: np.random.Generator) -> np.ndarray:
        x = rng.standard_normal(self.dim)
        return x / self.norm(x)


# --- multilinear evaluation ---------------------------------------------------------


def apply(tensor: np.ndarray, args: list[np.ndarray]) -> np.ndarray:
    """T(a_1, ..., a_k) for a coefficient tensor of shape (m, d, ..., d)."""
    out = tensor
    for a in reversed(args):
        out = np.tensordot(out, a, axes=([out.ndim - 1], [0]))
    return out


def apply_batch(tensor: np.ndarray, args: list[np.ndarray]) -> np.ndarray:
    """T evaluated on N argument tuples; each entry of args has shape (N, d). Returns (N, m)."""
    if not args:
        return tensor[None, :]
    out = np.tensordot(args[0], tensor, axes=([1], [1]))
    for a in args[1:]:
        out = np.einsum("nmj...,nj->nm...", out, a)
    return out


def _functional_in_slot(tensor: np.ndarray, y: np.ndarray, args: list[np.ndarray], slot: int) -> np.ndarray:
    """The linear functional a -> <y, T(..., a at slot, ...)>."""
    g = np.tensordot(y, tensor, axes=([0], [0]))
    for idx in reversed(range(len(args))):
        if idx != slot:
            g = np.tensordot(g, args[idx], axes=([idx], [0]))
    return g


class OpNorm(BaseModel):
    value: float
    upper: float
    exact: bool
    method: str


def _vertex_max(tensor: np.ndarray, vertices: np.ndarray, codomain: NormedSpace) -> float:
    out = tensor
    for _ in range(tensor.ndim - 1):
        out = np.tensordot(out, vertices, axes=([1], [1]))
    return float(codomain.norm_many(out.reshape(tensor.shape[0], -1)).max())


def _is_l2(space: NormedSpace) -> bool:
    return space.norm_kind == "grid_custom" and space.p == 2.0


def _exact_norm(tensor: np.ndarray, domain: NormedSpace, codomain: NormedSpace) -> Optional[tuple[float, str]]:
    k = tensor.ndim - 1
    if k == 1 and _is_l2(domain) and _is_l2(codomain):
        return float(np.linalg.norm(tensor, 2)), "spectral"
    vertices = domain.vertices()
    if vertices is not None and vertices.shape[0] ** k <= VERTEX_BUDGET:
        return _vertex_max(tensor, vertices, codomain), "vertices"
    if k == 1:
        duals = codomain.dual_vertices()
        if duals is not None and duals.shape[0] <= VERTEX_BUDGET:
            return max(domain.dual_norm(tensor.T @ w) for w in duals), "dual_vertices"
    return None


def upper_surrogate(tensor: np.ndarray, domain: NormedSpace, codomain: NormedSpace) -> float:
    """Cheap certified upper bound: the smaller of a flattening and an entrywise bound."""
    k = tensor.ndim - 1
    flat = tensor.reshape(tensor.shape[0], -1)
    flattening = codomain.l2_to_norm() * float(np.linalg.norm(flat, 2)) * domain.norm_to_l2() ** k
    entrywise = float(codomain.norm_many(flat).sum()) * domain.coordinate_bound() ** k
    return min(flattening, entrywise)


def _ascent(
    tensor: np.ndarray, domain: NormedSpace, codomain: NormedSpace, restarts: int, rng: np.random.Generator
) -> float:
    k = tensor.ndim - 1
    best = 0.0
    for _ in range(restarts):
        args = [domain.random_unit(rng) for _ in range(k)]
        value = codomain.norm(apply(tensor, args))
        for _ in range(ASCENT_MAX_ITER):
            previous = value
            for slot in range(k):
                y = codomain.subgradient(apply(tensor, args))
                args[slot] = domain.lmo(_functional_in_slot(tensor, y, args, slot))
            value = codomain.norm(apply(tensor, args))
            if value - previous <= ASCENT_TOL * max(previous, 1e-300):
                break
        best = max(best, value)
    return best


def op_norm(
    T,
    domain: NormedSpace,
    codomain: NormedSpace,
    method: Literal["auto", "ascent"] = "auto",
    restarts: Optional[int] = None,
    seed: int = 0,
) -> OpNorm:
    """sup ||T(a_1, ..., a_k)|| over unit arguments.

    Exact for polyhedral domains (vertex enumeration), for linear maps into a polyhedral
    codomain (dual vertices) and for l2 -> l2; otherwise an ascent lower bound paired with
    a certified upper surrogate.
    """
    tensor = np.asarray(getattr(T, "tensor", T), dtype=float)
    if tensor.ndim == 1:
        v = codomain.norm(tensor)
        return OpNorm(value=v, upper=v, exact=True, method="element")
    if not np.any(tensor):
        return OpNorm(value=0.0, upper=0.0, exact=True, method="zero")
    if method == "auto":
        exact = _exact_norm(tensor, domain, codomain)
        if exact is not None:
            return OpNorm(value=exact[0], upper=exact[0], exact=True, method=exact[1])
    restarts = config.DEFAULT_RESTARTS if restarts is None else restarts
    value = _ascent(tensor, domain, codomain, restarts, np.random.default_rng(seed))
    upper = max(value, upper_surrogate(tensor, domain, codomain))
    return OpNorm(value=value, upper=upper, exact=False, method="ascent")


def op_norm_upper(T, domain: NormedSpace, codomain: NormedSpace) -> float:
    """A certified upper bound on the operator norm without running any ascent."""
    tensor = np.asarray(getattr(T, "tensor", T), dtype=float)
    if tensor.ndim == 1:
        return codomain.norm(tensor)
    exact = _exact_norm(tensor, domain, codomain)
    if exact is not None:
        return exact[0]
    return upper_surrogate(tensor, domain, codomain)
