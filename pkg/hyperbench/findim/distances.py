"""Distances to subspaces of multilinear maps and the hyperreflexivity checks built on them.

dist(T, S) = inf over S in S of ||T - S|| is estimated from above, and
dist_r(T, S) = sup over unit tuples of inf over S in S of ||T(a) - S(a)|| from below, so that
every reported ratio dist_upper / dist_r_lower over-estimates the true one.
"""

import itertools
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel
from scipy import linalg, optimize

from hyperbench import config
from hyperbench.constants import BoundValue, cocycle_norm_bound, cstar_group_constant, hyperref_bound
from hyperbench.errors import UnsupportedNormError
from hyperbench.findim.algebras import (
    RANK_TOL,
    AlgebraSpec,
    BimoduleSpec,
    MultilinearMap,
    SubspaceBasis,
    local_unit_bound,
)
from hyperbench.findim.cochains import cocycle_space, delta_n, normalize_cochain
from hyperbench.findim.norms import VERTEX_BUDGET, NormedSpace, apply, apply_batch, op_norm, op_norm_upper
from hyperbench.findim.zero_product import zero_product_chains, zero_product_strata, zero_product_sup

ZERO_DISTANCE = 1e-9
POSITIVE_DISTANCE = 1e-6
CANDIDATE_CAP = 96
CLIMB_SWEEPS = 2
PERTURBATION_STEPS = 24
PERTURBATION_SCALE = 0.1
BOUND_SLACK = 1e-9

Status = Literal["pass", "fail", "inconclusive", "skipped"]


# --- dist from above ----------------------------------------------------------------


def dist_upper(T: MultilinearMap, S: SubspaceBasis, A: NormedSpace, X: NormedSpace) -> float:
    """Certified upper bound on dist(T, S): the best certified norm of T - S found by descent."""
    tensor = np.asarray(T.tensor, dtype=float)
    if S.dim == 0:
        return op_norm_upper(tensor, A, X)
    basis = S.matrix

    def objective(c: np.ndarray) -> float:
        return op_norm_upper((T.flat - basis @ c).reshape(tensor.shape), A, X)

    start = basis.T @ T.flat
    best = min(objective(np.zeros(S.dim)), objective(start))
    res = optimize.minimize(objective, start, method="Powell", options={"xtol": 1e-10, "ftol": 1e-12, "maxiter": 4000})
    return min(best, objective(res.x))


# --- dist_r from below ----------------------------------------------------------------


def _projector_complement(V: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column span of V."""
    if V.size == 0:
        return np.eye(V.shape[0])
    return linalg.null_space(V.T, rcond=RANK_TOL)


def pointwise_distance(y: np.ndarray, V: np.ndarray, X: NormedSpace) -> float:
    """Certified lower bound on inf_c ||y - V c|| in X (exact up to rounding for l2 and polyhedral X).

    Any functional w with ||w||_* <= 1 and V^T w = 0 gives ||y - Vc|| >= <w, y>.
    """
    y = np.asarray(y, dtype=float)
    Q = _projector_complement(np.asarray(V, dtype=float))
    if Q.shape[1] == 0:
        return 0.0
    if X.norm_kind == "grid_custom" and X.p == 2.0:
        return float(np.linalg.norm(Q.T @ y))
    duals = X.dual_vertices()
    if duals is not None and duals.shape[0] <= VERTEX_BUDGET:
        return _dual_lp(y, V, Q, duals, X)
    return _dual_ascent(y, Q, X)


def _certify(w: np.ndarray, y: np.ndarray, Q: np.ndarray, X: NormedSpace) -> float:
    w = Q @ (Q.T @ w)
    dn = X.dual_norm(w)
    if dn <= 0:
        return 0.0
    return max(0.0, float(w @ y) / dn)


def _dual_lp(y: np.ndarray, V: np.ndarray, Q: np.ndarray, duals: np.ndarray, X: NormedSpace) -> float:
    """max <w, y> over w in conv(dual vertices) with V^T w = 0, as an LP in the weights."""
    n = duals.shape[0]
    A_eq = (duals @ V).T if V.size else None
    b_eq = np.zeros(V.shape[1]) if V.size else None
    res = optimize.linprog(
        -(duals @ y), A_ub=np.ones((1, n)), b_ub=[1.0], A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs"
    )
    if res.status != 0:
        return _dual_ascent(y, Q, X)
    return _certify(duals.T @ res.x, y, Q, X)


def _dual_ascent(y: np.ndarray, Q: np.ndarray, X: NormedSpace) -> float:
    def ratio(z: np.ndarray) -> float:
        return _certify(Q @ z, y, Q, X)

    z0 = Q.T @ y
    residual = Q @ z0
    starts = [z0, Q.T @ X.subgradient(residual)]
    start = max(starts, key=ratio)
    best = ratio(start)
    res = optimize.minimize(lambda z: -ratio(z), start, method="Powell", options={"xtol": 1e-10, "ftol": 1e-12})
    return max(best, ratio(res.x))


def argument_candidates(A: NormedSpace, rng: np.random.Generator, cap: int = CANDIDATE_CAP) -> np.ndarray:
    """Unit vectors (rows) of A at which local distances are tried first."""
    d = A.dim
    cands = [np.eye(d)]
    if A.norm_kind in ("sup", "grid_custom") and d <= 5:
        cands.append(np.array([v for v in itertools.product((0.0, 1.0, -1.0), repeat=d) if any(v)]))
    if A.norm_kind == "group_l1" and isinstance(A, AlgebraSpec):
        try:
            cands.extend(basis.T for basis in zero_product_strata(A))
        except UnsupportedNormError:
            pass
    if A.norm_kind == "matrix_p":
        n = A.matrix_size
        cands.append(np.eye(n).reshape(1, -1))
        if n <= 3:
            for perm in itertools.permutations(range(n)):
                P = np.eye(n)[list(perm)]
                cands.extend((P * np.array(signs)).reshape(1, -1) for signs in itertools.product((1.0, -1.0), repeat=n))
        if n == 2:
            for t in np.linspace(0.0, np.pi, 8, endpoint=False):
                c, s = np.cos(t), np.sin(t)
                cands.append(np.array([[c, -s, s, c], [c, s, s, -c]]))
    cands.append(rng.standard_normal((max(8, d), d)))
    rows = np.vstack(cands)
    rows = rows[np.any(rows != 0, axis=1)]
    rows = rows / A.norm_many(rows.T)[:, None]
    rows = np.unique(np.round(rows, 12), axis=0)
    if rows.shape[0] > cap:
        rows = rows[np.sort(rng.choice(rows.shape[0], cap, replace=False))]
    return rows


class LocalDistance(BaseModel):
    value: float
    args: list[list[float]]


def dist_r_search(
    T: MultilinearMap,
    S: SubspaceBasis,
    A: NormedSpace,
    X: NormedSpace,
    budget: Optional[int] = None,
    seed: int = 0,
    extra_candidates: Optional[np.ndarray] = None,
) -> LocalDistance:
    """The best unit tuple found for dist_r and its certified local distance."""
    budget = config.DEFAULT_BUDGET if budget is None else budget
    n = T.degree
    if n == 0:
        return LocalDistance(value=pointwise_distance(T.tensor, S.evaluate([]), X), args=[])
    rng = np.random.default_rng(seed)
    cands = argument_candidates(A, rng)
    if extra_candidates is not None and len(extra_candidates):
        extra = np.asarray(extra_candidates, dtype=float)
        extra = extra[np.any(extra != 0, axis=1)]
        cands = np.vstack([cands, extra / A.norm_many(extra.T)[:, None]])

    def local(args: list[np.ndarray]) -> float:
        return pointwise_distance(apply(T.tensor, args), S.evaluate(args), X)

    count = cands.shape[0]
    if count**n <= budget:
        tuples = list(itertools.product(range(count), repeat=n))
    else:
        tuples = [tuple(int(i) for i in rng.integers(count, size=n)) for _ in range(budget)]
    best_value, best_idx = -1.0, tuples[0]
    for idx in tuples:
        value = local([cands[i] for i in idx])
        if value > best_value:
            best_value, best_idx = value, idx
    args = [cands[i] for i in best_idx]

    for _ in range(CLIMB_SWEEPS):
        improved = False
        for slot in range(n):
            for row in cands:
                trial = args[:slot] + [row] + args[slot + 1 :]
                value = local(trial)
                if value > best_value * (1 + 1e-12):
                    best_value, args, improved = value, trial, True
        if not improved:
            break
    for _ in range(PERTURBATION_STEPS):
        slot = int(rng.integers(n))
        moved = args[slot] + PERTURBATION_SCALE * rng.standard_normal(A.dim)
        norm = A.norm(moved)
        if norm == 0:
            continue
        trial = args[:slot] + [moved / norm] + args[slot + 1 :]
        value = local(trial)
        if value > best_value:
            best_value, args = value, trial
    return LocalDistance(value=max(best_value, 0.0), args=[a.tolist() for a in args])


def dist_r_lower(
    T: MultilinearMap,
    S: SubspaceBasis,
    A: NormedSpace,
    X: NormedSpace,
    budget: Optional[int] = None,
    seed: int = 0,
    extra_candidates: Optional[np.ndarray] = None,
) -> float:
    """Certified lower bound on dist_r(T, S) = sup_{unit a} inf_{S} ||T(a) - S(a)||."""
    return dist_r_search(T, S, A, X, budget=budget, seed=seed, extra_candidates=extra_candidates).value


# --- hyperreflexivity ratios ----------------------------------------------------------


class RatioSample(BaseModel):
    index: int
    dist_upper: float
    dist_r_lower: float
    ratio: Optional[float] = None
    open_mapping_ratio: Optional[float] = None
    status: Status


def judge_ratio(index: int, du: float, dr: float, bound: float) -> RatioSample:
    """Both distances ~0 skips the sample; a vanishing dist_r or an excess ratio is inconclusive."""
    if dr < ZERO_DISTANCE:
        status = "skipped" if du <= POSITIVE_DISTANCE else "inconclusive"
        return RatioSample(index=index, dist_upper=du, dist_r_lower=dr, status=status)
    ratio = du / dr
    status = "pass" if ratio <= bound * (1 + BOUND_SLACK) else "inconclusive"
    return RatioSample(index=index, dist_upper=du, dist_r_lower=dr, ratio=ratio, status=status)


class RatioReport(BaseModel):
    algebra: str
    module: str
    degree: int
    bound: BoundValue
    samples: list[RatioSample]

    @property
    def conclusive(self) -> list[RatioSample]:
        return [s for s in self.samples if s.status == "pass"]

    @property
    def max_ratio(self) -> Optional[float]:
        ratios = [s.ratio for s in self.conclusive]
        return max(ratios) if ratios else None

    @property
    def inconclusive(self) -> int:
        return sum(s.status == "inconclusive" for s in self.samples)

    @property
    def skipped(self) -> int:
        return sum(s.status == "skipped" for s in self.samples)


def sample_seeds(seed: int, samples: int) -> list[np.random.Generator]:
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(samples)]


def hyperref_ratio(
    A: AlgebraSpec,
    X: BimoduleSpec,
    n: int,
    samples: int,
    seed: int = 0,
    budget: Optional[int] = None,
    C: float = 1.0,
) -> RatioReport:
    """dist_upper / dist_r_lower against the cocycle hyperreflexivity bound for random n-cochains."""
    Z = cocycle_space(A, X, n)
    bound = hyperref_bound(n, local_unit_bound(A).value, cstar_group_constant().value, C)
    out = []
    for index, rng in enumerate(sample_seeds(seed, samples)):
        T = MultilinearMap.random(n, X.dim, A.dim, rng)
        sub_seed = int(rng.integers(2**31))
        du = dist_upper(T, Z, A, X)
        dr = dist_r_lower(T, Z, A, X, budget=budget, seed=sub_seed)
        sample = judge_ratio(index, du, dr, bound.value)
        coboundary = op_norm(delta_n(T, A, X), A, X, restarts=4, seed=sub_seed).value
        if coboundary > ZERO_DISTANCE:
            sample = sample.model_copy(update={"open_mapping_ratio": du / coboundary})
        out.append(sample)
    return RatioReport(algebra=A.name, module=X.name, degree=n, bound=bound, samples=out)


# --- norm bounds for cocycles and derivations ------------------------------------------


class NormBoundCheck(BaseModel):
    """A certified bracket on a norm against a bound built from a zero-product supremum."""

    name: str
    norm_lower: float
    norm_upper: float
    zero_product_value: float
    zero_product_exact: bool
    bound: BoundValue
    status: Status


def _judge_norm(name: str, lower: float, upper: float, sup_value: float, exact: bool, bound: BoundValue) -> NormBoundCheck:
    limit = bound.value * (1 + BOUND_SLACK) + 1e-12
    if upper <= limit:
        status = "pass"
    elif exact and lower > limit:
        status = "fail"
    else:
        status = "inconclusive"
    return NormBoundCheck(
        name=name,
        norm_lower=lower,
        norm_upper=upper,
        zero_product_value=sup_value,
        zero_product_exact=exact,
        bound=bound,
        status=status,
    )


def _require_unital(A: AlgebraSpec, X: BimoduleSpec) -> None:
    if A.unit is None:
        raise ValueError("the cocycle bound needs a unital algebra")
    m = X.dim
    left = np.tensordot(A.unit, X.left, axes=1)
    right = np.tensordot(X.right, A.unit, axes=([1], [0]))
    if np.abs(left - np.eye(m)).max() > 1e-10 or np.abs(right - np.eye(m)).max() > 1e-10:
        raise ValueError("the cocycle bound needs a unital bimodule")


def chain_gamma(T: MultilinearMap, A: AlgebraSpec, X: BimoduleSpec, budget: Optional[int] = None, seed: int = 0) -> tuple[float, bool]:
    """sup ||a_0 T(a_1, ..., a_n) a_{n+1}|| over unit chains with a_i a_{i+1} = 0."""
    n = T.degree
    positions, exact = zero_product_chains(A, n + 2, budget=budget, seed=seed)
    if not len(positions[0]):
        return 0.0, exact
    values = apply_batch(T.tensor, positions[1 : n + 1])
    values = np.einsum("ni,ikK,nk->nK", positions[0], X.left, values)
    values = np.einsum("nk,kiK,ni->nK", values, X.right, positions[n + 1])
    return float(X.norm_many(values.T).max()), exact


def cocycle_bound_check(
    T: MultilinearMap,
    A: AlgebraSpec,
    X: BimoduleSpec,
    r: float,
    budget: Optional[int] = None,
    seed: int = 0,
) -> NormBoundCheck:
    """||delta^n T|| against 2^(n-1) r^(n+1) gamma for T normalized to vanish on the unit."""
    _require_unital(A, X)
    Tn = normalize_cochain(T, A)
    gamma, exact = chain_gamma(Tn, A, X, budget=budget, seed=seed)
    norm = op_norm(delta_n(Tn, A, X), A, X, seed=seed)
    return _judge_norm(
        "cocycle_norm", norm.value, norm.upper, gamma, exact, cocycle_norm_bound(Tn.degree, r, gamma)
    )


def derivation_defect_check(
    D: MultilinearMap,
    A: AlgebraSpec,
    X: BimoduleSpec,
    r: float,
    budget: Optional[int] = None,
    seed: int = 0,
) -> NormBoundCheck:
    """sup ||D(ab)c - D(a)bc|| against r alpha_D, where alpha_D = sup ||D(a)b|| over ab = 0."""
    if D.degree != 1:
        raise ValueError(f"a derivation-like map has degree 1, got {D.degree}")
    d_tensor, c, right = D.tensor, A.structure, X.right
    # (a, b) -> D(a) b
    d_times = np.einsum("ki,kjK->Kij", d_tensor, right)
    alpha = zero_product_sup(d_times, A, codomain=X, budget=budget, seed=seed)
    # (a, b, c) -> D(ab) c and D(a) b c
    d_of_product = np.einsum("kp,ijp->kij", d_tensor, c)
    first = np.einsum("kij,klK->Kijl", d_of_product, right)
    second = np.einsum("Mij,MlK->Kijl", d_times, right)
    norm = op_norm(first - second, A, X, seed=seed)
    bound = BoundValue(name="derivation_defect_bound", value=r * alpha.value, formula=f"r*alpha_D, r={r:g}, alpha_D={alpha.value:g}")
    return _judge_norm("derivation_defect", norm.value, norm.upper, alpha.value, alpha.exact, bound)
