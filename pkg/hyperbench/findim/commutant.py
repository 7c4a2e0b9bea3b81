"""Regular representations of finite groups and hyperreflexivity of their commutants."""

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import linalg

from hyperbench import config
from hyperbench.constants import CVP_PRESET, BoundValue, commutant_bound, cvp_bound
from hyperbench.errors import DimensionMismatchError, SizeGuardError, UnsupportedNormError
from hyperbench.findim.algebras import (
    RANK_TOL,
    AlgebraSpec,
    MultilinearMap,
    SubspaceBasis,
    group_algebra,
    group_identity,
    validate_group_table,
)
from hyperbench.findim.distances import (
    BOUND_SLACK,
    RatioSample,
    dist_r_lower,
    dist_upper,
    judge_ratio,
    pointwise_distance,
    sample_seeds,
)
from hyperbench.findim.norms import NormedSpace, op_norm
from hyperbench.findim.zero_product import zero_product_pairs

MAX_GROUP = 64
PAIR_BUDGET = 16
POINTS_PER_SAMPLE = 4
MEMBERSHIP_SAMPLES = 8


class RegularRepresentation(BaseModel):
    """pi(delta_g) e_h = e_{gh} on l^p(G)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    algebra: AlgebraSpec
    rep: np.ndarray
    space: NormedSpace
    norm: float = 1.0

    def pi(self, a: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(a, dtype=float), self.rep, axes=1)


def regular_representation(table, p: float = 2.0) -> RegularRepresentation:
    """l1(G) and its left regular representation by translations on l^p(G)."""
    table = validate_group_table(table)
    n = table.shape[0]
    if n > MAX_GROUP:
        raise SizeGuardError(f"group of order {n} exceeds the limit {MAX_GROUP}")
    rep = np.zeros((n, n, n))
    g, h = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    rep[g, table, h] = 1.0
    space = NormedSpace(dim=n, norm_kind="grid_custom", p=p)
    # translations are isometries of every l^p, and the l1 ball is the hull of the delta_g
    return RegularRepresentation(algebra=group_algebra(table), rep=rep, space=space, norm=1.0)


def group_generators(table) -> list[int]:
    """A generating set chosen greedily in element order."""
    table = validate_group_table(table)
    span = {group_identity(table)}
    gens = []
    for g in range(table.shape[0]):
        if g in span:
            continue
        gens.append(g)
        span.add(g)
        while True:
            grown = span | {int(table[a, b]) for a in span for b in span}
            if grown == span:
                break
            span = grown
    return gens


def commutant(rep, dim: int) -> SubspaceBasis:
    """Basis of {L : P L = L P for every P in rep}, as degree-1 maps on a dim-dimensional space."""
    rep = np.asarray(rep, dtype=float)
    if rep.ndim == 2:
        rep = rep[None]
    if rep.shape[1:] != (dim, dim):
        raise DimensionMismatchError(f"representation matrices must be {dim} x {dim}, got {rep.shape[1:]}")
    if rep.shape[0] * dim**4 > config.SIZE_GUARD:
        raise SizeGuardError(f"commutant system has {rep.shape[0] * dim**4} entries, guard is {config.SIZE_GUARD}")
    eye = np.eye(dim)
    # row-major vec: vec(P L) = (P x I) vec L, vec(L P) = (I x P^T) vec L
    system = np.vstack([np.kron(P, eye) - np.kron(eye, P.T) for P in rep])
    kernel = linalg.null_space(system, rcond=RANK_TOL)
    return SubspaceBasis.from_columns(kernel, degree=1, shape=(dim, dim))


class CommutantReport(BaseModel):
    group_order: int
    p: float
    commutant_dim: int
    bound: BoundValue
    samples: list[RatioSample]
    pair_checks: int
    pair_violations: int
    pair_max_ratio: Optional[float] = None
    derivation_bound: BoundValue
    derivation_max_ratio: Optional[float] = None
    derivation_inconclusive: int
    membership: list[tuple[float, float]]

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
    def pair_status(self) -> Literal["pass", "fail", "inconclusive"]:
        if self.pair_checks == 0:
            return "inconclusive"
        if self.pair_violations == 0:
            return "pass"
        return "fail" if self.p == 2.0 else "inconclusive"

    @property
    def reflexive(self) -> bool:
        """Commutant members have vanishing local distance and vanishing distance."""
        return all(dr < 1e-9 and du < 1e-6 for du, dr in self.membership)


def _derivation_norm(T: np.ndarray, rr: RegularRepresentation, seed: int) -> float:
    """Upper bound on ||delta_T|| = sup over unit b of ||T pi(b) - pi(b) T||, attained at some delta_g."""
    X = rr.space
    return max(op_norm(T @ P - P @ T, X, X, seed=seed).upper for P in rr.rep)


def commutant_hyperref_check(
    table, p: float = 2.0, samples: int = 200, seed: int = 0, budget: Optional[int] = None
) -> CommutantReport:
    """Random T on l^p(G): dist to the commutant against dist_r, and the zero-product step behind the bound.

    For each zero-product pair (a, b) and unit x, ||pi(a) T pi(b) x|| <= alpha ||pi||^2 ||x|| ||a|| ||b||
    is checked with alpha the certified local distance, which includes the points pi(b) x.
    """
    rr = regular_representation(table, p)
    n = rr.space.dim
    X = rr.space
    S = commutant(rr.rep[group_generators(table)], n)
    bound = cvp_bound()
    try:
        pairs = zero_product_pairs(rr.algebra, budget=PAIR_BUDGET, seed=seed)
    except UnsupportedNormError:
        pairs = []
    strong_b = CVP_PRESET.C
    derivation_bound = commutant_bound(1.0, strong_b, CVP_PRESET.K, rr.norm)
    derivation_bound = derivation_bound.model_copy(
        update={"name": "derivation_norm_bound", "formula": "C*alpha*||pi||^2*K^2 per unit alpha, " + derivation_bound.formula}
    )

    out, membership = [], []
    checks = violations = derivation_inconclusive = 0
    pair_ratio: Optional[float] = None
    derivation_ratio: Optional[float] = None
    for index, rng in enumerate(sample_seeds(seed, samples)):
        T = MultilinearMap(degree=1, tensor=rng.standard_normal((n, n)))
        sub_seed = int(rng.integers(2**31))
        xs = [X.random_unit(rng) for _ in range(POINTS_PER_SAMPLE)]
        points = [(pair, x, rr.pi(pair.b) @ x) for pair in pairs for x in xs]

        du = dist_upper(T, S, X, X)
        alpha = dist_r_lower(T, S, X, X, budget=budget, seed=sub_seed)
        for _, _, y in points:
            ny = X.norm(y)
            if ny > 0:
                alpha = max(alpha, pointwise_distance(T.tensor @ (y / ny), S.evaluate([y / ny]), X))
        out.append(judge_ratio(index, du, alpha, bound.value))

        for pair, x, y in points:
            lhs = X.norm(rr.pi(pair.a) @ (T.tensor @ y))
            rhs = alpha * rr.norm**2 * X.norm(x) * rr.algebra.norm(pair.a) * rr.algebra.norm(pair.b)
            checks += 1
            if lhs > rhs * (1 + BOUND_SLACK) + 1e-12:
                violations += 1
            if rhs > 0:
                pair_ratio = max(pair_ratio or 0.0, lhs / rhs)

        if alpha > 0:
            ratio = _derivation_norm(T.tensor, rr, sub_seed) / (derivation_bound.value * alpha)
            derivation_ratio = max(derivation_ratio or 0.0, ratio)
            if ratio > 1 + BOUND_SLACK:
                derivation_inconclusive += 1

        if index < MEMBERSHIP_SAMPLES and S.dim:
            member = S.combination(rng.standard_normal(S.dim))
            membership.append((dist_upper(member, S, X, X), dist_r_lower(member, S, X, X, budget=budget, seed=sub_seed)))

    return CommutantReport(
        group_order=n,
        p=p,
        commutant_dim=S.dim,
        bound=bound,
        samples=out,
        pair_checks=checks,
        pair_violations=violations,
        pair_max_ratio=pair_ratio,
        derivation_bound=derivation_bound,
        derivation_max_ratio=derivation_ratio,
        derivation_inconclusive=derivation_inconclusive,
        membership=membership,
    )
