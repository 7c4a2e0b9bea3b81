"""Zero-product pairs, alpha(phi) and estimates of the strong-(B) constant.

Supported algebras are commutative and semisimple with an explicit Gelfand transform:
sup-normed pointwise algebras C^k and l1 of finite abelian groups. Their zero-product
pairs are exactly the pairs with disjoint Gelfand supports, which makes every
zero-product set a finite union of products of subspaces (strata).
"""

import itertools
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import optimize
from scipy.spatial import ConvexHull

from hyperbench import config
from hyperbench.errors import UnsupportedNormError
from hyperbench.findim.algebras import AlgebraSpec, commutative_sup
from hyperbench.findim.norms import NormedSpace

ZERO_PRODUCT_TOL = 1e-12
CHARACTER_TOL = 1e-8
PAIR_BUDGET = 1_000_000
TRIPLE_VERTEX_CAP = 64
MAX_ROUNDS = 20


# --- Gelfand structure --------------------------------------------------------------


def characters(A: AlgebraSpec) -> np.ndarray:
    """Rows are the characters of A evaluated on the basis, so a -> F a is the Gelfand transform."""
    if A.norm_kind == "sup":
        if A.structure.shape != (A.dim,) * 3 or np.abs(A.structure - commutative_sup(A.dim).structure).max() > CHARACTER_TOL:
            raise UnsupportedNormError("sup-normed algebras must be pointwise (C^k) for zero-product generation")
        return np.eye(A.dim, dtype=complex)
    if A.norm_kind != "group_l1":
        raise UnsupportedNormError(f"zero-product generation is not supported for norm kind {A.norm_kind!r}")
    if not A.is_commutative:
        raise UnsupportedNormError("zero-product generation needs a commutative group algebra")
    d = A.dim
    lefts = np.stack([A.left_matrix(e) for e in np.eye(d)])
    rng = np.random.default_rng(20240611)
    for _ in range(8):
        generic = np.tensordot(rng.standard_normal(d), lefts, axes=1)
        _, vecs = np.linalg.eig(generic)
        # eigenvalue of L_g on the common eigenvector v is chi(g)
        chars = np.einsum("iv,gij,jv->vg", vecs.conj(), lefts, vecs) / np.einsum("iv,iv->v", vecs.conj(), vecs)[:, None]
        distinct = min(
            (np.abs(chars[i] - chars[j]).max() for i, j in itertools.combinations(range(d), 2)), default=1.0
        )
        if distinct > CHARACTER_TOL:
            return chars
    raise UnsupportedNormError("could not separate the characters of the group algebra")


def zero_product_strata(A: AlgebraSpec) -> list[np.ndarray]:
    """Real minimal ideals of A, each as an orthonormal basis (d x r, r in {1, 2})."""
    F = characters(A)
    idempotents = np.linalg.inv(F)
    strata, used = [], set()
    for i in range(F.shape[0]):
        if i in used:
            continue
        used.add(i)
        e = idempotents[:, i]
        if np.abs(F[i].imag).max() <= CHARACTER_TOL:
            vecs = [e.real]
        else:
            partner = next(
                j for j in range(F.shape[0]) if j not in used and np.abs(F[j] - F[i].conj()).max() <= CHARACTER_TOL
            )
            used.add(partner)
            vecs = [e.real, e.imag]
        basis, _ = np.linalg.qr(np.stack(vecs, axis=1))
        strata.append(basis)
    return strata


def cuts(count: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All splits of range(count) into two nonempty parts, ordered."""
    out = []
    for mask in range(1, 2**count - 1):
        S = tuple(i for i in range(count) if mask >> i & 1)
        out.append((S, tuple(i for i in range(count) if not mask >> i & 1)))
    return out


def span_of(strata: list[np.ndarray], S: tuple[int, ...]) -> np.ndarray:
    return np.hstack([strata[i] for i in S])


def restricted_ball_vertices(space: NormedSpace, basis: np.ndarray) -> Optional[np.ndarray]:
    """Extreme points (rows, in ambient coordinates) of the unit ball intersected with span(basis).

    The restricted ball is {y : <g_j, y> <= 1} with g_j = basis^T w_j over the dual-ball
    vertices w_j; its vertices are the polars of the facets of conv{g_j}.
    """
    duals = space.dual_vertices()
    if duals is None:
        return None
    g = duals @ basis
    if basis.shape[1] == 1:
        t = 1.0 / np.abs(g).max()
        return np.vstack([t * basis[:, 0], -t * basis[:, 0]])
    g = np.unique(np.round(g, 12), axis=0)
    hull = ConvexHull(g)
    normals, offsets = hull.equations[:, :-1], hull.equations[:, -1]
    ys = np.unique(np.round(normals / (-offsets[:, None]), 12), axis=0)
    return ys @ basis.T


# --- zero-product pairs -------------------------------------------------------------


class ZeroProductPair(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    a: np.ndarray
    b: np.ndarray
    stratum: tuple[tuple[int, ...], tuple[int, ...]]


def _canonical(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > CHARACTER_TOL)
    return -v if nz.size and v[nz[0]] < 0 else v


def zero_product_pairs(A: AlgebraSpec, budget: Optional[int] = None, seed: int = 0) -> list[ZeroProductPair]:
    """Unit-norm pairs (a, b) with ab = 0.

    One representative per split of the strata comes first, then random elements of the
    split subspaces up to the budget.
    """
    budget = config.DEFAULT_BUDGET if budget is None else budget
    strata = zero_product_strata(A)
    splits = cuts(len(strata))
    rng = np.random.default_rng(seed)
    candidates = []
    for S, T in splits:
        a = _canonical(sum(strata[i][:, 0] for i in S))
        b = _canonical(sum(strata[i][:, 0] for i in T))
        candidates.append((a, b, (S, T)))
    while splits and len(candidates) < budget:
        S, T = splits[int(rng.integers(len(splits)))]
        Ea, Eb = span_of(strata, S), span_of(strata, T)
        candidates.append((Ea @ rng.standard_normal(Ea.shape[1]), Eb @ rng.standard_normal(Eb.shape[1]), (S, T)))
    pairs = []
    for a, b, stratum in candidates[:budget]:
        na, nb = A.norm(a), A.norm(b)
        if na == 0 or nb == 0:
            continue
        a, b = a / na, b / nb
        if A.norm(A.mul(a, b)) <= ZERO_PRODUCT_TOL:
            pairs.append(ZeroProductPair(a=a, b=b, stratum=stratum))
    return pairs


# --- alpha --------------------------------------------------------------------------


class AlphaEstimate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: float
    exact: bool
    a: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None


def _pair_values(tensor: np.ndarray, Va: np.ndarray, Vb: np.ndarray, codomain: Optional[NormedSpace]) -> np.ndarray:
    vals = np.einsum("pi,mij,qj->mpq", Va, tensor, Vb)
    if codomain is None:
        return np.abs(vals[0])
    m = vals.shape[0]
    return codomain.norm_many(vals.reshape(m, -1)).reshape(vals.shape[1:])


def zero_product_sup(
    tensor: np.ndarray,
    A: AlgebraSpec,
    codomain: Optional[NormedSpace] = None,
    budget: Optional[int] = None,
    seed: int = 0,
) -> AlphaEstimate:
    """sup ||B(a, b)|| over unit pairs with ab = 0, for a bilinear B of shape (m, d, d).

    With codomain None, B is scalar valued (m = 1) and |.| is used. Exact by vertex
    enumeration on each split; falls back to random sampling when the restricted balls
    are not enumerable.
    """
    budget = config.DEFAULT_BUDGET if budget is None else budget
    tensor = np.asarray(tensor, dtype=float)
    if tensor.ndim == 2:
        tensor = tensor[None]
    strata = zero_product_strata(A)
    splits = cuts(len(strata))
    if not splits:
        return AlphaEstimate(value=0.0, exact=True)
    vertex_sets = []
    for S, T in splits:
        Va = restricted_ball_vertices(A, span_of(strata, S))
        Vb = restricted_ball_vertices(A, span_of(strata, T))
        vertex_sets.append((Va, Vb))
    enumerable = all(Va is not None and Vb is not None for Va, Vb in vertex_sets) and sum(
        Va.shape[0] * Vb.shape[0] for Va, Vb in vertex_sets
    ) <= PAIR_BUDGET
    best, arg = 0.0, (None, None)
    if enumerable:
        for Va, Vb in vertex_sets:
            vals = _pair_values(tensor, Va, Vb, codomain)
            p, q = np.unravel_index(int(np.argmax(vals)), vals.shape)
            if vals[p, q] > best:
                best, arg = float(vals[p, q]), (Va[p], Vb[q])
        # complex characters have zero products that no real pair reaches
        real_type = all(basis.shape[1] == 1 for basis in strata)
        return AlphaEstimate(value=best, exact=real_type, a=arg[0], b=arg[1])
    for pair in zero_product_pairs(A, budget=budget, seed=seed):
        val = float(_pair_values(tensor, pair.a[None], pair.b[None], codomain)[0, 0])
        if val > best:
            best, arg = val, (pair.a, pair.b)
    return AlphaEstimate(value=best, exact=False, a=arg[0], b=arg[1])


def alpha_of_phi(phi, A: AlgebraSpec, budget: Optional[int] = None, seed: int = 0) -> AlphaEstimate:
    """alpha(phi) = sup |phi(a, b)| over unit pairs with ab = 0, for phi(a, b) = a^T Phi b."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (A.dim, A.dim):
        raise ValueError(f"bilinear form must have shape {(A.dim, A.dim)}, got {phi.shape}")
    return zero_product_sup(phi, A, budget=budget, seed=seed)


# --- zero-product chains ------------------------------------------------------------


def zero_product_chains(
    A: AlgebraSpec, length: int, budget: Optional[int] = None, seed: int = 0
) -> tuple[list[np.ndarray], bool]:
    """Unit tuples (a_0, ..., a_{length-1}) with a_i a_{i+1} = 0, stacked per position.

    For C^k every chain of cube vertices on disjoint consecutive supports is listed, which
    reaches the supremum of any multilinear expression; the flag reports that. Group
    algebras are sampled.
    """
    budget = config.DEFAULT_BUDGET if budget is None else budget
    strata = zero_product_strata(A)
    if A.norm_kind == "sup":
        d = A.dim
        ternary = np.array([v for v in itertools.product((0.0, 1.0, -1.0), repeat=d) if any(v)])
        support = ternary != 0
        allowed = ~(support[:, None, :] & support[None, :, :]).any(axis=2)
        chains = np.arange(len(ternary))[:, None]
        for _ in range(length - 1):
            nxt = [np.column_stack([np.repeat(row[None], allowed[row[-1]].sum(), 0), np.flatnonzero(allowed[row[-1]])])
                   for row in chains]
            chains = np.vstack(nxt) if nxt else chains[:0]
            if len(chains) == 0:
                # no two nonzero vectors multiply to zero
                return [np.zeros((0, d)) for _ in range(length)], True
            if len(chains) > PAIR_BUDGET:
                break
        else:
            return [ternary[chains[:, i]] for i in range(length)], True
    count = len(strata)
    if count < 2:
        return [np.zeros((0, A.dim)) for _ in range(length)], True
    rng = np.random.default_rng(seed)
    positions = [[] for _ in range(length)]
    for _ in range(budget):
        previous: set[int] = set()
        for i in range(length):
            free = [c for c in range(count) if c not in previous]
            chosen = [c for c in free if rng.random() < 0.5] or [free[int(rng.integers(len(free)))]]
            # the next element needs a stratum left over
            if len(chosen) == count:
                chosen.pop(int(rng.integers(count)))
            E = span_of(strata, tuple(chosen))
            v = E @ rng.standard_normal(E.shape[1])
            positions[i].append(v / A.norm(v))
            previous = set(chosen)
    return [np.array(p) for p in positions], False


# --- strong property (B) ------------------------------------------------------------


class StrongBEstimate(BaseModel):
    value: float
    defect: float
    alpha_upper: float
    restarts: int
    psi_real: list[list[float]]
    psi_imag: list[list[float]]


def _triple_candidates(A: AlgebraSpec, rng: np.random.Generator) -> np.ndarray:
    """Unit vectors at which the triple maximum is searched (rows)."""
    if A.norm_kind == "group_l1":
        # |trilinear| over l1 balls peaks at basis vectors
        return np.eye(A.dim)
    vertices = A.vertices()
    if vertices is None:
        vertices = np.where(rng.random((TRIPLE_VERTEX_CAP, A.dim)) < 0.5, 1.0, -1.0)
    if vertices.shape[0] > TRIPLE_VERTEX_CAP:
        vertices = vertices[rng.choice(vertices.shape[0], TRIPLE_VERTEX_CAP, replace=False)]
    return vertices


def _cut_masks(k: int) -> np.ndarray:
    masks = []
    for S, T in cuts(k):
        m = np.zeros((k, k), dtype=bool)
        m[np.ix_(S, T)] = True
        masks.append(m)
    return np.array(masks)


def _alpha_upper(psi: np.ndarray, masks: np.ndarray) -> float:
    """Characters have norm <= 1, so |psi(a, b)| <= sum over the split of |psi_ij|."""
    return float(max((np.abs(psi)[m].sum() for m in masks), default=0.0))


def _defects(psi: np.ndarray, hats: np.ndarray) -> np.ndarray:
    """|psi(ab, c) - psi(a, bc)| for all candidate triples, in Gelfand coordinates."""
    through_c = hats @ psi.T
    through_a = hats @ psi
    first = np.einsum("pi,qi,si->pqs", hats, hats, through_c)
    second = np.einsum("pj,qj,sj->pqs", through_a, hats, hats)
    return np.abs(first - second)


def _best_psi(G: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Maximize Re sum psi_ij G_ij subject to the split bound <= 1 (an LP in |psi_ij|)."""
    k = G.shape[0]
    off = ~np.eye(k, dtype=bool)
    weights = np.abs(G[off])
    A_ub = np.array([m[off].astype(float) for m in masks])
    res = optimize.linprog(-weights, A_ub=A_ub, b_ub=np.ones(len(masks)), bounds=(0, None), method="highs")
    psi = np.zeros((k, k), dtype=complex)
    phases = np.where(np.abs(G[off]) > 0, np.conj(G[off]) / np.maximum(np.abs(G[off]), 1e-300), 1.0)
    psi[off] = res.x * phases
    return psi


def strong_b_estimate(
    A: AlgebraSpec, budget: Optional[int] = None, seed: int = 0, restarts: Optional[int] = None
) -> StrongBEstimate:
    """Lower bound on the strong-(B) constant of A.

    Bilinear forms are taken complex bilinear in Gelfand coordinates. Each form is divided
    by a certified upper bound on its alpha, and each defect is attained at an explicit
    unit triple, so every ratio is a lower bound on the constant. Alternates between the
    best triple for the current form and the best form (an LP) for the current triple.
    """
    restarts = config.DEFAULT_RESTARTS if restarts is None else restarts
    F = characters(A)
    k = F.shape[0]
    if k < 2:
        zeros = [[0.0] * k for _ in range(k)]
        return StrongBEstimate(value=0.0, defect=0.0, alpha_upper=0.0, restarts=restarts, psi_real=zeros, psi_imag=zeros)
    rng = np.random.default_rng(seed)
    masks = _cut_masks(k)
    candidates = _triple_candidates(A, rng)
    hats = candidates @ F.T
    off = ~np.eye(k, dtype=bool)

    best = (0.0, 0.0, 1.0, np.zeros((k, k), dtype=complex))
    for _ in range(restarts):
        psi = np.zeros((k, k), dtype=complex)
        psi[off] = rng.standard_normal(off.sum()) + 1j * rng.standard_normal(off.sum())
        ratio = 0.0
        for _ in range(MAX_ROUNDS):
            alpha = _alpha_upper(psi, masks)
            if alpha <= 0:
                break
            defects = _defects(psi, hats)
            p, q, s = np.unravel_index(int(np.argmax(defects)), defects.shape)
            new_ratio = float(defects[p, q, s]) / alpha
            if new_ratio > best[0]:
                best = (new_ratio, float(defects[p, q, s]), alpha, psi)
            if new_ratio <= ratio * (1 + 1e-12):
                break
            ratio = new_ratio
            a, b, c = hats[p], hats[q], hats[s]
            G = np.outer(a * b, c) - np.outer(a, b * c)
            psi = _best_psi(G, masks)
    value, defect, alpha, psi = best
    return StrongBEstimate(
        value=value,
        defect=defect,
        alpha_upper=alpha,
        restarts=restarts,
        psi_real=psi.real.tolist(),
        psi_imag=psi.imag.tolist(),
    )
