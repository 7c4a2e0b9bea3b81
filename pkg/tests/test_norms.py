import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hyperbench.findim.norms import NormedSpace, apply, apply_batch, op_norm, op_norm_upper, upper_surrogate

SPACES = [
    NormedSpace(dim=3, norm_kind="sup"),
    NormedSpace(dim=3, norm_kind="group_l1"),
    NormedSpace(dim=3, norm_kind="grid_custom", p=2.0),
    NormedSpace(dim=3, norm_kind="grid_custom", p=3.0),
    NormedSpace(dim=4, norm_kind="matrix_p", p=1.0),
    NormedSpace(dim=4, norm_kind="matrix_p", p=2.0),
    NormedSpace(dim=4, norm_kind="matrix_p", p=math.inf),
    NormedSpace(dim=4, norm_kind="unitized", base=NormedSpace(dim=3, norm_kind="sup")),
]

# rounded so that no cube or power underflows
entries = st.floats(min_value=-10.0, max_value=10.0).map(lambda v: round(v, 3))
vectors = arrays(np.float64, 4, elements=entries)


def test_invalid_spaces():
    with pytest.raises(ValueError):
        NormedSpace(dim=3, norm_kind="matrix_p")
    with pytest.raises(ValueError):
        NormedSpace(dim=4, norm_kind="matrix_p", p=3.0)
    with pytest.raises(ValueError):
        NormedSpace(dim=3, norm_kind="unitized")


def test_norm_values():
    x = np.array([3.0, -4.0, 0.0, 1.0])
    assert NormedSpace(dim=4, norm_kind="sup").norm(x) == 4.0
    assert NormedSpace(dim=4, norm_kind="group_l1").norm(x) == 8.0
    assert NormedSpace(dim=4, norm_kind="matrix_p", p=1.0).norm(x) == 5.0
    assert NormedSpace(dim=4, norm_kind="matrix_p", p=math.inf).norm(x) == 7.0
    unitized = NormedSpace(dim=4, norm_kind="unitized", base=NormedSpace(dim=3, norm_kind="sup"))
    assert unitized.norm(x) == 5.0


@pytest.mark.parametrize("space", SPACES, ids=lambda s: f"{s.norm_kind}-{s.p:g}")
@settings(max_examples=30)
@given(data=st.data())
def test_oracles_are_consistent(space, data):
    z = data.draw(arrays(np.float64, space.dim, elements=entries))
    g = data.draw(arrays(np.float64, space.dim, elements=entries))
    x = space.lmo(g)
    assert space.norm(x) <= 1.0 + 1e-9
    assert float(g @ x) == pytest.approx(space.dual_norm(g))
    y = space.subgradient(z)
    assert float(y @ z) == pytest.approx(space.norm(z), abs=1e-9)
    assert space.dual_norm(y) <= 1.0 + 1e-9


@pytest.mark.parametrize("space", [s for s in SPACES if s.vertices() is not None], ids=lambda s: s.norm_kind)
def test_vertices_lie_on_the_sphere(space):
    vertices = space.vertices()
    assert np.allclose(space.norm_many(vertices.T), 1.0)


@pytest.mark.parametrize("space", [s for s in SPACES if s.dual_vertices() is not None], ids=lambda s: s.norm_kind)
@given(z=vectors)
def test_dual_vertices_realize_the_norm(space, z):
    z = z[: space.dim]
    assert float((space.dual_vertices() @ z).max()) == pytest.approx(space.norm(z), abs=1e-9)


def test_apply_and_batch_agree():
    rng = np.random.default_rng(0)
    tensor = rng.standard_normal((2, 3, 3, 3))
    args = [rng.standard_normal((5, 3)) for _ in range(3)]
    batch = apply_batch(tensor, args)
    for i in range(5):
        assert np.allclose(batch[i], apply(tensor, [a[i] for a in args]))
    # T(a, b, c) = sum T[m, i, j, k] a_i b_j c_k
    direct = np.einsum("mijk,i,j,k->m", tensor, args[0][0], args[1][0], args[2][0])
    assert np.allclose(batch[0], direct)


def test_exact_norms():
    rng = np.random.default_rng(1)
    M = rng.standard_normal((3, 3))
    l2 = NormedSpace(dim=3, norm_kind="grid_custom", p=2.0)
    result = op_norm(M, l2, l2)
    assert result.exact and result.value == pytest.approx(np.linalg.norm(M, 2))
    sup = NormedSpace(dim=3, norm_kind="sup")
    assert op_norm(M, sup, sup).value == pytest.approx(np.abs(M).sum(axis=1).max())
    l1 = NormedSpace(dim=3, norm_kind="group_l1")
    assert op_norm(M, l1, l1).value == pytest.approx(np.abs(M).sum(axis=0).max())
    assert op_norm(np.zeros((3, 3)), sup, sup).method == "zero"


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_ascent_sandwich(seed):
    rng = np.random.default_rng(seed)
    tensor = rng.standard_normal((3, 3, 3))
    X = NormedSpace(dim=3, norm_kind="grid_custom", p=3.0)
    result = op_norm(tensor, X, X, method="ascent", restarts=4, seed=seed)
    assert not result.exact
    assert result.value <= result.upper + 1e-12
    assert result.upper <= upper_surrogate(tensor, X, X) + 1e-12
    # any unit argument pair gives a lower bound
    a, b = X.random_unit(rng), X.random_unit(rng)
    assert X.norm(apply(tensor, [a, b])) <= result.upper + 1e-9


def test_op_norm_upper_matches_exact_when_available():
    rng = np.random.default_rng(2)
    tensor = rng.standard_normal((2, 3, 3))
    sup = NormedSpace(dim=3, norm_kind="sup")
    assert op_norm_upper(tensor, sup, sup) == pytest.approx(op_norm(tensor, sup, sup).value)
