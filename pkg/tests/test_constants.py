import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperbench import constants
from hyperbench.errors import UnknownPresetError

CSTAR = 288 * math.pi * (1 + math.sqrt(2))


def test_circle_lemma_bound():
    assert constants.circle_lemma_bound(1.0).value == pytest.approx(33.0479, abs=1e-4)
    assert constants.circle_lemma_bound(0.0).value == 0.0
    with pytest.raises(ValueError):
        constants.circle_lemma_bound(-0.1)


def test_strong_b_doubling():
    bounds = constants.circle_strong_b(0.5)
    assert bounds.restricted.value / bounds.general.value == pytest.approx(0.5)
    assert bounds.restricted.value == pytest.approx(72 * math.pi * (1 + math.sqrt(2)))


def test_cstar_constant():
    value = constants.cstar_group_constant().value
    assert value == pytest.approx(2184.329, abs=1e-3)
    assert float(constants.cstar_group_constant()) == value


def test_unitization_constant():
    assert constants.unitization_constant(1.0, CSTAR).value == pytest.approx(2188.329, abs=1e-3)
    with pytest.raises(ValueError):
        constants.unitization_constant(0.5, 1.0)


def test_hyperref_bound_first_degree():
    bound = constants.hyperref_bound(1, 1.0, CSTAR, 1.0)
    assert bound.value == pytest.approx(4.78878e6, abs=100)
    assert "n=1" in bound.formula
    with pytest.raises(ValueError):
        constants.hyperref_bound(0, 1.0, CSTAR, 1.0)


@given(
    st.integers(min_value=1, max_value=4),
    st.floats(min_value=1.0, max_value=5.0),
    st.floats(min_value=0.1, max_value=10.0),
)
def test_amenable_form_matches_general_bound(n, M, C):
    general = constants.hyperref_bound(n, M, CSTAR, C).value
    printed = constants.amenable_hyperref_bound(n, M, C).value
    assert printed == pytest.approx(general, rel=1e-12)


@given(st.integers(min_value=1, max_value=5), st.floats(min_value=0.0, max_value=100.0))
def test_cocycle_norm_bound(n, gamma):
    value = constants.cocycle_norm_bound(n, 2.0, gamma).value
    assert value == pytest.approx(2 ** (n - 1) * 2.0 ** (n + 1) * gamma)


def test_commutant_bound_and_cvp_preset():
    assert constants.commutant_bound(2.0, 3.0, 2.0, 1.5).value == pytest.approx(2 * 3 * 4 * 2.25)
    cvp = constants.cvp_bound()
    assert cvp.value == pytest.approx(CSTAR)
    assert cvp.name == "cvp_bound"


def test_amenability_presets():
    am, c = constants.amenability_presets("amenable_group_algebra")
    assert c <= am
    with pytest.raises(UnknownPresetError):
        constants.amenability_presets("free_group")


def test_pipeline_order_and_provenance():
    bounds = constants.ConstantInputs().pipeline()
    assert [b.name for b in bounds] == [
        "circle_lemma_bound",
        "circle_strong_b_restricted",
        "circle_strong_b_general",
        "cstar_group_constant",
        "unitization_constant",
        "cocycle_norm_bound",
        "hyperref_bound",
        "amenable_hyperref_bound",
        "commutant_bound",
    ]
    assert all(b.formula for b in bounds)


def test_inputs_are_validated():
    with pytest.raises(ValueError):
        constants.ConstantInputs(M=0.5)
    with pytest.raises(ValueError):
        constants.ConstantInputs(n=0)
