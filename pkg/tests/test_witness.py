import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperbench import witness
from hyperbench.errors import TruncationTooSmallError
from hyperbench.fourier_circle import from_pairs
from hyperbench.witness import WitnessParams

CHECK_NAMES = {
    "u_fourier_norm",
    "u_l2_norm",
    "u_l1_norm",
    "u_support",
    "v_fourier_norm",
    "f_minus_v_fourier_norm",
    "f_equals_v_on_V",
    "f_minus_v_support",
    "v_l2_norm",
    "f_minus_f_conv_u",
    "v_conv_u",
    "f_minus_a",
}


def test_params_validation():
    with pytest.raises(ValueError):
        WitnessParams(epsilon=3.5, delta=0.1)
    with pytest.raises(ValueError):
        WitnessParams(epsilon=0.5, delta=0.5)
    assert WitnessParams(epsilon=0.6).delta == pytest.approx(0.006)


def test_build_intervals():
    bundle = witness.build(WitnessParams(epsilon=0.6, delta=0.006, truncation=200, grid=256))
    assert bundle.U.half_width == pytest.approx(0.099)
    assert bundle.V.half_width == pytest.approx(0.198)
    assert bundle.f.is_finite
    assert not bundle.u.is_finite and math.isfinite(bundle.u.tail_bound)


def test_build_rejects_tiny_truncation():
    with pytest.raises(TruncationTooSmallError):
        witness.build(WitnessParams(epsilon=0.6, delta=0.006, truncation=1, grid=64))


def test_u_has_unit_mass_at_any_truncation():
    report = witness.verify(WitnessParams(epsilon=0.6, delta=0.006, truncation=50, grid=512))
    entry = report.entry("u_l1_norm")
    assert entry.bracket_lo <= 1.0 + 1e-9 and entry.bracket_hi >= 1.0 - 1e-9
    assert entry.status == "pass"


def test_low_truncation_never_fails():
    report = witness.verify(WitnessParams(epsilon=0.6, delta=0.006, truncation=10, grid=512))
    assert {e.name for e in report.entries} == CHECK_NAMES
    assert not report.failed
    assert report.inconclusive
    assert all(e.required_truncation is None or e.required_truncation > 10 for e in report.inconclusive)


def test_profiles_match_partial_sums():
    bundle = witness.build(WitnessParams(epsilon=1.0, delta=0.01, truncation=2000, grid=512))
    for check in witness.profile_consistency(bundle):
        assert check.consistent, check


SUPPORT_CHECKS = ("u_support", "f_equals_v_on_V", "f_minus_v_support")


def test_support_checks_follow_the_built_elements():
    bundle = witness.build(WitnessParams(epsilon=0.6, delta=0.006, truncation=200, grid=512))
    intact = witness.check_bundle(bundle)
    for name in SUPPORT_CHECKS:
        assert intact.entry(name).note is None
        assert intact.entry(name).status != "fail"
    garbage = from_pairs([(0, 5.0), (3, 7.0)])
    corrupted = witness.check_bundle(bundle.model_copy(update={"u": garbage, "v": garbage}))
    for name in SUPPORT_CHECKS:
        entry = corrupted.entry(name)
        assert entry.status == "fail", entry
        assert entry.bracket_lo >= 1.0
        assert entry.note.startswith("partial sum of")


def test_w_epsilon_membership():
    assert witness.in_w_epsilon(0.0, 0.1)
    assert not witness.in_w_epsilon(math.pi, 1.9)
    assert np.all(witness.in_w_epsilon([0.01, -0.01], 0.1))


@pytest.mark.slow
@pytest.mark.parametrize("epsilon", [0.1, 0.3, 0.6, 1.0, 2.0, 2.9])
def test_all_checks_pass(epsilon):
    report = witness.verify(WitnessParams(epsilon=epsilon, delta=epsilon / 100, truncation=100_000, grid=4096))
    assert [e.name for e in report.entries if e.status != "pass"] == []
    mass = report.entry("u_l1_norm")
    assert mass.bracket_lo >= 1.0 - 1e-6 and mass.bracket_hi <= 1.0 + 1e-6
    assert report.entry("f_minus_a").margin > 0.01 * epsilon
    assert report.entry("v_l2_norm").bound == pytest.approx(2 * epsilon * math.sqrt((epsilon - epsilon / 100) / (6 * math.pi)))


def test_to_report_prefixes_names():
    reports = witness.verify_grid([0.6, 1.2], delta_ratio=0.01, truncation=20, grid=128)
    entries = witness.to_report(reports)
    assert len(entries) == 24
    assert entries[0].name.startswith("eps=0.6,delta=0.006:")


def test_bound_curve_examples():
    assert witness.bound_curve(0.0).bound == 0.0
    small = witness.bound_curve(0.01)
    assert small.epsilon_star == pytest.approx(0.5508, abs=1e-4)
    assert small.bound == pytest.approx(3.3048, abs=1e-4)
    assert not small.clamped
    big = witness.bound_curve(1.0)
    assert big.clamped
    assert big.epsilon_star == pytest.approx(3.0 - 1e-6)
    assert big.effective_bound == 2.0
    with pytest.raises(ValueError):
        witness.bound_curve(-1.0)


@given(st.floats(min_value=1e-6, max_value=0.29))
def test_bound_curve_minimizes_k(alpha):
    curve = witness.bound_curve(alpha)
    assert not curve.clamped
    assert witness.k_curve(curve.epsilon_star, alpha) == pytest.approx(curve.bound, abs=1e-9)
    for eps in (0.5 * curve.epsilon_star, 1.5 * curve.epsilon_star):
        assert witness.k_curve(eps, alpha) >= curve.bound - 1e-12
