"""The witness functions f, u, v, a on the circle and certified checks of their inequalities.

For 0 < delta < epsilon < 3 the construction is

    U = [-(eps - delta)/6, (eps - delta)/6],   V = [-(eps - delta)/3, (eps - delta)/3]
    f = e_1 - 1
    u = 1_U * 1_U / lambda(U)^2
    v = f . (1_{V+V} * 1_V / lambda(V))
    a = (f - v) * u-check

and every inequality of the construction is evaluated against a certified bracket.
"""

import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from hyperbench import config
from hyperbench.errors import TruncationTooSmallError
from hyperbench.fourier_circle import (
    BRACKET_SLACK,
    Bracket,
    FourierElement,
    Interval,
    convolve,
    from_indicator,
    from_pairs,
    grid_points,
    norm_a,
    norm_l1,
    norm_l2,
    pointwise_mul,
    reflect,
    sample_grid,
    scale,
)
from hyperbench.reports import ReportEntry

SUPPORT_THRESHOLD = 1e-7
SUPPORT_WIDENING = 1e-3
EQUALITY_WIDTH = 1e-6

CURVE_A = 3.0
CURVE_B = 12.0 * math.pi * (1.0 + math.sqrt(2.0))
CURVE_ETA = 1e-6
TRIVIAL_BOUND = 2.0


class WitnessParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    epsilon: float
    delta: Optional[float] = None
    truncation: int = Field(default_factory=lambda: config.DEFAULT_TRUNCATION)
    grid: int = Field(default_factory=lambda: config.DEFAULT_GRID)

    @model_validator(mode="before")
    @classmethod
    def default_delta(cls, data):
        if isinstance(data, dict) and data.get("delta") is None and data.get("epsilon") is not None:
            data = {**data, "delta": float(data["epsilon"]) / 100.0}
        return data

    @model_validator(mode="after")
    def check_ranges(self):
        if not 0.0 < self.delta < self.epsilon < 3.0:
            raise ValueError(f"need 0 < delta < epsilon < 3, got delta={self.delta}, epsilon={self.epsilon}")
        if self.truncation < 1:
            raise ValueError(f"truncation must be positive, got {self.truncation}")
        if self.grid < 1:
            raise ValueError(f"grid must be positive, got {self.grid}")
        return self


class WitnessBundle(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    params: WitnessParams
    U: Interval
    V: Interval
    f: FourierElement
    u: FourierElement
    g: FourierElement
    v: FourierElement
    a: FourierElement


class WitnessEntry(ReportEntry):
    margin: Optional[float] = None


class WitnessReport(BaseModel):
    params: WitnessParams
    entries: list[WitnessEntry]

    @property
    def failed(self) -> list[WitnessEntry]:
        return [e for e in self.entries if e.status == "fail"]

    @property
    def inconclusive(self) -> list[WitnessEntry]:
        return [e for e in self.entries if e.status == "inconclusive"]

    def entry(self, name: str) -> WitnessEntry:
        return next(e for e in self.entries if e.name == name)


def in_w_epsilon(x, epsilon: float) -> np.ndarray:
    """Membership in W_eps = {x : |1 - e^{ix}| < eps}."""
    return np.abs(1.0 - np.exp(1j * np.asarray(x, dtype=float))) < epsilon


def build(params: WitnessParams) -> WitnessBundle:
    """Construct U, V and the witness functions at the given truncation."""
    if params.truncation < 2:
        raise TruncationTooSmallError(
            f"truncation {params.truncation} keeps only the constant term of the indicators; use at least 2"
        )
    eps, delta, n = params.epsilon, params.delta, params.truncation
    U = Interval(half_width=(eps - delta) / 6.0)
    V = Interval(half_width=(eps - delta) / 3.0)
    VV = Interval(half_width=2.0 * V.half_width)

    f = from_pairs([(1, 1.0), (0, -1.0)])
    ind_u = from_indicator(U, n)
    u = scale(convolve(ind_u, ind_u), 1.0 / U.measure**2)
    g = scale(convolve(from_indicator(VV, n), from_indicator(V, n)), 1.0 / V.measure)
    v = pointwise_mul(f, g)
    a = convolve(f - v, reflect(u))
    return WitnessBundle(params=params, U=U, V=V, f=f, u=u, g=g, v=v, a=a)


# --- closed-form profiles -----------------------------------------------------------


def interval_convolution_profile(a: float, b: float, s) -> np.ndarray:
    """(1_[-a,a] * 1_[-b,b])(s) under normalized measure: a trapezoid."""
    s = np.asarray(s, dtype=float)
    total = np.zeros(s.shape)
    for shift in (-2.0 * math.pi, 0.0, 2.0 * math.pi):
        x = s + shift
        total += np.maximum(np.minimum(a, x + b) - np.maximum(-a, x - b), 0.0)
    return total / (2.0 * math.pi)


def u_profile(bundle: WitnessBundle, s) -> np.ndarray:
    h = bundle.U.half_width
    return interval_convolution_profile(h, h, s) / bundle.U.measure**2


def g_profile(bundle: WitnessBundle, s) -> np.ndarray:
    h = bundle.V.half_width
    return interval_convolution_profile(2.0 * h, h, s) / bundle.V.measure


def v_profile(bundle: WitnessBundle, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return (np.exp(1j * s) - 1.0) * g_profile(bundle, s)


class ProfileCheck(BaseModel):
    name: str
    max_deviation: float
    tolerance: float

    @property
    def consistent(self) -> bool:
        return self.max_deviation <= self.tolerance


def profile_consistency(bundle: WitnessBundle, grid: Optional[int] = None) -> list[ProfileCheck]:
    """Compare the partial sums of u, g, v with their closed forms on a grid.

    The partial sum differs from the function by at most the certified l1 tail.
    """
    grid = grid or bundle.params.grid
    s = grid_points(grid)
    checks = []
    for name, element, profile in (
        ("u", bundle.u, u_profile),
        ("g", bundle.g, g_profile),
        ("v", bundle.v, v_profile),
    ):
        exact = profile(bundle, s)
        deviation = float(np.abs(sample_grid(element, grid) - exact).max())
        tolerance = element.tail.l1 + BRACKET_SLACK * max(1.0, float(np.abs(exact).max()))
        checks.append(ProfileCheck(name=name, max_deviation=deviation, tolerance=tolerance))
    return checks


# --- verification -------------------------------------------------------------------


def _required_truncation(truncation: int, bracket: Bracket, bound: float) -> Optional[int]:
    # tails decay like 1/N, so shrinking the width below the gap needs N * width / gap
    gap = bound - bracket.lower
    if gap <= 0:
        return None
    return int(math.ceil(truncation * (bracket.upper - bracket.lower) / gap)) + 1


def _judge(
    name: str,
    bracket: Bracket,
    bound: float,
    formula: str,
    truncation: int,
    relation: Literal["le", "lt", "eq"] = "le",
) -> WitnessEntry:
    if relation == "eq":
        contains = bracket.contains(bound)
        if not contains:
            status = "fail"
        elif bracket.upper - bracket.lower <= EQUALITY_WIDTH:
            status = "pass"
        else:
            status = "inconclusive"
        margin = None
    else:
        margin = bound - bracket.upper
        if relation == "lt":
            passed, failed = bracket.upper < bound, bracket.lower >= bound + BRACKET_SLACK
        else:
            passed, failed = bracket.upper <= bound + BRACKET_SLACK, bracket.lower > bound + BRACKET_SLACK
        status = "pass" if passed else "fail" if failed else "inconclusive"
    return WitnessEntry(
        name=name,
        bound=bound,
        bracket_lo=bracket.lower,
        bracket_hi=bracket.upper,
        status=status,
        formula=formula,
        margin=margin,
        required_truncation=_required_truncation(truncation, bracket, bound) if status == "inconclusive" else None,
    )


def _support_entry(
    name: str,
    profile_values: np.ndarray,
    mask: np.ndarray,
    formula: str,
    link: ProfileCheck,
    partial_values: np.ndarray,
    tail: float,
) -> WitnessEntry:
    """Support claim on the closed form, valid for the built element while its partial sum stays in the profile's tail.

    Otherwise the claim is judged on the partial sum itself, bracketed by the certified l1 tail.
    """
    note = None
    if link.consistent:
        peak = float(np.abs(profile_values[mask]).max()) if mask.any() else 0.0
        lower = upper = peak
    else:
        peak = float(np.abs(partial_values[mask]).max()) if mask.any() else 0.0
        lower, upper = max(peak - tail, 0.0), peak + tail
        note = f"partial sum of {link.name} is {link.max_deviation:.3g} from its closed form (tail {link.tolerance:.3g})"
    if upper < SUPPORT_THRESHOLD:
        status = "pass"
    elif lower >= SUPPORT_THRESHOLD:
        status = "fail"
    else:
        status = "inconclusive"
    return WitnessEntry(
        name=name,
        bound=SUPPORT_THRESHOLD,
        bracket_lo=lower,
        bracket_hi=upper,
        status=status,
        formula=formula,
        margin=SUPPORT_THRESHOLD - upper if math.isfinite(upper) else None,
        note=note,
    )


def check_bundle(bundle: WitnessBundle) -> WitnessReport:
    """Evaluate every inequality of the construction on an already built bundle."""
    p = bundle.params
    eps, delta, n = p.epsilon, p.delta, p.truncation
    f, u, v, a = bundle.f, bundle.u, bundle.v, bundle.a
    u_check = reflect(u)
    s = grid_points(p.grid)
    hu, hv = bundle.U.half_width, bundle.V.half_width
    dist = np.abs(s)

    f_minus_v = f - v
    v_values = v_profile(bundle, s)
    f_values = np.exp(1j * s) - 1.0
    # the closed forms stand in for u and v only where the built partial sums match them
    links = {check.name: check for check in profile_consistency(bundle)}
    u_partial = sample_grid(u, p.grid)
    f_minus_v_partial = f_values - sample_grid(v, p.grid)

    entries = [
        _judge("u_fourier_norm", norm_a(u), 6 * math.pi / (eps - delta), "||u||_A <= 6*pi/(eps-delta)", n),
        _judge("u_l2_norm", norm_l2(u), math.sqrt(6 * math.pi / (eps - delta)), "||u||_2 <= sqrt(6*pi/(eps-delta))", n),
        _judge("u_l1_norm", norm_l1(u), 1.0, "||u||_1 = 1", n, relation="eq"),
        _support_entry(
            "u_support",
            u_profile(bundle, s),
            dist > 2 * hu + SUPPORT_WIDENING,
            "supp u in U+U: max |u| outside (U+U) widened by 1e-3 < 1e-7",
            links["u"],
            u_partial,
            u.tail.l1,
        ),
        _judge("v_fourier_norm", norm_a(v), 2 * math.sqrt(2), "||v||_A <= 2*sqrt(2)", n),
        _judge("f_minus_v_fourier_norm", norm_a(f_minus_v), 2 * (1 + math.sqrt(2)), "||f-v||_A <= 2*(1+sqrt(2))", n),
        _support_entry(
            "f_equals_v_on_V",
            f_values - v_values,
            dist <= hv,
            "f = v on V: max |f-v| on V < 1e-7",
            links["v"],
            f_minus_v_partial,
            v.tail.l1,
        ),
        _support_entry(
            "f_minus_v_support",
            f_values - v_values,
            dist < hv - SUPPORT_WIDENING,
            "supp(f-v) in complement of V: max |f-v| on V shrunk by 1e-3 < 1e-7",
            links["v"],
            f_minus_v_partial,
            v.tail.l1,
        ),
        _judge(
            "v_l2_norm",
            norm_l2(v),
            2 * eps * math.sqrt((eps - delta) / (6 * math.pi)),
            "||v||_2 <= 2*eps*sqrt((eps-delta)/(6*pi))",
            n,
        ),
        _judge("f_minus_f_conv_u", norm_a(f - convolve(f, u_check)), eps, "||f - f*u_check||_A <= eps", n),
        _judge("v_conv_u", norm_a(convolve(v, u_check)), 2 * eps, "||v*u_check||_A <= 2*eps", n),
        _judge("f_minus_a", norm_a(f - a), 3 * eps, "||f-a||_A < 3*eps", n, relation="lt"),
    ]
    return WitnessReport(params=p, entries=entries)


def verify(params: WitnessParams) -> WitnessReport:
    return check_bundle(build(params))


def verify_grid(
    epsilons: list[float],
    delta_ratio: float = 0.01,
    truncation: Optional[int] = None,
    grid: Optional[int] = None,
) -> list[WitnessReport]:
    """verify() over a list of epsilons with delta = delta_ratio * epsilon."""
    reports = []
    for eps in epsilons:
        kwargs = {"epsilon": eps, "delta": eps * delta_ratio}
        if truncation is not None:
            kwargs["truncation"] = truncation
        if grid is not None:
            kwargs["grid"] = grid
        reports.append(verify(WitnessParams(**kwargs)))
    return reports


# --- epsilon optimisation -----------------------------------------------------------


class CurveResult(BaseModel):
    epsilon_star: float
    bound: float
    clamped: bool
    trivial_bound: float = TRIVIAL_BOUND

    @property
    def effective_bound(self) -> float:
        """The better of the optimised bound and ||F|| ||f|| <= 2."""
        return min(self.bound, self.trivial_bound)


def k_curve(epsilon: float, alpha: float) -> float:
    """k(eps) = 3 eps + 12 pi (1 + sqrt 2) alpha / eps."""
    return CURVE_A * epsilon + CURVE_B * alpha / epsilon


def bound_curve(alpha: float) -> CurveResult:
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if alpha == 0:
        return CurveResult(epsilon_star=0.0, bound=0.0, clamped=False)
    optimum = math.sqrt(alpha * CURVE_B / CURVE_A)
    if optimum >= 3.0:
        eps = 3.0 - CURVE_ETA
        return CurveResult(epsilon_star=eps, bound=k_curve(eps, alpha), clamped=True)
    return CurveResult(epsilon_star=optimum, bound=2.0 * math.sqrt(CURVE_A * CURVE_B * alpha), clamped=False)


def to_report(reports: list[WitnessReport]) -> list[ReportEntry]:
    """Flatten witness reports into report entries prefixed by their parameters."""
    entries = []
    for rep in reports:
        prefix = f"eps={rep.params.epsilon:g},delta={rep.params.delta:g}"
        for e in rep.entries:
            entries.append(e.model_copy(update={"name": f"{prefix}:{e.name}"}))
    return entries


__all__ = [
    "WitnessParams",
    "WitnessBundle",
    "WitnessEntry",
    "WitnessReport",
    "CurveResult",
    "build",
    "check_bundle",
    "verify",
    "verify_grid",
    "bound_curve",
    "k_curve",
    "in_w_epsilon",
    "profile_consistency",
    "interval_convolution_profile",
]
