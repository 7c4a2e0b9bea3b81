"""Closed-form constant pipeline.

Every bound is returned as a BoundValue carrying the formula it was evaluated from,
so that cited numbers travel with their provenance.
"""

import math

from pydantic import BaseModel, ConfigDict, Field

from hyperbench.errors import UnknownPresetError

ONE_PLUS_SQRT2 = 1.0 + math.sqrt(2.0)


class BoundValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    value: float
    formula: str

    def __float__(self) -> float:
        return self.value


class StrongBBounds(BaseModel):
    restricted: BoundValue
    general: BoundValue


def _nonnegative(name: str, value: float) -> None:
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")


def circle_lemma_bound(alpha: float) -> BoundValue:
    """Bound on ||F(f)|| from the circle witness construction."""
    _nonnegative("alpha", alpha)
    return BoundValue(
        name="circle_lemma_bound",
        value=12.0 * math.sqrt(math.pi * ONE_PLUS_SQRT2) * math.sqrt(alpha),
        formula=f"12*sqrt(pi*(1+sqrt(2)))*sqrt(alpha), alpha={alpha:g}",
    )


def circle_strong_b(alpha: float) -> StrongBBounds:
    """Strong-(B) amplification for A(T): the ideal-restricted bound and its doubling."""
    _nonnegative("alpha", alpha)
    restricted = 144.0 * math.pi * ONE_PLUS_SQRT2 * alpha
    return StrongBBounds(
        restricted=BoundValue(
            name="circle_strong_b_restricted",
            value=restricted,
            formula=f"144*pi*(1+sqrt(2))*alpha, alpha={alpha:g}",
        ),
        general=BoundValue(
            name="circle_strong_b_general",
            value=2.0 * restricted,
            formula=f"288*pi*(1+sqrt(2))*alpha, alpha={alpha:g}",
        ),
    )


def cstar_group_constant() -> BoundValue:
    """Strong-(B) constant shared by C*-algebras and group algebras."""
    return BoundValue(name="cstar_group_constant", value=288.0 * math.pi * ONE_PLUS_SQRT2, formula="288*pi*(1+sqrt(2))")


def unitization_constant(M: float, r: float) -> BoundValue:
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    _nonnegative("r", r)
    return BoundValue(
        name="unitization_constant", value=M * M * r + (M + 1.0) ** 2, formula=f"M^2*r+(M+1)^2, M={M:g}, r={r:g}"
    )


def cocycle_norm_bound(n: int, r: float, gamma: float) -> BoundValue:
    """||delta^n T|| <= 2^(n-1) r^(n+1) gamma."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _nonnegative("r", r)
    _nonnegative("gamma", gamma)
    return BoundValue(
        name="cocycle_norm_bound",
        value=2.0 ** (n - 1) * r ** (n + 1) * gamma,
        formula=f"2^(n-1)*r^(n+1)*gamma, n={n}, r={r:g}, gamma={gamma:g}",
    )


def hyperref_bound(n: int, M: float, r: float, C: float) -> BoundValue:
    """Hyperreflexivity constant of the n-cocycles: C 2^(n-1) (M^2 r + (M+1)^2)^(n+1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if C <= 0:
        raise ValueError(f"C must be > 0, got {C}")
    inner = unitization_constant(M, r).value
    return BoundValue(
        name="hyperref_bound",
        value=C * 2.0 ** (n - 1) * inner ** (n + 1),
        formula=f"C*2^(n-1)*(M^2*r+(M+1)^2)^(n+1), n={n}, M={M:g}, r={r:g}, C={C:g}",
    )


def amenable_hyperref_bound(n: int, M: float, C: float) -> BoundValue:
    """The C*-algebra / group algebra specialization, evaluated from its printed form."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if M < 1 or C <= 0:
        raise ValueError(f"need M >= 1 and C > 0, got M={M}, C={C}")
    inner = 288.0 * math.pi * M * M * ONE_PLUS_SQRT2 + (M + 1.0) ** 2
    return BoundValue(
        name="amenable_hyperref_bound",
        value=C * 2.0 ** (n - 1) * inner ** (n + 1),
        formula=f"C*2^(n-1)*(288*pi*M^2*(1+sqrt(2))+(M+1)^2)^(n+1), n={n}, M={M:g}, C={C:g}",
    )


def commutant_bound(M: float, C: float, K: float, pi_norm: float) -> BoundValue:
    """Hyperreflexivity bound M C K^2 ||pi||^2 for the commutant of a representation."""
    for name, value in (("M", M), ("C", C), ("K", K), ("pi_norm", pi_norm)):
        _nonnegative(name, value)
    return BoundValue(
        name="commutant_bound",
        value=M * C * K * K * pi_norm * pi_norm,
        formula=f"M*C*K^2*||pi||^2, M={M:g}, C={C:g}, K={K:g}, ||pi||={pi_norm:g}",
    )


AMENABILITY_PRESETS = {
    # AM(L^1(G)) = 1 for amenable G, and the open-mapping constant C <= AM
    "amenable_group_algebra": (1.0, 1.0),
    "amenable_cstar": (1.0, 1.0),
}


def amenability_presets(kind: str) -> tuple[float, float]:
    """(AM, C) for the named class of algebras."""
    if kind not in AMENABILITY_PRESETS:
        raise UnknownPresetError(f"unknown amenability preset {kind!r}; expected one of {sorted(AMENABILITY_PRESETS)}")
    am, c = AMENABILITY_PRESETS[kind]
    assert c <= am
    return am, c


class ConstantInputs(BaseModel):
    """Scalar parameters feeding the bound pipeline."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(default=1.0, ge=0)
    gamma: float = Field(default=1.0, ge=0)
    r: float = Field(default_factory=lambda: cstar_group_constant().value, gt=0)
    M: float = Field(default=1.0, ge=1)
    C: float = Field(default=1.0, gt=0)
    K: float = Field(default=1.0, ge=1)
    pi_norm: float = Field(default=1.0, gt=0)
    n: int = Field(default=1, ge=1)

    def pipeline(self) -> list[BoundValue]:
        """Every bound of the pipeline at these inputs, in a fixed order."""
        strong_b = circle_strong_b(self.alpha)
        return [
            circle_lemma_bound(self.alpha),
            strong_b.restricted,
            strong_b.general,
            cstar_group_constant(),
            unitization_constant(self.M, self.r),
            cocycle_norm_bound(self.n, self.r, self.gamma),
            hyperref_bound(self.n, self.M, self.r, self.C),
            amenable_hyperref_bound(self.n, self.M, self.C),
            commutant_bound(self.M, self.C, self.K, self.pi_norm),
        ]


# Convolution operators on l^p(G): M*C is folded into the C*/group constant, K = ||pi|| = 1
CVP_PRESET = ConstantInputs(M=1.0, C=cstar_group_constant().value, K=1.0, pi_norm=1.0)


def cvp_bound() -> BoundValue:
    bound = commutant_bound(CVP_PRESET.M, CVP_PRESET.C, CVP_PRESET.K, CVP_PRESET.pi_norm)
    return bound.model_copy(update={"name": "cvp_bound", "formula": "288*pi*(1+sqrt(2)) via " + bound.formula})
