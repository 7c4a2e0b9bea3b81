"""Certified arithmetic in the Fourier algebra A(T) of the circle.

Elements are stored as a contiguous window of Fourier coefficients together with
certified bounds on the discrepancy between the true coefficient sequence and the
stored one. Haar measure on T = [-pi, pi] is normalized (dt / 2pi), so an interval
[-h, h] has measure h / pi and convolution multiplies coefficients with no extra factor.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy import signal

from hyperbench.errors import DuplicateFrequencyError, SizeGuardError, TruncationTooSmallError

BRACKET_SLACK = 1e-9
MAX_WINDOW = 10_000_000
_EPS = float(np.finfo(float).eps)


def _safe_mul(a: float, b: float) -> float:
    # 0 * inf is 0 here: a zero discrepancy kills any partner
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b


class TailNorms(BaseModel):
    """Bounds on the l1, l2 and sup norms of a discrepancy coefficient sequence."""

    model_config = ConfigDict(frozen=True)

    l1: float = 0.0
    l2: float = 0.0
    sup: float = 0.0

    @model_validator(mode="before")
    @classmethod
    def tighten(cls, data):
        if isinstance(data, dict):
            l1 = float(data.get("l1", 0.0))
            l2 = min(float(data.get("l2", 0.0)), l1)
            sup = min(float(data.get("sup", 0.0)), l2)
            return {"l1": l1, "l2": l2, "sup": sup}
        return data

    @property
    def is_zero(self) -> bool:
        return self.l1 == 0.0 and self.l2 == 0.0 and self.sup == 0.0

    def __add__(self, other: "TailNorms") -> "TailNorms":
        return TailNorms(l1=self.l1 + other.l1, l2=self.l2 + other.l2, sup=self.sup + other.sup)

    def scaled(self, factor: float) -> "TailNorms":
        factor = abs(factor)
        return TailNorms(
            l1=_safe_mul(self.l1, factor), l2=_safe_mul(self.l2, factor), sup=_safe_mul(self.sup, factor)
        )

    @classmethod
    def of(cls, values: np.ndarray) -> "TailNorms":
        """Exact norms of a stored coefficient array."""
        if values.size == 0:
            return cls()
        mags = np.abs(values)
        return cls(l1=math.fsum(mags), l2=math.sqrt(math.fsum(mags * mags)), sup=float(mags.max()))


def _holder(a: TailNorms, b: TailNorms) -> TailNorms:
    """Norms of the entrywise product of two sequences."""
    return TailNorms(
        l1=min(_safe_mul(a.l1, b.sup), _safe_mul(a.l2, b.l2), _safe_mul(a.sup, b.l1)),
        l2=min(_safe_mul(a.l2, b.sup), _safe_mul(a.sup, b.l2)),
        sup=_safe_mul(a.sup, b.sup),
    )


def _young(a: TailNorms, b: TailNorms) -> TailNorms:
    """Norms of the convolution of two sequences."""
    return TailNorms(
        l1=_safe_mul(a.l1, b.l1),
        l2=min(_safe_mul(a.l1, b.l2), _safe_mul(a.l2, b.l1)),
        sup=min(_safe_mul(a.l1, b.sup), _safe_mul(a.sup, b.l1), _safe_mul(a.l2, b.l2)),
    )


class Bracket(BaseModel):
    """A certified enclosure [lower, upper] of a real quantity."""

    model_config = ConfigDict(frozen=True)

    lower: float
    upper: float

    @model_validator(mode="after")
    def ordered(self):
        if self.lower > self.upper:
            raise ValueError(f"bracket is not ordered: {self.lower} > {self.upper}")
        return self

    def contains(self, value: float, tol: float = BRACKET_SLACK) -> bool:
        return self.lower - tol <= value <= self.upper + tol


class Interval(BaseModel):
    """The symmetric arc [-h, h] of T = [-pi, pi]."""

    model_config = ConfigDict(frozen=True)

    half_width: float

    @field_validator("half_width")
    @classmethod
    def in_range(cls, v: float) -> float:
        if not 0.0 < v <= math.pi:
            raise ValueError(f"half_width must lie in (0, pi], got {v}")
        return v

    @property
    def measure(self) -> float:
        return self.half_width / math.pi

    def contains(self, s: np.ndarray, widen: float = 0.0) -> np.ndarray:
        return np.abs(wrap(s)) <= self.half_width + widen


def wrap(s) -> np.ndarray:
    """Representative of s in [-pi, pi)."""
    return np.mod(np.asarray(s, dtype=float) + math.pi, 2.0 * math.pi) - math.pi


class FourierElement(BaseModel):
    """An element of A(T) held as coefficients on the window [lo, lo + len(values) - 1].

    ``tail`` bounds the true coefficient sequence minus the stored one. When ``exact``
    is set the stored coefficients are the true ones and the discrepancy lives outside
    the window. ``nonnegative`` records that the function is pointwise >= 0.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    lo: int = 0
    values: np.ndarray
    tail: TailNorms = TailNorms()
    exact: bool = True
    nonnegative: bool = False

    @field_validator("values", mode="before")
    @classmethod
    def as_complex(cls, v) -> np.ndarray:
        arr = np.array(v, dtype=complex).reshape(-1)
        arr.flags.writeable = False
        return arr

    @property
    def hi(self) -> int:
        return self.lo + self.values.size - 1

    @property
    def tail_bound(self) -> float:
        return self.tail.l1

    @property
    def is_finite(self) -> bool:
        """True for trigonometric polynomials (nothing discarded)."""
        return self.tail.is_zero

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.lo, self.lo + self.values.size)

    @property
    def coeffs(self) -> dict[int, complex]:
        nz = np.nonzero(self.values)[0]
        return {int(self.lo + i): complex(self.values[i]) for i in nz}

    def coefficient(self, n: int) -> complex:
        if self.lo <= n <= self.hi:
            return complex(self.values[n - self.lo])
        return 0j

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Stored coefficients on [lo, hi], zero padded."""
        out = np.zeros(max(hi - lo + 1, 0), dtype=complex)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo : b - lo + 1] = self.values[a - self.lo : b - self.lo + 1]
        return out

    def outside(self, lo: int, hi: int) -> np.ndarray:
        """Stored coefficients that fall outside [lo, hi]."""
        if self.values.size == 0:
            return self.values
        freqs = self.frequencies
        return self.values[(freqs < lo) | (freqs > hi)]

    def __add__(self, other: "FourierElement") -> "FourierElement":
        return add(self, other)

    def __sub__(self, other: "FourierElement") -> "FourierElement":
        return add(self, scale(other, -1.0))

    def __neg__(self) -> "FourierElement":
        return scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, FourierElement):
            return pointwise_mul(self, other)
        return scale(self, other)

    def __rmul__(self, other):
        return scale(self, other)


def zero() -> FourierElement:
    return FourierElement(lo=0, values=np.zeros(0, dtype=complex))


def from_pairs(pairs: Iterable[tuple[int, complex]]) -> FourierElement:
    """Trigonometric polynomial with exactly the given coefficients."""
    pairs = [(int(n), complex(c)) for n, c in pairs]
    freqs = [n for n, _ in pairs]
    if len(set(freqs)) != len(freqs):
        raise DuplicateFrequencyError(f"duplicate frequencies in {sorted(freqs)}")
    if not pairs:
        return zero()
    lo, hi = min(freqs), max(freqs)
    if hi - lo + 1 > MAX_WINDOW:
        raise SizeGuardError(f"frequency span {hi - lo + 1} exceeds {MAX_WINDOW}")
    values = np.zeros(hi - lo + 1, dtype=complex)
    for n, c in pairs:
        values[n - lo] = c
    return FourierElement(lo=lo, values=values)


def character(n: int) -> FourierElement:
    """e_n(s) = exp(ins)."""
    return from_pairs([(n, 1.0)])


def from_indicator(iv: Interval, truncation: int) -> FourierElement:
    """Coefficients sin(nh)/(pi n) of the indicator of [-h, h], for |n| <= truncation.

    The indicator is not in A(T): its l1 tail is infinite. The l2 tail is certified
    from Parseval (the squares sum to the measure h/pi) and the sup tail from
    |sin(nh)/(pi n)| <= 1/(pi |n|), which is what convolve needs to discharge it.
    """
    if truncation < 1:
        raise TruncationTooSmallError(f"truncation must be >= 1, got {truncation}")
    h = iv.half_width
    lam = iv.measure
    n = np.arange(-truncation, truncation + 1)
    values = lam * np.sinc(n * h / math.pi)
    kept = math.fsum(values * values)
    residual = max(lam - kept, 0.0) + 32.0 * _EPS * lam
    analytic = 2.0 / (math.pi**2 * truncation)
    tail = TailNorms(l1=math.inf, l2=math.sqrt(min(residual, analytic)), sup=1.0 / (math.pi * (truncation + 1)))
    return FourierElement(lo=-truncation, values=values.astype(complex), tail=tail, nonnegative=True)


def scale(x: FourierElement, factor: complex) -> FourierElement:
    factor = complex(factor)
    nonneg = x.nonnegative and factor.imag == 0.0 and factor.real >= 0.0
    return FourierElement(
        lo=x.lo, values=x.values * factor, tail=x.tail.scaled(abs(factor)), exact=x.exact, nonnegative=nonneg
    )


def add(x: FourierElement, y: FourierElement) -> FourierElement:
    if x.values.size == 0:
        return y
    if y.values.size == 0:
        return x
    lo, hi = min(x.lo, y.lo), max(x.hi, y.hi)

    def covers(z: FourierElement) -> bool:
        return z.exact and (z.is_finite or (z.lo <= lo and z.hi >= hi))

    return FourierElement(
        lo=lo,
        values=x.window(lo, hi) + y.window(lo, hi),
        tail=x.tail + y.tail,
        exact=covers(x) and covers(y),
        nonnegative=x.nonnegative and y.nonnegative,
    )


def convolve(x: FourierElement, y: FourierElement) -> FourierElement:
    """Normalized convolution x * y: coefficients multiply."""
    lo, hi = max(x.lo, y.lo), min(x.hi, y.hi)
    values = x.window(lo, hi) * y.window(lo, hi) if lo <= hi else np.zeros(0, dtype=complex)
    # stored parts that only meet the other factor's discrepancy
    x_rest = TailNorms.of(x.outside(lo, hi) if y.exact else x.values)
    y_rest = TailNorms.of(y.outside(lo, hi) if x.exact else y.values)
    tail = _holder(x_rest, y.tail) + _holder(x.tail, y_rest) + _holder(x.tail, y.tail)
    return FourierElement(
        lo=lo if lo <= hi else 0,
        values=values,
        tail=tail,
        exact=x.exact and y.exact,
        nonnegative=x.nonnegative and y.nonnegative,
    )


def pointwise_mul(x: FourierElement, y: FourierElement) -> FourierElement:
    """Pointwise product in A(T), i.e. convolution of coefficient sequences."""
    if x.values.size == 0 or y.values.size == 0:
        return zero()
    full = signal.convolve(x.values, y.values, method="auto")
    lo = x.lo + y.lo
    nonneg = x.nonnegative and y.nonnegative
    if x.is_finite and y.is_finite:
        return FourierElement(lo=lo, values=full, nonnegative=nonneg)
    if x.is_finite or y.is_finite:
        poly, series = (x, y) if x.is_finite else (y, x)
        spread = _young(TailNorms.of(poly.values), series.tail)
        if not series.exact:
            return FourierElement(lo=lo, values=full, tail=spread, exact=False, nonnegative=nonneg)
        # keep only the frequencies whose every contribution comes from stored coefficients
        keep_lo, keep_hi = series.lo + poly.hi, series.hi + poly.lo
        product = FourierElement(lo=lo, values=full)
        kept = product.window(keep_lo, keep_hi) if keep_lo <= keep_hi else np.zeros(0, dtype=complex)
        trimmed = TailNorms.of(product.outside(keep_lo, keep_hi))
        return FourierElement(
            lo=keep_lo if keep_lo <= keep_hi else 0,
            values=kept,
            tail=spread + trimmed,
            nonnegative=nonneg,
        )
    xs, ys = TailNorms.of(x.values), TailNorms.of(y.values)
    tail = _young(xs, y.tail) + _young(x.tail, ys) + _young(x.tail, y.tail)
    return FourierElement(lo=lo, values=full, tail=tail, exact=False, nonnegative=nonneg)


def translate(x: FourierElement, t: float) -> FourierElement:
    """(R_t x)(s) = x(s + t)."""
    phases = np.exp(1j * x.frequencies * t)
    return FourierElement(lo=x.lo, values=x.values * phases, tail=x.tail, exact=x.exact, nonnegative=x.nonnegative)


def dilate(x: FourierElement, n: int) -> FourierElement:
    """x_n(s) = x(ns): the coefficient at k moves to kn."""
    if n < 1:
        raise ValueError(f"dilation factor must be >= 1, got {n}")
    if x.values.size == 0 or n == 1:
        return x
    values = np.zeros((x.values.size - 1) * n + 1, dtype=complex)
    values[::n] = x.values
    return FourierElement(lo=x.lo * n, values=values, tail=x.tail, exact=x.exact, nonnegative=x.nonnegative)


def reflect(x: FourierElement) -> FourierElement:
    """x-check(s) = x(-s)."""
    if x.values.size == 0:
        return x
    return FourierElement(lo=-x.hi, values=x.values[::-1], tail=x.tail, exact=x.exact, nonnegative=x.nonnegative)


def norm_a(x: FourierElement) -> Bracket:
    """Bracket on ||x||_A(T) = sum |x^(n)|."""
    stored = TailNorms.of(x.values).l1
    lower = stored if x.exact else max(stored - x.tail.l1, 0.0)
    return Bracket(lower=lower, upper=stored + x.tail.l1)


def norm_l2(x: FourierElement) -> Bracket:
    """Bracket on ||x||_2 (normalized measure, via Parseval)."""
    stored = TailNorms.of(x.values).l2
    if x.exact:
        return Bracket(lower=stored, upper=math.hypot(stored, x.tail.l2))
    return Bracket(lower=max(stored - x.tail.l2, 0.0), upper=stored + x.tail.l2)


def norm_l1(x: FourierElement) -> Bracket:
    """Bracket on ||x||_1; |x^(0)| <= ||x||_1 <= ||x||_2, with equality on the left for x >= 0."""
    c0 = abs(x.coefficient(0))
    err0 = 0.0 if (x.exact and x.lo <= 0 <= x.hi) else x.tail.sup
    lower = max(c0 - err0, 0.0)
    if x.nonnegative:
        return Bracket(lower=lower, upper=c0 + err0)
    return Bracket(lower=lower, upper=max(norm_l2(x).upper, lower))


def evaluate(x: FourierElement, s, chunk: int = 4096) -> np.ndarray:
    """Values of the stored trigonometric polynomial at the points s."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if x.values.size == 0:
        return np.zeros(s.shape, dtype=complex)
    freqs = x.frequencies
    out = np.empty(s.size, dtype=complex)
    step = max(1, min(chunk, (4 * 1024 * 1024) // freqs.size))
    for start in range(0, s.size, step):
        block = s[start : start + step]
        out[start : start + step] = np.exp(1j * np.outer(block, freqs)) @ x.values
    return out.reshape(s.shape)


def grid_points(grid: int) -> np.ndarray:
    return -math.pi + 2.0 * math.pi * np.arange(grid) / grid


def sample_grid(x: FourierElement, grid: int) -> np.ndarray:
    """Values of the stored polynomial at -pi + 2 pi j / grid, j = 0..grid-1.

    Frequencies are folded modulo the grid size, which is exact at the grid nodes.
    """
    if grid < 1:
        raise ValueError(f"grid must be >= 1, got {grid}")
    if x.values.size == 0:
        return np.zeros(grid, dtype=complex)
    freqs = x.frequencies
    signs = np.where(freqs % 2 == 0, 1.0, -1.0)
    folded = np.zeros(grid, dtype=complex)
    np.add.at(folded, np.mod(freqs, grid), x.values * signs)
    return grid * np.fft.ifft(folded)


def sup_norm_lower(x: FourierElement, grid: int) -> float:
    """Lower bound on ||x||_inf from a uniform grid, net of the certified tail."""
    peak = float(np.abs(sample_grid(x, grid)).max()) if x.values.size else 0.0
    return max(peak - x.tail.l1, 0.0)


# --- A(T x T) and the tensor identities -------------------------------------------


class TensorElement(BaseModel):
    """A trigonometric polynomial on T x T: coefficients on a rectangular window."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    lo: tuple[int, int] = (0, 0)
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def as_complex(cls, v) -> np.ndarray:
        arr = np.array(v, dtype=complex)
        if arr.size == 0:
            arr = np.zeros((0, 0), dtype=complex)
        elif arr.ndim != 2:
            raise ValueError(f"tensor coefficients must be 2-d, got shape {arr.shape}")
        arr.flags.writeable = False
        return arr

    @property
    def hi(self) -> tuple[int, int]:
        return (self.lo[0] + self.values.shape[0] - 1, self.lo[1] + self.values.shape[1] - 1)

    def coefficient(self, m: int, n: int) -> complex:
        i, j = m - self.lo[0], n - self.lo[1]
        if 0 <= i < self.values.shape[0] and 0 <= j < self.values.shape[1]:
            return complex(self.values[i, j])
        return 0j

    def window(self, lo: tuple[int, int], hi: tuple[int, int]) -> np.ndarray:
        out = np.zeros((max(hi[0] - lo[0] + 1, 0), max(hi[1] - lo[1] + 1, 0)), dtype=complex)
        if self.values.size == 0:
            return out
        a0, b0 = max(lo[0], self.lo[0]), min(hi[0], self.hi[0])
        a1, b1 = max(lo[1], self.lo[1]), min(hi[1], self.hi[1])
        if a0 <= b0 and a1 <= b1:
            out[a0 - lo[0] : b0 - lo[0] + 1, a1 - lo[1] : b1 - lo[1] + 1] = self.values[
                a0 - self.lo[0] : b0 - self.lo[0] + 1, a1 - self.lo[1] : b1 - self.lo[1] + 1
            ]
        return out

    def _hull(self, other: "TensorElement") -> tuple[tuple[int, int], tuple[int, int]]:
        boxes = [t for t in (self, other) if t.values.size]
        if not boxes:
            return (0, 0), (-1, -1)
        lo = (min(t.lo[0] for t in boxes), min(t.lo[1] for t in boxes))
        hi = (max(t.hi[0] for t in boxes), max(t.hi[1] for t in boxes))
        return lo, hi

    def __add__(self, other: "TensorElement") -> "TensorElement":
        lo, hi = self._hull(other)
        return TensorElement(lo=lo, values=self.window(lo, hi) + other.window(lo, hi))

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        lo, hi = self._hull(other)
        return TensorElement(lo=lo, values=self.window(lo, hi) - other.window(lo, hi))

    def max_deviation(self, other: "TensorElement") -> float:
        diff = self - other
        return float(np.abs(diff.values).max()) if diff.values.size else 0.0

    def norm_a(self) -> float:
        """Projective tensor norm, i.e. the l1 norm of the coefficients on A(T x T)."""
        return math.fsum(np.abs(self.values).ravel())


def _require_finite(*elements: FourierElement) -> None:
    for x in elements:
        if not x.is_finite:
            raise ValueError("tensor identities are evaluated on trigonometric polynomials only")


def tensor(x: FourierElement, y: FourierElement) -> TensorElement:
    """(x (x) y)(s, t) = x(s) y(t)."""
    _require_finite(x, y)
    if x.values.size == 0 or y.values.size == 0:
        return TensorElement(values=np.zeros((0, 0)))
    return TensorElement(lo=(x.lo, y.lo), values=np.outer(x.values, y.values))


def diagonal_lift(k: FourierElement) -> TensorElement:
    """N k (s, t) = k(s - t): the coefficient k^(n) sits at (n, -n)."""
    _require_finite(k)
    if k.values.size == 0:
        return TensorElement(values=np.zeros((0, 0)))
    size = k.values.size
    values = np.zeros((size, size), dtype=complex)
    # row n - lo, column -n - (-hi) = hi - n
    rows = np.arange(size)
    values[rows, size - 1 - rows] = k.values
    return TensorElement(lo=(k.lo, -k.hi), values=values)


def tensor_mul(p: TensorElement, q: TensorElement) -> TensorElement:
    """Pointwise product on T x T: 2-d convolution of coefficient arrays."""
    if p.values.size == 0 or q.values.size == 0:
        return TensorElement(values=np.zeros((0, 0)))
    values = signal.convolve(p.values, q.values, method="direct")
    return TensorElement(lo=(p.lo[0] + q.lo[0], p.lo[1] + q.lo[1]), values=values)


def lifted_product(k: FourierElement, f: FourierElement, h: FourierElement) -> TensorElement:
    """N_{f,h} k = N k . (f (x) e_1 h)."""
    return tensor_mul(diagonal_lift(k), tensor(f, pointwise_mul(character(1), h)))


def bochner_average(phi: FourierElement, psi: FourierElement, nodes: Optional[int] = None) -> TensorElement:
    """Average of R_x phi (x) R_x psi over equally spaced x.

    With more nodes than the combined frequency spread the average is exact, so it
    reproduces the integral over T.
    """
    _require_finite(phi, psi)
    if nodes is None:
        spread = (phi.hi - phi.lo) + (psi.hi - psi.lo) + abs(phi.lo + psi.lo) + abs(phi.hi + psi.hi)
        nodes = spread + 1
    total: Optional[TensorElement] = None
    for x in 2.0 * math.pi * np.arange(nodes) / nodes:
        term = tensor(translate(phi, x), translate(psi, x))
        total = term if total is None else total + term
    return TensorElement(lo=total.lo, values=total.values / nodes)


class BilinearForm(BaseModel):
    """phi(a, b) = sum K[m, n] a^(m) b^(n) on trigonometric polynomials."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    lo: int
    kernel: np.ndarray

    @property
    def hi(self) -> int:
        return self.lo + self.kernel.shape[0] - 1

    def __call__(self, a: FourierElement, b: FourierElement) -> complex:
        return complex(a.window(self.lo, self.hi) @ self.kernel @ b.window(self.lo, self.hi))


def associativity_defect(phi: Callable, f: FourierElement, g: FourierElement, h: FourierElement) -> complex:
    """phi(fg, h) - phi(f, gh)."""
    return phi(pointwise_mul(f, g), h) - phi(f, pointwise_mul(g, h))


class ExpansionCheck(BaseModel):
    defect: complex
    expansion: complex
    bound: float


def frequency_expansion_defect(
    phi: Callable, f: FourierElement, g: FourierElement, h: FourierElement
) -> ExpansionCheck:
    """Expand the defect for g over the characters e_k.

    The defect is linear in g, so it equals sum g^(k) defect(e_k), and it is bounded by
    sum |g^(k)| . max_k |defect(e_k)|.
    """
    _require_finite(g)
    terms = {n: associativity_defect(phi, f, character(n), h) for n in g.coeffs}
    expansion = sum((c * terms[n] for n, c in g.coeffs.items()), 0j)
    worst = max((abs(t) for t in terms.values()), default=0.0)
    return ExpansionCheck(
        defect=associativity_defect(phi, f, g, h),
        expansion=expansion,
        bound=norm_a(g).upper * worst,
    )


def dilated_form(phi: Callable, f: FourierElement, h: FourierElement, n: int) -> Callable:
    """tau(a, b) = phi(f a_n, h b_n)."""

    def tau(a: FourierElement, b: FourierElement) -> complex:
        return phi(pointwise_mul(f, dilate(a, n)), pointwise_mul(h, dilate(b, n)))

    return tau
