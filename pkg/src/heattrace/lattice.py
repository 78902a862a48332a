"""Perturbed power lattices lambda_n = x^M + x^(M-2) g(x^-2), x = n + a, n >= 0."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import ParityError, PositivityError, RadiusError
from .series import (
    TruncatedSeries,
    laurent_tau_power,
    q_from_sigma,
    q_power_from_sigma,
    sigma_from_rho,
)


class Source(enum.Enum):
    PURE = "pure"
    EXPLICIT_G = "explicit_g"
    FROM_RHO = "from_rho"


@dataclass(frozen=True)
class LatticeSpec:
    offset: float
    power: int
    g: TruncatedSeries
    source: Source = Source.EXPLICIT_G
    rho: TruncatedSeries | None = None
    # filled in by validate()
    q_star: float | None = None
    g_slope: float | None = None
    monotone_from: int | None = None
    validated: bool = False

    index_start = 0

    def __post_init__(self):
        if not self.offset > 0:
            raise ValueError("offset a must be positive")
        if int(self.power) != self.power or self.power < 1:
            raise ValueError("power M must be a positive integer")
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "power", int(self.power))

    @property
    def u0(self) -> float:
        return self.offset**-2

    @property
    def is_pure(self) -> bool:
        return self.g.is_zero()

    # constructors

    @classmethod
    def pure(cls, offset: float = 1.5, power: int = 2) -> LatticeSpec:
        return cls(offset, power, TruncatedSeries.zero(), Source.PURE)

    @classmethod
    def from_g(cls, g: TruncatedSeries, offset: float = 1.5, power: int = 2) -> LatticeSpec:
        return cls(offset, power, g, Source.EXPLICIT_G)

    @classmethod
    def from_rho(cls, rho: TruncatedSeries, power: int = 2, offset: float = 1.5) -> LatticeSpec:
        """lambda_n = (x - rho(1/x))^power, rewritten in normal form."""
        sigma = sigma_from_rho(rho)
        if power == 2:
            g = q_from_sigma(sigma)
        else:
            g = q_power_from_sigma(sigma, power)
        return cls(offset, power, g, Source.FROM_RHO, rho)

    def with_offset(self, offset: float) -> LatticeSpec:
        return replace(self, offset=offset, q_star=None, g_slope=None, monotone_from=None, validated=False)


def g_values(spec: LatticeSpec, u):
    return spec.g.evaluate(u)


def _lambda_from_x(spec: LatticeSpec, x: np.ndarray) -> np.ndarray:
    M = spec.power
    if spec.is_pure:
        return x**M
    u = 1.0 / (x * x)
    return x**M + x ** (M - 2) * spec.g.evaluate(u)


def _sup_on_interval(f, u0: float, samples: int = 1024) -> float:
    u = np.linspace(0.0, u0, samples)
    return float(np.max(np.abs(f(u))))


def _derivative(g: TruncatedSeries) -> TruncatedSeries:
    coeffs = [d * g.coeff(d) for d in range(max(1, g.min_degree), g.trunc_order + 1)]
    if not coeffs:
        return TruncatedSeries.zero()
    return TruncatedSeries(0, tuple(coeffs), len(coeffs) - 1, g.radius, g.exact)


@lru_cache(maxsize=256)
def validate(spec: LatticeSpec) -> LatticeSpec:
    """Check analyticity, positivity and eventual monotonicity; record Q*, n1."""
    if spec.validated:
        return spec
    a, M = spec.offset, spec.power
    u0 = spec.u0
    if not u0 < spec.g.radius:
        raise RadiusError(f"u0 = a^-2 = {u0} must lie inside the radius {spec.g.radius} of g")
    if spec.is_pure:
        q_star, slope = 0.0, 0.0
    else:
        q_star = 1.05 * _sup_on_interval(spec.g.evaluate, u0)
        slope = 1.05 * _sup_on_interval(_derivative(spec.g).evaluate, u0)
    # lambda_n = x^(M-2) (x^2 + g(u)) > 0 as soon as x^2 > Q*
    n_star = max(0, math.ceil(math.sqrt(q_star) - a) + 1)
    lam = _lambda_from_x(spec, np.arange(n_star + 1) + a)
    bad = np.nonzero(~(lam > 0))[0]
    if len(bad):
        i = int(bad[0])
        raise PositivityError(i, float(lam[i]))
    # d lambda/dx = x^(M-5) [M x^4 + (M-2) x^2 g(u) - 2 g'(u)]; positive once
    # M y^2 - |M-2| Q* y - 2 G1 > 0 with y = x^2.
    disc = ((M - 2) * q_star) ** 2 + 8.0 * M * slope
    y = (abs(M - 2) * q_star + math.sqrt(disc)) / (2.0 * M)
    n_c = max(0, math.ceil(math.sqrt(y) - a))
    lam = _lambda_from_x(spec, np.arange(n_c + 2) + a)
    n1 = n_c
    while n1 > 0 and lam[n1] > lam[n1 - 1]:
        n1 -= 1
    return replace(spec, q_star=q_star, g_slope=slope, monotone_from=n1, validated=True)


def ensure_valid(spec: LatticeSpec) -> LatticeSpec:
    return spec if spec.validated else validate(spec)


def lambda_at(spec: LatticeSpec, n: int) -> float:
    x = n + spec.offset
    M = spec.power
    if spec.is_pure:
        return x**M
    return x**M + x ** (M - 2) * float(spec.g.evaluate(x**-2))


def lambdas(spec: LatticeSpec, start: int, stop: int) -> np.ndarray:
    """lambda_n for start <= n < stop as a float array."""
    x = np.arange(start, stop, dtype=float) + spec.offset
    return _lambda_from_x(spec, x)


def lower_envelope(spec: LatticeSpec, x):
    """A lower bound L(x) <= lambda at x, valid for x >= a: x^(M-2) (x^2 - Q*)."""
    spec = ensure_valid(spec)
    return x ** (spec.power - 2) * (x * x - spec.q_star)


def tau_values(spec: LatticeSpec, n: np.ndarray) -> np.ndarray:
    """tau_n = x - rho(1/x) for specs built from rho."""
    if spec.rho is None:
        raise ValueError("spec has no rho series")
    x = np.asarray(n, dtype=float) + spec.offset
    return x - spec.rho.evaluate(1.0 / x)


# odd powers


@dataclass(frozen=True)
class OddDecomposition:
    """tau_n^m = x^m + sum_j c_{m,j} x^(m-2j) + d_m / x + O(x^-3)."""

    m: int
    poly_coeffs: tuple[float, ...]  # c_{m,1}, ..., c_{m,(m-1)/2}
    d_m: float
    remainder_exponent: int = -3

    def b_series(self) -> TruncatedSeries:
        """g for the polynomial part b_n = x^m + x^(m-2) g(x^-2)."""
        if not self.poly_coeffs:
            return TruncatedSeries.zero()
        return TruncatedSeries.polynomial(self.poly_coeffs)


def odd_decompose(spec: LatticeSpec, order: int = 1) -> OddDecomposition:
    m = spec.power
    if m % 2 == 0:
        raise ParityError(f"odd_decompose needs an odd power, got {m}; d_m vanishes for even powers")
    if spec.rho is None:
        raise ParityError("odd_decompose needs a spec built from rho")
    tau_m = laurent_tau_power(spec.rho, m, max(order, 1))
    poly = tuple(tau_m.coeff(2 * j - m) for j in range(1, (m - 1) // 2 + 1))
    return OddDecomposition(m, poly, tau_m.coeff(1))


# counting


@dataclass(frozen=True)
class CountReport:
    Lambda: float
    count: int
    lower_bound: int
    upper_bound: int


def is_hb_instance(spec: LatticeSpec) -> bool:
    """M = 2, a = 3/2, g from an odd rho with nonnegative coefficients and rho(2) <= 1/2."""
    rho = spec.rho
    if spec.power != 2 or spec.offset != 1.5 or spec.source is not Source.FROM_RHO or rho is None:
        return False
    if not rho.exact or rho.radius < 2.0:
        return False
    if any(c < 0 for c in rho.coeffs):
        return False
    return float(rho.evaluate(2.0)) <= 0.5


def count(spec: LatticeSpec, Lam: float) -> CountReport:
    """N(Lambda) = #{n : lambda_n <= Lambda}."""
    spec = ensure_valid(spec)
    if Lam < 0:
        raise ValueError("Lambda must be nonnegative")
    n1 = spec.monotone_from
    head = lambdas(spec, 0, n1)
    c = int(np.count_nonzero(head <= Lam))
    if lambda_at(spec, n1) <= Lam:
        lo = n1  # lambda_lo <= Lam
        step = 1
        hi = n1 + step
        while lambda_at(spec, hi) <= Lam:
            lo = hi
            step *= 2
            hi = n1 + step
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if lambda_at(spec, mid) <= Lam:
                lo = mid
            else:
                hi = mid
        c += lo - n1 + 1
    if is_hb_instance(spec):
        r = math.sqrt(Lam)
        return CountReport(Lam, c, math.floor(r - 0.5), math.floor(r))
    return CountReport(Lam, c, c, c)
