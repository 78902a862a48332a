"""Truncated power and Laurent series with explicit truncation tracking.

A ``TruncatedSeries`` knows its coefficients from ``min_degree`` up to
``trunc_order``.  Arithmetic propagates how far the result is known and never
invents coefficients past that point.  Series flagged ``exact`` are
polynomials: every coefficient above ``trunc_order`` is zero, so they can be
extended freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import OddnessError, RadiusError, TruncationError

INF = math.inf


def _conv(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """First n coefficients of the product of two coefficient arrays."""
    out = np.zeros(n)
    for i in range(min(len(a), n)):
        if a[i] == 0.0:
            continue
        m = min(len(b), n - i)
        out[i : i + m] += a[i] * b[:m]
    return out


@dataclass(frozen=True)
class TruncatedSeries:
    min_degree: int
    coeffs: tuple[float, ...]
    trunc_order: int
    radius: float = INF
    exact: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) != self.trunc_order - self.min_degree + 1:
            raise ValueError(
                f"expected {self.trunc_order - self.min_degree + 1} coefficients, "
                f"got {len(self.coeffs)}"
            )
        if not self.radius > 0:
            raise RadiusError("radius must be positive")
        if not all(math.isfinite(c) for c in self.coeffs):
            raise ValueError("series coefficients must be finite")

    # construction

    @classmethod
    def polynomial(cls, coeffs, radius: float = INF, min_degree: int = 0) -> TruncatedSeries:
        coeffs = [float(c) for c in coeffs] or [0.0]
        return cls(min_degree, tuple(coeffs), min_degree + len(coeffs) - 1, radius, exact=True)

    @classmethod
    def truncated(cls, coeffs, radius: float = INF, min_degree: int = 0) -> TruncatedSeries:
        coeffs = [float(c) for c in coeffs]
        if not coeffs:
            raise ValueError("a truncated series needs at least one coefficient")
        return cls(min_degree, tuple(coeffs), min_degree + len(coeffs) - 1, radius, exact=False)

    @classmethod
    def zero(cls, radius: float = INF) -> TruncatedSeries:
        return cls.polynomial([0.0], radius)

    @classmethod
    def one(cls, radius: float = INF) -> TruncatedSeries:
        return cls.polynomial([1.0], radius)

    # inspection

    @property
    def known_to(self) -> float:
        return INF if self.exact else self.trunc_order

    def coeff(self, d: int) -> float:
        if d < self.min_degree:
            return 0.0
        if d > self.trunc_order:
            if self.exact:
                return 0.0
            raise TruncationError(
                f"coefficient of degree {d} requested; series known to {self.trunc_order}"
            )
        return self.coeffs[d - self.min_degree]

    def degree(self) -> int | None:
        """Highest degree with a nonzero known coefficient."""
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i] != 0.0:
                return self.min_degree + i
        return None

    def is_zero(self) -> bool:
        return self.exact and self.degree() is None

    def array(self) -> np.ndarray:
        return np.array(self.coeffs)

    def evaluate(self, z):
        """Horner evaluation of the known coefficients (z scalar or array)."""
        z = np.asarray(z) if not np.isscalar(z) else z
        acc = 0.0 * z
        for c in reversed(self.coeffs):
            acc = acc * z + c
        if self.min_degree:
            acc = acc * z ** float(self.min_degree) if self.min_degree > 0 else acc / z ** float(-self.min_degree)
        return acc

    __call__ = evaluate

    # reshaping

    def extend(self, order: int) -> TruncatedSeries:
        """Pad an exact series with zeros up to ``order``."""
        if order <= self.trunc_order:
            return self
        if not self.exact:
            raise TruncationError(f"cannot extend an inexact series past {self.trunc_order}")
        pad = (0.0,) * (order - self.trunc_order)
        return TruncatedSeries(self.min_degree, self.coeffs + pad, order, self.radius, True)

    def truncate(self, order: int) -> TruncatedSeries:
        """Forget coefficients above ``order``."""
        if order > self.trunc_order:
            if self.exact:
                return self.extend(order)
            raise TruncationError(f"series is known only to degree {self.trunc_order}")
        if order < self.min_degree:
            return TruncatedSeries(order, (0.0,), order, self.radius, False)
        n = order - self.min_degree + 1
        exact = self.exact and all(c == 0.0 for c in self.coeffs[n:])
        return TruncatedSeries(self.min_degree, self.coeffs[:n], order, self.radius, exact)

    def trimmed(self) -> TruncatedSeries:
        """Drop trailing zeros of an exact series."""
        if not self.exact:
            return self
        d = self.degree()
        if d is None:
            return TruncatedSeries.zero(self.radius)
        return TruncatedSeries(self.min_degree, self.coeffs[: d - self.min_degree + 1], d, self.radius, True)

    def shift(self, k: int) -> TruncatedSeries:
        """Multiply by z^k."""
        return TruncatedSeries(self.min_degree + k, self.coeffs, self.trunc_order + k, self.radius, self.exact)

    def with_radius(self, radius: float) -> TruncatedSeries:
        return TruncatedSeries(self.min_degree, self.coeffs, self.trunc_order, radius, self.exact)

    # arithmetic

    def _window(self, lo: int, hi: int) -> np.ndarray:
        return np.array([self.coeff(d) for d in range(lo, hi + 1)])

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(self.min_degree, tuple(-c for c in self.coeffs), self.trunc_order, self.radius, self.exact)

    def __add__(self, other) -> TruncatedSeries:
        if isinstance(other, (int, float)):
            other = TruncatedSeries.polynomial([float(other)])
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        lo = min(self.min_degree, other.min_degree)
        known = min(self.known_to, other.known_to)
        if known == INF:
            hi = max(self.trunc_order, other.trunc_order)
        else:
            hi = int(known)
        coeffs = self._window(lo, hi) + other._window(lo, hi)
        return TruncatedSeries(lo, tuple(coeffs), hi, min(self.radius, other.radius), known == INF)

    __radd__ = __add__

    def __sub__(self, other) -> TruncatedSeries:
        return self + (-other if isinstance(other, TruncatedSeries) else -float(other))

    def __rsub__(self, other) -> TruncatedSeries:
        return (-self) + other

    def scale(self, c: float) -> TruncatedSeries:
        return TruncatedSeries(self.min_degree, tuple(c * x for x in self.coeffs), self.trunc_order, self.radius, self.exact)

    def __mul__(self, other) -> TruncatedSeries:
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        lo = self.min_degree + other.min_degree
        # degree d of the product needs self to d - other.min_degree and
        # other to d - self.min_degree
        known = min(self.known_to + other.min_degree, other.known_to + self.min_degree)
        exact = known == INF
        hi = self.trunc_order + other.trunc_order if exact else int(known)
        n = hi - lo + 1
        a = self._window(self.min_degree, self.min_degree + n - 1)
        b = other._window(other.min_degree, other.min_degree + n - 1) if not exact else np.array(other.coeffs)
        if exact:
            a = np.array(self.coeffs)
        coeffs = _conv(a, b, n)
        return TruncatedSeries(lo, tuple(coeffs), hi, min(self.radius, other.radius), exact)

    __rmul__ = __mul__

    def mul_to(self, other: TruncatedSeries, order: int) -> TruncatedSeries:
        """Product truncated at ``order`` (cheaper than the full product)."""
        prod_known = min(self.known_to + other.min_degree, other.known_to + self.min_degree)
        if order > prod_known:
            raise TruncationError(f"product known only to degree {prod_known}")
        lo = self.min_degree + other.min_degree
        n = order - lo + 1
        if n <= 0:
            return TruncatedSeries(order, (0.0,), order, min(self.radius, other.radius), False)
        a = self._window(self.min_degree, self.min_degree + n - 1) if not self.exact else np.array(self.coeffs[:n])
        b = other._window(other.min_degree, other.min_degree + n - 1) if not other.exact else np.array(other.coeffs[:n])
        coeffs = _conv(a, b, n)
        full_degree = self.trunc_order + other.trunc_order
        exact = self.exact and other.exact and order >= full_degree
        return TruncatedSeries(lo, tuple(coeffs), order, min(self.radius, other.radius), exact)

    def __pow__(self, r: int) -> TruncatedSeries:
        if not isinstance(r, int) or r < 0:
            return NotImplemented
        out = TruncatedSeries(0, (1.0,), 0, self.radius, True)
        base = self
        for _ in range(r):
            out = out * base
        return out

    def pow_to(self, r: int, order: int) -> TruncatedSeries:
        out = TruncatedSeries(0, (1.0,), 0, self.radius, True)
        for _ in range(r):
            out = out.mul_to(self, order)
        if out.trunc_order < order:
            out = out.truncate(order) if out.exact else out
        return out


def _check_odd(rho: TruncatedSeries) -> None:
    if rho.min_degree < 0:
        raise OddnessError("rho must be a power series (no negative degrees)")
    for i, c in enumerate(rho.coeffs):
        d = rho.min_degree + i
        if d % 2 == 0 and c != 0.0:
            raise OddnessError(f"rho has a nonzero even-degree coefficient at z^{d}")


def sigma_from_rho(rho: TruncatedSeries) -> TruncatedSeries:
    """rho(z) = z sigma(z^2): sigma_j = rho_{2j+1}."""
    _check_odd(rho)
    if rho.exact:
        d = rho.degree()
        top = 0 if d is None else (d - 1) // 2
    else:
        top = (rho.trunc_order - 1) // 2
        if top < 0:
            raise TruncationError("rho is not known to degree 1")
    coeffs = [rho.coeff(2 * j + 1) for j in range(top + 1)]
    return TruncatedSeries(0, tuple(coeffs), top, rho.radius**2, rho.exact)


def _u() -> TruncatedSeries:
    return TruncatedSeries.polynomial([0.0, 1.0])


def q_from_sigma(sigma: TruncatedSeries) -> TruncatedSeries:
    """q(u) = -2 sigma(u) + u sigma(u)^2."""
    return sigma.scale(-2.0) + (sigma * sigma).shift(1)


def q_power_from_sigma(sigma: TruncatedSeries, m: int) -> TruncatedSeries:
    """q_m(u) = ((1 - u sigma(u))^m - 1)/u for any m >= 1.

    Expanded binomially as sum_j C(m,j) (-1)^j u^(j-1) sigma^j, so that m = 2
    performs exactly the operations of ``q_from_sigma``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    out = None
    power = None
    for j in range(1, m + 1):
        power = sigma if power is None else power * sigma
        term = power.scale(comb(m, j) * (-1) ** j)
        if j > 1:
            term = term.shift(j - 1)
        out = term if out is None else out + term
    return out.with_radius(sigma.radius)


def qp_from_sigma(sigma: TruncatedSeries, p: int) -> TruncatedSeries:
    """q_p for the even power 2p."""
    if p < 1:
        raise ValueError("p must be positive")
    return q_power_from_sigma(sigma, 2 * p)


def laurent_tau_power(rho: TruncatedSeries, m: int, order: int) -> TruncatedSeries:
    """(z^-1 - rho(z))^m as a Laurent series from degree -m to ``order``."""
    _check_odd(rho)
    if m < 1:
        raise ValueError("m must be positive")
    need = order + m  # degree needed in (1 - z rho)^m
    one_minus = TruncatedSeries.one() - rho.shift(1)
    if not one_minus.exact and one_minus.trunc_order < need:
        raise TruncationError(
            f"rho known to degree {rho.trunc_order}; degree {need - 1} needed for order {order}"
        )
    p = one_minus.pow_to(m, need) if not one_minus.exact else (one_minus**m).extend(need).truncate(need)
    out = p.shift(-m)
    return TruncatedSeries(out.min_degree, out.coeffs, out.trunc_order, rho.radius, out.exact)


@dataclass(frozen=True)
class WeightCoeffs:
    """Coefficients c_{r,k} of g(u)^r with a Cauchy bound.

    The certificate is |c_{r,k}| u0^k <= bound_constant * bound_ratio^k, which
    follows from Cauchy's estimate on the circle |u| = circle_radius.
    """

    r: int
    coeffs: tuple[float, ...]
    bound_constant: float
    bound_ratio: float
    u0: float
    circle_radius: float
    exact: bool = False
    series: TruncatedSeries | None = field(default=None, compare=False, repr=False)

    def coefficient_bound(self, k: int) -> float:
        """Certified bound on |c_{r,k}|."""
        return self.bound_constant * self.bound_ratio**k / self.u0**k


def circle_max(g: TruncatedSeries, radius: float, samples: int = 512) -> float:
    theta = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    z = radius * np.exp(1j * theta)
    return float(np.max(np.abs(g.evaluate(z))))


def weight_coeffs(g: TruncatedSeries, r: int, u0: float) -> WeightCoeffs:
    if r < 0:
        raise ValueError("r must be nonnegative")
    if not u0 < g.radius:
        raise RadiusError(f"u0={u0} is not inside the radius {g.radius}")
    if math.isinf(g.radius):
        circle = 4.0 * u0
    else:
        circle = 0.5 * (u0 + g.radius)
    gr = g**r
    bound = (1.1 * circle_max(g, circle)) ** r if r else 1.0
    if bound == 0.0:
        bound = 1e-300
    return WeightCoeffs(r, gr.coeffs, bound, u0 / circle, u0, circle, gr.exact, gr)
