"""Spectral zeta function Z(s) = sum lambda_n^-s and its continuation.

Z(s) Gamma(s) = int_0^1 t^(s-1) theta(t) dt + int_1^inf t^(s-1) theta(t) dt.
On (0, 1] theta is replaced by its small-time expansion E plus the remainder
R = theta - E.  The expansion part integrates in closed form,

    int_0^1 t^(s+j-1) dt = 1/(s+j),   int_0^1 t^(s+j-1) log t dt = -1/(s+j)^2,

which supplies the meromorphic continuation.  The remainder is integrated
numerically from a cutoff eps, chosen to balance the neglected piece
int_0^eps (which is O(eps^(Re s + rho))) against cancellation noise in
theta - E at small t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import OrderError, ParityError, PoleProximity
from .expand import HeatExpansion, expand_full, expand_odd_power, expand_perturbed
from .heatsum import theta
from .lattice import LatticeSpec, ensure_valid, lambda_at, odd_decompose
from .quadrature import integrate_log
from .specfun import gamma, rgamma

POLE_RADIUS = 1e-6
EPS_NOISE = 1.1e-16


@dataclass(frozen=True)
class ZetaResult:
    s: complex
    value: complex | None
    kind: str  # "regular" or "pole"
    residue: complex | None
    error_estimate: float

    def record(self) -> dict:
        return {
            "s": self.s,
            "value": self.value,
            "kind": self.kind,
            "residue": self.residue,
            "error_estimate": self.error_estimate,
        }


@lru_cache(maxsize=128)
def expansion_for(spec: LatticeSpec, N: int) -> HeatExpansion:
    """The small-time expansion used for the continuation (cached per spec, N)."""
    spec = ensure_valid(spec)
    if spec.power % 2 == 0:
        return expand_perturbed(spec, N)
    if spec.rho is not None:
        return expand_odd_power(spec)
    return expand_full(spec, N)


def default_order(s: complex) -> int:
    N = max(3, math.ceil(-s.real) + 2)
    if s.real < -1:
        N = max(N, 5)
    return N


def _significant(exp: HeatExpansion):
    scale = max([abs(t.coeff) for t in exp.terms] + [1.0])
    return [t for t in exp.terms if abs(t.coeff) > 1e-14 * scale]


def poles(spec: LatticeSpec, N: int = 3) -> list[ZetaResult]:
    """Poles of Z visible from the expansion of order N, with residues."""
    exp = expansion_for(ensure_valid(spec), N)
    out = []
    for t in _significant(exp):
        j = t.exponent
        integer = j.denominator == 1 and j >= 0
        if t.log_power == 0 and not integer:
            res = t.coeff * rgamma(float(-j))
            out.append(ZetaResult(complex(-j), None, "pole", complex(res), exp.coeff_error))
        elif t.log_power == 1:
            if integer:
                k = int(j)
                # (1/Gamma(s)) * (-c/(s+k)^2) with 1/Gamma(s) = (-1)^k k! (s+k) + ...
                res = -t.coeff * (-1) ** k * math.factorial(k)
                out.append(ZetaResult(complex(-j), None, "pole", complex(res), exp.coeff_error))
            else:
                out.append(ZetaResult(complex(-j), None, "pole", None, exp.coeff_error))
    out.sort(key=lambda z: -z.s.real)
    return out


def _analytic_part(exp: HeatExpansion, s: complex) -> complex:
    acc = 0j
    for t in exp.terms:
        d = s + float(t.exponent)
        acc += t.coeff / d if t.log_power == 0 else -t.coeff / (d * d)
    return acc


def _theta_values(spec: LatticeSpec, ts: np.ndarray) -> np.ndarray:
    return np.array([theta(spec, float(t), 1e-18).value for t in np.ravel(ts)]).reshape(np.shape(ts))


def _choose_eps(spec, exp, sigma: float, target: float) -> tuple[float, float, float]:
    """Cutoff eps with (truncation bound, noise bound) at that eps."""
    rho = float(exp.remainder_exponent)
    samples = np.array([0.05, 0.1, 0.2])
    rem = np.abs(_theta_values(spec, samples) - exp(samples))
    C_R = 2.0 * float(np.max(rem / samples**rho)) + 1e-300
    terms = [(float(t.exponent), abs(t.coeff), t.log_power) for t in exp.terms]
    # smallest t at which theta is affordable: (46/t)^(1/M) terms per call
    floor = 46.0 / 2e5**spec.power

    def trunc(eps):
        return C_R * eps ** (sigma + rho) / (sigma + rho)

    def noise(eps):
        acc = 0.0
        for j, c, lp in terms:
            p = sigma + j
            scale = c * (1.0 + lp * abs(math.log(eps)))
            if abs(p) < 1e-12:
                acc += scale * abs(math.log(eps))
            else:
                acc += scale * abs(eps**p - 1.0) / abs(p)
        return 4.0 * EPS_NOISE * acc

    best = None
    for k in range(8, 97):
        eps = 10.0 ** (-k / 8)
        if eps < floor:
            break
        total = trunc(eps) + noise(eps)
        if best is None or total < best[0]:
            best = (total, eps)
        if total <= target:
            return eps, trunc(eps), noise(eps)
    eps = best[1]
    return eps, trunc(eps), noise(eps)


def zeta_value(spec: LatticeSpec, s, N: int | None = None, tol: float = 1e-10) -> ZetaResult:
    """Continued Z(s) with an error estimate."""
    spec = ensure_valid(spec)
    s = complex(s)
    if N is None:
        N = default_order(s)
    exp = expansion_for(spec, N)
    rho = float(exp.remainder_exponent)
    if s.real <= -rho + 0.1:
        raise OrderError(f"Re s = {s.real} is too far left for an expansion with remainder t^{rho}; raise N")
    for p in poles(spec, N):
        if abs(s - p.s) < POLE_RADIUS:
            raise PoleProximity(s, p.s, p.residue)

    if s.imag == 0 and s.real <= 0 and float(s.real).is_integer():
        # 1/Gamma vanishes: only the t^m term survives, giving (-1)^m m! c_m
        m = int(-s.real)
        val = (-1) ** m * math.factorial(m) * exp.coeff(m)
        return ZetaResult(s, complex(val), "regular", None, math.factorial(m) * exp.coeff_error + 1e-15)

    analytic = _analytic_part(exp, s)
    target = tol * max(1.0, abs(analytic))
    eps, trunc_err, noise_err = _choose_eps(spec, exp, s.real, target)

    def near(t):
        return t ** (s - 1) * (_theta_values(spec, t) - exp(t))

    def far(t):
        return t ** (s - 1) * _theta_values(spec, t)

    lam0 = lambda_at(spec, 0)
    T = max(2.0, 41.4 / lam0)
    q_tol = min(1e-9, target)
    i_near = integrate_log(near, eps, 1.0, q_tol)
    i_far = integrate_log(far, 1.0, T, q_tol)
    total = analytic + i_near.value + i_far.value
    rg = rgamma(s)
    value = rg * total
    err = abs(rg) * (trunc_err + noise_err + i_near.error + i_far.error + exp.coeff_error * abs(analytic))
    return ZetaResult(s, complex(value), "regular", None, float(err))


def zeta_value_limit(spec: LatticeSpec, s0, hs=(0.04, 0.02, 0.01), N: int | None = None) -> complex:
    """Z at s0 from symmetric samples Z(s0 +- h), Richardson-extrapolated in h^2."""
    s0 = complex(s0)
    if N is None:
        N = default_order(s0 - max(hs))
    f = [0.5 * (zeta_value(spec, s0 + h, N).value + zeta_value(spec, s0 - h, N).value) for h in hs]
    return _richardson_h2(f)


def _richardson_h2(f: list[complex]) -> complex:
    # successive halving assumed: h_i = h_0 / 2^i
    table = list(f)
    power = 4.0
    for _ in range(len(f) - 1):
        table = [(power * table[i + 1] - table[i]) / (power - 1) for i in range(len(table) - 1)]
        power *= 4.0
    return table[0]


def zeta_residue_limit(spec: LatticeSpec, s0, hs=(0.04, 0.02, 0.01), N: int | None = None) -> complex:
    """Residue at a simple pole s0 from h (Z(s0+h) - Z(s0-h)) / 2, Richardson-extrapolated."""
    s0 = complex(s0)
    if N is None:
        N = default_order(s0 - max(hs))
    f = [0.5 * h * (zeta_value(spec, s0 + h, N).value - zeta_value(spec, s0 - h, N).value) for h in hs]
    return _richardson_h2(f)


def zeta_special(spec: LatticeSpec, m: int) -> float:
    """Z(-m) = (-1)^m m! c_m from the heat coefficients."""
    spec = ensure_valid(spec)
    if m < 0:
        raise ValueError("m must be nonnegative")
    if spec.power % 2:
        if m != 0:
            raise ParityError(
                f"Z(-{m}) for an odd power is not fixed by the expansion to O(t) (pole at s=-1)"
            )
        return expansion_for(spec, 0).coeff(0)
    exp = expand_perturbed(spec, m)
    return (-1) ** m * math.factorial(m) * exp.coeff(m)


def zeta_residue(spec: LatticeSpec, k: int) -> float:
    """Residue of Z at s = 1/2 - k: c_{k-1/2} / Gamma(1/2 - k)."""
    spec = ensure_valid(spec)
    if k < 0:
        raise ValueError("k must be nonnegative")
    j = Fraction(2 * k - 1, 2)
    if spec.power % 2 == 0:
        exp = expand_perturbed(spec, max(k, 0))
    else:
        exp = expansion_for(spec, max(k, 1))
        if j >= exp.remainder_exponent:
            raise OrderError("odd-power expansions are resolved only to O(t)")
    return exp.coeff(j) / gamma(0.5 - k)


@dataclass(frozen=True)
class OddPoleResidue:
    m: int
    d_m: float
    kappa: float  # t log t coefficient of theta = Res_{s=-1} Z_m
    residue_at_minus_one: float
    lplus_residue_at_minus_m: float  # m * kappa = d_m


def log_pole_residue(spec: LatticeSpec) -> OddPoleResidue:
    spec = ensure_valid(spec)
    dec = odd_decompose(spec)
    kappa = dec.d_m / dec.m
    return OddPoleResidue(dec.m, dec.d_m, kappa, kappa, dec.m * kappa)


def product_coeff(spec: LatticeSpec, m: int) -> float:
    """lambda^-m coefficient of log W: (-1)^(m+1) Z(-m)/m."""
    spec = ensure_valid(spec)
    if m < 1:
        raise ValueError("m must be positive")
    if spec.power % 2:
        raise ParityError("for odd powers the lambda^-m coefficients mix with (log lambda)/lambda terms")
    return (-1) ** (m + 1) * zeta_special(spec, m) / m
