"""Small-time expansions of heat traces by Mellin residues, and their Laplace images.

The building block is

    Theta_w(t) = sum_{n>=0} (n+a)^-w exp(-(n+a)^M t)
               = (1/2 pi i) int Gamma(s) zeta(M s + w, a) t^-s ds,

whose residues give: the zeta pole at s* = (1-w)/M, the Gamma poles at
s = -k, and a double pole (hence t^k log t) when both coincide.  A perturbed
lattice is reduced to these sums by expanding exp(-t x^(M-2) g(x^-2)) in
powers of t and g(u)^r in powers of u.

Exponents are exact ``Fraction`` values; coefficients are floats.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, ParityError
from .lattice import LatticeSpec, ensure_valid, odd_decompose
from .series import TruncatedSeries, weight_coeffs
from .specfun import digamma, gamma, hurwitz_zeta

# coefficients below this (relative to the largest one) count as zero when
# deciding where the first omitted term sits
ZERO_REL = 1e-13


@dataclass(frozen=True)
class ExpansionTerm:
    exponent: Fraction
    log_power: int
    coeff: float

    @property
    def key(self) -> tuple[Fraction, int]:
        return (self.exponent, self.log_power)


@dataclass(frozen=True)
class HeatExpansion:
    """sum of coeff * x^exponent * (log x)^log_power + O(x^remainder_exponent).

    ``variable`` is "t" for small-time expansions.  For "1/lambda" a term means
    coeff * lambda^-exponent * (log lambda)^log_power as lambda -> infinity.
    """

    terms: tuple[ExpansionTerm, ...]
    remainder_exponent: Fraction
    provenance: str = ""
    variable: str = "t"
    coeff_error: float = 0.0
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        terms = tuple(sorted(self.terms, key=lambda s: s.key))
        keys = [s.key for s in terms]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (exponent, log_power) terms")
        for s in terms:
            if s.log_power not in (0, 1):
                raise ValueError("log powers are restricted to 0 and 1")
            below = s.exponent < self.remainder_exponent or (
                s.exponent == self.remainder_exponent and s.log_power > 0
            )
            if not below:
                raise ValueError(f"term exponent {s.exponent} not below remainder {self.remainder_exponent}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "remainder_exponent", Fraction(self.remainder_exponent))

    def coeff(self, exponent, log_power: int = 0) -> float:
        e = Fraction(exponent)
        for s in self.terms:
            if s.exponent == e and s.log_power == log_power:
                return s.coeff
        return 0.0

    @property
    def has_logs(self) -> bool:
        return any(s.log_power for s in self.terms)

    def evaluate(self, x):
        """Value at t (variable "t") or at lambda (variable "1/lambda")."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        lx = np.log(x)
        for s in self.terms:
            e = float(s.exponent)
            if self.variable == "t":
                v = s.coeff * x**e
            else:
                v = s.coeff * x**-e
            if s.log_power:
                v = v * lx
            out = out + v
        return out if out.ndim else float(out)

    __call__ = evaluate

    def records(self) -> list[dict]:
        return [
            {"num": s.exponent.numerator, "den": s.exponent.denominator, "logpow": s.log_power, "coeff": s.coeff}
            for s in self.terms
        ]

    def truncated(self, limit) -> HeatExpansion:
        """Keep only terms with exponent < limit."""
        limit = Fraction(limit)
        kept = tuple(s for s in self.terms if s.exponent < limit)
        rem = min(limit, self.remainder_exponent)
        return HeatExpansion(kept, rem, self.provenance, self.variable, self.coeff_error, self.notes)


def _to_terms(acc: dict) -> tuple[ExpansionTerm, ...]:
    return tuple(
        ExpansionTerm(e, l, math.fsum(parts)) for (e, l), parts in sorted(acc.items()) if parts
    )


def _theta_terms(a: float, M: int, w: int, limit: Fraction) -> dict:
    """Residues of Gamma(s) zeta(Ms+w, a) t^-s with exponent < limit."""
    out: dict = defaultdict(list)
    s_star = Fraction(1 - w, M)
    if not (s_star.denominator == 1 and s_star <= 0):
        e = -s_star
        if e < limit:
            out[(e, 0)].append(gamma(float(s_star)) / M)
    k = 0
    while k < limit:
        sign = (-1) ** k / math.factorial(k)
        if w == 1 + k * M:
            out[(Fraction(k), 1)].append(-sign / M)
            out[(Fraction(k), 0)].append(sign * (digamma(float(k + 1)) / M - digamma(a)))
        else:
            out[(Fraction(k), 0)].append(sign * hurwitz_zeta(float(w - M * k), a))
        k += 1
    return out


def _nonzero_split(terms: tuple[ExpansionTerm, ...], cut: Fraction, fallback: Fraction):
    """Split into (kept, remainder exponent): first omitted nonzero term or fallback."""
    scale = max([abs(s.coeff) for s in terms] + [1.0])
    kept = tuple(s for s in terms if s.exponent < cut)
    rest = [s.exponent for s in terms if s.exponent >= cut and abs(s.coeff) > ZERO_REL * scale]
    return kept, (min(rest) if rest else fallback)


def expand_general_theta(a: float, M: int, w: int, K: int) -> HeatExpansion:
    """Expansion of sum (n+a)^-w exp(-(n+a)^M t) through all exponents < K+1."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    if not a > 0 or M < 1:
        raise DomainError("need a > 0 and M >= 1")
    cut = Fraction(K + 1)
    look = Fraction(K + 2)
    terms = _to_terms(_theta_terms(float(a), int(M), int(w), look))
    kept, rem = _nonzero_split(terms, cut, look)
    return HeatExpansion(kept, rem, f"Mellin residues of Gamma(s) zeta({M}s+{w}, {a})")


def taylor_error_exponent(M: int, R: int) -> tuple[Fraction, bool]:
    """Order in t of the error from truncating exp(-t x^(M-2) g) after t^R.

    Returns (exponent, has_log); the bound is t^(R+1) times
    sum_n x^((M-2)(R+1)) exp(-x^M t).
    """
    growth = Fraction((M - 2) * (R + 1) + 1, M)
    return Fraction(R + 1) - max(Fraction(0), growth), growth == 0


def _taylor_order(M: int, limit: Fraction) -> int:
    R = 0
    while True:
        e, has_log = taylor_error_exponent(M, R)
        if e > limit or (e == limit and not has_log):
            return R
        R += 1


def _coefficient_tail_bound(wc, k: int, a: float, M: int, r: int, inner: Fraction) -> float:
    """Bound on the contribution of all c_{r,k'} with k' >= k.

    Valid once every zeta argument w - M j (j < inner) exceeds 1, using
    zeta(p, a) <= a^-p (1 + a/(p-1)) and |c_{r,k}| a^-2k <= C rho^k.
    """
    w = 2 * k - (M - 2) * r
    worst = 0.0
    j = 0
    while j < inner:
        p = w - M * j
        if p <= 1.5:
            return math.inf
        worst = max(worst, a ** ((M - 2) * r + M * j) * (1.0 + a / (p - 1.0)) / math.factorial(j))
        j += 1
    ratio = wc.bound_ratio
    return wc.bound_constant * ratio**k / (1.0 - ratio) * worst / math.factorial(r)


def _assemble(a: float, M: int, g: TruncatedSeries, limit: Fraction, allow_logs: bool) -> tuple[tuple[ExpansionTerm, ...], float, int]:
    """All terms with exponent < limit of sum exp(-t (x^M + x^(M-2) g(x^-2))).

    Returns (terms, coefficient error bound, Taylor order used).
    """
    acc: dict = defaultdict(list)
    if g.is_zero():
        acc = _theta_terms(a, M, 0, limit)
        return _to_terms(acc), 0.0, 0
    u0 = a**-2
    R = _taylor_order(M, limit)
    err = 0.0
    for r in range(R + 1):
        inner = limit - r
        wc = weight_coeffs(g, r, u0)
        fac = (-1) ** r / math.factorial(r)
        known = len(wc.coeffs) if not wc.exact else len(wc.series.trimmed().coeffs)
        k = 0
        while True:
            if k >= known:
                if not wc.exact:
                    err += _coefficient_tail_bound(wc, k, a, M, r, inner)
                break
            c = wc.coeffs[k]
            if c != 0.0:
                w = 2 * k - (M - 2) * r
                for (e, l), parts in _theta_terms(a, M, w, inner).items():
                    if l and not allow_logs:
                        raise AssertionError("logarithmic term in a log-free regime")
                    acc[(e + r, l)].append(fac * c * math.fsum(parts))
            k += 1
            if not wc.exact and k % 4 == 0:
                if _coefficient_tail_bound(wc, k, a, M, r, inner) < 1e-17:
                    break
    return _to_terms(acc), err, R


def expand_perturbed(spec: LatticeSpec, K: int) -> HeatExpansion:
    """theta(t) for an even-power lattice, through all exponents < K+1."""
    spec = ensure_valid(spec)
    M = spec.power
    if M % 2:
        raise ParityError(f"expand_perturbed needs an even power, got {M}; use expand_odd_power")
    if K < 0:
        raise ValueError("K must be nonnegative")
    cut, look = Fraction(K + 1), Fraction(K + 2)
    terms, err, R = _assemble(spec.offset, M, spec.g, look, allow_logs=False)
    kept, rem = _nonzero_split(terms, cut, look)
    if spec.is_pure:
        prov = f"Mellin residues of Gamma(s) zeta({M}s, {spec.offset})"
    else:
        prov = f"exp Taylor order {R}, weight series of g^r, Mellin residues"
    return HeatExpansion(kept, rem, prov, coeff_error=err)


def expand_odd_power(spec: LatticeSpec) -> HeatExpansion:
    """theta(t) for tau_n^m, m odd: polynomial-part expansion plus (d_m/m) t log t + O(t)."""
    spec = ensure_valid(spec)
    m = spec.power
    if m % 2 == 0:
        raise ParityError(f"expand_odd_power needs an odd power, got {m}")
    dec = odd_decompose(spec)
    terms, err, _ = _assemble(spec.offset, m, dec.b_series(), Fraction(1), allow_logs=False)
    kept = [s for s in terms if s.exponent < 1]
    kept.append(ExpansionTerm(Fraction(1), 1, dec.d_m / m))
    prov = f"polynomial part b_n (power {m}) plus d_m/m t log t, d_m = {dec.d_m!r}"
    return HeatExpansion(tuple(kept), Fraction(1), prov, coeff_error=err)


def expand_full(spec: LatticeSpec, K: int) -> HeatExpansion:
    """Full residue expansion of theta for any power (logs allowed), exponents < K+1.

    For odd powers the t^k log t terms come from double poles; this is the
    route used to cross-check d_m/m against the Taylor pipeline.
    """
    spec = ensure_valid(spec)
    cut, look = Fraction(K + 1), Fraction(K + 2)
    terms, err, R = _assemble(spec.offset, spec.power, spec.g, look, allow_logs=True)
    kept, rem = _nonzero_split(terms, cut, look)
    return HeatExpansion(kept, rem, f"full residue expansion, Taylor order {R}", coeff_error=err)


def structural_exponents(M: int, max_power) -> list[Fraction]:
    """Exponents that can occur: (2i-1)/M for i >= 0, and the integers, up to max_power."""
    top = Fraction(max_power)
    out = set()
    i = 0
    while Fraction(2 * i - 1, M) <= top:
        out.add(Fraction(2 * i - 1, M))
        i += 1
    k = 0
    while k <= top:
        out.add(Fraction(k))
        k += 1
    return sorted(out)


# Laplace transforms


def watson_transform(exp: HeatExpansion) -> HeatExpansion:
    """Term-by-term Laplace transform: int_0^inf e^(-lambda t) (expansion) dt."""
    if exp.variable != "t":
        raise DomainError("watson_transform expects a small-t expansion")
    acc: dict = defaultdict(list)
    for s in exp.terms:
        if s.exponent <= -1:
            raise DomainError(f"exponent {s.exponent} <= -1 has no Laplace transform")
        j = s.exponent
        gj = gamma(float(j + 1))
        e = j + 1
        if s.log_power == 0:
            acc[(e, 0)].append(s.coeff * gj)
        else:
            # d/d alpha of Gamma(alpha+1) lambda^(-alpha-1) at alpha = j
            acc[(e, 0)].append(s.coeff * gj * digamma(float(j + 1)))
            acc[(e, 1)].append(-s.coeff * gj)
    return HeatExpansion(
        _to_terms(acc),
        exp.remainder_exponent + 1,
        f"Laplace transform of [{exp.provenance}]",
        variable="1/lambda",
        coeff_error=exp.coeff_error,
    )


def logW_expansion(exp: HeatExpansion) -> HeatExpansion:
    """Large-lambda expansion of log W(lambda) = sum log(1 + lambda/lambda_n).

    The antiderivative in lambda of the Laplace-transformed heat expansion.
    The additive constant is not determined by the heat coefficients and is
    left out (fit it from data if needed).
    """
    res = watson_transform(exp)
    acc: dict = defaultdict(list)
    for s in res.terms:
        e, c = s.exponent, s.coeff
        if s.log_power == 0:
            if e == 1:
                acc[(Fraction(0), 1)].append(c)  # c log lambda
            else:
                acc[(e - 1, 0)].append(c / (1 - e))
        else:
            if e == 1:
                raise DomainError("a t^0 log t heat term would give (log lambda)^2")
            # int lambda^-e log lambda = lambda^(1-e) log lambda/(1-e) - lambda^(1-e)/(1-e)^2
            acc[(e - 1, 1)].append(c / (1 - e))
            acc[(e - 1, 0)].append(-c / (1 - e) ** 2)
    notes = ("additive constant C_W omitted: fit-only",)
    if exp.has_logs:
        notes += ("lambda^-1 companion of t log t uses the antiderivative constant convention",)
    return HeatExpansion(
        _to_terms(acc),
        res.remainder_exponent - 1,
        f"antiderivative of [{res.provenance}]",
        variable="1/lambda",
        coeff_error=exp.coeff_error,
        notes=notes,
    )
