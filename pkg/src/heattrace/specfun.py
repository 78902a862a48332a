"""Gamma, digamma, Hurwitz zeta and Bernoulli polynomials in double precision.

Real arguments give ``float`` results and complex arguments give ``complex``.
Nothing here depends on scipy: ``scipy.special.zeta`` has no complex or
negative-argument Hurwitz zeta, which the residue calculus needs.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from math import comb

from .errors import DomainError, PoleError, PoleReport

EULER_GAMMA = 0.57721566490153286060651209008240
_BERNOULLI_MAX = 62

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _bernoulli_table(nmax: int) -> tuple[Fraction, ...]:
    # sum_{k=0}^{n} C(n+1, k) B_k = 0, with B_1 = -1/2
    b = [Fraction(1)]
    for n in range(1, nmax + 1):
        acc = sum((comb(n + 1, k) * b[k] for k in range(n)), Fraction(0))
        b.append(-acc / (n + 1))
    return tuple(b)


# Built at import time, read-only afterwards.
BERNOULLI = _bernoulli_table(_BERNOULLI_MAX)
_B2K = tuple(float(BERNOULLI[2 * k]) for k in range(_BERNOULLI_MAX // 2 + 1))


def bernoulli_number(n: int) -> Fraction:
    if n < 0 or n > _BERNOULLI_MAX:
        raise DomainError(f"Bernoulli number index {n} outside [0, {_BERNOULLI_MAX}]")
    return BERNOULLI[n]


def bernoulli_poly(n: int, x: float) -> float:
    """B_n(x), evaluated exactly in rational arithmetic and rounded once."""
    if n < 0:
        raise DomainError("negative Bernoulli index")
    if n > 60:
        raise DomainError(f"bernoulli_poly supports n <= 60, got {n}")
    xf = Fraction(x)
    acc = Fraction(0)
    for k in range(n + 1):
        bk = BERNOULLI[k]
        if bk:
            acc += comb(n, k) * bk * xf ** (n - k)
    return float(acc)


def _is_complex(z) -> bool:
    return isinstance(z, complex)


def _nonpositive_int(z) -> int | None:
    if _is_complex(z):
        if z.imag != 0.0:
            return None
        z = z.real
    if z <= 0 and float(z).is_integer():
        return int(-z)
    return None


def _sinpi(x: float) -> float:
    n = round(x)
    f = x - n
    s = math.sin(math.pi * f)
    return -s if n % 2 else s


def _cospi(x: float) -> float:
    n = round(x)
    f = x - n
    c = math.cos(math.pi * f)
    return -c if n % 2 else c


def sinpi(z):
    """sin(pi z) with exact argument reduction."""
    if not _is_complex(z):
        return _sinpi(float(z))
    x, y = z.real, z.imag
    return complex(_sinpi(x) * math.cosh(math.pi * y), _cospi(x) * math.sinh(math.pi * y))


def _lanczos(z):
    # valid for Re z >= 1/2; z may be float or complex
    z = z - 1
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    if _is_complex(z):
        return _SQRT_2PI * cmath.exp((z + 0.5) * cmath.log(t) - t) * acc
    return _SQRT_2PI * math.exp((z + 0.5) * math.log(t) - t) * acc


def gamma(s):
    """Gamma function; PoleError at nonpositive integers."""
    k = _nonpositive_int(s)
    if k is not None:
        raise PoleError(PoleReport(complex(-k), 1, complex((-1) ** k / math.factorial(k))), "Gamma")
    if not _is_complex(s):
        s = float(s)
        if s.is_integer() and s <= 171:
            return float(math.factorial(int(s) - 1))
        # math.gamma is correctly rounded-ish for reals; it is the libm routine
        # and avoids needless loss for large arguments.
        return math.gamma(s)
    if s.real < 0.5:
        return math.pi / (sinpi(s) * _gamma_right(1 - s))
    return _gamma_right(s)


def _gamma_right(z: complex) -> complex:
    # Lanczos is accurate to a few ulp for moderate |z|; for large |z| the
    # shifted Stirling series keeps the phase error smaller.
    if abs(z) < 10.0:
        return _lanczos(z)
    return cmath.exp(_loggamma_stirling(z))


def _loggamma_stirling(z: complex) -> complex:
    # log Gamma(z) for Re z >= 1/2, |z| >= 10, shifted so that |z + N| >= 20
    shift = 0j
    n = 0
    while abs(z + n) < 20.0:
        n += 1
    if n:
        prod = 1 + 0j
        for k in range(n):
            prod *= z + k
        shift = cmath.log(prod)
    w = z + n
    inv = 1 / w
    inv2 = inv * inv
    acc = 0j
    p = inv
    for k in range(1, 12):
        acc += _B2K[k] / (2 * k * (2 * k - 1)) * p
        p *= inv2
    return (w - 0.5) * cmath.log(w) - w + 0.5 * math.log(2 * math.pi) + acc - shift


def rgamma(s):
    """1/Gamma(s), entire; zero at the nonpositive integers."""
    if _nonpositive_int(s) is not None:
        return 0j if _is_complex(s) else 0.0
    return 1 / gamma(s)


def _digamma_asym(x):
    # x has Re x >= 10
    inv = 1 / x
    inv2 = inv * inv
    acc = 0
    p = inv2
    for k in range(1, 10):
        acc += _B2K[k] / (2 * k) * p
        p *= inv2
    log = cmath.log(x) if _is_complex(x) else math.log(x)
    return log - 0.5 * inv - acc


def digamma(s):
    """psi(s) = Gamma'(s)/Gamma(s)."""
    k = _nonpositive_int(s)
    if k is not None:
        raise PoleError(PoleReport(complex(-k), 1, complex(-1.0)), "digamma")
    cplx = _is_complex(s)
    if not cplx:
        s = float(s)
    if s.real < 0.5:
        # psi(1 - s) - psi(s) = pi cot(pi s)
        if cplx:
            cot = cmath.cos(math.pi * s) / sinpi(s)
        else:
            cot = _cospi(s) / _sinpi(s)
        return digamma(1 - s) - math.pi * cot
    shift = 0
    x = s
    while x.real < 10.0:
        shift += 1 / x
        x = x + 1
    return _digamma_asym(x) - shift


def _pow_neg(x: float, p):
    """x**(-p) for x > 0."""
    if _is_complex(p):
        return cmath.exp(-p * math.log(x))
    return x ** (-p)


def _csum(values, cplx: bool):
    if cplx:
        return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))
    return math.fsum(values)


def _hurwitz_em(p, a: float):
    # Euler-Maclaurin after shifting to x = N + a >= max(15, 0.6|p|); at most
    # 25 Bernoulli corrections.  Accurate when Re p is not very negative.
    cplx = _is_complex(p)
    x0 = max(15.0, 0.6 * abs(p))
    nshift = max(0, math.ceil(x0 - a))
    head = [_pow_neg(a + k, p) for k in range(nshift)]
    x = a + nshift
    xp = _pow_neg(x, p)
    tail = x * xp / (p - 1) + 0.5 * xp
    # B_{2k}/(2k)! * p(p+1)...(p+2k-2) * x^{-p-2k+1}
    poch = p
    fact = 2.0
    xpow = xp / x
    inv2 = 1 / (x * x)
    scale = abs(tail) + (abs(sum(head)) if head else 0.0)
    for k in range(1, 26):
        term = _B2K[k] / fact * poch * xpow
        tail += term
        if abs(term) < 1e-17 * scale:
            break
        poch = poch * (p + 2 * k - 1) * (p + 2 * k)
        fact *= (2 * k + 1) * (2 * k + 2)
        xpow *= inv2
    head.reverse()
    head.append(tail)
    mag = math.fsum(abs(h) for h in head)
    return _csum(head, cplx), mag


def _riemann_any(z: complex) -> complex:
    n = _nonpositive_int(z)
    if n is not None:
        return complex(-float(BERNOULLI[n + 1]) / (n + 1))
    if z.real >= 0.5:
        return complex(_hurwitz_em(z, 1.0)[0])
    # zeta(z) = 2^z pi^(z-1) sin(pi z / 2) Gamma(1 - z) zeta(1 - z)
    w = 1 - z
    return (
        cmath.exp(z * math.log(2.0) + (z - 1) * math.log(math.pi))
        * sinpi(z / 2)
        * gamma(w)
        * _hurwitz_em(w, 1.0)[0]
    )


def _periodic_zeta(s: complex, b: float) -> tuple[complex, float]:
    """sum_{n>=1} e^{2 pi i n b} n^{-s} for |b| <= 1/2, s not an integer.

    Uses Li_s(e^mu) = Gamma(1-s)(-mu)^(s-1) + sum_k zeta(s-k) mu^k / k!,
    which converges for |mu| < 2 pi; here |mu| <= pi.
    """
    if b == 0.0:
        v = _riemann_any(s)
        return v, abs(v)
    mu = complex(0.0, 2.0 * math.pi * b)
    terms = [gamma(1 - s) * cmath.exp((s - 1) * cmath.log(-mu))]
    pw = 1 + 0j
    small = 0
    for k in range(0, 120):
        term = _riemann_any(s - k) * pw
        terms.append(term)
        if abs(term) < 1e-18 * max(abs(terms[0]), abs(terms[1])):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        pw = pw * mu / (k + 1)
    return _csum(terms, True), max(abs(t) for t in terms)


def _hurwitz_reflect(p, a: float):
    # Hurwitz's formula for a0 in (0, 1], then the recurrence back up to a.
    cplx = _is_complex(p)
    s = 1 - complex(p)
    k = math.ceil(a) - 1
    a0 = a - k
    b = a0 - round(a0)
    pref = gamma(s) * cmath.exp(-s * math.log(2 * math.pi))
    rot = cmath.exp(complex(0.0, math.pi / 2) * s)
    f1, m1 = _periodic_zeta(s, b)
    f2, m2 = _periodic_zeta(s, -b)
    z0 = pref * (f1 / rot + f2 * rot)
    mag = abs(pref) * (m1 / abs(rot) + m2 * abs(rot))
    if k:
        vals = [z0] + [-_pow_neg(a0 + j, complex(p)) for j in range(k)]
        mag += math.fsum(abs(v) for v in vals[1:])
        z0 = _csum(vals, True)
    return (z0 if cplx else z0.real), mag


def hurwitz_zeta(p, a: float):
    """zeta(p, a) = sum_{n>=0} (n + a)^(-p), continued to all p != 1.

    Nonpositive integers p give the exact Bernoulli polynomial value.  For
    Re p >= 0 the sum is Euler-Maclaurin with a shift to N + a >= 15 and up to
    25 corrections; for Re p < 0 that would cancel catastrophically, so
    Hurwitz's formula in terms of periodic zeta functions is used instead.
    """
    a = float(a)
    if not a > 0:
        raise DomainError(f"Hurwitz zeta needs a > 0, got {a}")
    cplx = _is_complex(p)
    if not cplx:
        p = float(p)
    if p == 1:
        raise PoleError(PoleReport(1 + 0j, 1, 1 + 0j), "Hurwitz zeta")
    n = _nonpositive_int(p)
    if n is not None:
        v = -bernoulli_poly(n + 1, a) / (n + 1)
        return complex(v) if cplx else v
    if p.real > 60:
        terms = []
        x = a
        while True:
            term = _pow_neg(x, p)
            terms.append(term)
            if abs(term) < 1e-18 * abs(terms[0]) or len(terms) > 200:
                break
            x += 1.0
        terms.reverse()
        return _csum(terms, cplx)
    value, mag = _hurwitz_em(p, a)
    if p.real < 0.5 and abs(p) > 1e-3 and mag > 8.0 * abs(value):
        # cancellation in the direct route; try the reflected one (useless
        # next to p = 0, where it hits the pole of zeta(1 - p)) and keep
        # whichever summed smaller terms relative to its result
        rvalue, rmag = _hurwitz_reflect(p, a)
        if rmag / max(abs(rvalue), 1e-300) < mag / max(abs(value), 1e-300):
            return rvalue
    return value


def riemann_zeta(p):
    return hurwitz_zeta(p, 1.0)
