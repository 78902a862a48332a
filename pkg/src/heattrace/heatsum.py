"""Direct evaluation of heat traces, weighted theta sums, resolvents and log W.

Every sum is cut where the exponent passes 46 (e^-46 ~ 1e-20) and then
extended until an integral-comparison bound on the omitted tail is below the
requested tolerance.  Terms are added smallest first, in numpy blocks whose
partial sums are combined exactly with ``math.fsum``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainError
from .lattice import LatticeSpec, ensure_valid, lambdas
from .series import TruncatedSeries
from .specfun import hurwitz_zeta

CUTOFF = 46.0
BLOCK = 1 << 20


@dataclass(frozen=True)
class SumResult:
    value: float
    tail_bound: float
    terms_used: int


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    return t


def _blocked_sum(n_terms: int, term_block) -> float:
    """Sum term_block(start, stop) over [0, n_terms), smallest blocks first."""
    partials = []
    starts = list(range(0, n_terms, BLOCK))
    for start in reversed(starts):
        stop = min(start + BLOCK, n_terms)
        vals = term_block(start, stop)
        partials.append(float(np.sum(vals[::-1])))
    return math.fsum(partials)


def _cut_index(a: float, x_start: float, tail_fn, tol: float) -> tuple[int, float]:
    """First index N (x_N = N + a >= x_start) whose tail bound is below tol."""
    N = max(1, math.ceil(x_start - a))
    tail = tail_fn(N + a)
    while tail > tol:
        N = N + max(1, N // 8)
        tail = tail_fn(N + a)
    return N, tail


def theta(spec: LatticeSpec, t: float, tol: float = 1e-14) -> SumResult:
    """theta(t) = sum_n exp(-lambda_n t)."""
    spec = ensure_valid(spec)
    t = _check_t(t)
    tol = max(float(tol), 1e-300)
    M, a, Q = spec.power, spec.offset, spec.q_star

    def L(x):
        return x ** (M - 2) * (x * x - Q)

    def slope(x):
        if M == 1:
            return 1.0  # L' = 1 + Q/x^2 decreases to 1
        return M * x ** (M - 1) - (M - 2) * Q * x ** (M - 3)

    def tail(x):
        if x * x <= 2.0 * Q or t * L(x) < CUTOFF:
            return math.inf
        return math.exp(-t * L(x)) * (1.0 + 1.0 / (t * slope(x)))

    x = max(a, (CUTOFF / t) ** (1.0 / M), math.sqrt(2.0 * Q) if Q else 0.0)
    while t * L(x) < CUTOFF or x * x <= 2.0 * Q:
        x *= 1.01
    N, bound = _cut_index(a, x, tail, tol)
    value = _blocked_sum(N, lambda i, j: np.exp(-t * lambdas(spec, i, j)))
    return SumResult(value, bound, max(N, 1))


def theta_extended(spec: LatticeSpec, t: float, dps: int = 40) -> mpmath.mpf:
    """theta(t) summed in mpmath at ``dps`` digits.

    For specs built from rho the terms use (x - rho(1/x))^M directly, which
    is exact when rho is a polynomial; otherwise the normal form is used.
    The tail is dropped once exp(-t lambda_n) (1 + 1/(t lambda'_n)) falls
    below 10^-dps times the running sum, past the monotone onset.
    """
    spec = ensure_valid(spec)
    t = _check_t(t)
    M = spec.power
    with mpmath.workdps(dps + 10):
        tm = mpmath.mpf(t)
        a = mpmath.mpf(spec.offset)
        if spec.rho is not None:
            coeffs = [(spec.rho.min_degree + i, mpmath.mpf(c)) for i, c in enumerate(spec.rho.coeffs) if c]

            def lam(x):
                z = 1 / x
                return (x - mpmath.fsum(c * z**d for d, c in coeffs)) ** M
        else:
            coeffs = [(spec.g.min_degree + i, mpmath.mpf(c)) for i, c in enumerate(spec.g.coeffs) if c]

            def lam(x):
                u = 1 / (x * x)
                return x**M + x ** (M - 2) * mpmath.fsum(c * u**d for d, c in coeffs)

        eps = mpmath.mpf(10) ** -dps
        start = spec.monotone_from or 0
        total = mpmath.mpf(0)
        n = 0
        while True:
            x = n + a
            term = mpmath.exp(-tm * lam(x))
            total += term
            if n >= start and x * x > 2 * spec.q_star:
                slope = M * x ** (M - 1) - (M - 2) * spec.q_star * x ** (M - 3) if M > 1 else 1
                if term * (1 + 1 / (tm * slope)) < eps * total:
                    break
            n += 1
    return total


def general_theta(a: float, M: int, w: int, t: float, tol: float = 1e-14) -> SumResult:
    """sum_{n>=0} (n+a)^-w exp(-(n+a)^M t); negative w means positive powers."""
    t = _check_t(t)
    if not a > 0:
        raise DomainError("offset must be positive")
    tol = max(float(tol), 1e-300)

    def tail(x):
        h = t * x**M + w * math.log(x)
        dh = t * M * x ** (M - 1) + w / x
        if dh <= 0 or t * x**M < CUTOFF:
            return math.inf
        if w >= 0:
            integral = x**-w * math.exp(-t * x**M) / (t * M * x ** (M - 1))
        else:
            integral = math.exp(-h) / dh  # h convex for w < 0
        return math.exp(-h) + integral

    x = max(a, (CUTOFF / t) ** (1.0 / M))
    N, bound = _cut_index(a, x, tail, tol)

    def block(i, j):
        xs = np.arange(i, j, dtype=float) + a
        vals = np.exp(-t * xs**M)
        if w:
            vals *= xs ** float(-w)
        return vals

    return SumResult(_blocked_sum(N, block), bound, max(N, 1))


def harmonic_sum(m: int, t: float, a: float = 1.5, tol: float = 1e-14) -> SumResult:
    """H_m(t) = sum (n+a)^-1 exp(-(n+a)^m t)."""
    return general_theta(a, m, 1, t, tol)


def weight_sum(spec: LatticeSpec, r: int, t: float, tol: float = 1e-14) -> SumResult:
    """F_r(t) = sum_n (x^(M-2) g(x^-2))^r exp(-x^M t), x = n + a."""
    spec = ensure_valid(spec)
    t = _check_t(t)
    M, a, Q = spec.power, spec.offset, spec.q_star
    if r == 0:
        return general_theta(a, M, 0, t, tol)
    if spec.is_pure:
        return SumResult(0.0, 0.0, 1)
    ref = general_theta(a, M, -(M - 2) * r, t, tol / max(Q**r, 1e-300))

    def block(i, j):
        xs = np.arange(i, j, dtype=float) + a
        gv = spec.g.evaluate(1.0 / (xs * xs))
        return (xs ** (M - 2) * gv) ** r * np.exp(-t * xs**M)

    N = ref.terms_used
    return SumResult(_blocked_sum(N, block), ref.tail_bound * Q**r, N)


# resolvent and log W


def _reciprocal_power_coeffs(g: TruncatedSeries, j: int, K: int) -> np.ndarray:
    """First K coefficients of (1 + u g(u))^-j, or fewer if g is truncated."""
    base = TruncatedSeries.one() + g.shift(1)
    K = min(K, int(min(base.known_to, 10**6)) + 1)
    b = np.array([base.coeff(d) for d in range(K)])
    inv = np.zeros(K)
    inv[0] = 1.0
    for k in range(1, K):
        inv[k] = -np.dot(b[1 : k + 1], inv[k - 1 :: -1][:k])
    out = np.zeros(K)
    out[0] = 1.0
    for _ in range(j):
        out = np.convolve(out, inv)[:K]
    return out


def power_sum_tail(spec: LatticeSpec, j: int, N: int) -> tuple[float, float]:
    """sum_{n>=N} lambda_n^-j via Hurwitz zeta values, with an error estimate.

    lambda^-j = x^(-Mj) (1 + u g(u))^-j = sum_k e_{j,k} x^(-Mj-2k).
    """
    spec = ensure_valid(spec)
    M, a = spec.power, spec.offset
    if M * j <= 1:
        raise DomainError(f"sum of lambda_n^-{j} diverges for power {M}")
    x = N + a
    if spec.is_pure:
        return hurwitz_zeta(float(M * j), x), 0.0
    e = _reciprocal_power_coeffs(spec.g, j, 10)
    terms = [e[k] * hurwitz_zeta(float(M * j + 2 * k), x) for k in range(len(e))]
    est = 10.0 * abs(terms[-1]) * x**-2 if len(terms) else 0.0
    est += 4e-16 * sum(abs(v) for v in terms)
    return math.fsum(terms), est


def _head_size(spec: LatticeSpec, lam: float) -> int:
    # lambda_N >= 2500 lambda; for M = 2 this is the 50 sqrt(lambda) rule
    x = (2500.0 * lam) ** (1.0 / spec.power)
    return max(1000, math.ceil(x - spec.offset))


def resolvent(spec: LatticeSpec, lam: float, tol: float = 1e-13) -> SumResult:
    """R(lambda) = sum_n 1/(lambda + lambda_n)."""
    spec = ensure_valid(spec)
    lam = float(lam)
    if not lam > 0:
        raise DomainError("resolvent needs lambda > 0")
    if spec.power < 2:
        raise DomainError("the resolvent trace diverges for power 1")
    N = _head_size(spec, lam)
    while True:
        s = [power_sum_tail(spec, j, N) for j in (1, 2, 3, 4)]
        # 1/(l+mu) - (1/mu - l/mu^2 + l^2/mu^3) = -l^3/(mu^3 (l+mu))
        bound = lam**3 * (s[3][0] + s[3][1]) + s[0][1] + lam * s[1][1] + lam**2 * s[2][1]
        if bound <= tol or N > 10**8:
            break
        N *= 2
    head = 1.0 / (lam + lambdas(spec, 0, N))
    tail = math.fsum([s[0][0], -lam * s[1][0], lam**2 * s[2][0]])
    value = math.fsum(list(head[::-1]) + [tail])
    return SumResult(value, bound, N)


def log_product(spec: LatticeSpec, lam: float, tol: float = 1e-13) -> SumResult:
    """log W(lambda) = sum_n log(1 + lambda/lambda_n)."""
    spec = ensure_valid(spec)
    lam = float(lam)
    if lam == 0.0:
        return SumResult(0.0, 0.0, 1)
    if not lam > 0:
        raise DomainError("log_product needs lambda >= 0")
    if spec.power < 2:
        raise DomainError("the canonical product diverges for power 1")
    N = _head_size(spec, lam)
    while True:
        s = [power_sum_tail(spec, j, N) for j in (1, 2, 3, 4)]
        bound = lam**4 / 4 * (s[3][0] + s[3][1]) + lam * s[0][1] + lam**2 / 2 * s[1][1] + lam**3 / 3 * s[2][1]
        if bound <= tol or N > 10**8:
            break
        N *= 2
    head = np.log1p(lam / lambdas(spec, 0, N))
    tail = math.fsum([lam * s[0][0], -(lam**2) / 2 * s[1][0], lam**3 / 3 * s[2][0]])
    value = math.fsum(list(head[::-1]) + [tail])
    return SumResult(value, bound, N)
