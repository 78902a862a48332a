"""Least-squares fits of sampled functions against power/log bases."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import ConditionError, DegenerateError, ParityError

MAX_BASIS = 12
MAX_CONDITION = 1e10


@dataclass(frozen=True)
class FitBasis:
    entries: tuple[tuple[Fraction, int], ...]

    def __post_init__(self):
        entries = tuple((Fraction(e), int(l)) for e, l in self.entries)
        if len(set(entries)) != len(entries):
            raise ValueError("basis entries must be distinct")
        if any(l not in (0, 1) for _, l in entries):
            raise ValueError("log powers are restricted to 0 and 1")
        if len(entries) > MAX_BASIS:
            raise ConditionError(f"{len(entries)} basis functions exceed the limit of {MAX_BASIS}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def powers(cls, exponents, logs=()) -> FitBasis:
        return cls(tuple((Fraction(e), 0) for e in exponents) + tuple((Fraction(e), 1) for e in logs))

    def columns(self, t: np.ndarray) -> np.ndarray:
        lt = np.log(t)
        cols = []
        for e, l in self.entries:
            c = t ** float(e)
            cols.append(c * lt if l else c)
        return np.stack(cols, axis=1)

    def index(self, exponent, log_power: int = 0) -> int:
        return self.entries.index((Fraction(exponent), log_power))

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class FitReport:
    coeffs: tuple[float, ...]
    residual_rms: float
    condition: float
    grid: tuple[float, ...]
    basis: FitBasis
    reliable: bool = True
    log_significant: bool | None = None

    def coeff(self, exponent, log_power: int = 0) -> float:
        return self.coeffs[self.basis.index(exponent, log_power)]


def _samples(samples) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be (t, value) pairs")
    t, y = arr[:, 0], arr[:, 1]
    if np.any(t <= 0):
        raise ValueError("sample points must be positive")
    if len(np.unique(t)) != len(t):
        raise ValueError("sample points must be distinct")
    return t, y


def _weighted_system(t, y, basis: FitBasis):
    emin = min(float(e) for e, _ in basis.entries)
    w = t**-emin
    A = basis.columns(t) * w[:, None]
    return A, y * w


def fit_expansion(samples, basis: FitBasis, strict: bool = True) -> FitReport:
    """Weighted, column-scaled least squares solved by QR.

    Rows are weighted by t^-e_min so the leading term does not dominate;
    columns are scaled to unit norm before factorisation.
    """
    if not isinstance(basis, FitBasis):
        basis = FitBasis(tuple(basis))
    t, y = _samples(samples)
    if len(t) < 2 * len(basis):
        raise ValueError(f"need at least {2 * len(basis)} samples for {len(basis)} basis functions")
    A, b = _weighted_system(t, y, basis)
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise ConditionError("a basis column vanishes on the grid")
    As = A / norms
    cond = float(np.linalg.cond(As))
    reliable = cond <= MAX_CONDITION
    if not reliable and strict:
        raise ConditionError(f"scaled condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
    Q, R = np.linalg.qr(As)
    z = np.linalg.solve(R, Q.T @ b)
    # one step of iterative refinement with the same factors
    z = z + np.linalg.solve(R, Q.T @ (b - As @ z))
    coeffs = z / norms
    resid = A @ coeffs - b
    rms = float(np.sqrt(np.mean(resid**2)))
    return FitReport(tuple(float(c) for c in coeffs), rms, cond, tuple(float(x) for x in t), basis, reliable)


def _mpq(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def fit_expansion_extended(ts, ys, basis: FitBasis, dps: int = 40, strict: bool = True) -> FitReport:
    """Same weighted, column-scaled fit as fit_expansion, in mpmath precision.

    ``ys`` may hold mpf values; the point is to keep sub-leading terms that
    sit 20 or more orders of magnitude below the leading one.
    """
    if not isinstance(basis, FitBasis):
        basis = FitBasis(tuple(basis))
    if len(ts) < 2 * len(basis):
        raise ValueError(f"need at least {2 * len(basis)} samples for {len(basis)} basis functions")
    with mpmath.workdps(dps):
        ts = [mpmath.mpf(t) for t in ts]
        emin = min(e for e, _ in basis.entries)
        A = mpmath.matrix(len(ts), len(basis))
        b = mpmath.matrix(len(ts), 1)
        for i, t in enumerate(ts):
            w = t ** _mpq(-emin)
            lt = mpmath.log(t)
            for j, (e, l) in enumerate(basis.entries):
                c = t ** _mpq(e)
                A[i, j] = w * (c * lt if l else c)
            b[i] = w * ys[i]
        norms = [mpmath.norm(A.column(j)) for j in range(len(basis))]
        for j, nj in enumerate(norms):
            for i in range(len(ts)):
                A[i, j] /= nj
        cond = float(np.linalg.cond(np.array(A.tolist(), dtype=float)))
        reliable = cond <= MAX_CONDITION
        if not reliable and strict:
            raise ConditionError(f"scaled condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
        z, res = mpmath.qr_solve(A, b)
        coeffs = [z[j] / norms[j] for j in range(len(basis))]
        rms = float(res / mpmath.sqrt(len(ts)))
    return FitReport(tuple(float(c) for c in coeffs), rms, cond, tuple(float(t) for t in ts), basis, reliable)


def default_log_exponents(max_power) -> list[Fraction]:
    out = []
    e = Fraction(-1, 2)
    while e <= Fraction(max_power):
        out.append(e)
        e += Fraction(1, 2)
    return out


def detect_log(samples, max_power, exponents=None, strict: bool = True) -> tuple[float, FitReport]:
    """Fit powers plus t log t and report the t log t coefficient.

    The log term counts as genuine when |kappa| exceeds 10 residual_rms
    divided by the norm of the (weighted) t log t column.
    """
    t, _ = _samples(samples)
    if math.log10(t.max() / t.min()) < 3 - 1e-9:
        raise ValueError("samples must span at least three decades")
    if exponents is None:
        exponents = default_log_exponents(max_power)
    basis = FitBasis(tuple((Fraction(e), 0) for e in exponents) + ((Fraction(1), 1),))
    rep = fit_expansion(samples, basis, strict)
    A, _ = _weighted_system(t, np.zeros_like(t), basis)
    i = basis.index(1, 1)
    kappa = rep.coeffs[i]
    significant = abs(kappa) > 10.0 * rep.residual_rms / float(np.linalg.norm(A[:, i]))
    rep = FitReport(rep.coeffs, rep.residual_rms, rep.condition, rep.grid, rep.basis, rep.reliable, significant)
    return kappa, rep


@dataclass(frozen=True)
class OrderCheck:
    estimate: float
    claimed: float
    passed: bool
    ratios: tuple[float, ...]


def remainder_order_check(samples, claimed, width: float = 0.3) -> OrderCheck:
    """Median of log_4(f(t)/f(t/4)) over sample pairs (t, t/4)."""
    t, f = _samples(samples)
    lookup = {float(x): float(v) for x, v in zip(t, f)}
    logs = []
    for x in sorted(lookup):
        q = x / 4.0
        match = [k for k in lookup if abs(k - q) <= 1e-12 * q]
        if not match:
            continue
        hi, lo = lookup[x], lookup[match[0]]
        if abs(hi) < 1e-14 or abs(lo) < 1e-14:
            raise DegenerateError(f"remainder below 1e-14 at t={x:g}; nothing to measure")
        logs.append(math.log(abs(hi / lo)) / math.log(4.0))
    if len(logs) < 4:
        raise ValueError("need at least 4 (t, t/4) pairs")
    est = float(np.median(logs))
    return OrderCheck(est, float(claimed), abs(est - float(claimed)) <= width, tuple(logs))


def geometric_grid(t_min: float, t_max: float, per_decade: int = 8) -> np.ndarray:
    n = int(round(math.log10(t_max / t_min) * per_decade))
    return np.logspace(math.log10(t_min), math.log10(t_max), n + 1)


# parity dichotomy


@dataclass(frozen=True)
class ParityRow:
    power: int
    kappa: float
    predicted: float  # d_m/m for odd powers, 0 for even ones
    window: tuple[float, float]
    precision: str
    report: FitReport

    @property
    def relative_error(self) -> float:
        return abs(self.kappa - self.predicted) / abs(self.predicted) if self.predicted else math.nan


def _parity_basis(m: int) -> FitBasis:
    from .expand import structural_exponents

    top = Fraction(2)
    while True:
        ex = structural_exponents(m, top)
        if len(ex) < MAX_BASIS:
            return FitBasis(tuple((e, 0) for e in ex) + ((Fraction(1), 1),))
        top -= Fraction(1, 2)


def parity_window(m: int, precision: str = "double") -> tuple[float, float]:
    """Sampling window for the t log t fit at power m.

    The expansion coefficients grow like (mk)!/(2 pi)^(mk), so the asymptotic
    regime only starts near t ~ 10^-m; five decades below that are used.  In
    extended precision the window reaches down to where 10^4 terms suffice.
    """
    if precision == "double":
        return 10.0 ** (-m - 5), 10.0**-m
    if precision == "extended":
        hi = 10.0 ** (-m - 1)
        lo = max(10.0 ** (-3 * m - 4), 46.0 / 1e4**m)
        if math.log10(hi / lo) < 5:
            raise ValueError(f"extended precision gives no usable window for power {m}")
        return lo, hi
    raise ValueError(f"unknown precision {precision!r}")


def parity_kappa(rho, m: int, offset: float = 1.5, per_decade: int = 8, precision: str = "auto", window=None) -> ParityRow:
    """Fit the t log t coefficient of theta for tau_n^m, tau_n = x - rho(1/x).

    The basis holds every structural exponent up to t^2 plus t log t.
    ``precision="auto"`` uses double precision up to m = 5 and mpmath
    sampling beyond, where t^(1+1/m) and t log t become too close to split
    from double-precision data.
    """
    from .heatsum import theta, theta_extended
    from .lattice import LatticeSpec, odd_decompose, validate

    if precision == "auto":
        precision = "double" if m <= 5 else "extended"
    spec = validate(LatticeSpec.from_rho(rho, m, offset))
    if m % 2:
        predicted = odd_decompose(spec).d_m / m
    else:
        try:
            odd_decompose(spec)
        except ParityError:
            predicted = 0.0
    lo, hi = window if window is not None else parity_window(m, precision)
    ts = geometric_grid(lo, hi, per_decade)
    basis = _parity_basis(m)
    if precision == "double":
        ys = np.array([theta(spec, float(t), 1e-18).value for t in ts])
        kappa, rep = detect_log(np.c_[ts, ys], 2, exponents=[e for e, l in basis.entries if not l])
    else:
        dps = 40
        with mpmath.workdps(dps):
            ys = [theta_extended(spec, float(t), dps) for t in ts]
        rep = fit_expansion_extended(ts, ys, basis, dps)
        kappa = rep.coeff(1, 1)
        rep = FitReport(rep.coeffs, rep.residual_rms, rep.condition, rep.grid, rep.basis, rep.reliable, None)
    return ParityRow(m, kappa, predicted, (float(lo), float(hi)), precision, rep)


def parity_scan(rho, powers, offset: float = 1.5, per_decade: int = 8, precision: str = "auto") -> list[ParityRow]:
    return [parity_kappa(rho, m, offset, per_decade, precision) for m in powers]
