import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heattrace.errors import OddnessError, RadiusError, TruncationError
from heattrace.series import (
    TruncatedSeries,
    laurent_tau_power,
    q_from_sigma,
    q_power_from_sigma,
    qp_from_sigma,
    sigma_from_rho,
    weight_coeffs,
)

P = TruncatedSeries.polynomial


def rho_model():
    return P([0.0, 0.1, 0.0, 0.02], radius=2.0)


def coeffs_close(s, expected, tol=1e-15):
    for d, c in enumerate(expected):
        assert s.coeff(d) == pytest.approx(c, abs=tol), d


# construction and bookkeeping


def test_length_invariant():
    with pytest.raises(ValueError):
        TruncatedSeries(0, (1.0, 2.0), 3)


def test_radius_must_be_positive():
    with pytest.raises(RadiusError):
        TruncatedSeries(0, (1.0,), 0, radius=0.0)


def test_truncated_product_stops_at_known_order():
    a = TruncatedSeries.truncated([1.0, 2.0, 3.0])
    b = TruncatedSeries.truncated([1.0, -1.0])
    prod = a * b
    assert prod.trunc_order == 1
    assert not prod.exact
    with pytest.raises(TruncationError):
        a.mul_to(b, 3)


def test_sum_of_truncated_series_keeps_smaller_order():
    a = TruncatedSeries.truncated([1.0, 2.0, 3.0])
    b = P([1.0, 1.0, 1.0, 1.0, 1.0])
    s = a + b
    assert s.trunc_order == 2
    coeffs_close(s, [2.0, 3.0, 4.0])


# sigma


def test_sigma_reindexes_odd_coefficients():
    s = sigma_from_rho(rho_model())
    coeffs_close(s, [0.1, 0.02])
    assert s.radius == 4.0


def test_sigma_of_zero():
    assert sigma_from_rho(TruncatedSeries.zero()).is_zero()


def test_sigma_rejects_even_terms():
    with pytest.raises(OddnessError):
        sigma_from_rho(P([0.0, 0.1, 0.3]))


# q and q_p


def test_q_of_constant_sigma():
    b = 0.37
    q = q_from_sigma(P([b]))
    coeffs_close(q, [-2 * b, b * b])


def test_q_of_zero():
    assert q_from_sigma(TruncatedSeries.zero()).is_zero()


def test_q_model_coefficients():
    q = q_from_sigma(P([0.1, 0.02]))
    coeffs_close(q, [-0.2, -0.03, 0.004, 0.0004], tol=1e-16)


def test_q_radius_follows_sigma():
    q = q_from_sigma(sigma_from_rho(rho_model()))
    assert q.radius == 4.0


def test_qp_first_matches_q():
    b = 0.37
    assert qp_from_sigma(P([b]), 1).coeffs == q_from_sigma(P([b])).coeffs


def test_qp_of_zero():
    assert qp_from_sigma(TruncatedSeries.zero(), 3).is_zero()


def test_q2_binomial():
    q2 = qp_from_sigma(P([0.1]), 2)
    coeffs_close(q2, [-0.4, 0.06, -0.004, 0.0001], tol=1e-16)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=5))
def test_qp_one_equals_q_exactly(cs):
    sigma = P(cs)
    a, b = qp_from_sigma(sigma, 1), q_from_sigma(sigma)
    assert a.min_degree == b.min_degree and a.coeffs == b.coeffs


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-0.5, 0.5), min_size=1, max_size=4), st.integers(1, 6), st.floats(0.01, 0.6))
def test_q_power_matches_definition(cs, m, u):
    # q_m(u) = ((1 - u sigma(u))^m - 1)/u
    sigma = P(cs)
    direct = ((1 - u * sigma.evaluate(u)) ** m - 1) / u
    assert q_power_from_sigma(sigma, m).evaluate(u) == pytest.approx(direct, rel=1e-11, abs=1e-13)


# Laurent powers of tau


def test_tau_first_power():
    tau = laurent_tau_power(rho_model(), 1, 3)
    assert tau.coeff(-1) == 1.0
    assert tau.coeff(1) == pytest.approx(-0.1, abs=1e-17)
    assert tau.coeff(3) == pytest.approx(-0.02, abs=1e-17)


def test_tau_cube_degree_one():
    tau3 = laurent_tau_power(rho_model(), 3, 1)
    assert tau3.coeff(-3) == 1.0
    assert tau3.coeff(-1) == pytest.approx(-0.3, abs=1e-16)
    assert tau3.coeff(1) == pytest.approx(3 * 0.1**2 - 3 * 0.02, abs=1e-16)
    assert tau3.coeff(1) == pytest.approx(-0.03, abs=1e-16)


def test_tau_square():
    tau2 = laurent_tau_power(rho_model(), 2, 2)
    assert tau2.coeff(0) == pytest.approx(-0.2, abs=1e-16)
    assert tau2.coeff(1) == 0.0


def test_tau_needs_enough_rho():
    rho = TruncatedSeries.truncated([0.0, 0.1])
    with pytest.raises(TruncationError):
        laurent_tau_power(rho, 3, 3)


@pytest.mark.parametrize("m", range(1, 8))
def test_tau_of_zero_is_a_single_power(m):
    tau = laurent_tau_power(TruncatedSeries.zero(), m, 4)
    nz = [(tau.min_degree + i, c) for i, c in enumerate(tau.coeffs) if c != 0.0]
    assert nz == [(-m, 1.0)]


odd_rhos = st.lists(st.floats(-0.5, 0.5), min_size=1, max_size=4).map(
    lambda cs: P([x for c in cs for x in (0.0, c)])
)


@settings(max_examples=60, deadline=None)
@given(odd_rhos, st.integers(1, 7), st.integers(1, 6))
def test_tau_power_parity_zeros(rho, m, order):
    tau = laurent_tau_power(rho, m, order)
    for i, c in enumerate(tau.coeffs):
        if (tau.min_degree + i - m) % 2:
            assert c == 0.0


@settings(max_examples=40, deadline=None)
@given(odd_rhos, st.integers(1, 5), st.floats(0.05, 0.3))
def test_tau_power_evaluates_to_definition(rho, m, z):
    # exact polynomial rho: the Laurent series is a finite sum
    top = m * (rho.trunc_order + 1)
    tau = laurent_tau_power(rho, m, top)
    direct = (1 / z - rho.evaluate(z)) ** m
    assert tau.evaluate(z) == pytest.approx(direct, rel=1e-11)


# weight coefficients


def test_weight_zeroth_power():
    g = P([-0.2, -0.03, 0.004], radius=4.0)
    w = weight_coeffs(g, 0, 4 / 9)
    assert w.coeffs == (1.0,)
    assert 0 < w.bound_ratio < 1


def test_weight_first_power_is_g():
    g = q_from_sigma(P([0.1, 0.02])).with_radius(4.0)
    w = weight_coeffs(g, 1, 4 / 9)
    assert w.coeffs == g.coeffs


def test_weight_square():
    g = P([-0.2, -0.03, 0.004], radius=4.0)
    w = weight_coeffs(g, 2, 4 / 9)
    assert w.coeffs[:3] == pytest.approx([0.04, 0.012, -0.0007], abs=1e-16)


def test_weight_circle_choice():
    g = P([-0.2, -0.03, 0.004], radius=4.0)
    w = weight_coeffs(g, 2, 4 / 9)
    assert w.circle_radius == pytest.approx(0.5 * (4 / 9 + 4.0))
    assert w.bound_ratio == pytest.approx((4 / 9) / w.circle_radius)


def test_weight_radius_guard():
    with pytest.raises(RadiusError):
        weight_coeffs(P([1.0], radius=0.3), 1, 0.4)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-1, 1), min_size=1, max_size=6),
    st.integers(0, 6),
    st.floats(1.0, 10.0),
    st.floats(0.05, 0.95),
)
def test_weight_bound_holds(cs, r, radius, frac):
    g = P(cs, radius=radius)
    u0 = frac * radius
    w = weight_coeffs(g, r, u0)
    for k, c in enumerate(w.coeffs):
        assert abs(c) * u0**k <= w.bound_constant * w.bound_ratio**k * (1 + 1e-12) + 1e-300


# algebra


def series_strategy(max_len=5):
    return st.builds(
        lambda cs, lo, exact: P(cs, min_degree=lo) if exact else TruncatedSeries.truncated(cs, min_degree=lo),
        st.lists(st.integers(-8, 8).map(float), min_size=1, max_size=max_len),
        st.integers(-2, 2),
        st.booleans(),
    )


@settings(max_examples=100, deadline=None)
@given(series_strategy(), series_strategy())
def test_product_commutes(a, b):
    x, y = a * b, b * a
    assert (x.min_degree, x.trunc_order, x.coeffs) == (y.min_degree, y.trunc_order, y.coeffs)


@settings(max_examples=100, deadline=None)
@given(series_strategy(4), series_strategy(4), series_strategy(4))
def test_product_associates(a, b, c):
    # integer coefficients keep every product exact in floating point
    x, y = (a * b) * c, a * (b * c)
    assert x.trunc_order == y.trunc_order
    for d in range(min(x.min_degree, y.min_degree), x.trunc_order + 1):
        assert x.coeff(d) == y.coeff(d)


@settings(max_examples=60, deadline=None)
@given(series_strategy(), series_strategy())
def test_product_never_reports_unknown_degrees(a, b):
    prod = a * b
    if not prod.exact:
        assert prod.trunc_order <= min(a.known_to + b.min_degree, b.known_to + a.min_degree)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=6), st.floats(-0.9, 0.9))
def test_evaluate_matches_numpy(cs, z):
    assert P(cs).evaluate(z) == pytest.approx(np.polynomial.polynomial.polyval(z, cs), abs=1e-12)


def test_power_matches_repeated_product():
    s = P([1.0, -0.5, 0.25])
    assert (s**3).coeffs == (s * s * s).coeffs
    assert math.isclose((s**3).evaluate(0.3), s.evaluate(0.3) ** 3, rel_tol=1e-14)
