import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heattrace.errors import ParityError, PositivityError, RadiusError
from heattrace.lattice import (
    LatticeSpec,
    count,
    is_hb_instance,
    lambda_at,
    lambdas,
    odd_decompose,
    tau_values,
    validate,
)
from heattrace.series import TruncatedSeries
from heattrace.verification import model_spec

P = TruncatedSeries.polynomial


def test_negative_constant_fails_at_zero():
    with pytest.raises(PositivityError) as info:
        validate(LatticeSpec.from_g(P([-10.0]), 1.5, 2))
    assert "0" in str(info.value)


def test_pure_lattice_is_valid():
    spec = validate(LatticeSpec.pure(1.5, 2))
    assert spec.validated
    assert lambda_at(spec, 0) == 2.25


def test_model_sup_bound():
    spec = model_spec()
    u = np.linspace(0, 4 / 9, 200001)
    raw = np.max(np.abs(-0.2 - 0.03 * u + 0.004 * u**2 + 0.0004 * u**3))
    assert spec.q_star == pytest.approx(1.05 * raw, rel=1e-6)
    assert raw == pytest.approx(0.2125081, abs=1e-7)


def test_radius_guard():
    g = P([0.1], radius=0.3)
    with pytest.raises(RadiusError):
        validate(LatticeSpec.from_g(g, 1.5, 2))


def test_model_first_eigenvalue():
    u = 4 / 9
    sig = 0.1 + 0.02 * u
    expected = 2.25 - 2 * sig + u * sig**2
    assert lambda_at(model_spec(), 0) == pytest.approx(expected, rel=1e-15)
    assert lambda_at(model_spec(), 0) == pytest.approx(2.0374919, abs=1e-6)


def test_model_limit_shift():
    # lambda_n ~ 1e12 here, so the shift is resolved in extended precision and
    # lambda_at is held to relative accuracy against the same value
    spec = model_spec()
    n = 10**6
    with mpmath.workdps(40):
        x = mpmath.mpf(n) + mpmath.mpf(3) / 2
        lam = (x - 0.1 / x - 0.02 / x**3) ** 2
        assert float(lam - x * x) == pytest.approx(-0.2, abs=1e-6)
        assert abs(lambda_at(spec, n) / lam - 1) < 4e-16
    # the normal form carries the shift directly as g(u), u = x^-2
    assert float(spec.g.evaluate((n + 1.5) ** -2)) == pytest.approx(-0.2, abs=1e-6)


@pytest.mark.parametrize("power", [2, 3, 4, 5])
def test_ratio_to_power_tends_to_one(power):
    spec = model_spec(power)
    n = 10**6
    assert abs(lambda_at(spec, n) / (n + 1.5) ** power - 1) < 1e-6


@pytest.mark.parametrize("power", [1, 2, 3, 4, 6])
def test_two_parametrisations_agree(power):
    spec = model_spec(power)
    n = np.arange(51)
    direct = tau_values(spec, n) ** power
    assert np.max(np.abs(lambdas(spec, 0, 51) / direct - 1)) <= 1e-9
    for k in (0, 7, 50):
        assert lambda_at(spec, k) == pytest.approx(direct[k], rel=1e-9)


def test_vectorised_matches_pointwise():
    spec = model_spec()
    arr = lambdas(spec, 0, 20)
    assert all(arr[k] == pytest.approx(lambda_at(spec, k), rel=1e-15) for k in range(20))


# odd decomposition


def test_odd_decompose_linear_rho():
    spec = validate(LatticeSpec.from_rho(P([0.0, 0.1]), 1))
    dec = odd_decompose(spec)
    assert dec.poly_coeffs == ()
    assert dec.d_m == pytest.approx(-0.1, abs=1e-17)


def test_odd_decompose_cube():
    dec = odd_decompose(model_spec(3))
    assert dec.poly_coeffs == pytest.approx((-0.3,), abs=1e-16)
    assert dec.d_m == pytest.approx(-0.03, abs=1e-16)
    assert dec.remainder_exponent == -3


def test_odd_decompose_rejects_even():
    with pytest.raises(ParityError):
        odd_decompose(model_spec(2))


@pytest.mark.parametrize("m", [1, 3, 5])
def test_odd_decompose_remainder_is_cubic(m):
    spec = model_spec(m)
    dec = odd_decompose(spec)
    for x in (50.0, 100.0, 200.0):
        b = x**m + sum(c * x ** (m - 2 * j) for j, c in enumerate(dec.poly_coeffs, 1))
        # compare in extended form: tau^m - b - d/x should be O(x^-3)
        tau = x - float(spec.rho.evaluate(1 / x))
        r = tau**m - b - dec.d_m / x
        assert abs(r) <= 1e-6 * x ** (m - 1) + 1.0 * x**-3


# counting


def test_count_pure():
    spec = validate(LatticeSpec.pure())
    assert count(spec, 10).count == 2
    assert count(spec, 0).count == 0


def test_count_hb_instance_bounds():
    spec = model_spec()
    assert is_hb_instance(spec)
    rep = count(spec, 1e4)
    assert (rep.lower_bound, rep.upper_bound) == (99, 100)
    assert 99 <= rep.count <= 100


def test_count_agrees_with_enumeration():
    spec = model_spec()
    lam = lambdas(spec, 0, 2000)
    for L in (0.0, 2.0, 2.04, 100.0, 5555.5, 1e6):
        assert count(spec, L).count == int(np.count_nonzero(lam <= L))


def test_non_hb_spec_reports_enumeration_only():
    spec = validate(LatticeSpec.from_g(P([0.3]), 1.5, 2))
    assert not is_hb_instance(spec)
    rep = count(spec, 500.0)
    assert rep.lower_bound == rep.count == rep.upper_bound


def test_nonmonotone_head_counted():
    # a strong negative perturbation makes lambda_0 > lambda_1 with power 4
    g = P([-2.0, 4.0], radius=10.0)
    spec = validate(LatticeSpec.from_g(g, 1.0, 4))
    lam = lambdas(spec, 0, 200)
    assert spec.monotone_from >= 0
    for L in (lam[0], lam[1], 1000.0, 1e6):
        assert count(spec, L).count == int(np.count_nonzero(lam <= L))


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1e6))
def test_weyl_bounds_random(L):
    rep = count(model_spec(), L)
    assert rep.lower_bound <= rep.count <= rep.upper_bound


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-0.3, 0.3), min_size=1, max_size=4),
    st.floats(0.6, 3.0),
    st.integers(1, 5),
    st.floats(0, 1e5),
)
def test_count_bounds_any_valid_spec(cs, a, M, L):
    try:
        spec = validate(LatticeSpec.from_g(P(cs, radius=10.0), a, M))
    except PositivityError:
        return
    rep = count(spec, L)
    assert rep.lower_bound <= rep.count <= rep.upper_bound
    n = max(int(L ** (1 / M)) + 50, 200)
    assert rep.count == int(np.count_nonzero(lambdas(spec, 0, n) <= L))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-0.3, 0.3), min_size=1, max_size=4), st.floats(0.6, 3.0), st.integers(1, 5))
def test_validated_specs_are_positive_and_eventually_monotone(cs, a, M):
    try:
        spec = validate(LatticeSpec.from_g(P(cs, radius=10.0), a, M))
    except PositivityError:
        return
    lam = lambdas(spec, 0, 400)
    assert np.all(lam > 0)
    assert np.all(np.diff(lam[spec.monotone_from :]) > 0)


def test_offset_must_be_positive():
    with pytest.raises(ValueError):
        LatticeSpec.pure(0.0)


def test_validate_is_idempotent():
    spec = model_spec()
    assert validate(spec) is spec
    assert math.isfinite(spec.q_star)
