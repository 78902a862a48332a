import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heattrace.errors import OrderError, ParityError, PoleProximity
from heattrace.fitdetect import parity_kappa
from heattrace.lattice import LatticeSpec, validate
from heattrace.series import TruncatedSeries
from heattrace.verification import model_spec, pure_spec, rho_series, shift_spec
from heattrace.zetareg import (
    log_pole_residue,
    poles,
    product_coeff,
    zeta_residue,
    zeta_residue_limit,
    zeta_special,
    zeta_value,
    zeta_value_limit,
)


def oracle(s):
    with mpmath.workdps(30):
        return complex(mpmath.zeta(2 * mpmath.mpmathify(s), mpmath.mpf(3) / 2))


def test_pure_value_at_two():
    v = zeta_value(pure_spec(), 2).value
    assert v.real == pytest.approx(math.pi**4 / 6 - 16, rel=1e-9)
    assert v.imag == 0


@pytest.mark.parametrize("s", [0.75, 2, -0.6, 0.3 + 1j, -1.4])
def test_oracle_equivalence(s):
    ref = oracle(s)
    r = zeta_value(pure_spec(), s)
    assert abs(r.value - ref) <= 1e-6 * (1 + abs(ref))
    assert r.kind == "regular"


@settings(max_examples=15, deadline=None)
@given(st.floats(-1.8, 3.0), st.floats(-3.0, 3.0))
def test_oracle_equivalence_random(x, y):
    s = complex(x, y)
    if min(abs(s - (0.5 - k)) for k in range(4)) < 0.05:
        return
    ref = oracle(s)
    assert abs(zeta_value(pure_spec(), s).value - ref) <= 1e-6 * (1 + abs(ref))


def test_error_estimate_is_honest():
    for s in (0.75, 2, -0.6):
        r = zeta_value(pure_spec(), s)
        assert abs(r.value - oracle(s)) <= max(10 * r.error_estimate, 1e-12)


def test_model_value_matches_direct_sum():
    spec = model_spec()
    with mpmath.workdps(30):
        ref = mpmath.nsum(lambda n: ((n + 1.5) - 0.1 / (n + 1.5) - 0.02 / (n + 1.5) ** 3) ** -4, [0, mpmath.inf])
    assert zeta_value(spec, 2).value.real == pytest.approx(float(ref), rel=1e-9)


@pytest.mark.parametrize("spec", [pure_spec(), shift_spec(), model_spec()], ids=["pure", "shift", "model"])
def test_value_at_zero(spec):
    assert zeta_value(spec, 0).value == pytest.approx(-1.0, abs=1e-12)


def test_pole_proximity():
    with pytest.raises(PoleProximity):
        zeta_value(model_spec(), 0.5)
    with pytest.raises(PoleProximity):
        zeta_value(model_spec(), -0.5 + 1e-8)


def test_order_guard():
    with pytest.raises(OrderError):
        zeta_value(pure_spec(), -4.0, N=2)


# special values


def test_pure_special_values():
    spec = pure_spec()
    assert zeta_special(spec, 0) == -1
    assert zeta_special(spec, 1) == pytest.approx(-0.25, rel=1e-15)
    assert zeta_special(spec, 2) == pytest.approx(-0.0625, rel=1e-15)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_pure_special_matches_hurwitz(m):
    assert zeta_special(pure_spec(), m) == pytest.approx(float(mpmath.zeta(-2 * m, 1.5)), rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_route_agreement(m):
    spec = model_spec()
    assert abs(zeta_value_limit(spec, -m) - zeta_special(spec, m)) <= 1e-6


def test_special_odd_power_parity():
    spec = model_spec(3)
    assert zeta_special(spec, 0) == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(ParityError):
        zeta_special(spec, 1)


# residues


@pytest.mark.parametrize("spec", [pure_spec(), shift_spec(), model_spec()], ids=["pure", "shift", "model"])
def test_residue_at_half(spec):
    assert zeta_residue(spec, 0) == pytest.approx(0.5, rel=1e-14)


def test_pure_has_no_pole_at_minus_half():
    assert zeta_residue(pure_spec(), 1) == 0.0


@pytest.mark.parametrize("c", [0.3, -0.6])
def test_shift_residue(c):
    spec = validate(LatticeSpec.from_g(TruncatedSeries.polynomial([c]), 1.5, 2))
    assert zeta_residue(spec, 1) == pytest.approx(c / 4, rel=1e-12)


@pytest.mark.parametrize("spec", [pure_spec(), model_spec()], ids=["pure", "model"])
def test_residue_limit(spec):
    assert abs(zeta_residue_limit(spec, 0.5) - 0.5) <= 1e-6


def test_residue_limit_along_approach():
    # (s - 1/2) Z(s) along s = 1/2 + 10^-j, extrapolated
    spec = model_spec()
    hs = [10.0**-j for j in (2, 3, 4)]
    vals = [h * zeta_value(spec, 0.5 + h).value for h in hs]
    # linear in h to leading order: Richardson with ratio 10
    ext = [(10 * vals[i + 1] - vals[i]) / 9 for i in range(2)]
    final = (100 * ext[1] - ext[0]) / 99
    assert abs(final - 0.5) <= 1e-6


def test_residue_limit_at_minus_half():
    spec = model_spec()
    assert abs(zeta_residue_limit(spec, -0.5) - zeta_residue(spec, 1)) <= 1e-6


def test_pole_list():
    ps = poles(model_spec(), 3)
    assert [p.s for p in ps][:3] == [0.5, -0.5, -1.5]
    assert ps[0].residue == pytest.approx(0.5)
    assert all(p.kind == "pole" for p in ps)


def test_odd_pole_structure():
    spec = model_spec(3)
    ps = {p.s: p.residue for p in poles(spec, 1)}
    assert ps[-1] == pytest.approx(-0.01, rel=1e-12)
    res = log_pole_residue(spec)
    assert res.kappa == pytest.approx(-0.01, rel=1e-14)
    assert res.lplus_residue_at_minus_m == pytest.approx(res.d_m, rel=1e-15)


def test_odd_residue_order_guard():
    with pytest.raises(OrderError):
        zeta_residue(model_spec(3), 2)


@pytest.mark.parametrize("m", [1, 3])
def test_odd_residue_matches_fit(m):
    spec = model_spec(m)
    fitted = parity_kappa(rho_series(), m).kappa
    assert abs(fitted - log_pole_residue(spec).kappa) <= 0.02 * abs(log_pole_residue(spec).kappa)


def test_log_residue_rejects_even():
    with pytest.raises(ParityError):
        log_pole_residue(model_spec(2))


# product coefficients


def test_pure_product_coefficients():
    assert product_coeff(pure_spec(), 1) == pytest.approx(-0.25, rel=1e-15)
    assert product_coeff(pure_spec(), 2) == pytest.approx(0.03125, rel=1e-15)


def test_product_coefficient_odd_power():
    with pytest.raises(ParityError):
        product_coeff(model_spec(3), 1)


def test_record_fields():
    rec = zeta_value(pure_spec(), 2).record()
    assert list(rec) == ["s", "value", "kind", "residue", "error_estimate"]
