import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divorder import constants, series, sieve
from divorder.constants import HighPrecision, mp

# The oracle is mpmath's own zeta in its global context; comparisons run at
# 50 digits inside workdps so nothing is rounded back to double precision.


def oracle_zeta(s, derivative=0):
    if isinstance(s, Fraction):
        s = mpmath.mpf(s.numerator) / s.denominator
    return mpmath.zeta(s, derivative=derivative)


def rel(a, b):
    return abs(mpmath.mpf(str(a)) - b) / abs(b)


def test_zeta_closed_forms():
    assert constants.zeta_real(2).value == pytest.approx(float(mp.pi**2 / 6), rel=1e-15)
    assert abs(constants.zeta_real(2).value - mp.pi**2 / 6) / (mp.pi**2 / 6) < 1e-30
    assert abs(constants.zeta_real(4).value - mp.pi**4 / 90) / (mp.pi**4 / 90) < 1e-30
    assert float(constants.zeta_real(Fraction(1, 2)).value) == pytest.approx(-1.460354508810, abs=1e-12)


@pytest.mark.parametrize(
    "s", [Fraction(1, 10), Fraction(3, 10), Fraction(1, 2), Fraction(9, 10), Fraction(1, 3), Fraction(3, 2), 2, 3, 7, Fraction(5, 2), 40]
)
@mpmath.workdps(50)
def test_zeta_against_mpmath(s):
    got = constants.zeta_real(s)
    want = oracle_zeta(s)
    assert rel(got.value, want) < 1e-30
    assert abs(mpmath.mpf(str(got.value)) - want) <= mpmath.mpf(str(got.err)) + mpmath.mpf(10) ** -45


@pytest.mark.parametrize("s", [0.1, 0.3, 0.5, 0.9])
def test_zeta_negative_on_unit_interval(s):
    assert constants.zeta_real(s).value < 0


def test_zeta_domain():
    for bad in (0, -1, 1, 61):
        with pytest.raises(ValueError):
            constants.zeta_real(bad)


@mpmath.workdps(50)
def test_zeta_prime_2():
    z = constants.zeta_prime_2()
    assert float(z.value) == pytest.approx(-0.937548254316, abs=1e-12)
    assert z.value < 0
    assert rel(z.value, oracle_zeta(2, derivative=1)) < 1e-25
    # two truncation points agree
    assert abs(constants.zeta_prime_2(terms=40).value - z.value) < 1e-13


def test_h_tail_bound_holds_at_small_primes():
    for r in range(1, 6):
        for s in (2, 1.5, 3):
            C = constants.h_tail_constant(r, s)
            for p in sieve.base_primes(2000).tolist():
                excess = constants._h_at(p, r, s) - 1
                # slack: h - 1 is formed next to 1, so 40-digit rounding shows at 1e-40
                slack = mp.mpf(10) ** -39
                assert -slack <= excess <= C * mp.power(p, r - (r + 2) * mp.mpf(s)) + slack


def test_h_value_matches_its_bell_series():
    # h_p(p^-2) from the closed form equals the power series sum h_k p^-2k;
    # h_k grows like p^(k(r+1)/(r+2)), so the tail past K = 64 is below 2^-80
    for r in range(1, 4):
        for p in (2, 3, 5):
            b = series.bell_series("h_r", p, r, series.MAX_ORDER)
            total = mp.fsum(mp.mpf(c) / mp.mpf(p) ** (2 * k) for k, c in enumerate(b.coeffs))
            assert abs(total - constants._h_at(p, r, 2)) < mp.mpf(10) ** -22


def test_euler_product_H():
    assert constants.euler_product_H(0).value == 1
    assert constants.euler_product_H(0).err == 0
    h1 = constants.euler_product_H(1)
    assert 1 < h1.value < 1.05
    p3 = constants.partial_product_H(1, 10**3)
    p4 = constants.partial_product_H(1, 10**4)
    C = constants.h_tail_constant(1)
    # the tail past 10^3 bounds the change up to 10^4
    assert 0 <= p4 - p3 <= p3 * mp.expm1(C * mp.power(10**3, -4) / 4)
    assert abs(h1.value - p4) <= h1.err + p4 * mp.expm1(C * mp.power(10**4, -4) / 4)
    assert h1.rel_err < 1e-12


def test_euler_product_guards():
    with pytest.raises(ValueError):
        constants.euler_product_H(1, s=1.2)
    with pytest.raises(ValueError):
        constants.euler_product_H(1, tol=1e-15)
    with pytest.raises(ValueError):
        constants.euler_product_H(-1)


def test_main_term_examples():
    c = constants.coefficients("tau_r", 1)
    assert float(c["A"].value) == pytest.approx(1.519817, abs=1e-6)
    assert float(c["B"].value) == pytest.approx(-0.887789, abs=1e-6)
    assert float(c["A"].value) == pytest.approx(15 / math.pi**2, rel=1e-14)
    assert float(constants.main_term("tau_r", 1, 10)) == pytest.approx(12.391, abs=1e-3)
    d0 = constants.coefficients("sigma_0")["D"]
    assert float(d0) == pytest.approx(0.684216, abs=1e-6)
    assert float(constants.main_term("T_ab", (1, 2), 10)) == pytest.approx(11.83, abs=5e-3)


def test_sigma_coefficient_coherent_at_r0():
    d = constants.coefficients("sigma_r", 0)["D"].value
    d0 = constants.coefficients("sigma_0")["D"].value
    assert abs(d - d0) / d0 < 1e-12


def test_gioia_main_term_tracks_unitary_divisor_sum():
    x = 10**6
    s = int(np.cumsum(sieve.batch_values(sieve.SummatorySpec("tau_r", r=0), x))[-1])
    main = float(constants.main_term("tau_0_gioia", None, x))
    assert abs(s - main) < 10 * math.sqrt(x)


def test_main_term_vectorized_agrees():
    xs = np.array([10.0, 1e4, 1e7])
    for kind, params in [("tau_r", 1), ("tau_r", 3), ("tau_0_gioia", None), ("sigma_r", 1), ("T_ab", (1, 2)), ("T_ab", (2, 2))]:
        f = constants.main_term_vectorized(kind, params)
        for x, v in zip(xs, f(xs)):
            assert v == pytest.approx(float(constants.main_term(kind, params, int(x))), rel=1e-13)


def test_main_term_errors_are_tiny():
    for kind, params in [("tau_r", 2), ("sigma_r", 2), ("tau_0_gioia", None)]:
        assert constants.main_term(kind, params, 10**8).rel_err < 1e-11
    with pytest.raises(ValueError):
        constants.coefficients("tau_r", 0)
    with pytest.raises(ValueError):
        constants.coefficients("nope")


def test_conditional_exponents():
    assert constants.conditional_exponents(2, Fraction(1057, 4785))[0] == Fraction(3728, 15469)
    assert constants.conditional_exponents(2, 0)[0] == Fraction(1, 5)
    assert constants.conditional_exponents(1, Fraction(131, 416))[0] == Fraction(285, 724)
    with pytest.raises(ValueError):
        constants.conditional_exponents(3, Fraction(1, 6))


def test_omega_exponent():
    assert constants.omega_exponent([1, 2]) == Fraction(1, 6)
    assert constants.omega_exponent([1, 1]) == Fraction(1, 4)
    assert constants.omega_exponent([1, 2]) == Fraction(1, 6)
    with pytest.raises(ValueError):
        constants.omega_exponent([3])


def test_theta_lookup():
    assert constants.theta_lookup(4) == (Fraction(1448, 10331), 0)
    assert constants.theta_lookup(2) == (Fraction(1057, 4785), 0)
    assert constants.theta_lookup(20) == (Fraction(2, 47), 1)
    with pytest.raises(ValueError):
        constants.theta_lookup(0)


def test_theta_table_self_consistent():
    for b, entry in constants.THETA_TABLE.items():
        assert abs(float(entry.theta) - constants.THETA_DECIMALS[b]) < 1e-6
        if b in constants.table_words():
            # a +eps row comes from a word over H, a log-power row from a word over I
            assert entry.eps == entry.source.endswith("H")
            assert (entry.log_power == 0) == entry.eps
    # theta decreases with b
    thetas = [constants.theta_lookup(b)[0] for b in range(1, 40)]
    assert thetas == sorted(thetas, reverse=True)


def test_max_rule():
    for r in range(1, 40):
        theta = constants.theta_lookup(r)[0]
        expected = Fraction(1, 2 * r) if r <= 2 else theta
        assert constants.error_exponent(r) == expected


def test_exponent_ordering():
    # Omega <= conditional O <= unconditional O where the conditional bound applies
    r = 1
    theta = constants.theta_lookup(r + 1)[0]
    alpha, _ = constants.conditional_exponents(r + 1, theta)
    assert constants.omega_exponent([1, r + 1]) <= alpha <= max(theta, Fraction(1, 2 * r + 2))
    for r in range(2, 6):
        theta = constants.theta_lookup(r + 1)[0]
        assert theta >= Fraction(1, 2 * r + 2)
        with pytest.raises(ValueError):
            constants.conditional_exponents(r + 1, theta)


def test_constants_summary():
    s = constants.constants_summary(1)
    assert s["A_r"]["value"].startswith("1.519817")
    assert s["B_r"]["value"].startswith("-0.887789")
    assert s["conditional_alpha"] == "3728/15469"
    assert s["omega_exponent"] == "1/6"
    g = constants.constants_summary(0)
    assert "gioia_const" in g and g["H_r_2"]["value"] == "1.0"


finite = st.floats(-1e6, 1e6, allow_nan=False).filter(lambda v: abs(v) > 1e-3)
errs = st.floats(0, 1e-3)


@settings(max_examples=200, deadline=None)
@given(finite, errs, finite, errs, st.floats(-1, 1), st.floats(-1, 1))
def test_error_propagation_encloses(a, da, b, db, ta, tb):
    x, y = HighPrecision.of(a, da), HighPrecision.of(b, db)
    # any point inside both intervals
    xa, yb = mp.mpf(a) + ta * mp.mpf(da), mp.mpf(b) + tb * mp.mpf(db)
    for got, exact in ((x + y, xa + yb), (x - y, xa - yb), (x * y, xa * yb), (x / y, xa / yb)):
        assert abs(got.value - exact) <= got.err * (1 + mp.mpf(10) ** -30)
