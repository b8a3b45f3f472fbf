"""Real-axis zeta values, Euler products and the main terms of the summatory laws.

All high-precision work runs in a private mpmath context at 40 digits whose
precision is never changed after import, so concurrent readers are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath.ctx_mp import MPContext

from . import sieve

mp = MPContext()
mp.dps = 40
_ROUND = mp.mpf(10) ** -38

# Euler's constant to 20 digits (gamma ~ 0.577).
EULER_GAMMA = mp.mpf("0.57721566490153286061")
EULER_GAMMA_ERR = mp.mpf("1e-20")

BORWEIN_TERMS = 60


@dataclass(frozen=True)
class HighPrecision:
    """A 40-digit value together with an absolute error bound."""

    value: object
    err: object = mp.zero

    @classmethod
    def of(cls, v, err=0) -> "HighPrecision":
        if isinstance(v, HighPrecision):
            return v
        return cls(_to_mpf(v), mp.mpf(err))

    def __float__(self):
        return float(self.value)

    def _bump(self, value, err):
        return HighPrecision(value, err + abs(value) * _ROUND)

    def __add__(self, other):
        o = HighPrecision.of(other)
        return self._bump(self.value + o.value, self.err + o.err)

    __radd__ = __add__

    def __neg__(self):
        return HighPrecision(-self.value, self.err)

    def __sub__(self, other):
        return self + (-HighPrecision.of(other))

    def __rsub__(self, other):
        return HighPrecision.of(other) - self

    def __mul__(self, other):
        o = HighPrecision.of(other)
        err = abs(self.value) * o.err + abs(o.value) * self.err + self.err * o.err
        return self._bump(self.value * o.value, err)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = HighPrecision.of(other)
        if abs(o.value) <= o.err:
            raise ZeroDivisionError("divisor interval contains zero")
        q = self.value / o.value
        # |a/b - (a+da)/(b+db)| <= (|da| + |q| |db|) / (|b| - |db|)
        err = (self.err + abs(q) * o.err) / (abs(o.value) - o.err)
        return self._bump(q, err)

    def __rtruediv__(self, other):
        return HighPrecision.of(other) / self

    @property
    def rel_err(self) -> float:
        return float(self.err / abs(self.value)) if self.value else math.inf

    def as_dict(self) -> dict:
        return {"value": mp.nstr(self.value, 20), "err": mp.nstr(self.err, 3)}


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    return mp.mpf(v)


@lru_cache(maxsize=None)
def _borwein_d(n: int) -> tuple[int, ...]:
    d, acc = [], 0
    for i in range(n + 1):
        acc += math.factorial(n + i - 1) * 4**i // (math.factorial(n - i) * math.factorial(2 * i))
        d.append(n * acc)
    return tuple(d)


@lru_cache(maxsize=256)
def _zeta_cached(s) -> HighPrecision:
    n = BORWEIN_TERMS
    d = _borwein_d(n)
    dn = d[n]
    total = mp.zero
    for k in range(n):
        term = mp.mpf(d[k] - dn) / mp.power(k + 1, s)
        total += -term if k % 2 else term
    eta = -total / dn
    denom = 1 - mp.power(2, 1 - s)
    value = eta / denom
    # Borwein's bound for real s > 0: |eta error| <= 3 / (3 + sqrt 8)^n.
    err = 3 / (3 + mp.sqrt(8)) ** n / abs(denom) + abs(value) * _ROUND * 10
    return HighPrecision(value, err)


def zeta_real(s) -> HighPrecision:
    """zeta(s) for real s in (0, 60], via the accelerated alternating eta series."""
    s = _to_mpf(s)
    if not 0 < s <= 60:
        raise ValueError("zeta_real needs 0 < s <= 60")
    if abs(s - 1) < mp.mpf("1e-6"):
        raise ValueError("zeta_real: s too close to the pole at 1")
    return _zeta_cached(s)


def _log_over_square_derivs(count: int):
    """Coefficients (a_k, b_k) with d^k/dx^k log(x)/x^2 = x^(-2-k) (a_k log x + b_k)."""
    a, b = mp.one, mp.zero
    out = [(a, b)]
    for k in range(count):
        m = 2 + k
        a, b = -m * a, -m * b + a
        out.append((a, b))
    return out


def zeta_prime_2(terms: int = 20, em_order: int = 20) -> HighPrecision:
    """zeta'(2) = -sum log(n)/n^2: direct sum below ``terms``, Euler-Maclaurin tail."""
    if terms < 2:
        raise ValueError("need at least 2 direct terms")
    N = mp.mpf(terms)
    head = mp.fsum(mp.log(n) / n**2 for n in range(2, terms))
    logN = mp.log(N)
    tail = (logN + 1) / N + logN / N**2 / 2
    derivs = _log_over_square_derivs(2 * em_order + 1)
    last = mp.zero
    for j in range(1, em_order + 1):
        a, b = derivs[2 * j - 1]
        f_odd = N ** (-2 - (2 * j - 1)) * (a * logN + b)
        last = mp.bernoulli(2 * j) / mp.factorial(2 * j) * f_odd
        tail -= last
    value = -(head + tail)
    return HighPrecision(value, abs(last) + abs(value) * _ROUND * terms)


def _h_at(p, r: int, s):
    x = mp.power(p, -s)
    pr = mp.mpf(p) ** r
    num = pr * x ** (r + 2) * (1 - p * x) * (1 - pr * x**r)
    den = (1 - x) * (1 - pr * p * x ** (r + 2))
    return 1 + num / den


def h_tail_constant(r: int, s=2):
    """C with 0 <= h_p(p^-s) - 1 <= C p^(r - (r+2)s) for every prime p."""
    s = _to_mpf(s)
    return 1 / ((1 - mp.power(2, -s)) * (1 - mp.power(2, r + 1 - (r + 2) * s)))


@lru_cache(maxsize=64)
def _euler_product_cached(r: int, s, tol) -> HighPrecision:
    if r == 0:
        return HighPrecision(mp.one, mp.zero)
    e = (r + 2) * s - r
    C = h_tail_constant(r, s)
    target = mp.log1p(tol)
    # sum over p > P of p^-e <= P^(1-e) / (e-1)
    P = int(mp.ceil((C / ((e - 1) * target)) ** (1 / (e - 1)))) + 1
    if P >= 1 << 63:
        raise ValueError("tolerance unachievable with 64-bit prime limits")
    partial = mp.one
    for p in sieve.base_primes(P).tolist():
        partial *= _h_at(p, r, s)
    tail_rel = mp.expm1(C * mp.power(P, 1 - e) / (e - 1))
    width = partial * tail_rel
    return HighPrecision(partial + width / 2, width / 2 + partial * _ROUND * 10)


def euler_product_H(r: int, s=2, tol=1e-12) -> HighPrecision:
    """H_r(s) = prod over p of h_p(p^-s), truncated so the tail stays below tol (relative)."""
    if r < 0:
        raise ValueError("order r must be >= 0")
    s = _to_mpf(s)
    if s < mp.mpf(3) / 2:
        raise ValueError("euler_product_H needs s >= 3/2")
    if tol < 1e-14:
        raise ValueError("tol must be >= 1e-14")
    return _euler_product_cached(r, s, mp.mpf(tol))


def partial_product_H(r: int, P: int, s=2):
    """Plain partial product over p <= P (no tail correction)."""
    s = _to_mpf(s)
    out = mp.one
    for p in sieve.base_primes(P).tolist():
        out *= _h_at(p, r, s)
    return out


MAIN_KINDS = ("tau_r", "tau_0_gioia", "sigma_r", "sigma_0", "T_ab")


def coefficients(kind: str, params=None, tol=1e-12) -> dict[str, HighPrecision]:
    """The named constants of each main term."""
    if kind == "tau_r":
        r = int(params)
        if r < 1:
            raise ValueError("tau_r main term needs r >= 1 (use tau_0_gioia for r = 0)")
        return {
            "A": zeta_real(r + 1) / zeta_real(2 * r + 2),
            "B": zeta_real(Fraction(1, r + 1)) / zeta_real(2),
        }
    if kind == "tau_0_gioia":
        z2 = zeta_real(2)
        gamma = HighPrecision(EULER_GAMMA, EULER_GAMMA_ERR)
        c = 2 * gamma - 1 - 2 * zeta_prime_2() / z2
        return {"lead": 1 / z2, "const": c}
    if kind == "sigma_r":
        r = int(params)
        H = euler_product_H(r, 2, tol)
        return {"D": zeta_real(r + 2) * H / (2 * zeta_real(r + 3)), "H": H}
    if kind == "sigma_0":
        return {"D": HighPrecision(mp.pi**2, _ROUND) / (12 * zeta_real(3))}
    if kind == "T_ab":
        a, b = (int(v) for v in params)
        if not 1 <= a <= b:
            raise ValueError("T_ab needs 1 <= a <= b")
        if a == b:
            return {"const": 2 * HighPrecision(EULER_GAMMA, EULER_GAMMA_ERR) - 1}
        return {"c_a": zeta_real(Fraction(b, a)), "c_b": zeta_real(Fraction(a, b))}
    raise ValueError(f"unknown main-term kind {kind!r}; expected one of {MAIN_KINDS}")


def main_term(kind: str, params, x, tol=1e-12) -> HighPrecision:
    """Smooth approximation to the summatory function of ``kind`` at x."""
    c = coefficients(kind, params, tol)
    xm = _to_mpf(x)
    if xm <= 0:
        raise ValueError("x must be positive")
    X = HighPrecision.of(xm)
    if kind == "tau_r":
        r = int(params)
        return c["A"] * X + c["B"] * HighPrecision.of(mp.root(xm, r + 1))
    if kind == "tau_0_gioia":
        return c["lead"] * X * (HighPrecision.of(mp.log(xm)) + c["const"])
    if kind in ("sigma_r", "sigma_0"):
        return c["D"] * X * X
    a, b = (int(v) for v in params)
    if a == b:
        xa = HighPrecision.of(mp.root(xm, a))
        return xa * HighPrecision.of(mp.log(xm)) + c["const"] * xa
    return c["c_a"] * HighPrecision.of(mp.root(xm, a)) + c["c_b"] * HighPrecision.of(mp.root(xm, b))


def main_term_vectorized(kind: str, params, tol=1e-12):
    """Float64 version of main_term for dense sweeps; returns f(x: ndarray)."""
    c = {k: float(v) for k, v in coefficients(kind, params, tol).items()}
    if kind == "tau_r":
        e = 1.0 / (int(params) + 1)
        return lambda x: c["A"] * x + c["B"] * x**e
    if kind == "tau_0_gioia":
        return lambda x: c["lead"] * x * (np.log(x) + c["const"])
    if kind in ("sigma_r", "sigma_0"):
        return lambda x: c["D"] * x * x
    a, b = (int(v) for v in params)
    if a == b:
        return lambda x: x ** (1.0 / a) * (np.log(x) + c["const"])
    return lambda x: c["c_a"] * x ** (1.0 / a) + c["c_b"] * x ** (1.0 / b)


def conditional_exponents(r: int, theta) -> tuple[Fraction, Fraction]:
    """Error exponent alpha and cut-off exponent beta of the RH-conditional bound."""
    theta = Fraction(theta)
    if r < 1:
        raise ValueError("r must be >= 1")
    if theta >= Fraction(1, 2 * r):
        raise ValueError(f"needs theta_r < 1/(2r) = 1/{2 * r}, got {theta}")
    den = 2 * r + 1 - 4 * r * theta
    return (1 - theta) / den, (1 - 2 * theta) / den


def omega_exponent(m_list) -> Fraction:
    """(K - 1) / (2 sum m_k) for a zeta product zeta(m_1 s)...zeta(m_K s)."""
    m = [int(v) for v in m_list]
    if len(m) < 2 or min(m) < 1:
        raise ValueError("need K >= 2 positive m_k")
    return Fraction(len(m) - 1, 2 * sum(m))


@dataclass(frozen=True)
class ThetaEntry:
    theta: Fraction
    log_power: int
    eps: bool
    source: str


# b -> exponent of Delta(1, b; x), power of log x, "+eps" flag, exponent pair word or citation.
THETA_TABLE: dict[int, ThetaEntry] = {
    1: ThetaEntry(Fraction(131, 416), 0, True, "Huxley 2005"),
    2: ThetaEntry(Fraction(1057, 4785), 0, True, "Graham-Kolesnik 1988"),
    3: ThetaEntry(Fraction(1486, 8647), 0, True, "AB(AS)^2H"),
    4: ThetaEntry(Fraction(1448, 10331), 0, True, "AH"),
    5: ThetaEntry(Fraction(71318556275, 587475333596), 0, True, "(A^2S)^2(AB)^2A^3S^6(AS)^2BA^3SH"),
    6: ThetaEntry(Fraction(669, 6305), 1, False, "(A^2B)^3(AB)^3A^4BI"),
    7: ThetaEntry(Fraction(338866613, 3586241504), 2, False, "A^2S^3(AB)^2A^3S^6AB(A^2S^2)^2ABI"),
    8: ThetaEntry(Fraction(2000836147, 23452726172), 1, False, "A(AB)^4(A^3S)^6A^3BI"),
    9: ThetaEntry(Fraction(372854090, 4786779707), 2, False, "A^2S^2(AB)^5(AS)^3BA^3S^6ABI"),
    10: ThetaEntry(Fraction(150509, 2096993), 0, True, "(A^2S^2)^3ASH"),
    11: ThetaEntry(Fraction(1048, 15811), 0, True, "A^2H"),
    12: ThetaEntry(Fraction(64, 1037), 0, True, "A^2H"),
    13: ThetaEntry(Fraction(2516635, 43324033), 0, True, "A^3BA^3BA^2BA^4B(AS)^2H"),
    14: ThetaEntry(Fraction(75, 1373), 1, False, "A^2(AS)^2BA^3BI"),
    15: ThetaEntry(Fraction(13514730527, 262064292044), 0, True, "A(A^2B)^3A^4S^7A^3SBA^4SH"),
    16: ThetaEntry(Fraction(15, 307), 1, False, "A^3BA^2BA^4BI"),
}

# Decimal values printed alongside the fractions in the table, for cross-checking.
THETA_DECIMALS = {
    1: 0.314904, 2: 0.220899, 3: 0.171852, 4: 0.140161, 5: 0.121398, 6: 0.106106,
    7: 0.094491, 8: 0.085314, 9: 0.077892, 10: 0.071774, 11: 0.066283, 12: 0.061716,
    13: 0.058089, 14: 0.054625, 15: 0.051570, 16: 0.048860,
}


def table_words() -> dict[int, str]:
    """Rows whose source is an exponent-pair word rather than a citation."""
    return {b: t.source for b, t in THETA_TABLE.items() if t.source.endswith(("H", "I"))}


def theta_lookup(b: int) -> tuple[Fraction, int]:
    """(theta_b, theta'_b): tabulated for b <= 16, 1/(b + 7/2) with one log beyond."""
    if b < 1:
        raise ValueError("b must be >= 1")
    if b in THETA_TABLE:
        t = THETA_TABLE[b]
        return t.theta, t.log_power
    return 1 / (b + Fraction(7, 2)), 1


def error_exponent(r: int) -> Fraction:
    """max(theta_r, 1/(2r)), the unconditional exponent of the tau^(r-1) error."""
    return max(theta_lookup(r)[0], Fraction(1, 2 * r))


def constants_summary(r: int, tol=1e-12) -> dict:
    """Every constant attached to order r, with error bounds."""
    out = {
        "r": r,
        "gamma": HighPrecision(EULER_GAMMA, EULER_GAMMA_ERR).as_dict(),
        "zeta_half": zeta_real(Fraction(1, 2)).as_dict(),
        "zeta_2": zeta_real(2).as_dict(),
        "zeta_prime_2": zeta_prime_2().as_dict(),
    }
    if r >= 1:
        c = coefficients("tau_r", r)
        out["A_r"] = c["A"].as_dict()
        out["B_r"] = c["B"].as_dict()
    else:
        c = coefficients("tau_0_gioia")
        out["gioia_lead"] = c["lead"].as_dict()
        out["gioia_const"] = c["const"].as_dict()
    s = coefficients("sigma_r", r, tol)
    out["H_r_2"] = s["H"].as_dict()
    out["D_r"] = s["D"].as_dict()
    theta, log_power = theta_lookup(r + 1)
    out["theta_r_plus_1"] = str(theta)
    out["theta_prime_r_plus_1"] = log_power
    out["error_exponent"] = str(error_exponent(r + 1))
    out["omega_exponent"] = str(omega_exponent([1, r + 1]))
    if r >= 1 and theta < Fraction(1, 2 * (r + 1)):
        alpha, beta = conditional_exponents(r + 1, theta)
        out["conditional_alpha"] = str(alpha)
        out["conditional_beta"] = str(beta)
    return out
