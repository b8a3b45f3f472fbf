"""Formal Bell series and zeta quotients with exact integer coefficients.

A factor zeta(m*s - a) contributes the local series 1/(1 - p^a x^m) at the
prime p; a factor in the denominator contributes 1 - p^a x^m.  Products of
these are expanded to a fixed order and reassembled multiplicatively into a
coefficient table.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import arith
from .arith import CoefficientTable, check_int128

BELL_KINDS = ("tau_r", "sigma_r", "h_r", "zeta_quotient_local")
MAX_ORDER = 64
H_TABLE_LIMIT = 10**4


@dataclass(frozen=True)
class ZetaQuotientSpec:
    """prod zeta(m s - a) over ``numerator`` divided by the same over ``denominator``."""

    numerator: tuple[tuple[int, int], ...]
    denominator: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(tuple(f) for f in self.numerator))
        object.__setattr__(self, "denominator", tuple(tuple(f) for f in self.denominator))
        if not self.numerator and not self.denominator:
            raise ValueError("a zeta quotient needs at least one factor")
        for m, a in self.numerator + self.denominator:
            if m < 1 or a < 0:
                raise ValueError(f"factor zeta({m}s - {a}) needs m >= 1 and a >= 0")

    @classmethod
    def tau_r(cls, r: int) -> "ZetaQuotientSpec":
        """zeta(s) zeta((r+1)s) / zeta((2r+2)s)."""
        return cls(((1, 0), (r + 1, 0)), ((2 * r + 2, 0),))

    @classmethod
    def z_part(cls, r: int) -> "ZetaQuotientSpec":
        """zeta(s-1) zeta((r+1)s - r) / zeta((r+2)s - r - 1)."""
        return cls(((1, 1), (r + 1, r)), ((r + 2, r + 1),))

    def __str__(self):
        def fmt(m, a):
            arg = "s" if m == 1 else f"{m}s"
            return f"zeta({arg}-{a})" if a else f"zeta({arg})"

        num = "*".join(fmt(*f) for f in self.numerator) or "1"
        if not self.denominator:
            return num
        return num + "/(" + "*".join(fmt(*f) for f in self.denominator) + ")"


@dataclass(frozen=True)
class BellSeries:
    p: int
    coeffs: tuple[int, ...]

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)


# Truncated power series on integer lists of fixed length K + 1.

def _poly(terms: dict[int, int], K: int) -> list[int]:
    out = [0] * (K + 1)
    for e, c in terms.items():
        if e <= K:
            out[e] += c
    return out


def _mul(f: list[int], g: list[int]) -> list[int]:
    K = len(f) - 1
    out = [0] * (K + 1)
    for i, fi in enumerate(f):
        if fi:
            for j in range(K + 1 - i):
                out[i + j] += fi * g[j]
    return out


def _div(f: list[int], g: list[int]) -> list[int]:
    """f / g as a power series; g[0] must be 1 so the quotient is integral."""
    if g[0] != 1:
        raise ArithmeticError("non-integral local quotient: divisor has constant term != 1")
    K = len(f) - 1
    q = [0] * (K + 1)
    for k in range(K + 1):
        q[k] = f[k] - sum(q[i] * g[k - i] for i in range(max(0, k - len(g) + 1), k))
    return q


def _geometric(c: int, m: int, K: int) -> list[int]:
    """1 / (1 - c x^m)."""
    out = [0] * (K + 1)
    for j in range(K // m + 1):
        out[j * m] = c**j
    return out


def _zeta_local(spec: ZetaQuotientSpec, p: int, K: int) -> list[int]:
    out = _poly({0: 1}, K)
    for m, a in spec.numerator:
        out = _mul(out, _geometric(p**a, m, K))
    for m, a in spec.denominator:
        out = _mul(out, _poly({0: 1, m: -(p**a)}, K))
    return out


def _h_local(p: int, r: int, K: int) -> list[int]:
    # 1 + p^r x^(r+2) (1 - p x)(1 - p^r x^r) / ((1 - x)(1 - p^(r+1) x^(r+2)))
    num = _mul(_poly({r + 2: p**r}, K), _poly({0: 1, 1: -p}, K))
    num = _mul(num, _poly({0: 1, r: -(p**r)} if r else {}, K))
    den = _mul(_poly({0: 1, 1: -1}, K), _poly({0: 1, r + 2: -(p ** (r + 1))}, K))
    out = _div(num, den)
    out[0] += 1
    return out


def bell_series(kind: str, p: int, params, K: int) -> BellSeries:
    """Local series sum f(p^k) x^k for k = 0..K.

    ``params`` is the order r for tau_r, sigma_r and h_r, and a
    ZetaQuotientSpec for zeta_quotient_local.
    """
    if kind not in BELL_KINDS:
        raise ValueError(f"unknown Bell series kind {kind!r}")
    if not 0 <= K <= MAX_ORDER:
        raise ValueError(f"order K must lie in [0, {MAX_ORDER}]")
    if not arith.is_prime(p):
        raise ValueError(f"{p} is not prime")
    if kind == "zeta_quotient_local":
        coeffs = _zeta_local(params, p, K)
    else:
        r = int(params)
        if r < 0:
            raise ValueError("order r must be >= 0")
        if kind == "tau_r":
            coeffs = [2 if k > r else 1 for k in range(K + 1)]
        elif kind == "sigma_r":
            coeffs = [p**k + p**r if k > r else p**k for k in range(K + 1)]
        else:
            coeffs = _h_local(p, r, K)
    for c in coeffs:
        check_int128(c, "Bell coefficient")
    return BellSeries(p, tuple(coeffs))


def bell_order(N: int) -> int:
    """Truncation order that covers every p^k <= N."""
    return N.bit_length()


def multiplicative_table(local, N: int) -> CoefficientTable:
    """Table of the multiplicative function with f(p^e) = local(p, K)[e]."""
    values = [0] + [1] * N
    for p in arith.small_primes(N) if N >= 2 else ():
        K = 0
        pk = 1
        while pk * p <= N:
            pk *= p
            K += 1
        coeffs = local(p, K)
        pe = p
        for e in range(1, K + 1):
            c = coeffs[e]
            if c != 1:
                nxt = pe * p
                for m in range(pe, N + 1, pe):
                    if m % nxt:
                        values[m] *= c
            pe *= p
    for v in values:
        check_int128(v, "table coefficient")
    return CoefficientTable(N, values)


def zeta_quotient_coeffs(spec: ZetaQuotientSpec, N: int) -> CoefficientTable:
    """Dirichlet coefficients 1..N of the zeta quotient, exactly."""
    if not 1 <= N <= 10**6:
        raise ValueError("N must lie in [1, 10^6]")
    return multiplicative_table(lambda p, K: _zeta_local(spec, p, K), N)


def z_coeffs(r: int, N: int) -> CoefficientTable:
    """z(n) = sum over a b^(r+1) c^(r+2) = n of a b^r c^(r+1) mu(c), by direct summation."""
    if r < 0:
        raise ValueError("order r must be >= 0")
    if not 1 <= N <= 10**6:
        raise ValueError("N must lie in [1, 10^6]")
    values = [0] * (N + 1)
    c = 1
    while c ** (r + 2) <= N:
        mu = arith.mu_k(c, 1)
        if mu:
            cpart = c ** (r + 2)
            cw = mu * c ** (r + 1)
            b = 1
            while b ** (r + 1) * cpart <= N:
                step = b ** (r + 1) * cpart
                w = cw * b**r
                for a in range(1, N // step + 1):
                    values[a * step] += a * w
                b += 1
        c += 1
    for v in values:
        check_int128(v, "z coefficient")
    return CoefficientTable(N, values)


def h_table(r: int, N: int, max_limit: int = H_TABLE_LIMIT) -> CoefficientTable:
    """Coefficients of the correction series H_r, from the local h_p expansion."""
    if N > max_limit:
        raise ValueError(f"h-table is only materialized up to {max_limit}")
    return multiplicative_table(lambda p, K: _h_local(p, r, K), N)


def mu_k_table(k: int, N: int) -> CoefficientTable:
    """mu_k on [1, N], placed directly on the perfect k-th powers."""
    values = [0] * (N + 1)
    for m in range(1, arith.iroot(N, k) + 1):
        values[m**k] = arith.mu_k(m, 1)
    return CoefficientTable(N, values)


def tau_ab_table(a: int, b: int, N: int) -> CoefficientTable:
    """tau(a, b; n) on [1, N] by counting pairs k^a l^b <= N."""
    if not 1 <= a <= b:
        raise ValueError("tau_ab needs 1 <= a <= b")
    values = [0] * (N + 1)
    l = 1
    while l**b <= N:
        lb = l**b
        k = 1
        while k**a * lb <= N:
            values[k**a * lb] += 1
            k += 1
        l += 1
    return CoefficientTable(N, values)
