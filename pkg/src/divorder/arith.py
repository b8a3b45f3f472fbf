"""Exact single-argument arithmetic for divisors of order r.

Everything here works on plain Python integers and is deterministic.  The
batch (sieve) counterparts live in :mod:`divorder.sieve`; the functions below
double as their oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt, prod

import numpy as np

INT128_MAX = (1 << 127) - 1
N_MAX = 1 << 63
TRIAL_LIMIT = 10**6
DIVISOR_GUARD = 10**6

# Deterministic Miller-Rabin witnesses for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def check_int128(value: int, what: str = "value") -> int:
    if not -INT128_MAX - 1 <= value <= INT128_MAX:
        raise OverflowError(f"{what} exceeds the signed 128-bit range")
    return value


def _check_natural(n: int) -> None:
    if not 1 <= n < N_MAX:
        raise ValueError(f"argument must satisfy 1 <= n < 2^63, got {n}")


@lru_cache(maxsize=None)
def small_primes(limit: int = TRIAL_LIMIT) -> tuple[int, ...]:
    """Primes <= limit by a plain Eratosthenes sieve."""
    if limit < 2:
        return ()
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return tuple(int(p) for p in np.flatnonzero(sieve))


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for all n < 2^64)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Return a non-trivial factor of the odd composite n."""
    # Fixed seeds keep factorize() deterministic.
    for c in range(1, 200):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard rho failed on {n}")  # pragma: no cover


def _split(n: int, out: list[int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out.append(n)
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n as an increasing list of (prime, exponent).

    >>> factorize(12)
    [(2, 2), (3, 1)]
    >>> factorize(1)
    []
    """
    _check_natural(n)
    factors: list[tuple[int, int]] = []
    for p in small_primes():
        if p * p > n:
            break
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            factors.append((p, a))
    if n > 1:
        if n < TRIAL_LIMIT * TRIAL_LIMIT or is_prime(n):
            factors.append((n, 1))
        else:
            big: list[int] = []
            _split(n, big)
            for p in sorted(set(big)):
                factors.append((p, big.count(p)))
    return factors


def iroot(x: int, k: int) -> int:
    """Exact floor(x ** (1/k)) for integers x >= 0, k >= 1."""
    if x < 0 or k < 1:
        raise ValueError("iroot needs x >= 0 and k >= 1")
    if k == 1 or x < 2:
        return x
    if k == 2:
        return isqrt(x)
    r = int(round(x ** (1.0 / k)))
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def tau_r(n: int, r: int) -> int:
    """Number of divisors of order r of n."""
    if r < 0:
        raise ValueError("order r must be >= 0")
    return prod(2 if a > r else 1 for _, a in factorize(n))


def sigma_r(n: int, r: int) -> int:
    """Sum of the divisors of order r of n."""
    if r < 0:
        raise ValueError("order r must be >= 0")
    out = 1
    for p, a in factorize(n):
        out *= p**a + p**r if a > r else p**a
        check_int128(out, "sigma_r")
    return out


def tau_ab_local(a: int, b: int, e: int) -> int:
    """#{(i, j) >= 0 : a*i + b*j = e}, the value of tau(a, b; p^e)."""
    return sum(1 for j in range(e // b + 1) if (e - b * j) % a == 0)


def tau_ab(a: int, b: int, n: int) -> int:
    """Number of ordered pairs (k, l) with k^a * l^b = n."""
    if not 1 <= a <= b:
        raise ValueError("tau_ab needs 1 <= a <= b")
    return prod(tau_ab_local(a, b, e) for _, e in factorize(n))


def mu_k(n: int, k: int = 1) -> int:
    """mu_k(m^k) = mu(m); zero off the perfect k-th powers."""
    if k < 1:
        raise ValueError("mu_k needs k >= 1")
    fac = factorize(n)
    if any(e != k for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def divisors_of_order(n: int, r: int, guard: int = DIVISOR_GUARD) -> list[int]:
    """All d | n whose exponent at every p | n is r or the full exponent.

    1 counts as a divisor of every order of itself, and of nothing else.
    """
    if r < 0:
        raise ValueError("order r must be >= 0")
    fac = factorize(n)
    count = tau_r(n, r)
    if count > guard:
        raise ValueError(f"{count} divisors of order {r} exceed the guard {guard}")
    divs = [1]
    for p, a in fac:
        choices = {a} if r >= a else {r, a}
        divs = [d * p**b for d in divs for b in sorted(choices)]
    return sorted(divs)


@dataclass
class CoefficientTable:
    """Values f(1..N) of an arithmetic function; ``values[0]`` is unused."""

    limit: int
    values: list[int] = field(repr=False)

    def __post_init__(self):
        if len(self.values) != self.limit + 1:
            raise ValueError("a table on [1, N] needs N + 1 slots")

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise IndexError(n)
        return self.values[n]

    def __eq__(self, other):
        if not isinstance(other, CoefficientTable):
            return NotImplemented
        return self.limit == other.limit and self.values[1:] == other.values[1:]

    def as_list(self) -> list[int]:
        return list(self.values[1:])

    @classmethod
    def from_function(cls, f, limit: int) -> "CoefficientTable":
        return cls(limit, [0] + [f(n) for n in range(1, limit + 1)])

    @classmethod
    def from_sequence(cls, seq) -> "CoefficientTable":
        seq = [int(v) for v in seq]
        return cls(len(seq), [0] + seq)

    @classmethod
    def ones(cls, limit: int) -> "CoefficientTable":
        return cls(limit, [0] + [1] * limit)

    @classmethod
    def unit(cls, limit: int) -> "CoefficientTable":
        values = [0] * (limit + 1)
        if limit >= 1:
            values[1] = 1
        return cls(limit, values)

    def to_csv(self) -> str:
        lines = ["n,value"]
        lines += [f"{n},{v}" for n, v in enumerate(self.values[1:], start=1)]
        return "\n".join(lines) + "\n"


def dirichlet_convolve(f: CoefficientTable, g: CoefficientTable) -> CoefficientTable:
    """(f * g)(n) = sum over d | n of f(d) g(n/d), exactly, on [1, N]."""
    if f.limit != g.limit:
        raise ValueError("tables must share the same limit")
    N = f.limit
    fv = np.array(f.values, dtype=object)
    gv = np.array(g.values, dtype=object)
    bound = max(map(abs, f.values), default=0) * max(map(abs, g.values), default=0)
    check_int128(bound, "convolution term")
    h = np.zeros(N + 1, dtype=object)
    for d in range(1, N + 1):
        fd = fv[d]
        if fd:
            h[d::d] += fd * gv[1 : N // d + 1]
    out = [int(v) for v in h]
    for v in out:
        check_int128(v, "convolution sum")
    return CoefficientTable(N, out)
