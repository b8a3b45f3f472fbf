"""Segmented sieve evaluation of multiplicative functions and their sums.

One pass over a segment extracts the exponent of every prime p <= sqrt(hi)
for all of its multiples at once (strided numpy views), so a single sweep
serves every kind of summand.  Whatever is left after dividing out those
primes is 1 or a single prime to the first power.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

import numpy as np

from . import arith

DEFAULT_SEGMENT = 1 << 20
DEFAULT_MAX_LIMIT = 10**9
DEFAULT_RATIO = 10 ** (1 / 8)
DEFAULT_START = 10**3

KINDS = ("tau_r", "sigma_r", "tau_ab", "mu_k")


@dataclass(frozen=True)
class SummatorySpec:
    """Which multiplicative summand to sieve, with its parameters."""

    kind: str
    r: int = 0
    a: int = 1
    b: int = 1
    k: int = 1

    dtype = np.int64
    additive = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.r < 0:
            raise ValueError("r must be >= 0")
        if self.kind == "tau_ab" and not 1 <= self.a <= self.b:
            raise ValueError("tau_ab needs 1 <= a <= b")
        if self.k < 1:
            raise ValueError("mu_k needs k >= 1")

    @property
    def label(self) -> str:
        if self.kind in ("tau_r", "sigma_r"):
            return f"{self.kind}(r={self.r})"
        if self.kind == "tau_ab":
            return f"tau_ab(a={self.a},b={self.b})"
        return f"mu_k(k={self.k})"

    def single(self, n: int) -> int:
        """Scalar value through the exact factorization route."""
        if self.kind == "tau_r":
            return arith.tau_r(n, self.r)
        if self.kind == "sigma_r":
            return arith.sigma_r(n, self.r)
        if self.kind == "tau_ab":
            return arith.tau_ab(self.a, self.b, n)
        return arith.mu_k(n, self.k)

    def local(self, p: int, emax: int) -> np.ndarray:
        """f(p^e) for e = 0..emax."""
        e = range(emax + 1)
        if self.kind == "tau_r":
            vals = [2 if j > self.r else 1 for j in e]
        elif self.kind == "sigma_r":
            vals = [p**j + p**self.r if j > self.r else p**j for j in e]
        elif self.kind == "tau_ab":
            vals = [arith.tau_ab_local(self.a, self.b, j) for j in e]
        else:
            vals = [1] + [(-1 if j == self.k else 0) for j in e[1:]]
        return np.array(vals, dtype=np.int64)

    def at_primes(self, q: np.ndarray) -> np.ndarray:
        """f(q) for an array of primes q (exponent one)."""
        if self.kind == "tau_r":
            return np.full(q.shape, 1 if self.r >= 1 else 2, dtype=np.int64)
        if self.kind == "sigma_r":
            return q if self.r >= 1 else q + 1
        if self.kind == "tau_ab":
            return np.full(q.shape, (self.a == 1) + (self.b == 1), dtype=np.int64)
        return np.full(q.shape, -1 if self.k == 1 else 0, dtype=np.int64)


@lru_cache(maxsize=8)
def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (unsegmented; limit is small)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def segment_values(lo: int, hi: int, kinds, primes: np.ndarray | None = None) -> list[np.ndarray]:
    """Values of every kind on n in [lo, hi), in order.

    ``kinds`` follow the SummatorySpec protocol: ``local``, ``at_primes``,
    ``dtype`` and ``additive``.  Additive kinds are accumulated with Kahan
    compensation.
    """
    if lo < 1 or hi <= lo:
        raise ValueError("segment must satisfy 1 <= lo < hi")
    if primes is None:
        primes = base_primes(isqrt(hi - 1))
    L = hi - lo
    top = hi - 1
    smooth = np.ones(L, dtype=np.int64)
    vals = []
    comps = []
    for kind in kinds:
        if kind.additive:
            vals.append(np.zeros(L, dtype=kind.dtype))
            comps.append(np.zeros(L, dtype=kind.dtype))
        else:
            vals.append(np.ones(L, dtype=kind.dtype))
            comps.append(None)
    for p in primes.tolist():
        if p * p > top:
            break
        s = (-lo) % p
        if s >= L:
            continue
        cnt = (L - 1 - s) // p + 1
        e = np.ones(cnt, dtype=np.intp)
        emax = 1
        pk = p * p
        while pk <= top:
            sk = (-lo) % pk
            if sk < L:
                e[(sk - s) // p :: pk // p] += 1
                emax += 1
            pk *= p
        powers = p ** np.arange(emax + 1, dtype=np.int64)
        smooth[s::p] *= powers[e]
        for kind, v, c in zip(kinds, vals, comps):
            term = kind.local(p, emax)[e]
            if c is None:
                v[s::p] *= term
            else:
                vs = v[s::p]
                y = term - c[s::p]
                t = vs + y
                c[s::p] = (t - vs) - y
                v[s::p] = t
    cof = np.arange(lo, hi, dtype=np.int64) // smooth
    big = cof > 1
    if big.any():
        q = cof[big]
        for kind, v, c in zip(kinds, vals, comps):
            if c is None:
                v[big] *= kind.at_primes(q)
            else:
                v[big] = (v[big] + (kind.at_primes(q) - c[big]))
    return vals


def _segments(start: int, limit: int, size: int):
    lo = start
    while lo <= limit:
        hi = min(lo + size, limit + 1)
        yield lo, hi
        lo = hi


def iter_segments(limit: int, kinds, segment_size: int = DEFAULT_SEGMENT, workers: int = 1, start: int = 1):
    """Yield (lo, hi, values) for consecutive segments covering [start, limit].

    With ``workers > 1`` segments are computed on a thread pool but always
    yielded in order, so consumers see the same stream regardless.
    """
    if segment_size < 1:
        raise ValueError("segment_size must be positive")
    primes = base_primes(isqrt(limit))
    bounds = _segments(start, limit, segment_size)
    if workers <= 1:
        for lo, hi in bounds:
            yield lo, hi, segment_values(lo, hi, kinds, primes)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: deque = deque()
        for lo, hi in bounds:
            pending.append((lo, hi, pool.submit(segment_values, lo, hi, kinds, primes)))
            if len(pending) >= 2 * workers:
                a, b, fut = pending.popleft()
                yield a, b, fut.result()
        while pending:
            a, b, fut = pending.popleft()
            yield a, b, fut.result()


def batch_values(spec, limit: int, segment_size: int = DEFAULT_SEGMENT, workers: int = 1) -> np.ndarray:
    """Array v with v[n] = f(n) for 1 <= n <= limit (v[0] is 0)."""
    out = np.zeros(limit + 1, dtype=spec.dtype)
    for lo, hi, (v,) in iter_segments(limit, [spec], segment_size, workers):
        out[lo:hi] = v
    return out


def geometric_grid(limit: int, ratio: float = DEFAULT_RATIO, start: int = DEFAULT_START) -> list[int]:
    """Integer checkpoints start * ratio^j up to limit, limit always included."""
    if ratio <= 1:
        raise ValueError("grid ratio must exceed 1")
    if start >= limit:
        return [limit]
    xs = []
    log_start, log_ratio = math.log10(start), math.log10(ratio)
    j = 0
    while True:
        x = round(10 ** (log_start + j * log_ratio))
        if x > limit:
            break
        if not xs or x > xs[-1]:
            xs.append(x)
        j += 1
    if xs[-1] != limit:
        xs.append(limit)
    return xs


@dataclass
class CheckpointSeries:
    """Exact partial sums at increasing checkpoints."""

    label: str
    rows: list[tuple[int, int]]
    grid: dict = field(default_factory=dict)

    @property
    def xs(self) -> list[int]:
        return [x for x, _ in self.rows]

    @property
    def sums(self) -> list[int]:
        return [s for _, s in self.rows]

    def to_csv(self) -> str:
        return "x,sum\n" + "".join(f"{x},{s}\n" for x, s in self.rows)


def _check_grid(checkpoints, limit: int) -> list[int]:
    xs = sorted(set(int(x) for x in checkpoints))
    if not xs:
        raise ValueError("empty checkpoint grid")
    if xs[0] < 1 or xs[-1] > limit:
        raise ValueError(f"checkpoints must lie in [1, {limit}]")
    return xs


def summatory(
    spec: SummatorySpec,
    limit: int,
    checkpoints=None,
    *,
    segment_size: int = DEFAULT_SEGMENT,
    workers: int = 1,
    max_limit: int = DEFAULT_MAX_LIMIT,
    observer=None,
) -> CheckpointSeries:
    """Exact sum of f(n) for n <= x at every checkpoint x.

    ``observer(lo, hi, prefix, offset)``, if given, sees every segment in
    order; ``prefix`` holds the in-segment cumulative sums (int64) and the
    running total before the segment is ``offset``, so the exact sum at
    n = lo + i is ``offset + prefix[i]``.
    """
    if not 1 <= limit <= max_limit:
        raise ValueError(f"limit must lie in [1, {max_limit}]")
    if checkpoints is None:
        checkpoints = geometric_grid(limit)
        grid = {"ratio": DEFAULT_RATIO, "start": checkpoints[0], "end": limit}
    else:
        grid = {"explicit": True}
    xs = _check_grid(checkpoints, limit)
    end = xs[-1] if observer is None else limit
    rows = []
    total = 0
    ci = 0
    for lo, hi, (v,) in iter_segments(end, [spec], segment_size, workers):
        vmax = int(np.abs(v).max())
        if vmax * len(v) >= 1 << 62:
            raise OverflowError("segment sum would overflow int64; use a smaller segment")
        prefix = np.cumsum(v)
        if observer is not None:
            observer(lo, hi, prefix, total)
        while ci < len(xs) and xs[ci] < hi:
            rows.append((xs[ci], total + int(prefix[xs[ci] - lo])))
            ci += 1
        total = arith.check_int128(total + int(prefix[-1]), "summatory total")
    return CheckpointSeries(spec.label, rows, grid)


def iroot_array(x: np.ndarray, k: int) -> np.ndarray:
    """Exact elementwise floor(x ** (1/k)) for int64 x >= 0 (x <= 2^62)."""
    x = np.asarray(x, dtype=np.int64)
    if k == 1:
        return x.copy()
    r = np.floor(x.astype(np.float64) ** (1.0 / k)).astype(np.int64)
    while True:
        up = (r + 1) ** k <= x
        if not up.any():
            break
        r += up
    while True:
        down = r**k > x
        if not down.any():
            break
        r -= down
    return r


def mobius_prefix(limit: int) -> np.ndarray:
    """M[m] = sum of mu(n) for n <= m, m = 0..limit, from the sieved Moebius function."""
    mu = batch_values(SummatorySpec("mu_k", k=1), max(limit, 1))
    m = np.cumsum(mu)
    return m[: limit + 1]


def mertens_k(k: int, x: int) -> int:
    """M_k(x), the partial sum of mu_k up to x, as M_1 at floor(x^(1/k))."""
    if k < 1 or x < 1:
        raise ValueError("mertens_k needs k >= 1 and x >= 1")
    m = arith.iroot(x, k)
    return int(mobius_prefix(m)[m])


def mertens_table(k: int, limit: int) -> np.ndarray:
    """M_k(x) for every x = 0..limit."""
    m1 = mobius_prefix(arith.iroot(limit, k))
    roots = iroot_array(np.arange(limit + 1, dtype=np.int64), k)
    return m1[roots]


@dataclass
class PrimeAggregates:
    y: int
    pi: int
    theta: float
    log_one_plus: float


def iter_prime_segments(y: int, segment_size: int = 1 << 22):
    """Yield (lo, hi, primes in [lo, hi)) covering [2, y], in order."""
    base = base_primes(isqrt(y))
    lo = 2
    while lo <= y:
        hi = min(lo + segment_size, y + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base.tolist():
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            seg[start - lo :: p] = False
        yield lo, hi, np.flatnonzero(seg).astype(np.int64) + lo
        lo = hi


def prime_aggregates_at(ys) -> list[PrimeAggregates]:
    """pi(y), theta(y) and sum of log(1 + 1/p) for several y in one sweep."""
    ys = sorted(int(y) for y in ys)
    if not ys or ys[0] < 1 or ys[-1] > DEFAULT_MAX_LIMIT:
        raise ValueError(f"y must lie in [1, {DEFAULT_MAX_LIMIT}]")
    out = []
    count, theta_parts, lop_parts = 0, [], []

    def take(part):
        nonlocal count
        f = part.astype(np.float64)
        count += len(part)
        theta_parts.append(math.fsum(np.log(f)))
        lop_parts.append(math.fsum(np.log1p(1.0 / f)))

    def record(y):
        out.append(PrimeAggregates(y, count, math.fsum(theta_parts), math.fsum(lop_parts)))

    yi = 0
    while yi < len(ys) and ys[yi] < 2:
        record(ys[yi])
        yi += 1
    for lo, hi, primes in iter_prime_segments(ys[-1]):
        cut = 0
        while yi < len(ys) and ys[yi] < hi:
            idx = int(np.searchsorted(primes, ys[yi], side="right"))
            take(primes[cut:idx])
            cut = idx
            record(ys[yi])
            yi += 1
        take(primes[cut:])
    return out


def prime_aggregates(y: int) -> PrimeAggregates:
    return prime_aggregates_at([y])[0]
