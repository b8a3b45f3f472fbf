"""Empirical probes of the asymptotic results: residuals, slopes, champions, distributions."""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from . import constants, sieve
from .constants import HighPrecision, mp

RESIDUAL_KINDS = ("tau_r", "tau_0", "sigma_r", "T_ab")
WINDOWS_PER_DECADE = 8
BUDGET_FRACTION = 0.01
JUMP_BIN = 1e-6


def _plan(kind: str, params):
    """(sieve spec, main-term kind, main-term params) for a residual kind."""
    if kind == "tau_r":
        r = int(params)
        if r < 1:
            raise ValueError("tau_r residuals need r >= 1; use tau_0 for r = 0")
        return sieve.SummatorySpec("tau_r", r=r), "tau_r", r
    if kind == "tau_0":
        return sieve.SummatorySpec("tau_r", r=0), "tau_0_gioia", None
    if kind == "sigma_r":
        r = int(params)
        return sieve.SummatorySpec("sigma_r", r=r), "sigma_r", r
    if kind == "T_ab":
        a, b = (int(v) for v in params)
        return sieve.SummatorySpec("tau_ab", a=a, b=b), "T_ab", (a, b)
    raise ValueError(f"unknown residual kind {kind!r}; expected one of {RESIDUAL_KINDS}")


@dataclass
class ResidualRow:
    x: int
    exact_sum: int
    main: HighPrecision
    residual: float
    budget_ok: bool


@dataclass
class EnvelopeWindow:
    """Largest |residual| (and |residual| / scale) over every integer in [lo, hi)."""

    lo: int
    hi: int
    x_at_max: int
    max_abs: float
    x_at_max_scaled: int = 0
    max_scaled: float = math.nan


@dataclass
class ResidualSeries:
    kind: str
    params: object
    rows: list[ResidualRow]
    envelope: list[EnvelopeWindow] = field(default_factory=list)
    sign_changes: int | None = None
    limit: int = 0

    @classmethod
    def from_samples(cls, xs, residuals, kind="synthetic") -> "ResidualSeries":
        rows = [ResidualRow(int(x), 0, HighPrecision.of(0), float(v), True) for x, v in zip(xs, residuals)]
        return cls(kind, None, rows)

    @property
    def flagged(self) -> list[ResidualRow]:
        return [row for row in self.rows if not row.budget_ok]

    def to_csv(self) -> str:
        lines = ["x,sum,main,residual,budget_ok"]
        for row in self.rows:
            lines.append(
                f"{row.x},{row.exact_sum},{mp.nstr(row.main.value, 20, min_fixed=-1, max_fixed=40)},"
                f"{row.residual!r},{str(row.budget_ok).lower()}"
            )
        return "\n".join(lines) + "\n"


def window_edges(limit: int, per_decade: int = WINDOWS_PER_DECADE) -> list[int]:
    """Integer window edges 10^(j/per_decade), starting at 1 and covering limit."""
    edges = [1]
    j = 1
    while edges[-1] <= limit:
        e = math.ceil(10 ** (j / per_decade) - 1e-9)
        if e > edges[-1]:
            edges.append(e)
        j += 1
    return edges


class _Envelope:
    """Segment observer that keeps per-window maxima and counts sign changes."""

    def __init__(self, main_fn, limit: int, scale=None):
        self.main_fn = main_fn
        self.scale = scale
        self.edges = window_edges(limit)
        self.best = {}
        self.sign_changes = 0
        self.last_sign = 0

    def __call__(self, lo, hi, prefix, offset):
        x = np.arange(lo, hi, dtype=np.float64)
        res = (prefix.astype(np.float64) + float(offset)) - self.main_fn(x)
        signs = np.sign(res)
        nz = signs[signs != 0]
        if nz.size:
            flips = int(np.count_nonzero(nz[1:] != nz[:-1]))
            if self.last_sign and nz[0] != self.last_sign:
                flips += 1
            self.sign_changes += flips
            self.last_sign = nz[-1]
        absres = np.abs(res)
        scaled = None
        if self.scale is not None:
            sc = self.scale(x)
            scaled = np.divide(absres, sc, out=np.zeros_like(absres), where=sc > 0)
        w = bisect_left(self.edges, lo + 1) - 1
        start = lo
        while start < hi:
            stop = min(hi, self.edges[w + 1])
            a, b = start - lo, stop - lo
            i = int(np.argmax(absres[a:b]))
            cand = (float(absres[a + i]), start + i)
            entry = self.best.setdefault(w, [(-1.0, 0), (-1.0, 0)])
            if cand[0] > entry[0][0]:
                entry[0] = cand
            if scaled is not None:
                j = int(np.argmax(scaled[a:b]))
                c2 = (float(scaled[a + j]), start + j)
                if c2[0] > entry[1][0]:
                    entry[1] = c2
            start = stop
            w += 1

    def windows(self) -> list[EnvelopeWindow]:
        out = []
        for w in sorted(self.best):
            (m, xm), (ms, xs) = self.best[w]
            out.append(EnvelopeWindow(self.edges[w], self.edges[w + 1], xm, m, xs, ms if ms >= 0 else math.nan))
        return out


def residual_series(
    kind: str,
    params,
    limit: int,
    grid=None,
    *,
    tol: float = 1e-12,
    dense: bool = True,
    scale=None,
    segment_size: int = sieve.DEFAULT_SEGMENT,
    workers: int = 1,
) -> ResidualSeries:
    """Exact sums joined with main terms at every checkpoint.

    With ``dense`` the whole range is also swept in float64 to record the
    per-window envelope of |sum - main| and the number of sign changes.
    ``scale(x)``, when given, adds the envelope of |sum - main| / scale(x).
    """
    spec, main_kind, main_params = _plan(kind, params)
    observer = None
    if dense:
        observer = _Envelope(constants.main_term_vectorized(main_kind, main_params, tol), limit, scale)
    series = sieve.summatory(
        spec, limit, grid, segment_size=segment_size, workers=workers, observer=observer
    )
    rows = []
    for x, s in series.rows:
        main = constants.main_term(main_kind, main_params, x, tol)
        res = mp.mpf(s) - main.value
        rows.append(ResidualRow(x, s, main, float(res), bool(main.err < BUDGET_FRACTION * abs(res))))
    out = ResidualSeries(kind, params, rows, limit=limit)
    if observer is not None:
        out.envelope = observer.windows()
        out.sign_changes = observer.sign_changes
    return out


@dataclass
class SlopeFit:
    windows: list[tuple[int, int, int, float]]  # (decade lo, decade hi, x at max, max)
    slope: float
    intercept: float
    fit_rms: float


def decade_maxima(series: ResidualSeries, x_min=None, x_max=None, scaled: bool = False):
    """Per-decade maxima over complete decades inside [x_min, x_max].

    Uses the dense envelope when the series has one, the checkpoint rows
    otherwise.
    """
    if series.envelope:
        pts = [
            (w.x_at_max_scaled, w.max_scaled) if scaled else (w.x_at_max, w.max_abs)
            for w in series.envelope
        ]
        top = series.limit or series.envelope[-1].hi - 1
    else:
        if scaled:
            raise ValueError("scaled maxima need a dense envelope")
        pts = [(row.x, abs(row.residual)) for row in series.rows]
        top = max(x for x, _ in pts)
    lo_x = x_min if x_min is not None else min(x for x, _ in pts)
    hi_x = x_max if x_max is not None else top
    j = math.ceil(math.log10(lo_x) - 1e-12)
    out = []
    while 10 ** (j + 1) <= hi_x:
        inside = [(x, v) for x, v in pts if 10**j <= x < 10 ** (j + 1)]
        if inside:
            x, v = max(inside, key=lambda t: t[1])
            out.append((10**j, 10 ** (j + 1), x, v))
        j += 1
    return out


def fit_slope(series: ResidualSeries, x_min=None, x_max=None, min_decades: int = 4) -> SlopeFit:
    """Least-squares slope of log(per-decade max |residual|) against log x."""
    wins = decade_maxima(series, x_min, x_max)
    wins = [w for w in wins if w[3] > 0]
    if len(wins) < min_decades:
        raise ValueError(f"need at least {min_decades} decades of data, got {len(wins)}")
    lx = np.log([w[2] for w in wins])
    ly = np.log([w[3] for w in wins])
    slope, intercept = np.polyfit(lx, ly, 1)
    rms = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return SlopeFit(wins, float(slope), float(intercept), rms)


def champion_value(kind: str, r: int, agg: sieve.PrimeAggregates) -> float:
    """Limsup ratio at n = (product of primes <= y)^(r+1), from prime aggregates."""
    log_n = (r + 1) * agg.theta
    if kind == "tau_limsup":
        return agg.pi * math.log(2) * math.log(log_n) / log_n
    if kind == "sigma_limsup":
        return math.exp(agg.log_one_plus) / math.log(log_n)
    raise ValueError(f"unknown probe {kind!r}")


def champion_limit(kind: str, r: int) -> float:
    if kind == "tau_limsup":
        return math.log(2) / (r + 1)
    return 6 * math.exp(float(constants.EULER_GAMMA)) / math.pi**2


def champion_probe(kind: str, r: int, y: int) -> float:
    """Value of the limsup quotient along the primorial champion for y."""
    if y < 2:
        raise ValueError("champion probes need y >= 2")
    return champion_value(kind, r, sieve.prime_aggregates(y))


def champion_probes(kind: str, r: int, ys) -> list[tuple[int, float, float]]:
    """(y, value, limit) rows for several y from one prime sweep."""
    if min(ys) < 2:
        raise ValueError("champion probes need y >= 2")
    lim = champion_limit(kind, r)
    return [(a.y, champion_value(kind, r, a), lim) for a in sieve.prime_aggregates_at(ys)]


class _LogRatio:
    """Additive f(n) = log(sigma_r(n^q) / n^q), by prime power."""

    dtype = np.float64
    additive = True

    def __init__(self, q: int, r: int):
        self.q, self.r = q, r

    def local(self, p, emax):
        return np.array(
            [0.0] + [math.log1p(float(p) ** (self.r - a * self.q)) if a * self.q > self.r else 0.0
                     for a in range(1, emax + 1)]
        )

    def at_primes(self, qs):
        if self.q > self.r:
            return np.log1p(qs.astype(np.float64) ** (self.r - self.q))
        return np.zeros(qs.shape)


class _AtomIndicator:
    """1 exactly when every exponent a of n has a*q <= r, i.e. f(n) = 0."""

    dtype = np.int64
    additive = False

    def __init__(self, q: int, r: int):
        self.q, self.r = q, r

    def local(self, p, emax):
        return np.array([1] + [1 if a * self.q <= self.r else 0 for a in range(1, emax + 1)], dtype=np.int64)

    def at_primes(self, qs):
        return np.full(qs.shape, 1 if self.q <= self.r else 0, dtype=np.int64)


@dataclass
class EmpiricalCDF:
    q: int
    r: int
    N: int
    values: np.ndarray = field(repr=False)  # sorted f(n) = log(sigma_r(n^q) / n^q)
    atom_count: int
    max_jump: float

    @property
    def atom_at_zero(self) -> float:
        return self.atom_count / self.N

    def __call__(self, lam):
        """S_N(q, r; lam): share of n <= N with sigma_r(n^q) <= lam n^q."""
        lam = np.asarray(lam, dtype=np.float64)
        with np.errstate(divide="ignore"):
            t = np.where(lam > 0, np.log(np.where(lam > 0, lam, 1.0)), -np.inf)
        return np.searchsorted(self.values, t, side="right") / self.N

    def grid(self, points: int = 201):
        top = math.exp(float(self.values[-1]))
        lams = np.linspace(1.0, top * 1.01, points)
        return lams, self(lams)

    def to_csv(self, points: int = 201) -> str:
        lams, S = self.grid(points)
        return "lambda,S\n" + "".join(f"{a!r},{b!r}\n" for a, b in zip(lams.tolist(), S.tolist()))


def distribution_cdf(q: int, r: int, N: int, *, segment_size: int = sieve.DEFAULT_SEGMENT, workers: int = 1) -> EmpiricalCDF:
    """Empirical distribution of sigma_r(n^q) / n^q over n <= N."""
    if q < 1 or r < 0:
        raise ValueError("need q >= 1 and r >= 0")
    if not 1 <= N <= 10**7:
        raise ValueError("N must lie in [1, 10^7]")
    f = np.zeros(N, dtype=np.float64)
    atoms = 0
    kinds = [_LogRatio(q, r), _AtomIndicator(q, r)]
    for lo, hi, (fv, av) in sieve.iter_segments(N, kinds, segment_size, workers):
        f[lo - 1 : hi - 1] = fv
        atoms += int(av.sum())
    bins = np.floor(f / JUMP_BIN).astype(np.int64)
    max_jump = int(np.bincount(bins).max()) / N
    f.sort()
    return EmpiricalCDF(q, r, N, f, atoms, max_jump)


def petermann_sum(r: int, x: int) -> int:
    """Exact sum of m n^r over m n^(r+1) <= x."""
    total = 0
    n = 1
    while n ** (r + 1) <= x:
        y = x // n ** (r + 1)
        total += n**r * (y * (y + 1) // 2)
        n += 1
    return total


def petermann_check(r: int, x: int):
    """(exact sum, zeta(r+2) x^2 / 2, residual) for the weighted lattice count."""
    if r < 1 or x < 1:
        raise ValueError("need r >= 1 and x >= 1")
    if x > 10**7:
        raise ValueError("x must be <= 10^7")
    brute = petermann_sum(r, x)
    main = constants.zeta_real(r + 2) * HighPrecision.of(x) * HighPrecision.of(x) / 2
    return brute, main, float(mp.mpf(brute) - main.value)


def petermann_scan(r: int, xs) -> list[tuple[int, int, float, float, float]]:
    """Rows (x, sum, main, residual, residual / (x log^(2/3) x))."""
    out = []
    for x in xs:
        brute, main, res = petermann_check(r, int(x))
        out.append((int(x), brute, float(main), res, res / (x * math.log(x) ** (2 / 3))))
    return out
