"""The twelve exit checks, runnable at full scale or at reduced CI scale.

Each check returns a :class:`CheckResult`; nothing here raises on a failed
check, so a report always covers every criterion.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import arith, constants, exppairs, lab, series, sieve
from .constants import mp


@dataclass
class Scale:
    name: str
    error_limit: int  # sums for the error-term checks run to this x
    slope_from: int
    champion_ys: tuple[int, ...]
    cdf_n: int


FULL = Scale("full", 10**8, 10**4, (10**5, 10**6, 10**7, 10**8), 10**7)
CI = Scale("ci", 10**7, 10**3, (10**4, 10**5, 10**6, 10**7), 10**7)

# Sixteen points per decade over [10^3, 10^7].
PETERMANN_GRID = [round(10 ** (3 + j / 16)) for j in range(65)]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number, name, budget=None):
    def wrap(fn):
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            passed, detail = fn(*args, **kwargs)
            dt = time.perf_counter() - t0
            if budget is not None and dt >= budget:
                passed = False
                detail += f"; over the {budget:g}s budget"
            return CheckResult(number, name, bool(passed), detail, dt)

        run.number = number
        return run

    return wrap


@_timed(1, "F_r series identity", budget=10)
def check_series_identity(N=10**5, orders=range(5)):
    bad = []
    for r in orders:
        table = series.zeta_quotient_coeffs(series.ZetaQuotientSpec.tau_r(r), N)
        direct = sieve.batch_values(sieve.SummatorySpec("tau_r", r=r), N)
        if table.as_list() != direct[1:].tolist():
            bad.append(r)
    return not bad, f"zeta(s)zeta((r+1)s)/zeta((2r+2)s) == tau_r on [1,{N}] for r in {list(orders)}" + (
        f"; mismatch at r={bad}" if bad else ""
    )


@_timed(2, "G_r decomposition", budget=10)
def check_sigma_decomposition(N=10**4, orders=range(4)):
    bad = []
    for r in orders:
        target = [arith.sigma_r(n, r) for n in range(1, N + 1)]
        h = series.h_table(r, N)
        z_direct = series.z_coeffs(r, N)
        z_quot = series.zeta_quotient_coeffs(series.ZetaQuotientSpec.z_part(r), N)
        for label, z in (("triple-sum", z_direct), ("zeta-quotient", z_quot)):
            if arith.dirichlet_convolve(z, h).as_list() != target:
                bad.append((r, label))
    return not bad, f"z*h == sigma_r on [1,{N}], r in {list(orders)}, both z routes" + (
        f"; mismatch {bad}" if bad else ""
    )


@_timed(3, "convolution identity", budget=10)
def check_convolution_identity(N=10**5, orders=range(5)):
    bad = []
    for r in orders:
        conv = arith.dirichlet_convolve(series.tau_ab_table(1, r + 1, N), series.mu_k_table(2 * r + 2, N))
        direct = sieve.batch_values(sieve.SummatorySpec("tau_r", r=r), N)
        if conv.as_list() != direct[1:].tolist():
            bad.append(r)
    return not bad, f"tau(1,r+1;.)*mu_(2r+2) == tau_r on [1,{N}], r <= {max(orders)}" + (
        f"; mismatch at r={bad}" if bad else ""
    )


@_timed(4, "constants")
def check_constants():
    rel = lambda a, b: abs(a - b) / abs(b)
    z2 = rel(constants.zeta_real(2).value, mp.pi**2 / 6)
    z4 = rel(constants.zeta_real(4).value, mp.pi**4 / 90)
    zh = rel(constants.zeta_real(Fraction(1, 2)).value, mp.zeta(mp.mpf(1) / 2))
    h0 = constants.euler_product_H(0)
    d0 = constants.coefficients("sigma_r", 0)["D"].value
    dref = constants.coefficients("sigma_0")["D"].value
    dd = rel(d0, dref)
    ok = z2 <= 1e-12 and z4 <= 1e-12 and zh <= 1e-10 and h0.value == 1 and h0.err == 0 and dd <= 1e-12
    return ok, (
        f"rel err zeta(2)={float(z2):.1e}, zeta(4)={float(z4):.1e}, zeta(1/2)={float(zh):.1e}; "
        f"H_0(2)={h0.value}; D(0) vs pi^2/(12 zeta(3)) rel {float(dd):.1e} (D={mp.nstr(dref, 12)})"
    )


@_timed(5, "conditional exponent")
def check_conditional_exponent():
    alpha, _ = constants.conditional_exponents(2, Fraction(1057, 4785))
    return alpha == Fraction(3728, 15469), f"alpha(2, 1057/4785) = {alpha}"


def _random_region_pair(rng: random.Random) -> exppairs.ExponentPair:
    k = Fraction(rng.randint(0, 10**6), 2 * 10**6)
    l = Fraction(10**6 + rng.randint(0, 10**6), 2 * 10**6)
    return exppairs.ExponentPair(k, l)


@_timed(6, "exponent pairs", budget=1)
def check_exponent_pairs(samples=1000, seed=2012):
    ah = exppairs.evaluate_word("AH")
    ok_ah = (ah.k, ah.l, ah.eps) == (Fraction(16, 237), Fraction(743, 948), True)
    rng = random.Random(seed)
    pairs = [_random_region_pair(rng) for _ in range(samples)]
    ok_bb = all(p.B().B() == p for p in pairs)
    words = constants.table_words()
    bad = [b for b, w in words.items() if not exppairs.validate_pair(exppairs.evaluate_word(w))]
    return ok_ah and ok_bb and not bad, (
        f"AH -> {ah}; BB = id on {samples} pairs: {ok_bb}; "
        f"{len(words) - len(bad)}/{len(words)} table words valid"
    )


def _slope_check(kind, params, scale: Scale, lo, hi):
    s = lab.residual_series(kind, params, scale.error_limit, segment_size=1 << 22)
    fit = lab.fit_slope(s, scale.slope_from, scale.error_limit)
    ok = lo <= fit.slope <= hi
    return ok, (
        f"per-decade-max slope over [{scale.slope_from:.0e},{scale.error_limit:.0e}] = {fit.slope:.4f} "
        f"in [{lo}, {hi}]; budget-flagged rows {len(s.flagged)}"
    )


@_timed(7, "error slope, sum tau^(1)")
def check_tau1_slope(scale: Scale = FULL):
    return _slope_check("tau_r", 1, scale, 0.10, 0.35)


def x_log53(x):
    """x log^(5/3) x, the normalizer of the sigma^(1) residual."""
    return x * np.log(x) ** (5 / 3)


def scaled_spread(series, x_min, x_max):
    """Per-decade maxima of the scaled residual and their max/median ratio."""
    maxima = [w[3] for w in lab.decade_maxima(series, x_min, x_max, scaled=True)]
    return maxima, max(maxima) / statistics.median(maxima)


@_timed(8, "error bound, sum sigma^(1)")
def check_sigma1_bound(scale: Scale = FULL):
    s = lab.residual_series("sigma_r", 1, scale.error_limit, tol=1e-10, scale=x_log53, segment_size=1 << 22)
    maxima, ratio = scaled_spread(s, 10**3, scale.error_limit)
    ok = ratio < 20 and not s.flagged
    return ok, (
        f"|S - Dx^2|/(x log^(5/3) x) per-decade maxima {[round(m, 4) for m in maxima]}, "
        f"max/median = {ratio:.2f} < 20; sign changes {s.sign_changes} (reported); flagged rows {len(s.flagged)}"
    )


@_timed(9, "error slope, sum tau^(0) vs Gioia")
def check_tau0_slope(scale: Scale = FULL):
    return _slope_check("tau_0", None, scale, 0.15, 0.50)


@_timed(10, "champion probes")
def check_champions(scale: Scale = FULL):
    tau = lab.champion_probes("tau_limsup", 1, scale.champion_ys)
    sig = lab.champion_probes("sigma_limsup", 1, scale.champion_ys[-1:])
    tvals = [v for _, v, _ in tau]
    t_last, t_lim = tau[-1][1], tau[-1][2]
    s_val, s_lim = sig[0][1], sig[0][2]
    decreasing = all(a > b for a, b in zip(tvals, tvals[1:]))
    t_ok = abs(t_last - t_lim) <= 0.15 * t_lim
    s_ok = abs(s_val - s_lim) <= 0.10 * s_lim
    y = scale.champion_ys[-1]
    return decreasing and t_ok and s_ok, (
        f"tau_limsup(y={y:.0e}) = {t_last:.4f} vs log2/2 = {t_lim:.4f} ({(t_last / t_lim - 1):+.1%}), "
        f"decreasing {decreasing} over {[round(v, 4) for v in tvals]}; "
        f"sigma_limsup = {s_val:.4f} vs 6e^gamma/pi^2 = {s_lim:.4f} ({(s_val / s_lim - 1):+.1%})"
    )


@_timed(11, "distribution dichotomy")
def check_distribution(scale: Scale = FULL):
    N = scale.cdf_n
    atom = lab.distribution_cdf(1, 1, N).atom_at_zero
    jump = lab.distribution_cdf(2, 1, N).max_jump
    target = 1 / float(constants.zeta_real(2))
    ok = abs(atom - target) <= 0.01 and jump <= 0.1
    return ok, f"N={N:.0e}: atom(q=1,r=1) = {atom:.4f} vs 1/zeta(2) = {target:.4f}; max_jump(q=2,r=1) = {jump:.4f} <= 0.1"


@_timed(12, "lemma-level oracles", budget=60)
def check_lemmas(mertens_limit=10**6, tau_limit=10**6):
    # Petermann: |residual| / (x log^(2/3) x) shows no growth over [1e3, 1e7].
    rows = lab.petermann_scan(1, PETERMANN_GRID)
    per_decade = []
    for d in range(3, 7):
        vals = [abs(r[4]) for r in rows if 10**d <= r[0] < 10 ** (d + 1)]
        per_decade.append(max(vals))
    pet_ratio = max(per_decade) / statistics.median(per_decade)
    pet_ok = pet_ratio < 20

    mert_ok = True
    for k in range(1, 5):
        brute = np.cumsum(sieve.batch_values(sieve.SummatorySpec("mu_k", k=k), mertens_limit))
        if not np.array_equal(sieve.mertens_table(k, mertens_limit), brute):
            mert_ok = False

    tau_ok = True
    n = np.arange(tau_limit + 1, dtype=np.int64)
    for r in range(4):
        t = sieve.batch_values(sieve.SummatorySpec("tau_r", r=r), tau_limit)
        if np.any(t[1:] ** (r + 1) > n[1:]):
            tau_ok = False
    ok = pet_ok and mert_ok and tau_ok
    return ok, (
        f"Petermann max/median of per-decade |res|/(x log^(2/3) x) = {pet_ratio:.2f} < 20 "
        f"(max {max(per_decade):.3f}); M_k == brute on [1,{mertens_limit:.0e}], k<=4: {mert_ok}; "
        f"tau_r(n)^(r+1) <= n on [1,{tau_limit:.0e}], r<=3: {tau_ok}"
    )


ALL_CHECKS = (
    check_series_identity,
    check_sigma_decomposition,
    check_convolution_identity,
    check_constants,
    check_conditional_exponent,
    check_exponent_pairs,
    check_tau1_slope,
    check_sigma1_bound,
    check_tau0_slope,
    check_champions,
    check_distribution,
    check_lemmas,
)

SCALED = {check_tau1_slope, check_sigma1_bound, check_tau0_slope, check_champions, check_distribution}


def run_all(scale: Scale = FULL, report=print) -> list[CheckResult]:
    results = []
    for check in ALL_CHECKS:
        res = check(scale) if check in SCALED else check()
        if report is not None:
            report(res.line())
        results.append(res)
    return results
