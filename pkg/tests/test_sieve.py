import math
import random

import numpy as np
import pytest
import sympy

from divorder import arith, sieve
from divorder.sieve import SummatorySpec

ALL_SPECS = [
    SummatorySpec("tau_r", r=0),
    SummatorySpec("tau_r", r=1),
    SummatorySpec("tau_r", r=3),
    SummatorySpec("sigma_r", r=0),
    SummatorySpec("sigma_r", r=2),
    SummatorySpec("tau_ab", a=1, b=2),
    SummatorySpec("tau_ab", a=2, b=3),
    SummatorySpec("mu_k", k=1),
    SummatorySpec("mu_k", k=3),
]


def test_summatory_examples():
    assert sieve.summatory(SummatorySpec("tau_r", r=1), 10, [10]).rows == [(10, 13)]
    # unitary divisors of 1..4 sum to 1, 3, 4, 5
    assert sieve.summatory(SummatorySpec("sigma_r", r=0), 4, [4]).rows == [(4, 13)]
    assert sieve.summatory(SummatorySpec("tau_ab", a=1, b=2), 10, [10]).rows == [(10, 13)]


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label)
def test_batch_matches_single_evaluation(spec):
    v = sieve.batch_values(spec, 3000, segment_size=512)
    assert [int(x) for x in v[1:]] == [spec.single(n) for n in range(1, 3001)]


@pytest.mark.parametrize("spec", ALL_SPECS[:8], ids=lambda s: s.label)
def test_batch_matches_single_on_random_sample(spec):
    N = 10**7
    v = sieve.batch_values(spec, N)
    rng = random.Random(spec.label)
    for n in rng.sample(range(1, N + 1), 10**4 // 8):
        assert int(v[n]) == spec.single(n)


def test_segment_independence():
    N = 2 * 10**6
    for spec in (SummatorySpec("tau_r", r=1), SummatorySpec("sigma_r", r=1), SummatorySpec("mu_k", k=2)):
        ref = None
        for size in (1 << 16, 1 << 20, 1 << 24):
            series = sieve.summatory(spec, N, segment_size=size)
            if ref is None:
                ref = series.rows
            assert series.rows == ref


def test_worker_count_does_not_change_results():
    spec = SummatorySpec("sigma_r", r=1)
    one = sieve.summatory(spec, 10**6, segment_size=1 << 16, workers=1)
    many = sieve.summatory(spec, 10**6, segment_size=1 << 16, workers=4)
    assert one.rows == many.rows


def test_partial_sums_against_cumsum_of_singles():
    spec = SummatorySpec("sigma_r", r=1)
    grid = [1, 2, 17, 100, 999, 5000]
    series = sieve.summatory(spec, 5000, grid, segment_size=700)
    running = np.cumsum([0] + [arith.sigma_r(n, 1) for n in range(1, 5001)])
    assert series.rows == [(x, int(running[x])) for x in grid]


def test_geometric_grid():
    g = sieve.geometric_grid(10**8)
    assert g[0] == 1000 and g[-1] == 10**8
    assert g == sorted(set(g))
    assert len(g) == 5 * 8 + 1
    assert sieve.geometric_grid(500) == [500]
    with pytest.raises(ValueError):
        sieve.geometric_grid(100, ratio=1.0)


def test_summatory_guards():
    spec = SummatorySpec("tau_r", r=1)
    with pytest.raises(ValueError):
        sieve.summatory(spec, 10**10)
    with pytest.raises(ValueError):
        sieve.summatory(spec, 100, [0, 50])
    with pytest.raises(ValueError):
        SummatorySpec("phi")


def test_checkpoint_csv():
    s = sieve.summatory(SummatorySpec("tau_r", r=1), 10, [5, 10])
    assert s.to_csv() == "x,sum\n5,6\n10,13\n"


def test_mertens_examples():
    assert sieve.mertens_k(1, 10) == -1
    assert sieve.mertens_k(2, 16) == -1
    assert sieve.mertens_k(3, 30) == -1


def test_mertens_at_perfect_powers():
    # exact roots matter right at and just below perfect powers
    m1 = sieve.mobius_prefix(10**5)
    for k in (2, 3, 4):
        for base in (10, 31, 46, 99):
            x = base**k
            assert sieve.mertens_k(k, x) == m1[base]
            assert sieve.mertens_k(k, x - 1) == m1[base - 1]


def test_mertens_table_against_definition():
    N = 10**6
    for k in range(1, 5):
        table = sieve.mertens_table(k, N)
        brute = np.cumsum(sieve.batch_values(SummatorySpec("mu_k", k=k), N))
        assert np.array_equal(table, brute)
        m1 = sieve.mobius_prefix(arith.iroot(N, k))
        xs = np.arange(N + 1)
        assert np.array_equal(table, m1[sieve.iroot_array(xs, k)])


def test_iroot_array_is_exact():
    xs = np.array([b**k + d for b in range(1, 3000, 37) for k in (2, 3, 4) for d in (-1, 0, 1)], dtype=np.int64)
    for k in (2, 3, 4, 5):
        got = sieve.iroot_array(xs, k)
        assert [int(g) for g in got] == [arith.iroot(int(x), k) for x in xs]


def test_prime_aggregates_examples():
    a = sieve.prime_aggregates(10)
    assert a.pi == 4 and abs(a.theta - math.log(210)) < 1e-12
    a = sieve.prime_aggregates(2)
    assert a.pi == 1 and abs(a.theta - math.log(2)) < 1e-15
    assert sieve.prime_aggregates(100).pi == 25


def test_prime_aggregates_against_sympy():
    ys = [2, 3, 10, 1000, 65536, 10**6 + 3]
    for a in sieve.prime_aggregates_at(ys):
        primes = list(sympy.primerange(2, a.y + 1))
        assert a.pi == len(primes)
        assert math.isclose(a.theta, math.fsum(map(math.log, primes)), rel_tol=1e-13)
        assert math.isclose(a.log_one_plus, math.fsum(math.log1p(1 / p) for p in primes), rel_tol=1e-13)
