import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import mu_trial_division
from sqfap.arith import (
    MobiusTable,
    c_constant,
    count_squarefree_identity,
    euler_phi,
    factorize,
    sieve_mobius,
    unit_group,
)
from sqfap.errors import CapacityError, DomainError


def test_sieve_examples():
    assert sieve_mobius(1).mu[1] == 1
    assert sieve_mobius(12).mu[12] == 0
    # brute-force trial division over n <= 100 gives 61 squarefree integers
    assert sum(1 for n in range(1, 101) if mu_trial_division(n)) == 61
    t = sieve_mobius(100)
    assert int(t.squarefree[1:].sum()) == 61
    assert t.count_squarefree() == 61


def test_sieve_rejects_bad_limits():
    with pytest.raises(CapacityError):
        sieve_mobius(0)
    with pytest.raises(CapacityError):
        sieve_mobius(10**6, max_limit=10**5)


def test_table_invariants(table_small):
    mu = table_small.mu
    sqf = table_small.squarefree
    assert np.array_equal(sqf[1:], mu[1:] != 0)
    assert all(table_small.is_squarefree(n) == bool(mu[n]) for n in range(1, 2000))
    # divisor sums by direct enumeration
    for n in range(1, 3000):
        s = sum(int(mu[d]) for d in range(1, n + 1) if n % d == 0)
        assert s == (1 if n == 1 else 0)


def test_table_is_read_only(table_small):
    with pytest.raises(ValueError):
        table_small.mu[5] = 0


@given(st.integers(1, 100), st.integers(1, 100))
def test_mu_multiplicative(m, n):
    t = sieve_mobius(10**4)
    if math.gcd(m, n) == 1:
        assert t.mu[m * n] == t.mu[m] * t.mu[n]


def test_segmented_equals_linear():
    a = sieve_mobius(3 * 10**6 + 17)
    b = sieve_mobius(3 * 10**6 + 17, method="segmented")
    assert np.array_equal(a.mu, b.mu)


def test_squarefree_count_identity(table_1e5):
    for x in list(range(1, 300)) + [1000, 4096, 65537, 10**5]:
        assert table_1e5.count_squarefree(x) == count_squarefree_identity(x, table_1e5.mu)


@pytest.mark.slow
def test_sieve_ceiling_1e8():
    t = sieve_mobius(10**8)
    small = sieve_mobius(10**4)
    assert t.count_squarefree() == count_squarefree_identity(10**8, small.mu)
    rng = np.random.default_rng(1)
    for n in rng.integers(1, 10**8, 200):
        assert t.mu[n] == mu_trial_division(int(n))


def test_dump_roundtrip(tmp_path, table_small):
    path = tmp_path / "mu.bin"
    table_small.save(path)
    back = MobiusTable.load(path)
    assert back.limit == table_small.limit
    assert np.array_equal(back.mu, table_small.mu)
    path.write_bytes(b"junk" + path.read_bytes())
    with pytest.raises(ValueError):
        MobiusTable.load(path)


@pytest.mark.parametrize("q,phi", [(1, 1), (12, 4), (97, 96), (2**10, 512), (360, 96)])
def test_euler_phi(q, phi):
    assert euler_phi(q) == phi


def test_euler_phi_errors():
    with pytest.raises(DomainError):
        euler_phi(0)
    with pytest.raises(DomainError):
        c_constant(0)


def test_phi_matches_unit_group():
    for q in range(1, 10**4 + 1):
        assert euler_phi(q) == unit_group(q).phi


def test_unit_group_examples():
    assert unit_group(1).elements.tolist() == [1]
    assert unit_group(8).elements.tolist() == [1, 3, 5, 7]
    assert unit_group(10).elements.tolist() == [1, 3, 7, 9]
    g = unit_group(360)
    assert all(math.gcd(int(a), 360) == 1 for a in g.elements)
    assert len(set(g.elements.tolist())) == g.phi


def test_factorize():
    assert factorize(1) == ()
    assert factorize(360) == ((2, 3), (3, 2), (5, 1))
    assert factorize(999983 * 2) == ((2, 1), (999983, 1))


def test_c_constant_values():
    inv_zeta2 = float(1 / mpmath.zeta(2))
    assert c_constant(1) == pytest.approx(inv_zeta2, rel=1e-14)
    assert c_constant(1) == pytest.approx(0.6079271018, abs=1e-10)
    assert c_constant(2) == pytest.approx(0.8105694691, abs=1e-10)
    assert c_constant(6) == pytest.approx(9 / math.pi**2, rel=1e-14)


def test_c_constant_against_truncated_product():
    mpmath.mp.dps = 30
    for q in (1, 2, 12, 30, 97, 2310):
        # finite product over p | q corrects 1/zeta(2); compute it with mpmath
        corr = mpmath.mpf(1)
        for p, _ in factorize(q):
            corr *= 1 - mpmath.mpf(1) / p**2
        want = float(1 / (mpmath.zeta(2) * corr))
        assert abs(c_constant(q) - want) <= 1e-12 * want


def test_c_constant_monotone_and_bounded():
    base = 6 / math.pi**2
    prev = c_constant(1)
    q = 1
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23):
        q *= p
        c = c_constant(q)
        assert c > prev
        prev = c
    for q in range(1, 2000):
        c = c_constant(q)
        assert base * (1 - 1e-15) <= c < 1
