import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import residue_profile, squarefree_upto, t_literal_pairs
from sqfap.arith import c_constant, sieve_mobius
from sqfap.errors import CapacityError, DomainError
from sqfap.progressions import (
    ProgressionProfile,
    ResidueBijection,
    equivalence_check,
    error_term,
    profile,
    profile_segmented,
    t_gamma,
    t_via_convolution,
    v_gamma,
    variance,
)


def test_profile_hand_examples(table_small):
    assert profile(table_small, 20, 4).counts_by_residue == {1: 4, 3: 5}
    assert profile(table_small, 10, 3).counts_by_residue == {1: 3, 2: 2}
    p = profile(table_small, 10, 1)
    assert p.counts_by_residue == {1: 7}
    assert p.total == 7


@pytest.mark.parametrize("x,q", [(1, 1), (97, 7), (500, 12), (1000, 30), (2048, 64), (3000, 1000), (999, 999)])
def test_profile_matches_scan(table_small, x, q):
    assert profile(table_small, x, q).counts_by_residue == residue_profile(x, q)


def test_profile_errors(table_small):
    with pytest.raises(CapacityError):
        profile(table_small, 10**4 + 1, 3)
    with pytest.raises(DomainError):
        profile(table_small, 10, 0)


def test_error_term_examples(table_small):
    p = profile(table_small, 10, 1)
    assert error_term(p, 1) == pytest.approx(7 - 60 / math.pi**2, rel=1e-14)
    p = profile(table_small, 20, 4)
    assert error_term(p, 1) == pytest.approx(4 - 5 * 8 / math.pi**2, rel=1e-14)
    with pytest.raises(DomainError):
        error_term(p, 2)
    for a in p.units:
        assert error_term(p, int(a)) + c_constant(4) * 20 / 4 == pytest.approx(p.S(int(a)), abs=1e-12)


def test_variance_hand_examples(table_small):
    rep = variance(profile(table_small, 10, 3))
    assert rep.centered_variance == Fraction(1, 2)
    assert rep.T == 13
    assert rep.main_term_T == 12.5


def test_uniform_profile_has_zero_centered_variance():
    q, s = 7, 40
    units = np.arange(1, 7)
    counts = np.full(6, s, dtype=np.int64)
    x = 1000
    # c chosen so the main term equals every count
    p = ProgressionProfile(x, q, units, counts, 6, s * q / x, 6 * s)
    rep = variance(p)
    assert rep.centered_variance == 0
    assert rep.V == pytest.approx(0, abs=1e-20)
    assert rep.T - Fraction(rep.total**2, rep.phi) == 0
    assert equivalence_check(p) < 1e-9


def test_convolution_examples(table_small):
    assert t_via_convolution(table_small, 10, 3) == 13
    assert t_via_convolution(table_small, 10, 1) == 49
    assert t_via_convolution(table_small, 100, 7) == variance(profile(table_small, 100, 7)).T


@pytest.mark.parametrize("x,q", [(30, 1), (60, 4), (80, 6), (120, 7), (200, 10)])
def test_convolution_matches_literal_pairs(table_small, x, q):
    assert t_via_convolution(table_small, x, q) == t_literal_pairs(x, q)


@settings(max_examples=60, deadline=None)
@given(x=st.integers(1, 10**4), q=st.integers(1, 300))
def test_profile_invariants(table_small, x, q):
    if q > x:
        return
    p = profile(table_small, x, q)
    assert int(p.counts.max()) <= x // q + 1
    direct = sum(1 for n in range(1, x + 1) if table_small.mu[n] and math.gcd(n, q) == 1)
    assert p.total == direct
    rep = variance(p)
    assert rep.T == sum(int(s) ** 2 for s in p.counts)
    assert rep.centered_variance == rep.T - Fraction(rep.total**2, rep.phi)
    assert rep.V >= 0 and rep.centered_variance >= 0
    assert t_via_convolution(table_small, x, q) == rep.T
    scale = max(1.0, p.phi * p.expected**2)
    assert equivalence_check(p) < 1e-8 * scale


def test_centered_variance_exact_grid(table_1e5):
    for x in (10**3, 10**5):
        for q in range(1, 201):
            p = profile(table_1e5, x, q)
            mean = Fraction(p.total, p.phi)
            direct = sum((Fraction(int(s)) - mean) ** 2 for s in p.counts)
            assert variance(p).centered_variance == direct


def test_equivalence_examples(table_1e5):
    assert equivalence_check(profile(table_1e5, 10, 3)) < 1e-9
    p = profile(table_1e5, 10**5, 101)
    assert equivalence_check(p) < 1e-4 * variance(p).T


def test_segmented_profile_matches(table_1e5):
    for x, q in [(10**5, 1), (10**5, 97), (54321, 360), (777, 5)]:
        a = profile(table_1e5, x, q)
        b = profile_segmented(x, q, block=4096)
        assert np.array_equal(a.counts, b.counts)
        assert a.total == b.total


def test_large_t_uses_exact_integers():
    # at x = 10^8, q = 1 the pair count is ~3.7e15 and still exact via python ints
    q, S = 1, 60792694
    p = ProgressionProfile(10**8, q, np.array([1]), np.array([S]), 1, c_constant(1), S)
    assert variance(p).T == S * S
    big = 3 * 10**9
    p = ProgressionProfile(10**10, 2, np.array([1]), np.array([big]), 1, c_constant(2), big)
    assert variance(p).T == big * big


def test_gamma_examples(table_small):
    p = profile(table_small, 10, 3)
    assert t_gamma(p, ResidueBijection("identity")) == 13
    assert t_gamma(p, ResidueBijection("mul", 2)) == 12
    assert v_gamma(p, ResidueBijection("identity")) == pytest.approx(variance(p).V, rel=1e-15)


def test_gamma_parse():
    assert repr(ResidueBijection.parse("mul:5")) == "mul:5"
    assert repr(ResidueBijection.parse("random", seed=9)) == "random:9"
    assert repr(ResidueBijection.parse("random:3")) == "random:3"
    for bad in ("mul", "mul:x", "inv:2", "square", "pow:"):
        with pytest.raises(DomainError):
            ResidueBijection.parse(bad)


def test_non_bijection_rejected(table_small):
    p = profile(table_small, 1000, 10)
    with pytest.raises(DomainError):
        t_gamma(p, ResidueBijection("pow", 2))
    with pytest.raises(DomainError):
        t_gamma(p, ResidueBijection("mul", 5))


def test_gamma_orientations_agree():
    """Literal pair sums with n1 = gamma(n2) and with n2 = gamma(n1) give the same total."""
    x, q = 300, 11
    sqf = [n for n in squarefree_upto(x) if math.gcd(n, q) == 1]
    for spec in ("mul:3", "inv", "pow:3", "random:4"):
        g = ResidueBijection.parse(spec)
        units = np.arange(1, q)
        img = dict(zip(units.tolist(), g.images(units, q).tolist()))
        r = lambda n: (n - 1) % q + 1  # noqa: E731
        fwd = sum(1 for n1 in sqf for n2 in sqf if r(n1) == img[r(n2)])
        back = sum(1 for n1 in sqf for n2 in sqf if r(n2) == img[r(n1)])
        p = profile(sieve_mobius(x), x, q)
        assert fwd == back == t_gamma(p, g)


@settings(max_examples=40, deadline=None)
@given(x=st.integers(100, 10**4), q=st.integers(2, 120), spec=st.sampled_from(["inv", "mul", "random", "pow"]), seed=st.integers(0, 99))
def test_gamma_relations(table_small, x, q, spec, seed):
    if q > x:
        return
    p = profile(table_small, x, q)
    units = p.units.tolist()
    if spec == "mul":
        g = ResidueBijection("mul", units[seed % len(units)])
    elif spec == "pow":
        k = next(k for k in range(1, 50) if math.gcd(k, math.lcm(*[1] + [pow_order(a, q) for a in units])) == 1 and k > 1)
        g = ResidueBijection("pow", k)
    else:
        g = ResidueBijection.parse(spec if spec != "random" else f"random:{seed}")
    rep = variance(p)
    diff = rep.T - t_gamma(p, g)
    vdiff = rep.V - v_gamma(p, g)
    assert abs(diff - vdiff) <= 1e-8 * max(1.0, rep.T)
    assert 0 <= diff <= 2 * rep.centered_variance
    assert diff <= 2 * rep.V + 1e-8 * max(1.0, rep.T)
    assert abs(v_gamma(p, g)) <= rep.V * (1 + 1e-12) + 1e-9


def pow_order(a, q):
    k, v = 1, a % q
    while v != 1 % q:
        v = v * a % q
        k += 1
    return k
