"""Both kernel backends against each other and against slow oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import mu_trial_division
from sqfap import _fallback
from sqfap.arith import primes_upto, unit_mask

try:
    from sqfap import _core
except ImportError:
    _core = None

needs_ext = pytest.mark.skipif(_core is None, reason="compiled extension not built")

PRIMES = primes_upto(2000)
MU_ORACLE = np.array([0] + [mu_trial_division(n) for n in range(1, 3001)], dtype=np.int8)


def test_mobius_linear_matches_trial_division(backend):
    assert np.array_equal(backend.mobius_linear(3000, PRIMES), MU_ORACLE)


@pytest.mark.parametrize("lo,hi", [(0, 1), (0, 50), (1, 3001), (997, 1009), (2500, 3001)])
def test_mobius_segment_matches_oracle(backend, lo, hi):
    assert np.array_equal(backend.mobius_segment(lo, hi, PRIMES), MU_ORACLE[lo:hi])


def test_residue_counts(backend):
    for q in (1, 2, 7, 12, 100):
        want = np.zeros(q, dtype=np.int64)
        for n in range(1, 3001):
            if MU_ORACLE[n]:
                want[n % q] += 1
        assert np.array_equal(backend.residue_counts(MU_ORACLE, 3000, q), want)


def test_lemma1_histogram_small(backend):
    h = backend.lemma1_box_histogram(1, 1, 1, 1, 1, 1)
    assert h.sum() == 6
    assert h[1, 1, 0] == 2 and h[1, 0, 1] == 2 and h[0, 1, 1] == 2


@needs_ext
@settings(max_examples=60, deadline=None)
@given(
    st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30),
    st.integers(0, 6), st.integers(0, 6), st.integers(0, 6),
)
def test_lemma1_histogram_backends_agree(w0, w1, w2, b0, b1, b2):
    if (w0, w1, w2) == (0, 0, 0):
        return
    a = _core.lemma1_box_histogram(w0, w1, w2, b0, b1, b2)
    b = _fallback.lemma1_box_histogram(w0, w1, w2, b0, b1, b2)
    assert np.array_equal(a, b)


@needs_ext
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3000), st.integers(1, 400))
def test_convolution_weights_backends_agree(x, q):
    um = unit_mask(q)
    assert np.array_equal(
        _core.convolution_class_weights(MU_ORACLE, x, q, um),
        _fallback.convolution_class_weights(MU_ORACLE, x, q, um),
    )


@needs_ext
@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5000))
def test_segments_backends_agree(lo, length):
    primes = primes_upto(1100)
    assert np.array_equal(
        _core.mobius_segment(lo, lo + length, primes), _fallback.mobius_segment(lo, lo + length, primes)
    )


@needs_ext
def test_linear_sieve_backends_agree_1e6():
    primes = primes_upto(1001)
    assert np.array_equal(_core.mobius_linear(10**6, primes), _fallback.mobius_linear(10**6, primes))


@needs_ext
def test_character_buckets_backends_agree():
    from sqfap.characters import build_group

    for q in (1, 5, 8, 36, 97):
        g = build_group(q)
        ang = g.angle_table()
        a = _core.character_buckets(MU_ORACLE, 3000, q, ang, g.exponent)
        b = _fallback.character_buckets(MU_ORACLE, 3000, q, ang, g.exponent)
        assert np.array_equal(a, b)
