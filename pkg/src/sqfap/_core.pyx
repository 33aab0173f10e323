# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Mirrors ``_fallback`` name for name."""

import numpy as np
from libc.stdint cimport int8_t, int32_t, int64_t, uint8_t
from libc.stdlib cimport llabs


cdef inline int64_t _gcd(int64_t a, int64_t b) noexcept nogil:
    cdef int64_t t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


def mobius_segment(int64_t lo, int64_t hi, primes):
    cdef Py_ssize_t size = hi - lo
    if size <= 0:
        return np.ones(0, dtype=np.int8)
    out = np.ones(size, dtype=np.int8)
    rem_arr = np.arange(lo, hi, dtype=np.int64)
    pr_arr = np.ascontiguousarray(primes, dtype=np.int64)
    cdef int8_t[::1] mu = out
    cdef int64_t[::1] rem = rem_arr
    cdef const int64_t[::1] pr = pr_arr
    cdef Py_ssize_t k, np_ = pr.shape[0]
    cdef int64_t p, p2, j
    with nogil:
        for k in range(np_):
            p = pr[k]
            if p * p >= hi:
                break
            j = (p - lo % p) % p
            while j < size:
                mu[j] = -mu[j]
                rem[j] //= p
                j += p
            p2 = p * p
            j = (p2 - lo % p2) % p2
            while j < size:
                mu[j] = 0
                j += p2
        for j in range(size):
            if rem[j] > 1:
                mu[j] = -mu[j]
        if lo == 0:
            mu[0] = 0
    return out


def mobius_linear(int64_t limit, primes=None):
    """Linear sieve; mu is seeded with 2 to mark integers not yet reached."""
    out = np.full(limit + 1, 2, dtype=np.int8)
    cdef int8_t[::1] mu = out
    cdef double lg = np.log(max(limit, 3))
    cap = int(1.26 * max(limit, 3) / lg) + 32
    pr_arr = np.empty(cap, dtype=np.int64)
    cdef int64_t[::1] pr = pr_arr
    cdef int64_t i, p, ip, npr = 0
    cdef Py_ssize_t j
    with nogil:
        mu[0] = 0
        if limit >= 1:
            mu[1] = 1
        for i in range(2, limit + 1):
            if mu[i] == 2:
                mu[i] = -1
                pr[npr] = i
                npr += 1
            for j in range(npr):
                p = pr[j]
                ip = i * p
                if ip > limit:
                    break
                if i % p == 0:
                    mu[ip] = 0
                    break
                mu[ip] = -mu[i]
    return out


def residue_counts(const int8_t[::1] mu, int64_t x, int64_t q):
    out = np.zeros(q, dtype=np.int64)
    cdef int64_t[::1] c = out
    cdef int64_t n, r = 1 % q
    with nogil:
        for n in range(1, x + 1):
            if mu[n] != 0:
                c[r] += 1
            r += 1
            if r == q:
                r = 0
    return out


def convolution_class_weights(const int8_t[::1] mu, int64_t x, int64_t q,
                              const uint8_t[::1] unit_mask):
    out = np.zeros(q, dtype=np.int64)
    cdef int64_t[::1] w = out
    cdef int64_t e, e2, m, d, s, step, r, dr
    with nogil:
        e = 1
        while e * e <= x:
            s = mu[e]
            if s != 0 and unit_mask[e % q]:
                e2 = e * e
                m = x // e2
                step = e2 % q
                r = 0
                dr = 0
                for d in range(1, m + 1):
                    r += step
                    if r >= q:
                        r -= q
                    dr += 1
                    if dr == q:
                        dr = 0
                    if unit_mask[dr]:
                        w[r] += s
            e += 1
    return out


def character_buckets(const int8_t[::1] mu, int64_t x, int64_t q,
                      const int32_t[:, ::1] angles, int64_t order):
    cdef Py_ssize_t nchar = angles.shape[0]
    out = np.zeros((nchar, order), dtype=np.int64)
    cdef int64_t[:, ::1] b = out
    cdef int64_t n, r = 1 % q
    cdef Py_ssize_t j
    with nogil:
        for n in range(1, x + 1):
            if mu[n] != 0 and angles[0, r] >= 0:
                for j in range(nchar):
                    b[j, angles[j, r]] += 1
            r += 1
            if r == q:
                r = 0
    return out


def lemma1_box_histogram(int64_t w0, int64_t w1, int64_t w2,
                         int64_t b0, int64_t b1, int64_t b2):
    cdef int64_t w[3]
    cdef int64_t b[3]
    cdef int64_t u[3]
    w[0] = w0; w[1] = w1; w[2] = w2
    b[0] = b0; b[1] = b1; b[2] = b2
    cdef int k = 0, i, j, t
    for t in range(1, 3):
        if llabs(w[t]) > llabs(w[k]):
            k = t
    i = 1 if k == 0 else 0
    j = 1 if k == 2 else 2
    hist = np.zeros((b0 + 1, b1 + 1, b2 + 1), dtype=np.int64)
    cdef int64_t[:, :, ::1] h = hist
    cdef int64_t ui, uj, num
    with nogil:
        for ui in range(-b[i], b[i] + 1):
            for uj in range(-b[j], b[j] + 1):
                num = -(w[i] * ui + w[j] * uj)
                if num % w[k] != 0:
                    continue
                u[k] = num // w[k]
                if llabs(u[k]) > b[k]:
                    continue
                u[i] = ui
                u[j] = uj
                if _gcd(_gcd(ui, uj), u[k]) != 1:
                    continue
                h[llabs(u[0]), llabs(u[1]), llabs(u[2])] += 1
    return hist
