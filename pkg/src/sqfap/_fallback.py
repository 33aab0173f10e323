"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same name and signature in the
compiled ``_core`` extension; both must return identical arrays.
"""

import numpy as np

_BLOCK = 1 << 22


def mobius_segment(lo, hi, primes):
    """Return mu(n) for lo <= n < hi as int8.

    ``primes`` must contain every prime p with p * p < hi.
    """
    size = hi - lo
    mu = np.ones(size, dtype=np.int8)
    if size <= 0:
        return mu
    rem = np.arange(lo, hi, dtype=np.int64)
    for p in primes:
        p = int(p)
        if p * p >= hi:
            break
        start = (-lo) % p
        mu[start::p] *= -1
        rem[start::p] //= p
        p2 = p * p
        mu[(-lo) % p2::p2] = 0
    # at most one prime factor above sqrt(hi) survives in a squarefree n
    mu[rem > 1] *= -1
    if lo == 0:
        mu[0] = 0
    return mu


def mobius_linear(limit, primes):
    mu = np.empty(limit + 1, dtype=np.int8)
    for lo in range(0, limit + 1, _BLOCK):
        hi = min(limit + 1, lo + _BLOCK)
        mu[lo:hi] = mobius_segment(lo, hi, primes)
    return mu


def residue_counts(mu, x, q):
    """Counts of squarefree n <= x by n mod q (all q residues)."""
    out = np.zeros(q, dtype=np.int64)
    for lo in range(1, x + 1, _BLOCK):
        hi = min(x + 1, lo + _BLOCK)
        idx = np.flatnonzero(mu[lo:hi]).astype(np.int64) + lo
        out += np.bincount(idx % q, minlength=q)
    return out


def convolution_class_weights(mu, x, q, unit_mask):
    """W[r] = sum of mu(e) over pairs (d, e), d*e^2 <= x, d*e^2 = r mod q, coprime to q."""
    out = np.zeros(q, dtype=np.int64)
    e = 1
    while e * e <= x:
        s = int(mu[e])
        if s != 0 and unit_mask[e % q]:
            e2 = e * e
            d = np.arange(1, x // e2 + 1, dtype=np.int64)
            d = d[unit_mask[d % q].astype(bool)]
            out += s * np.bincount((d * (e2 % q)) % q, minlength=q)
        e += 1
    return out


def character_buckets(mu, x, q, angles, order):
    """Per-character counts of squarefree units n <= x by angle numerator of chi(n)."""
    nchar = angles.shape[0]
    out = np.zeros((nchar, order), dtype=np.int64)
    for lo in range(1, x + 1, _BLOCK):
        hi = min(x + 1, lo + _BLOCK)
        r = (np.flatnonzero(mu[lo:hi]).astype(np.int64) + lo) % q
        r = r[angles[0, r] >= 0]
        for j in range(nchar):
            out[j] += np.bincount(angles[j, r], minlength=order)
    return out


def lemma1_box_histogram(w0, w1, w2, b0, b1, b2):
    """Histogram of primitive solutions u of u.w = 0 by (|u0|, |u1|, |u2|).

    Coordinates are bounded by |u_i| <= b_i. One nonzero w coordinate is
    solved for; the other two are enumerated.
    """
    w = [w0, w1, w2]
    b = [b0, b1, b2]
    k = max(range(3), key=lambda i: abs(w[i]))
    i, j = [t for t in range(3) if t != k]
    ui = np.arange(-b[i], b[i] + 1, dtype=np.int64)
    uj = np.arange(-b[j], b[j] + 1, dtype=np.int64)
    UI, UJ = np.meshgrid(ui, uj, indexing="ij")
    num = -(w[i] * UI + w[j] * UJ)
    ok = num % w[k] == 0
    UK = np.where(ok, num // w[k], 0)
    ok &= np.abs(UK) <= b[k]
    g = np.gcd(np.gcd(UI, UJ), UK)
    ok &= g == 1
    coords = [None, None, None]
    coords[i], coords[j], coords[k] = np.abs(UI[ok]), np.abs(UJ[ok]), np.abs(UK[ok])
    hist = np.zeros((b0 + 1, b1 + 1, b2 + 1), dtype=np.int64)
    np.add.at(hist, (coords[0], coords[1], coords[2]), 1)
    return hist
