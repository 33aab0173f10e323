"""Brute-force oracles for the lattice-counting inputs.

* primitive solutions of u . w = 0 in a box, against 12 pi U0U1U2 / max|w_i|U_i + 4;
* the congruence count N(V1, V2; q, a1, a2), its average N* and the weight
  M(q, a1, a2) = sum_{d | q} d sum_{0<|r|,|s|<=q/2, a1 s + a2 r = 0 (d)} 1/|rs|;
* dyadic averages of M(q, f1^2, f2^2) over coprime f1, f2.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from ._backend import kernels
from .arith import euler_phi, unit_mask
from .errors import DomainError

# ---------------------------------------------------------------- Lemma 1


@dataclass(frozen=True)
class LinearFormInstance:
    w: tuple
    U: tuple

    def __post_init__(self):
        w = tuple(int(v) for v in self.w)
        U = tuple(float(v) for v in self.U)
        if len(w) != 3 or len(U) != 3:
            raise DomainError("need three coefficients and three box sides")
        if math.gcd(*w) != 1:
            raise DomainError(f"w={w} is not primitive")
        if min(U) < 1:
            raise DomainError(f"box sides must be >= 1, got {U}")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "U", U)

    @property
    def box(self) -> tuple:
        return tuple(math.floor(u) for u in self.U)


def count_primitive_solutions(inst: LinearFormInstance) -> int:
    return int(kernels.lemma1_box_histogram(*inst.w, *inst.box).sum())


def lemma1_bound(inst: LinearFormInstance) -> float:
    U0, U1, U2 = inst.U
    big = max(abs(w) * u for w, u in zip(inst.w, inst.U))
    return 12 * math.pi * U0 * U1 * U2 / big + 4


def brute_force_primitive_count(w, U) -> int:
    """Triple loop over the box; independent of the solving kernel."""
    b = [math.floor(u) for u in U]
    n = 0
    for u in product(*(range(-bi, bi + 1) for bi in b)):
        if u[0] * w[0] + u[1] * w[1] + u[2] * w[2] == 0 and math.gcd(*u) == 1:
            n += 1
    return n


def box_counts(w, umax: int) -> np.ndarray:
    """counts[B0, B1, B2] = #primitive solutions with |u_i| <= B_i, for 0 <= B_i <= umax."""
    h = kernels.lemma1_box_histogram(*w, umax, umax, umax)
    return h.cumsum(0).cumsum(1).cumsum(2)


@dataclass(frozen=True)
class Lemma1Sweep:
    instances: int
    violations: list
    worst_ratio: float
    worst_instance: tuple


def primitive_vectors(wmax: int):
    """Primitive w with |w_i| <= wmax, in lexicographic order."""
    r = range(-wmax, wmax + 1)
    for w in product(r, r, r):
        if math.gcd(*w) == 1:
            yield w


def lemma1_sweep(wmax: int = 20, umax: int = 8, threads: int = 1) -> Lemma1Sweep:
    """Check count <= bound for every primitive w (|w_i| <= wmax) and every integer box U_i in 1..umax."""
    sides = np.arange(1, umax + 1, dtype=np.float64)
    U0, U1, U2 = np.meshgrid(sides, sides, sides, indexing="ij")
    vol = 12 * math.pi * U0 * U1 * U2

    def check(w):
        counts = box_counts(w, umax)[1:, 1:, 1:]
        big = np.maximum(np.maximum(abs(w[0]) * U0, abs(w[1]) * U1), abs(w[2]) * U2)
        bound = vol / big + 4
        ratio = counts / bound
        k = int(np.argmax(ratio))
        bad = [(w, tuple(int(i) + 1 for i in idx)) for idx in zip(*np.nonzero(counts > bound))]
        return float(ratio.flat[k]), (w, tuple(int(i) + 1 for i in np.unravel_index(k, ratio.shape))), bad

    ws = list(primitive_vectors(wmax))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(check, ws, chunksize=256))
    else:
        results = [check(w) for w in ws]
    violations = [v for _, _, bad in results for v in bad]
    worst = max(results, key=lambda r: r[0])
    return Lemma1Sweep(len(ws) * umax**3, violations, worst[0], worst[1])


# ---------------------------------------------------------------- Lemma 2


@dataclass(frozen=True)
class CongruenceCounts:
    V1: float
    V2: float
    q: int
    a1: int
    a2: int
    N: int
    N_star: Fraction
    M: Fraction


def _check_units(q: int, *a):
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    for v in a:
        if v == 0 or math.gcd(v, q) != 1:
            raise DomainError(f"a={v} must be nonzero and coprime to q={q}")


def _box_units(V: float, q: int) -> np.ndarray:
    v = np.arange(1, math.floor(V) + 1, dtype=np.int64)
    return v[unit_mask(q)[v % q].astype(bool)]


def n_direct(V1: float, V2: float, q: int, a1: int, a2: int, chunk: int = 1024) -> int:
    """Literal pair enumeration over the box."""
    _check_units(q, a1, a2)
    v1 = np.arange(1, math.floor(V1) + 1, dtype=np.int64)
    v2 = np.arange(1, math.floor(V2) + 1, dtype=np.int64)
    lhs_all = (a1 % q) * v1 % q
    rhs = (a2 % q) * v2 % q
    g2 = np.gcd(v2, q) == 1
    n = 0
    for lo in range(0, v1.shape[0], chunk):
        sl = slice(lo, lo + chunk)
        ok = (lhs_all[sl, None] == rhs[None, :]) & (np.gcd(v1[sl, None] * v2[None, :], q) == 1)
        n += int(np.count_nonzero(ok & g2[None, :]))
    return n


def n_bucketed(V1: float, V2: float, q: int, a1: int, a2: int) -> int:
    """Count v2 per residue class, then look up the class forced on each v1."""
    _check_units(q, a1, a2)
    v1 = _box_units(V1, q)
    v2 = _box_units(V2, q)
    per_class = np.bincount(v2 % q, minlength=q)
    # a1 v1 = a2 v2  <=>  v2 = a1 a2^-1 v1
    ratio = (a1 % q) * pow(a2 % q, -1, q) % q if q > 1 else 0
    return int(per_class[v1 * ratio % q].sum())


def n_diagonal(V: float, q: int) -> int:
    """N(V, V; q, a, a) = sum over unit classes c of #{v <= V : v = c mod q}^2."""
    B = math.floor(V)
    total = 0
    for c in range(1, q + 1):
        if math.gcd(c, q) == 1 and c <= B:
            k = (B - c) // q + 1
            total += k * k
    return total


def n_star(V1: float, V2: float, q: int) -> Fraction:
    return Fraction(_box_units(V1, q).shape[0] * _box_units(V2, q).shape[0], euler_phi(q))


DIRECT_LIMIT = 10**8


def congruence_count(V1: float, V2: float, q: int, a1: int, a2: int) -> CongruenceCounts:
    if V1 < 1 or V2 < 1:
        raise DomainError(f"box sides must be >= 1, got {V1}, {V2}")
    N = n_bucketed(V1, V2, q, a1, a2)
    if math.floor(V1) * math.floor(V2) <= DIRECT_LIMIT:
        direct = n_direct(V1, V2, q, a1, a2)
        if direct != N:
            raise RuntimeError(f"N mismatch: direct={direct}, bucketed={N}")
    return CongruenceCounts(V1, V2, q, a1, a2, N, n_star(V1, V2, q), m_quantity(q, a1, a2))


class MQuantity:
    """M(q, a1, a2) for fixed q.

    The defining congruence reads s = -u r (mod d) with u = a2 a1^-1, so
    the inner double sum for divisor d equals sum_c H_d[c] H_d[-u c mod d]
    where H_d[c] collects 1/|s| over 0 < |s| <= q/2, s = c (mod d). Exact
    values are integers over D^2 with D = lcm(1..q/2).
    """

    def __init__(self, q: int):
        if q < 1:
            raise DomainError(f"modulus must be >= 1, got {q}")
        self.q = q
        self.m = q // 2
        self.divisors = [d for d in range(1, q + 1) if q % d == 0]
        self.D = math.lcm(*range(1, self.m + 1)) if self.m else 1
        self._exact = {}
        self._float = {}
        self._cache = {}
        self._fcache = {}

    def _H(self, d):
        if d not in self._exact:
            H = [0] * d
            for s in range(1, self.m + 1):
                w = self.D // s
                H[s % d] += w
                H[-s % d] += w
            self._exact[d] = H
        return self._exact[d]

    def _Hf(self, d):
        if d not in self._float:
            s = np.arange(1, self.m + 1, dtype=np.int64)
            w = 1.0 / s
            self._float[d] = np.bincount(s % d, weights=w, minlength=d) + np.bincount(-s % d, weights=w, minlength=d)
        return self._float[d]

    def ratio(self, a1: int, a2: int) -> int:
        _check_units(self.q, a1, a2)
        return (a2 % self.q) * pow(a1 % self.q, -1, self.q) % self.q if self.q > 1 else 0

    def numerator(self, u: int) -> int:
        """M * D^2 for ratio u."""
        if u not in self._cache:
            total = 0
            for d in self.divisors:
                H = self._H(d)
                total += d * sum(H[c] * H[(-u * c) % d] for c in range(d) if H[c])
            self._cache[u] = total
        return self._cache[u]

    def value(self, a1: int, a2: int) -> Fraction:
        return Fraction(self.numerator(self.ratio(a1, a2)), self.D * self.D)

    def value_float(self, a1: int, a2: int) -> float:
        u = self.ratio(a1, a2)
        if u not in self._fcache:
            parts = []
            for d in self.divisors:
                H = self._Hf(d)
                c = np.arange(d, dtype=np.int64)
                parts.append(d * float(np.dot(H, H[(-u * c) % d])))
            self._fcache[u] = math.fsum(parts)
        return self._fcache[u]


@lru_cache(maxsize=64)
def _mq(q: int) -> MQuantity:
    return MQuantity(q)


def m_quantity(q: int, a1: int, a2: int, *, exact: bool = True):
    mq = _mq(q)
    return mq.value(a1, a2) if exact else mq.value_float(a1, a2)


def m_quantity_naive(q: int, a1: int, a2: int) -> Fraction:
    """Literal loop over d | q and all (r, s); exact."""
    _check_units(q, a1, a2)
    m = q // 2
    weight = {}
    for d in range(1, q + 1):
        if q % d:
            continue
        for r in range(-m, m + 1):
            if r == 0:
                continue
            for s in range(-m, m + 1):
                if s != 0 and (a1 * s + a2 * r) % d == 0:
                    key = (abs(r), abs(s))
                    weight[key] = weight.get(key, 0) + d
    return sum((Fraction(c, r * s) for (r, s), c in weight.items()), Fraction(0))


# ---------------------------------------------------------------- Lemma 3


@dataclass(frozen=True)
class Lemma3Result:
    q: int
    F1: float
    F2: float
    total: Fraction | float
    envelope: float
    terms: int

    @property
    def ratio(self) -> float:
        return float(self.total) / self.envelope


EXACT_Q_MAX = 500


def lemma3_average(q: int, F1: float, F2: float, *, exact: bool | None = None) -> Lemma3Result:
    """sum of M(q, f1^2, f2^2) over F_i < f_i <= 2F_i, gcd(f1, f2) = 1, gcd(f1 f2, q) = 1.

    Exact by default for q <= 500, floating point above.
    """
    if F1 < 0.5 or F2 < 0.5:
        raise DomainError(f"dyadic ranges need F >= 1/2, got {F1}, {F2}")
    exact = q <= EXACT_Q_MAX if exact is None else exact
    mq = _mq(q)
    f1s = [f for f in range(math.floor(F1) + 1, math.floor(2 * F1) + 1) if math.gcd(f, q) == 1]
    f2s = [f for f in range(math.floor(F2) + 1, math.floor(2 * F2) + 1) if math.gcd(f, q) == 1]
    terms = 0
    num = 0
    parts = []
    for f1 in f1s:
        for f2 in f2s:
            if math.gcd(f1, f2) != 1:
                continue
            terms += 1
            if exact:
                num += mq.numerator(mq.ratio(f1 * f1, f2 * f2))
            else:
                parts.append(mq.value_float(f1 * f1, f2 * f2))
    total = Fraction(num, mq.D * mq.D) if exact else math.fsum(parts)
    return Lemma3Result(q, F1, F2, total, F1 * F2 + q, terms)
