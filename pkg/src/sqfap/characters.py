"""Dirichlet characters mod q with exact angle arithmetic.

The unit group is decomposed by CRT into cyclic factors: one per odd prime
power (smallest primitive root), one for 4, and two for 2^k with k >= 3
(generated by -1 and 5); a single factor 2 contributes nothing. A unit a
has an exponent tuple (l_1, ..., l_r) and the character with tuple
(c_1, ..., c_r) sends a to exp(2 pi i * sum c_i l_i / d_i). Angles are kept
as integers modulo the group exponent L until a complex value is needed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from ._backend import kernels
from .arith import MobiusTable, euler_phi, factorize
from .errors import CapacityError, DomainError

MAX_MODULUS = 10**6


def _is_primitive_root(g: int, m: int, phi: int, phi_primes) -> bool:
    return math.gcd(g, m) == 1 and all(pow(g, phi // r, m) != 1 for r in phi_primes)


def smallest_primitive_root(p: int, k: int) -> int:
    m = p**k
    phi = (p - 1) * p ** (k - 1)
    phi_primes = [r for r, _ in factorize(phi)]
    g = 2
    while not _is_primitive_root(g, m, phi, phi_primes):
        g += 1
    return g


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    modulus: int
    factorization: tuple
    generators: tuple  # units mod q, one per cyclic factor
    orders: tuple  # d_1, ..., d_r
    exponent: int  # L = lcm(d_i)
    dlog: np.ndarray  # (q, r) int64, row r holds the exponent tuple of r mod q, -1 for non-units

    @property
    def phi(self) -> int:
        return math.prod(self.orders)

    @property
    def unit_flags(self) -> np.ndarray:
        return np.gcd(np.arange(self.modulus), self.modulus) == 1

    @property
    def units(self) -> np.ndarray:
        """Unit residues in [0, q) (for q = 1 the single class is 0)."""
        return np.flatnonzero(self.unit_flags)

    def is_unit(self, a: int) -> bool:
        return math.gcd(a, self.modulus) == 1

    def characters(self):
        """All phi(q) characters; the principal one comes first."""
        for c in product(*(range(d) for d in self.orders)):
            yield Character(self, tuple(c))

    def character(self, exponents) -> "Character":
        exponents = tuple(int(c) for c in exponents)
        if len(exponents) != len(self.orders) or any(not 0 <= c < d for c, d in zip(exponents, self.orders)):
            raise DomainError(f"bad exponent tuple {exponents} for orders {self.orders}")
        return Character(self, exponents)

    def exponent_weights(self) -> np.ndarray:
        """(phi, r) matrix; row j holds c_i * L / d_i for the j-th character."""
        if not self.orders:
            return np.zeros((1, 0), dtype=np.int64)
        step = np.array([self.exponent // d for d in self.orders], dtype=np.int64)
        grid = np.array(list(product(*(range(d) for d in self.orders))), dtype=np.int64)
        return grid * step

    def angle_table(self, rows=None) -> np.ndarray:
        """int32 (nchar, q) of angle numerators mod L; -1 marks non-units.

        ``rows`` selects characters by their index in ``characters()`` order.
        """
        weights = self.exponent_weights()
        if rows is not None:
            weights = weights[rows]
        unit = self.unit_flags
        ang = (weights @ np.where(self.dlog >= 0, self.dlog, 0).T) % self.exponent
        ang[:, ~unit] = -1
        return np.ascontiguousarray(ang, dtype=np.int32)

    def roots(self) -> np.ndarray:
        return roots_of_unity(self.exponent)


@dataclass(frozen=True, eq=False)
class Character:
    group: CharacterGroup
    exponents: tuple

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    def angle_numerator(self, a: int) -> int | None:
        """sum c_i l_i(a) L/d_i mod L, or None when gcd(a, q) > 1."""
        g = self.group
        if not g.is_unit(a):
            return None
        row = g.dlog[a % g.modulus]
        return sum(c * int(l) * (g.exponent // d) for c, l, d in zip(self.exponents, row, g.orders)) % g.exponent

    def angle(self, a: int) -> Fraction | None:
        num = self.angle_numerator(a)
        return None if num is None else Fraction(num, self.group.exponent)

    def __call__(self, a: int) -> complex:
        num = self.angle_numerator(a)
        return 0j if num is None else root_of_unity(num, self.group.exponent)


def root_of_unity(k: int, n: int) -> complex:
    """exp(2 pi i k / n), exact at multiples of a quarter turn."""
    k %= n
    if (4 * k) % n == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[4 * k // n]
    return cmath.exp(2j * math.pi * k / n)


def roots_of_unity(n: int) -> np.ndarray:
    return np.array([root_of_unity(k, n) for k in range(n)], dtype=np.complex128)


def _local_logs(p: int, k: int):
    """Local generators, orders and per-residue logs for the factor p^k."""
    m = p**k
    if p == 2:
        if k == 1:
            return [], [], []
        if k == 2:
            log = np.full(m, -1, dtype=np.int64)
            log[1], log[3] = 0, 1
            return [m - 1], [2], [log]
        half = m // 4
        sign = np.full(m, -1, dtype=np.int64)
        five = np.full(m, -1, dtype=np.int64)
        v = 1
        for j in range(half):
            sign[v], five[v] = 0, j
            sign[m - v], five[m - v] = 1, j
            v = v * 5 % m
        return [m - 1, 5], [2, half], [sign, five]
    g = smallest_primitive_root(p, k)
    d = (p - 1) * p ** (k - 1)
    log = np.full(m, -1, dtype=np.int64)
    v = 1
    for j in range(d):
        log[v] = j
        v = v * g % m
    return [g], [d], [log]


def build_group(q: int) -> CharacterGroup:
    if q < 1:
        raise DomainError(f"no characters mod {q}")
    if q > MAX_MODULUS:
        raise CapacityError(f"q={q} above the discrete-log table cap {MAX_MODULUS}")
    fac = factorize(q)
    residues = np.arange(q, dtype=np.int64)
    gens, orders, cols = [], [], []
    for p, k in fac:
        m = p**k
        rest = q // m
        lgens, lorders, llogs = _local_logs(p, k)
        for g, d, log in zip(lgens, lorders, llogs):
            # lift to G = g mod m, G = 1 mod q/m
            G = (g * rest * pow(rest, -1, m) + m * pow(m, -1, rest)) % q if rest > 1 else g % q
            gens.append(G)
            orders.append(d)
            cols.append(log[residues % m])
    if cols:
        dlog = np.stack(cols, axis=1)
        nonunit = np.gcd(residues, q) != 1
        dlog[nonunit] = -1
    else:
        dlog = np.zeros((q, 0), dtype=np.int64)
    dlog.flags.writeable = False
    exponent = math.lcm(*orders) if orders else 1
    assert math.prod(orders) == euler_phi(q)
    return CharacterGroup(q, fac, tuple(gens), tuple(orders), exponent, dlog)


def _residue_buckets(table: MobiusTable, x: int, q: int) -> np.ndarray:
    return kernels.residue_counts(table.mu, x, q)


def twisted_sum(table: MobiusTable, group: CharacterGroup, chi: Character, x: int, *, mode: str = "bucketed") -> complex:
    """sum_{n <= x} |mu(n)| chi(n).

    ``bucketed`` groups n by residue first; ``direct`` walks n itself. Both
    count integers per angle and convert to complex once at the end.
    """
    buckets = _angle_buckets(table, group, x, [_char_index(group, chi)], mode)[0]
    return complex(_to_complex(buckets, group.roots()))


def character_variance(table: MobiusTable, q: int, x: int, *, mode: str = "bucketed", group=None, chunk: int = 256) -> float:
    """(1/phi) sum over non-principal chi of |sum_{n <= x} |mu(n)| chi(n)|^2."""
    group = build_group(q) if group is None else group
    phi = group.phi
    if phi == 1:
        if x > table.limit:
            raise CapacityError(f"x={x} exceeds table limit {table.limit}")
        return 0.0
    roots = group.roots()
    parts = []
    for lo in range(1, phi, chunk):
        rows = list(range(lo, min(phi, lo + chunk)))
        z = _to_complex(_angle_buckets(table, group, x, rows, mode), roots)
        parts.extend((z.real * z.real + z.imag * z.imag).tolist())
    return math.fsum(parts) / phi


def _char_index(group: CharacterGroup, chi: Character) -> int:
    idx = 0
    for c, d in zip(chi.exponents, group.orders):
        idx = idx * d + c
    return idx


def _angle_buckets(table, group, x, rows, mode) -> np.ndarray:
    if x > table.limit:
        raise CapacityError(f"x={x} exceeds table limit {table.limit}")
    ang = group.angle_table(rows)
    L = group.exponent
    if mode == "direct":
        return kernels.character_buckets(table.mu, x, group.modulus, ang, L)
    if mode != "bucketed":
        raise ValueError(f"unknown mode {mode!r}")
    S = _residue_buckets(table, x, group.modulus)
    units = np.flatnonzero(ang[0] >= 0)
    out = np.zeros((len(rows), L), dtype=np.int64)
    flat = (ang[:, units] + (np.arange(len(rows), dtype=np.int64) * L)[:, None]).ravel()
    np.add.at(out.reshape(-1), flat, np.broadcast_to(S[units], (len(rows), units.shape[0])).ravel())
    return out


def _to_complex(buckets: np.ndarray, roots: np.ndarray):
    b = buckets.astype(np.float64)
    re = (b * roots.real).sum(axis=-1)
    im = (b * roots.imag).sum(axis=-1)
    return re + 1j * im


def orthogonality_selfcheck(group: CharacterGroup, *, max_pairs: int = 256, seed: int = 0) -> float:
    """Max defect of sum_a chi(a) = 0 (chi != chi_0) and of
    sum_chi chi(a) conj(chi(b)) = phi [a = b] over sampled unit pairs."""
    roots = group.roots()
    units = group.units
    vals = roots[group.angle_table()[:, units]]  # (nchar, phi)
    phi = group.phi
    defect = 0.0
    if phi > 1:
        defect = float(np.abs(vals[1:].sum(axis=1)).max())
    if phi * phi <= max_pairs:
        pairs = [(i, j) for i in range(phi) for j in range(phi)]
    else:
        rng = np.random.default_rng(seed)
        pairs = [tuple(rng.integers(0, phi, 2)) for _ in range(max_pairs)]
        pairs += [(i, i) for i in rng.integers(0, phi, 8)]
    for i, j in pairs:
        s = (vals[:, i] * np.conj(vals[:, j])).sum()
        defect = max(defect, abs(s - (phi if i == j else 0)))
    return defect
