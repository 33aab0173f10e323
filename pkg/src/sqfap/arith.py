"""Sieves and elementary arithmetic: Moebius table, totient, unit group, c_q."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._backend import kernels
from .errors import CapacityError, DomainError

#: Largest table ``sieve_mobius`` builds unless told otherwise (about 1 GB of int8).
#: 10**8 is exercised by the test suite.
DEFAULT_MAX_LIMIT = 10**9

_MAGIC = b"SQFMU"
_DUMP_VERSION = 1


@dataclass(frozen=True, eq=False)
class MobiusTable:
    """mu(n) for 0 <= n <= limit, stored as int8 (index 0 holds 0).

    The arrays are read-only so one table can be shared between threads.
    """

    limit: int
    mu: np.ndarray
    _bits: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.mu.flags.writeable = False
        bits = np.packbits(self.mu != 0, bitorder="little")
        bits.flags.writeable = False
        object.__setattr__(self, "_bits", bits)

    @property
    def squarefree(self) -> np.ndarray:
        """Boolean flags, ``squarefree[n]`` true iff n is squarefree (n >= 1)."""
        return np.unpackbits(self._bits, count=self.limit + 1, bitorder="little").astype(bool)

    def is_squarefree(self, n: int) -> bool:
        return bool((self._bits[n >> 3] >> (n & 7)) & 1)

    def count_squarefree(self, x: int | None = None) -> int:
        x = self.limit if x is None else x
        if x > self.limit:
            raise CapacityError(f"x={x} exceeds table limit {self.limit}")
        return int(np.count_nonzero(self.mu[1 : x + 1]))

    def save(self, path) -> None:
        """Write a version-tagged binary dump (magic, version, limit, encoding, payload)."""
        with open(path, "wb") as fh:
            fh.write(_MAGIC + struct.pack("<BQ2s", _DUMP_VERSION, self.limit, b"i1"))
            fh.write(np.ascontiguousarray(self.mu).tobytes())

    @classmethod
    def load(cls, path) -> "MobiusTable":
        with open(path, "rb") as fh:
            head = fh.read(len(_MAGIC) + struct.calcsize("<BQ2s"))
            if head[: len(_MAGIC)] != _MAGIC:
                raise ValueError(f"{path}: not a Moebius table dump")
            version, limit, enc = struct.unpack("<BQ2s", head[len(_MAGIC) :])
            if version != _DUMP_VERSION or enc != b"i1":
                raise ValueError(f"{path}: unsupported dump version {version} / encoding {enc!r}")
            mu = np.frombuffer(fh.read(), dtype=np.int8).copy()
        if mu.shape[0] != limit + 1:
            raise ValueError(f"{path}: truncated payload")
        return cls(int(limit), mu)


@dataclass(frozen=True)
class UnitGroup:
    modulus: int
    elements: np.ndarray
    phi: int


def primes_upto(n: int) -> np.ndarray:
    """Primes p <= n by a plain Eratosthenes sieve (int64 array)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_mobius(limit: int, *, max_limit: int = DEFAULT_MAX_LIMIT, method: str = "linear") -> MobiusTable:
    """Build a Moebius table up to ``limit``.

    ``method="linear"`` runs the linear sieve over the whole range;
    ``method="segmented"`` marks square multiples block by block. Both give
    identical tables.
    """
    if limit < 1:
        raise CapacityError(f"limit must be >= 1, got {limit}")
    if limit > max_limit:
        raise CapacityError(f"limit {limit} exceeds memory cap {max_limit}")
    small = primes_upto(math.isqrt(limit) + 1)
    if method == "linear":
        mu = kernels.mobius_linear(limit, small)
    elif method == "segmented":
        mu = np.concatenate(list(segmented_mobius(0, limit + 1, small_primes=small)))
    else:
        raise ValueError(f"unknown sieve method {method!r}")
    return MobiusTable(limit, mu)


def segmented_mobius(lo: int, hi: int, block: int = 1 << 20, small_primes=None):
    """Yield int8 blocks of mu(n) covering lo <= n < hi in order."""
    if small_primes is None:
        small_primes = primes_upto(math.isqrt(max(hi - 1, 1)) + 1)
    for start in range(lo, hi, block):
        yield kernels.mobius_segment(start, min(hi, start + block), small_primes)


def count_squarefree_identity(x: int, mu: np.ndarray) -> int:
    """#{n <= x squarefree} as sum_{d <= sqrt x} mu(d) * floor(x / d^2).

    ``mu`` must cover 1..isqrt(x).
    """
    r = math.isqrt(x)
    d = np.arange(1, r + 1, dtype=np.int64)
    return int(np.sum(mu[1 : r + 1].astype(np.int64) * (x // (d * d))))


@lru_cache(maxsize=4096)
def factorize(q: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of q by trial division, as ((p, k), ...) ascending."""
    if q < 1:
        raise DomainError(f"cannot factor {q}")
    out = []
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def euler_phi(q: int) -> int:
    if q < 1:
        raise DomainError(f"phi undefined for q={q}")
    phi = 1
    for p, k in factorize(q):
        phi *= (p - 1) * p ** (k - 1)
    return phi


def c_constant(q: int) -> float:
    """c_q = prod_{p not dividing q} (1 - p^-2) = (6/pi^2) * prod_{p | q} p^2/(p^2 - 1)."""
    if q < 1:
        raise DomainError(f"c_q undefined for q={q}")
    num = den = 1
    for p, _ in factorize(q):
        num *= p * p
        den *= p * p - 1
    # the rational correction is exact, so the only rounding is in 6/pi^2 and one division
    return 6.0 * num / (math.pi**2 * den)


def unit_mask(q: int) -> np.ndarray:
    """uint8 mask over residues 0..q-1 marking gcd(r, q) == 1."""
    return (np.gcd(np.arange(q, dtype=np.int64), q) == 1).astype(np.uint8)


def unit_group(q: int) -> UnitGroup:
    if q < 1:
        raise DomainError(f"no unit group for q={q}")
    if q == 1:
        elements = np.array([1], dtype=np.int64)
    else:
        r = np.arange(1, q + 1, dtype=np.int64)
        elements = r[np.gcd(r, q) == 1]
    elements.flags.writeable = False
    return UnitGroup(q, elements, int(elements.shape[0]))
