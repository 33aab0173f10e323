"""Squarefree counts in progressions and the variance identities built on them.

For fixed (x, q) the per-class counts S(x;q,a) over units a determine
everything else here: the error terms E = S - c_q x/q, the variance
V = sum E^2, the pair count T = sum S^2 and its twisted versions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .arith import MobiusTable, c_constant, primes_upto, segmented_mobius, unit_group, unit_mask
from .errors import CapacityError, DomainError

_INT64_SAFE = 2**62


def exact_dot(a: np.ndarray, b: np.ndarray) -> int:
    """Exact integer inner product; drops to Python ints when int64 could overflow."""
    if a.size == 0:
        return 0
    bound = int(np.abs(a).max()) * int(np.abs(b).max()) * a.size
    if bound < _INT64_SAFE:
        return int(np.dot(a.astype(np.int64), b.astype(np.int64)))
    return sum(int(u) * int(v) for u, v in zip(a.tolist(), b.tolist()))


@dataclass(frozen=True, eq=False)
class ProgressionProfile:
    """S(x;q,a) for every unit a mod q, aligned with ``units`` (ascending)."""

    x: int
    q: int
    units: np.ndarray
    counts: np.ndarray
    phi: int
    c_q: float
    total: int

    @property
    def counts_by_residue(self) -> dict[int, int]:
        return dict(zip(self.units.tolist(), self.counts.tolist()))

    def index(self, a: int) -> int:
        a = (a - 1) % self.q + 1
        i = int(np.searchsorted(self.units, a))
        if i >= self.phi or self.units[i] != a:
            raise DomainError(f"gcd({a}, {self.q}) != 1")
        return i

    def S(self, a: int) -> int:
        return int(self.counts[self.index(a)])

    @property
    def expected(self) -> float:
        """The main term c_q * x / q shared by all classes."""
        return self.c_q * self.x / self.q

    def errors(self) -> np.ndarray:
        return self.counts.astype(np.float64) - self.expected


@dataclass(frozen=True)
class VarianceReport:
    x: int
    q: int
    phi: int
    total: int
    V: float
    centered_variance: Fraction
    T: int
    main_term_T: float
    residual: float

    def to_dict(self) -> dict:
        cv = self.centered_variance
        return {
            "x": self.x,
            "q": self.q,
            "phi": self.phi,
            "total": self.total,
            "V": self.V,
            "centered_variance": float(cv),
            "centered_variance_exact": [cv.numerator, cv.denominator],
            "T": self.T,
            "main_term_T": self.main_term_T,
            "residual": self.residual,
        }


def _from_residue_counts(x: int, q: int, by_residue: np.ndarray) -> ProgressionProfile:
    ug = unit_group(q)
    counts = by_residue[ug.elements % q].astype(np.int64)
    counts.flags.writeable = False
    return ProgressionProfile(x, q, ug.elements, counts, ug.phi, c_constant(q), int(counts.sum()))


def profile(table: MobiusTable, x: int, q: int) -> ProgressionProfile:
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if x > table.limit:
        raise CapacityError(f"x={x} exceeds table limit {table.limit}")
    return _from_residue_counts(x, q, kernels.residue_counts(table.mu, x, q))


def profile_segmented(x: int, q: int, block: int = 1 << 20) -> ProgressionProfile:
    """Same result as ``profile`` without holding a table for all n <= x."""
    if q < 1 or x < 1:
        raise DomainError(f"need x, q >= 1, got x={x}, q={q}")
    small = primes_upto(math.isqrt(x) + 1)
    acc = np.zeros(q, dtype=np.int64)
    lo = 1
    for blk in segmented_mobius(1, x + 1, block, small):
        idx = np.flatnonzero(blk).astype(np.int64) + lo
        acc += np.bincount(idx % q, minlength=q)
        lo += blk.shape[0]
    return _from_residue_counts(x, q, acc)


def error_term(p: ProgressionProfile, a: int) -> float:
    return p.S(a) - p.expected


def variance(p: ProgressionProfile) -> VarianceReport:
    E = p.errors()
    V = math.fsum((E * E).tolist())
    T = exact_dot(p.counts, p.counts)
    centered = Fraction(p.phi * T - p.total * p.total, p.phi)
    return VarianceReport(
        x=p.x,
        q=p.q,
        phi=p.phi,
        total=p.total,
        V=V,
        centered_variance=centered,
        T=T,
        main_term_T=p.total**2 / p.phi,
        residual=float(centered),
    )


def t_via_convolution(table: MobiusTable, x: int, q: int) -> int:
    """T(x;q) from |mu(n)| = sum_{e^2 | n} mu(e), never reading |mu(n)| for n > sqrt(x).

    Grouping the pairs (d, e) with n = d e^2 by the class of n mod q gives
    class weights W[r]; the double sum over pairs in the same class is then
    sum_r W[r]^2.
    """
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    if math.isqrt(x) > table.limit:
        raise CapacityError(f"table limit {table.limit} below sqrt(x) for x={x}")
    if x > table.limit:
        raise CapacityError(f"x={x} exceeds table limit {table.limit}")
    W = kernels.convolution_class_weights(table.mu, x, q, unit_mask(q))
    return exact_dot(W, W)


class ResidueBijection:
    """A bijection gamma of (Z/qZ)^x.

    ``kind`` is one of ``identity``, ``mul`` (param c), ``inv``,
    ``pow`` (param k) or ``random`` (param seed, a permutation drawn
    from numpy's PCG64 generator).
    """

    KINDS = ("identity", "mul", "inv", "pow", "random")

    def __init__(self, kind: str, param: int | None = None):
        if kind not in self.KINDS:
            raise DomainError(f"unknown bijection kind {kind!r}")
        if kind in ("mul", "pow") and param is None:
            raise DomainError(f"{kind} needs a parameter")
        self.kind = kind
        self.param = 0 if kind == "random" and param is None else param

    @classmethod
    def parse(cls, spec: str, seed: int = 0) -> "ResidueBijection":
        """Parse ``identity``, ``mul:c``, ``inv``, ``pow:k``, ``random`` or ``random:seed``."""
        name, _, arg = spec.partition(":")
        try:
            if name in ("mul", "pow"):
                return cls(name, int(arg))
            if name == "random":
                return cls(name, int(arg) if arg else seed)
        except ValueError:
            raise DomainError(f"malformed gamma spec {spec!r}") from None
        if arg or name not in ("identity", "inv"):
            raise DomainError(f"malformed gamma spec {spec!r}")
        return cls(name)

    def __repr__(self):
        return self.kind if self.param is None else f"{self.kind}:{self.param}"

    def images(self, units: np.ndarray, q: int) -> np.ndarray:
        """gamma(a) for each a in ``units``, as representatives in [1, q]."""
        if self.kind == "identity":
            out = units.copy()
        elif self.kind == "mul":
            out = (units * (self.param % q)) % q
        elif self.kind == "inv":
            out = np.array([pow(int(a), -1, q) for a in units], dtype=np.int64)
        elif self.kind == "pow":
            out = np.array([pow(int(a), self.param, q) for a in units], dtype=np.int64)
        else:
            out = units[np.random.default_rng(self.param).permutation(units.shape[0])]
        return (out - 1) % q + 1

    def index_map(self, units: np.ndarray, q: int) -> np.ndarray:
        """perm with gamma(units[i]) == units[perm[i]]; raises unless gamma is a bijection."""
        img = self.images(units, q)
        perm = np.searchsorted(units, img)
        perm = np.minimum(perm, units.shape[0] - 1)
        if not np.array_equal(units[perm], img) or np.unique(perm).shape[0] != units.shape[0]:
            raise DomainError(f"{self!r} is not a bijection of the units mod {q}")
        return perm


def t_gamma(p: ProgressionProfile, g: ResidueBijection) -> int:
    """sum_a S(gamma(a)) * S(a): pairs with n1 = gamma(a), n2 = a mod q."""
    perm = g.index_map(p.units, p.q)
    return exact_dot(p.counts[perm], p.counts)


def v_gamma(p: ProgressionProfile, g: ResidueBijection) -> float:
    perm = g.index_map(p.units, p.q)
    E = p.errors()
    return math.fsum((E[perm] * E).tolist())


def equivalence_check(p: ProgressionProfile) -> float:
    """Largest absolute gap between V and its two expansions through T.

    V = T - 2 c_q (x/q) total + phi c_q^2 x^2/q^2
      = T - total^2/phi + (total - phi c_q x/q)^2 / phi
    """
    rep = variance(p)
    m = p.expected
    first = math.fsum([rep.T, -2.0 * m * p.total, p.phi * m * m])
    gap = p.total - p.phi * m
    second = float(rep.centered_variance) + gap * gap / p.phi
    return max(abs(rep.V - first), abs(rep.V - second))
