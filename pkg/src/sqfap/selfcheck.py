"""Small-scale run of every exact identity the package relies on."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import MobiusTable, count_squarefree_identity, euler_phi, sieve_mobius, unit_group
from .characters import build_group, character_variance, orthogonality_selfcheck
from .lemmas import (
    LinearFormInstance,
    brute_force_primitive_count,
    count_primitive_solutions,
    lemma1_sweep,
    m_quantity,
    m_quantity_naive,
    n_bucketed,
    n_direct,
)
from .progressions import ResidueBijection, equivalence_check, profile, t_gamma, t_via_convolution, v_gamma, variance

X_MAX = 10**4
Q_MAX = 60


@dataclass
class CheckResult:
    name: str
    defect: float
    cases: int
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        tail = "" if self.ok else f"  first failure: {self.failure}"
        return f"{status}  {self.name:<40} max defect {self.defect:.3g}  ({self.cases} cases){tail}"


class _Tracker:
    def __init__(self, name):
        self.name, self.defect, self.cases, self.failure = name, 0.0, 0, None

    def add(self, defect, ok, instance):
        self.cases += 1
        self.defect = max(self.defect, float(defect))
        if not ok and self.failure is None:
            self.failure = instance

    def result(self):
        return CheckResult(self.name, self.defect, self.cases, self.failure)


def _divisor_sum(table: MobiusTable, n_max: int) -> CheckResult:
    t = _Tracker("Moebius divisor-sum identity")
    mu = table.mu[: n_max + 1].astype(np.int64)
    acc = np.zeros(n_max + 1, dtype=np.int64)
    for d in range(1, n_max + 1):
        if mu[d]:
            acc[d::d] += mu[d]
    target = np.zeros(n_max + 1, dtype=np.int64)
    target[1] = 1
    gap = np.abs(acc - target)[1:]
    bad = np.flatnonzero(gap)
    t.cases = n_max
    t.defect = float(gap.max())
    if bad.size:
        t.failure = f"n={int(bad[0]) + 1}: sum_(d|n) mu(d) = {int(acc[bad[0] + 1])}"
    return t.result()


def _multiplicative(table, n_max, rng) -> CheckResult:
    t = _Tracker("Moebius multiplicativity")
    for _ in range(500):
        m = int(rng.integers(1, 101))
        n = int(rng.integers(1, n_max // m + 1))
        if math.gcd(m, n) != 1:
            continue
        lhs, rhs = int(table.mu[m * n]), int(table.mu[m]) * int(table.mu[n])
        t.add(abs(lhs - rhs), lhs == rhs, f"m={m}, n={n}")
    return t.result()


def _squarefree_count(table, n_max) -> CheckResult:
    t = _Tracker("squarefree count vs sum mu(d) [x/d^2]")
    for x in [1, 10, 100, 999, 1000, 4321, n_max]:
        a, b = table.count_squarefree(x), count_squarefree_identity(x, table.mu)
        t.add(abs(a - b), a == b, f"x={x}: {a} vs {b}")
    return t.result()


def _totient(q_max) -> CheckResult:
    t = _Tracker("totient vs unit group size")
    for q in range(1, q_max + 1):
        a, b = euler_phi(q), unit_group(q).phi
        t.add(abs(a - b), a == b, f"q={q}")
    return t.result()


def _grid(q_max):
    return [(x, q) for x in (10**3, X_MAX) for q in range(1, q_max + 1)]


def _t_cross(table, q_max) -> CheckResult:
    t = _Tracker("T: sum S_a^2 vs convolution")
    for x, q in _grid(q_max):
        a = variance(profile(table, x, q)).T
        b = t_via_convolution(table, x, q)
        t.add(abs(a - b), a == b, f"x={x}, q={q}: {a} vs {b}")
    return t.result()


def _centered(table, q_max) -> CheckResult:
    t = _Tracker("centered variance = T - total^2/phi")
    for x, q in _grid(q_max):
        p = profile(table, x, q)
        mean = Fraction(p.total, p.phi)
        direct = sum((Fraction(int(s)) - mean) ** 2 for s in p.counts)
        rep = variance(p)
        gap = abs(direct - rep.centered_variance)
        t.add(gap, gap == 0, f"x={x}, q={q}")
    return t.result()


def _bridge(table, q_max) -> CheckResult:
    t = _Tracker("character-sum variance bridge")
    for x, q in _grid(q_max):
        cv = float(variance(profile(table, x, q)).centered_variance)
        ch = character_variance(table, q, x, mode="direct")
        rel = abs(ch - cv) / max(cv, 1.0)
        t.add(rel, rel <= 1e-6, f"x={x}, q={q}: {ch} vs {cv}")
    return t.result()


def _orthogonality(q_max) -> CheckResult:
    t = _Tracker("character orthogonality")
    for q in range(1, q_max + 1):
        d = orthogonality_selfcheck(build_group(q))
        t.add(d, d < 1e-9, f"q={q}")
    return t.result()


def _equivalence(table, q_max) -> CheckResult:
    t = _Tracker("V expansion through T")
    for x, q in _grid(q_max):
        p = profile(table, x, q)
        scale = max(1.0, p.phi * p.expected**2)
        rel = equivalence_check(p) / scale
        t.add(rel, rel < 1e-8, f"x={x}, q={q}")
    return t.result()


def _gamma(table, seed) -> CheckResult:
    t = _Tracker("twisted pair counts T_gamma, V_gamma")
    x = X_MAX
    for q in (7, 24, 37, 60):
        p = profile(table, x, q)
        rep = variance(p)
        units = [int(u) for u in p.units]
        specs = ["identity", "inv", f"mul:{units[-1]}", "pow:5", f"random:{seed}"]
        for spec in specs:
            g = ResidueBijection.parse(spec)
            diff = rep.T - t_gamma(p, g)
            vdiff = rep.V - v_gamma(p, g)
            rel = abs(diff - vdiff) / max(1.0, rep.T)
            ok = rel < 1e-8 and 0 <= diff <= 2 * rep.centered_variance
            t.add(rel, ok, f"q={q}, gamma={spec}")
    return t.result()


def _lemma1(threads) -> CheckResult:
    t = _Tracker("primitive solution count <= bound")
    for w, U in [((1, 1, 1), (3, 3, 3)), ((2, -3, 5), (4, 2, 3)), ((0, 1, 0), (2, 2, 2)), ((7, 0, 3), (5, 5, 5))]:
        a = count_primitive_solutions(LinearFormInstance(w, U))
        b = brute_force_primitive_count(w, U)
        t.add(abs(a - b), a == b, f"w={w}, U={U}: kernel {a} vs loop {b}")
    sweep = lemma1_sweep(wmax=5, umax=5, threads=threads)
    t.cases += sweep.instances
    t.defect = max(t.defect, sweep.worst_ratio)
    if sweep.violations and t.failure is None:
        t.failure = f"w, U = {sweep.violations[0]}"
    return t.result()


def _lemma2(rng) -> CheckResult:
    t = _Tracker("congruence count: direct vs bucketed")
    for _ in range(100):
        q = int(rng.integers(1, Q_MAX + 1))
        units = [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
        a1, a2 = (int(units[i]) for i in rng.integers(0, len(units), 2))
        V1, V2 = (float(v) for v in rng.uniform(1, 200, 2))
        a, b = n_direct(V1, V2, q, a1, a2), n_bucketed(V1, V2, q, a1, a2)
        t.add(abs(a - b), a == b, f"q={q}, a=({a1},{a2}), V=({V1:.3f},{V2:.3f})")
    return t.result()


def _m_quantity(rng) -> CheckResult:
    t = _Tracker("M: fast vs naive, symmetry")
    for q in (1, 2, 6, 9, 16, 21, 30):
        units = [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
        for _ in range(3):
            a1, a2 = (int(units[i]) for i in rng.integers(0, len(units), 2))
            fast, naive, swap = m_quantity(q, a1, a2), m_quantity_naive(q, a1, a2), m_quantity(q, a2, a1)
            gap = max(abs(fast - naive), abs(fast - swap))
            t.add(gap, gap == 0 and fast >= 0, f"q={q}, a=({a1},{a2})")
    return t.result()


def run_selfcheck(table: MobiusTable | None = None, threads: int = 1, seed: int = 0) -> list[CheckResult]:
    """Run every check; ``table`` defaults to a fresh sieve to 10^4."""
    table = sieve_mobius(X_MAX) if table is None else table
    rng = np.random.default_rng(seed)
    return [
        _divisor_sum(table, X_MAX),
        _multiplicative(table, X_MAX, rng),
        _squarefree_count(table, X_MAX),
        _totient(10**4),
        _t_cross(table, Q_MAX),
        _centered(table, Q_MAX),
        _bridge(table, Q_MAX),
        _orthogonality(Q_MAX),
        _equivalence(table, Q_MAX),
        _gamma(table, seed),
        _lemma1(threads),
        _lemma2(rng),
        _m_quantity(rng),
    ]
