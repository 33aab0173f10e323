"""Grid sweeps over (x, q), bound envelopes, exponent fits and report output."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .arith import MobiusTable
from .errors import DomainError
from .progressions import profile, variance

COLUMNS = (
    "x", "q", "phi", "V", "centered_variance", "T", "thm1_env", "blomer_env", "hooley_env",
    "mn_ratio", "moment1", "moment1_env", "exceed_c1", "exceed_c2", "exceed_c3", "in_range_c3",
)

DEFAULT_EPS = 0.05


@dataclass(frozen=True)
class SweepRow:
    x: int
    q: int
    phi: int
    V: float
    centered_variance: float
    T: int
    thm1_env: float
    blomer_env: float
    hooley_env: float
    mn_ratio: float
    moment1: float
    moment1_env: float
    exceed_c1: float
    exceed_c2: float
    exceed_c3: float
    in_range_c3: bool


@dataclass(frozen=True)
class FitResult:
    alpha: float | None
    beta: float | None
    C: float
    residual: float
    n_points: int
    mode: str


def envelopes(x: int, q: int) -> dict:
    """Bound shapes with their x^eps factors and implied constants dropped."""
    return {
        "thm1_env": math.sqrt(x * q) + x / math.sqrt(q),
        "blomer_env": x + min(x ** (5 / 3) / q, q * q),
        "hooley_env": math.sqrt(x / q) + math.sqrt(q),
        "moment1_env": x**0.25 * q**0.75 + x**0.5 * q**0.25,
    }


def exceedance_thresholds(x: int, q: int, eps: float) -> tuple:
    """Thresholds on |E| for the three density statements, in order."""
    return (
        (x / q) ** 0.25 * x**eps,
        x ** (0.5 + eps) / q**0.75,
        x ** (0.25 + eps) * q**0.25,
    )


def in_range_c3(x: int, q: int) -> bool:
    """x^(1/4) <= q <= x^(1/3), decided in integers."""
    return q**4 >= x and q**3 <= x


def sweep_row(table: MobiusTable, x: int, q: int, eps: float = DEFAULT_EPS) -> SweepRow:
    if q > x:
        raise DomainError(f"q={q} exceeds x={x}")
    p = profile(table, x, q)
    rep = variance(p)
    absE = np.abs(p.errors())
    env = envelopes(x, q)
    fractions = [float(np.count_nonzero(absE > t)) / p.phi for t in exceedance_thresholds(x, q, eps)]
    return SweepRow(
        x=x,
        q=q,
        phi=p.phi,
        V=rep.V,
        centered_variance=float(rep.centered_variance),
        T=rep.T,
        thm1_env=env["thm1_env"],
        blomer_env=env["blomer_env"],
        hooley_env=env["hooley_env"],
        mn_ratio=rep.V / math.sqrt(x * q),
        moment1=math.fsum(absE.tolist()),
        moment1_env=env["moment1_env"],
        exceed_c1=fractions[0],
        exceed_c2=fractions[1],
        exceed_c3=fractions[2],
        in_range_c3=in_range_c3(x, q),
    )


def sweep(table: MobiusTable, x: int, q_list, eps: float = DEFAULT_EPS, threads: int = 1) -> list[SweepRow]:
    """One row per q, in input order regardless of ``threads``."""
    if not 0 < eps < 0.25:
        raise DomainError(f"eps must lie in (0, 1/4), got {eps}")
    q_list = [int(q) for q in q_list]
    for q in q_list:
        if q < 1 or q > x:
            raise DomainError(f"q={q} outside 1..x={x}")
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(lambda q: sweep_row(table, x, q, eps), q_list))
    return [sweep_row(table, x, q, eps) for q in q_list]


def log_spaced(lo: float, hi: float, steps: int) -> list[int]:
    """``steps`` integers rounded from a geometric grid on [lo, hi], deduplicated."""
    if steps < 2:
        return [int(round(lo))]
    a, b = math.log10(lo), math.log10(hi)
    out = []
    for k in range(steps):
        v = int(round(10 ** (a + (b - a) * k / (steps - 1))))
        if not out or v != out[-1]:
            out.append(v)
    return out


def default_q_grid(x: int, per_decade: int = 16, lo_exp: float = 0.3) -> list[int]:
    """q log-spaced at ``per_decade`` points per decade over [x^lo_exp, x]."""
    a, b = lo_exp * math.log10(x), math.log10(x)
    steps = max(2, math.ceil((b - a) * per_decade) + 1)
    return [min(q, x) for q in log_spaced(10**a, x, steps)]


DEFAULT_XS = (10**5, 10**6)


def default_sweep(table: MobiusTable, eps: float = DEFAULT_EPS, threads: int = 1, xs=DEFAULT_XS) -> list[SweepRow]:
    rows = []
    for x in xs:
        rows.extend(sweep(table, x, default_q_grid(x), eps, threads))
    return rows


def fit_exponents(rows, mode: str = "vary-q", *, phi_normalised: bool = False) -> FitResult:
    """Least squares for log V = log C + beta log q (``vary-q``), + alpha log x
    (``vary-x``), or both (``joint``).

    With ``phi_normalised`` the response is V * q / phi(q), which removes the
    swing of V between moduli with and without small prime factors.
    """
    if mode not in ("vary-q", "vary-x", "joint"):
        raise ValueError(f"unknown fit mode {mode!r}")
    usable = [r for r in rows if r.V > 0]
    if len(usable) < len(rows):
        warnings.warn(f"dropped {len(rows) - len(usable)} rows with V = 0", stacklevel=2)
    if len(usable) < 3:
        raise DomainError(f"need at least 3 rows with V > 0, got {len(usable)}")
    y = np.log([r.V * r.q / r.phi if phi_normalised else r.V for r in usable])
    cols = [np.ones(len(usable))]
    if mode in ("vary-x", "joint"):
        cols.append(np.log([float(r.x) for r in usable]))
    if mode in ("vary-q", "joint"):
        cols.append(np.log([float(r.q) for r in usable]))
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    alpha = beta = None
    if mode == "vary-x":
        alpha = float(coef[1])
    elif mode == "vary-q":
        beta = float(coef[1])
    else:
        alpha, beta = float(coef[1]), float(coef[2])
    return FitResult(alpha, beta, float(math.exp(coef[0])), float(math.sqrt(np.mean(resid**2))), len(usable), mode)


# ---------------------------------------------------------------- output


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return format(float(v), ".12g")


def _num(v):
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(format(float(v), ".12g"))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        d = asdict(r)
        w.writerow([_fmt(d[c]) for c in COLUMNS])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[SweepRow]:
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        kw = {}
        for c in COLUMNS:
            v = rec[c]
            if c in ("x", "q", "phi", "T"):
                kw[c] = int(v)
            elif c == "in_range_c3":
                kw[c] = v == "true"
            else:
                kw[c] = float(v)
        out.append(SweepRow(**kw))
    return out


def report_meta(eps: float, seed: int = 0, deterministic: bool = True) -> dict:
    meta = {"tool": "sqfap", "version": __version__, "seed": seed, "eps": eps}
    if not deterministic:
        from datetime import datetime, timezone

        meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def rows_to_json(rows, fit: FitResult | None = None, meta: dict | None = None) -> str:
    doc = {
        "meta": meta if meta is not None else report_meta(DEFAULT_EPS),
        "rows": [{c: _num(asdict(r)[c]) for c in COLUMNS} for r in rows],
    }
    if fit is not None:
        doc["fit"] = {k: _num(v) for k, v in asdict(fit).items()}
    return json.dumps(doc, indent=1) + "\n"


def report(rows, fit: FitResult | None = None, *, fmt: str = "csv", path=None, meta: dict | None = None) -> str:
    """Serialise rows as CSV or JSON; write to ``path`` when given."""
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "json":
        text = rows_to_json(rows, fit, meta)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc
    return text


_NUMBER = {"type": "number"}
_INTEGER = {"type": "integer"}
_FRACTION = {"type": "number", "minimum": 0, "maximum": 1}

ROW_SCHEMA = {
    "type": "object",
    "required": list(COLUMNS),
    "additionalProperties": False,
    "properties": {
        **{c: _INTEGER for c in ("x", "q", "phi", "T")},
        **{c: _NUMBER for c in ("V", "centered_variance", "mn_ratio", "moment1")},
        **{c: {"type": "number", "exclusiveMinimum": 0} for c in ("thm1_env", "blomer_env", "hooley_env", "moment1_env")},
        **{c: _FRACTION for c in ("exceed_c1", "exceed_c2", "exceed_c3")},
        "in_range_c3": {"type": "boolean"},
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["meta", "rows"],
    "properties": {
        "meta": {
            "type": "object",
            "required": ["tool", "version", "seed", "eps"],
            "properties": {"timestamp": {"type": "string"}},
        },
        "rows": {"type": "array", "items": ROW_SCHEMA},
        "fit": {
            "type": "object",
            "required": ["alpha", "beta", "C", "residual", "n_points", "mode"],
        },
    },
}
