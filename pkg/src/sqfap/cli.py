"""Command-line entry point.

Exit status: 0 success, 1 identity or assertion failure, 2 usage error.
Options may also come from ``--config FILE`` (``key = value`` lines); flags
given on the command line win over the file, which wins over defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from ._backend import BACKEND
from .arith import MobiusTable, sieve_mobius
from .errors import CapacityError, DomainError

COMMANDS = ("sieve", "profile", "variance", "characters", "lemma1", "lemma2", "lemma3", "gamma", "sweep", "fit", "selfcheck")
_NEEDS_XQ = ("profile", "variance", "characters", "gamma")


@dataclass
class RunConfig:
    command: str
    x: int | None = None
    q: int | None = None
    q_grid: list = field(default_factory=list)
    x_values: list = field(default_factory=list)
    eps: float = 0.05
    seed: int = 0
    threads: int = 1
    out: str | None = None
    format: str = "csv"
    deterministic: bool = False
    gamma: str = "identity"
    mode: str = "vary-q"
    w: tuple | None = None
    U: tuple | None = None
    V1: float | None = None
    V2: float | None = None
    a1: int = 1
    a2: int = 1
    F1: float = 0.5
    F2: float = 0.5
    corrupt_mu: int | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _int(text: str) -> int:
    """Integer, also accepting forms like 1e6 or 10**6."""
    text = text.strip()
    try:
        if "**" in text:
            b, e = text.split("**")
            return int(b) ** int(e)
        if "e" in text.lower():
            v = float(text)
            if v != int(v):
                raise ValueError
            return int(v)
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _triple(conv):
    def parse(text):
        parts = text.split(",")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
        return tuple(conv(p) for p in parts)

    return parse


def _int_list(text):
    return [_int(p) for p in text.split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sqfap", description="Squarefree integers in arithmetic progressions.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--x", type=_int, help="upper end of the range n <= x (1e6 and 10**6 accepted)")
    p.add_argument("--q", type=_int, help="modulus")
    p.add_argument("--q-min", type=_int, help="smallest q of a log-spaced grid")
    p.add_argument("--q-max", type=_int, help="largest q of a log-spaced grid")
    p.add_argument("--q-steps", type=_int, help="grid points (default 16)")
    p.add_argument("--x-values", type=_int_list, help="comma list of x for vary-x fits")
    p.add_argument("--eps", type=float, default=0.05, help="exponent slack in the exceedance thresholds, in (0, 1/4)")
    p.add_argument("--seed", type=_int, default=0, help="seed for every random choice")
    p.add_argument("--threads", type=_int, default=1, help="worker threads; output does not depend on it")
    p.add_argument("--out", help="write the machine-readable result here")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--deterministic", action="store_true", help="omit the timestamp from report metadata")
    p.add_argument("--gamma", default="identity", help="identity | mul:c | inv | pow:k | random[:seed]")
    p.add_argument("--mode", choices=("vary-q", "vary-x", "joint"), default="vary-q")
    p.add_argument("--w", type=_triple(int), help="lemma1: w0,w1,w2")
    p.add_argument("--U", type=_triple(float), help="lemma1: U0,U1,U2")
    p.add_argument("--V1", type=float)
    p.add_argument("--V2", type=float)
    p.add_argument("--a1", type=_int, default=1)
    p.add_argument("--a2", type=_int, default=1)
    p.add_argument("--F1", type=float, default=0.5)
    p.add_argument("--F2", type=float, default=0.5)
    p.add_argument("--corrupt-mu", type=_int, help=argparse.SUPPRESS)
    return p


def _read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def parse_args(argv=None) -> RunConfig:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = _read_config(args.config)
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
        known = {a.dest: a for a in parser._actions}
        defaults = {}
        for k, v in cfg.items():
            if k not in known or k in ("command", "config"):
                parser.error(f"unknown config key {k!r}")
            act = known[k]
            if isinstance(act, argparse._StoreTrueAction):
                defaults[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    defaults[k] = act.type(v) if act.type else v
                except (argparse.ArgumentTypeError, ValueError):
                    parser.error(f"bad value for {k}: {v!r}")
        parser.set_defaults(**defaults)
        args = parser.parse_args(argv)

    if args.x is not None and args.x < 1:
        parser.error("--x must be >= 1")
    if args.q is not None and args.q < 1:
        parser.error("--q must be >= 1")
    if not 0 < args.eps < 0.25:
        parser.error("--eps must lie in (0, 1/4)")
    if args.threads < 1:
        parser.error("--threads must be >= 1")

    q_grid = []
    if args.q_min is not None or args.q_max is not None:
        if args.q_min is None or args.q_max is None:
            parser.error("--q-min and --q-max go together")
        if not 1 <= args.q_min <= args.q_max:
            parser.error("need 1 <= --q-min <= --q-max")
        from .experiments import log_spaced

        q_grid = log_spaced(args.q_min, args.q_max, args.q_steps or 16)
    elif args.q_steps is not None:
        parser.error("--q-steps needs --q-min and --q-max")

    cmd = args.command
    if cmd in _NEEDS_XQ:
        if args.x is None or args.q is None:
            parser.error(f"{cmd} needs --x and --q")
        if args.q > args.x:
            parser.error(f"q={args.q} exceeds x={args.x}")
    if cmd in ("sweep", "fit"):
        if args.x is not None and any(q > args.x for q in q_grid + ([args.q] if args.q else [])):
            parser.error("grid contains q > x")
        if args.x_values and args.q is None and cmd == "fit" and args.mode == "vary-x":
            parser.error("vary-x fit needs --q")
    if cmd == "sieve" and args.x is None:
        parser.error("sieve needs --x")
    if cmd == "lemma2" and (args.q is None or args.V1 is None or args.V2 is None):
        parser.error("lemma2 needs --q, --V1, --V2")
    if cmd == "lemma3" and args.q is None and not q_grid:
        parser.error("lemma3 needs --q or a q grid")
    if cmd == "gamma":
        from .progressions import ResidueBijection

        try:
            ResidueBijection.parse(args.gamma, args.seed)
        except DomainError as exc:
            parser.error(str(exc))
    if (args.w is None) != (args.U is None):
        parser.error("--w and --U go together")

    return RunConfig(
        command=cmd,
        x=args.x,
        q=args.q,
        q_grid=q_grid,
        x_values=args.x_values or [],
        eps=args.eps,
        seed=args.seed,
        threads=args.threads,
        out=args.out,
        format=args.format,
        deterministic=args.deterministic,
        gamma=args.gamma,
        mode=args.mode,
        w=args.w,
        U=args.U,
        V1=args.V1,
        V2=args.V2,
        a1=args.a1,
        a2=args.a2,
        F1=args.F1,
        F2=args.F2,
        corrupt_mu=args.corrupt_mu,
    )


def _emit(obj, cfg: RunConfig) -> None:
    text = json.dumps(obj, indent=1, default=_json_default) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _json_default(v):
    if isinstance(v, Fraction):
        return [v.numerator, v.denominator]
    if hasattr(v, "item"):
        return v.item()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _frac(v: Fraction) -> dict:
    return {"exact": f"{v.numerator}/{v.denominator}", "value": float(v)}


def _cmd_sieve(cfg):
    table = sieve_mobius(cfg.x)
    if cfg.out:
        table.save(cfg.out)
    sys.stdout.write(json.dumps({"limit": cfg.x, "squarefree": table.count_squarefree(), "backend": BACKEND}) + "\n")
    return 0


def _cmd_profile(cfg):
    from .progressions import profile

    p = profile(sieve_mobius(cfg.x), cfg.x, cfg.q)
    _emit({"x": p.x, "q": p.q, "phi": p.phi, "c_q": p.c_q, "total": p.total,
           "counts": {str(a): s for a, s in p.counts_by_residue.items()}}, cfg)
    return 0


def _cmd_variance(cfg):
    from .progressions import equivalence_check, profile, variance

    p = profile(sieve_mobius(cfg.x), cfg.x, cfg.q)
    d = variance(p).to_dict()
    d["c_q"] = p.c_q
    d["equivalence_defect"] = equivalence_check(p)
    _emit(d, cfg)
    return 0


def _cmd_characters(cfg):
    from .characters import build_group, character_variance, orthogonality_selfcheck
    from .progressions import profile, variance

    table = sieve_mobius(cfg.x)
    g = build_group(cfg.q)
    cv = variance(profile(table, cfg.x, cfg.q)).centered_variance
    ch = character_variance(table, cfg.q, cfg.x, group=g)
    rel = abs(ch - float(cv)) / max(float(cv), 1.0)
    _emit({"x": cfg.x, "q": cfg.q, "orders": list(g.orders), "generators": list(g.generators),
           "character_variance": ch, "centered_variance": _frac(cv), "relative_defect": rel,
           "orthogonality_defect": orthogonality_selfcheck(g, seed=cfg.seed)}, cfg)
    return 0 if rel <= 1e-6 else 1


def _cmd_lemma1(cfg):
    from .lemmas import LinearFormInstance, count_primitive_solutions, lemma1_bound, lemma1_sweep

    if cfg.w is not None:
        inst = LinearFormInstance(cfg.w, cfg.U)
        n, b = count_primitive_solutions(inst), lemma1_bound(inst)
        _emit({"w": list(inst.w), "U": list(inst.U), "count": n, "bound": b, "holds": n <= b}, cfg)
        return 0 if n <= b else 1
    s = lemma1_sweep(threads=cfg.threads)
    _emit({"instances": s.instances, "violations": len(s.violations), "worst_ratio": s.worst_ratio,
           "worst_instance": [list(s.worst_instance[0]), list(s.worst_instance[1])]}, cfg)
    return 0 if not s.violations else 1


def _cmd_lemma2(cfg):
    from .lemmas import congruence_count

    c = congruence_count(cfg.V1, cfg.V2, cfg.q, cfg.a1, cfg.a2)
    _emit({"V1": c.V1, "V2": c.V2, "q": c.q, "a1": c.a1, "a2": c.a2, "N": c.N,
           "N_star": _frac(c.N_star), "M": _frac(c.M)}, cfg)
    return 0


def _cmd_lemma3(cfg):
    from .lemmas import lemma3_average

    out = []
    for q in cfg.q_grid or [cfg.q]:
        r = lemma3_average(q, cfg.F1, cfg.F2)
        out.append({"q": q, "F1": r.F1, "F2": r.F2, "terms": r.terms, "sum": float(r.total),
                    "envelope": r.envelope, "ratio": r.ratio})
    _emit(out if len(out) > 1 else out[0], cfg)
    return 0


def _cmd_gamma(cfg):
    from .progressions import ResidueBijection, profile, t_gamma, v_gamma, variance

    p = profile(sieve_mobius(cfg.x), cfg.x, cfg.q)
    g = ResidueBijection.parse(cfg.gamma, cfg.seed)
    rep = variance(p)
    tg, vg = t_gamma(p, g), v_gamma(p, g)
    defect = abs((rep.T - tg) - (rep.V - vg))
    ok = 0 <= rep.T - tg <= 2 * rep.centered_variance and defect <= 1e-8 * max(1.0, rep.T)
    _emit({"x": cfg.x, "q": cfg.q, "gamma": repr(g), "T": rep.T, "T_gamma": tg, "V": rep.V, "V_gamma": vg,
           "defect": defect, "relations_hold": ok}, cfg)
    return 0 if ok else 1


def _sweep_rows(cfg):
    from .experiments import DEFAULT_XS, default_q_grid, default_sweep, sweep

    if cfg.x_values:
        xs = cfg.x_values
        table = sieve_mobius(max(xs))
        qs = [cfg.q] if cfg.q else None
        rows = []
        for x in xs:
            rows.extend(sweep(table, x, qs or cfg.q_grid or default_q_grid(x), cfg.eps, cfg.threads))
        return rows
    if cfg.x is None:
        return default_sweep(sieve_mobius(max(DEFAULT_XS)), cfg.eps, cfg.threads)
    qs = cfg.q_grid or ([cfg.q] if cfg.q else default_q_grid(cfg.x))
    return sweep(sieve_mobius(cfg.x), cfg.x, qs, cfg.eps, cfg.threads)


def _write_rows(cfg, rows, fit=None):
    from .experiments import report, report_meta

    meta = report_meta(cfg.eps, cfg.seed, cfg.deterministic)
    text = report(rows, fit, fmt=cfg.format, path=cfg.out, meta=meta)
    if cfg.out:
        sys.stdout.write(f"wrote {len(rows)} rows to {cfg.out}\n")
    else:
        sys.stdout.write(text)


def _cmd_sweep(cfg):
    rows = _sweep_rows(cfg)
    _write_rows(cfg, rows)
    bad = [r for r in rows if r.moment1 > math.sqrt(r.phi * r.V) * (1 + 1e-10)]
    return 1 if bad else 0


def _cmd_fit(cfg):
    from .experiments import fit_exponents

    rows = _sweep_rows(cfg)
    mode = "vary-x" if cfg.x_values and cfg.q else cfg.mode
    fit = fit_exponents(rows, mode)
    if cfg.format == "json" or cfg.out:
        _write_rows(cfg, rows, fit)
    norm = fit_exponents(rows, mode, phi_normalised=True)
    sys.stdout.write(json.dumps({"mode": fit.mode, "alpha": fit.alpha, "beta": fit.beta, "C": fit.C,
                                 "residual": fit.residual, "n_points": fit.n_points,
                                 "phi_normalised": {"alpha": norm.alpha, "beta": norm.beta,
                                                    "residual": norm.residual}}) + "\n")
    return 0


def _cmd_selfcheck(cfg):
    from .selfcheck import X_MAX, run_selfcheck

    table = sieve_mobius(X_MAX)
    if cfg.corrupt_mu is not None:
        mu = table.mu.copy()
        n = cfg.corrupt_mu
        mu[n] = 1 if mu[n] != 1 else -1
        table = MobiusTable(table.limit, mu)
    results = run_selfcheck(table, threads=cfg.threads, seed=cfg.seed)
    lines = [r.line() for r in results]
    failed = sum(not r.ok for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} identities hold")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    return 1 if failed else 0


_HANDLERS = {name: globals()[f"_cmd_{name}"] for name in COMMANDS}


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[cfg.command](cfg)
    except (DomainError, CapacityError) as exc:
        sys.stderr.write(f"sqfap: error: {exc}\n")
        return 2
