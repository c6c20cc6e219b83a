"""Command line front end.

    wittsums run config.json [--out report.json] [--plot polygons.svg]
                             [--k-max N] [--precision T] [--guard G]
    wittsums gh-grid --p-list 2,3,5 --a-max 2 --m-max 2 --out grid.csv

Exit status: 0 when every requested check passes, 2 when a check fails,
1 for usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

from sympy import isprime

from .errors import ConfigError, NotFullDimensional, WittSumsError
from .ff import FieldCtx, build_field
from .polytope import build_delta, nondegeneracy_check
from .witt import WittInput

SCHEMA_VERSION = 1
ALL_TASKS = ("sums", "lfunction", "newton", "hodge", "hodge_bound", "closed_form", "trace_formula", "splitting",
             "nondegeneracy")


@dataclass
class JobConfig:
    p: int
    a: int
    m: int
    n: int
    terms: list
    s: list
    modulus: Optional[list] = None
    tasks: list = field(default_factory=lambda: ["sums", "lfunction", "newton", "hodge", "hodge_bound"])
    k_max: Optional[int] = None
    guard: int = 2
    precision: Optional[int] = None
    R: int = 2
    T_check: int = 6
    report: Optional[str] = None
    plot: Optional[str] = None

    def echo(self) -> dict:
        return {
            "p": self.p, "a": self.a, "m": self.m, "n": self.n,
            "modulus": self.modulus, "terms": self.terms, "s": self.s,
            "tasks": self.tasks, "k_max": self.k_max, "guard": self.guard,
            "precision": self.precision, "R": self.R, "T_check": self.T_check,
        }


def _req_int(d: dict, key: str, lo: Optional[int] = None) -> int:
    if key not in d:
        raise ConfigError(key, "missing")
    v = d[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(key, f"must be >= {lo}")
    return v


def _opt_int(d: dict, key: str, default, lo: int = 0):
    if d.get(key) is None:
        return default
    return _req_int(d, key, lo)


def parse_config(d: dict) -> JobConfig:
    if not isinstance(d, dict):
        raise ConfigError("$", "config must be a JSON object")
    p = _req_int(d, "p", 2)
    if not isprime(p):
        raise ConfigError("p", f"{p} is not prime")
    a = _req_int(d, "a", 1)
    m = _req_int(d, "m", 1)
    terms = d.get("terms")
    if not isinstance(terms, list) or not terms:
        raise ConfigError("terms", "expected a nonempty list")
    n = _opt_int(d, "n", None, 1)
    if n is None:
        first = terms[0].get("u") if isinstance(terms[0], dict) else None
        n = len(first) if isinstance(first, list) else 1
    q = p**a
    s = d.get("s", [0] * n)
    if isinstance(s, int):
        s = [s]
    if not isinstance(s, list) or len(s) != n:
        raise ConfigError("s", f"expected a list of {n} integers")
    for j, v in enumerate(s):
        if not isinstance(v, int) or not 0 <= v <= q - 2:
            raise ConfigError("s" if n == 1 else f"s[{j}]", f"{v!r} outside [0, {q - 2}]")
    for idx, t in enumerate(terms):
        path = f"terms[{idx}]"
        if not isinstance(t, dict):
            raise ConfigError(path, "expected an object")
        lvl = t.get("level", 0)
        if not isinstance(lvl, int) or not 0 <= lvl < m:
            raise ConfigError(path + ".level", f"must lie in [0, {m - 1}]")
        u = t.get("u")
        if not isinstance(u, list) or len(u) != n or not all(isinstance(x, int) for x in u):
            raise ConfigError(path + ".u", f"expected {n} integers")
        if "coeff" not in t:
            raise ConfigError(path + ".coeff", "missing")
    if not any(t.get("level", 0) == 0 for t in terms):
        raise ConfigError("terms", "at least one level-0 term is required")
    tasks = d.get("tasks", ["sums", "lfunction", "newton", "hodge", "hodge_bound"])
    if not isinstance(tasks, list) or any(t not in ALL_TASKS for t in tasks):
        raise ConfigError("tasks", f"tasks must be drawn from {list(ALL_TASKS)}")
    out = d.get("output", {}) or {}
    return JobConfig(
        p=p, a=a, m=m, n=n, terms=terms, s=list(s),
        modulus=d.get("modulus"),
        tasks=list(tasks),
        k_max=_opt_int(d, "k_max", None, 1),
        guard=_opt_int(d, "guard", 2, 0),
        precision=_opt_int(d, "precision", None, 1),
        R=_opt_int(d, "R", 2, 0),
        T_check=_opt_int(d, "T_check", 6, 1),
        report=out.get("report"),
        plot=out.get("plot"),
    )


def parse_coeff(c, field: FieldCtx, path: str):
    if isinstance(c, str):
        c = c.strip()
        if c.startswith("g^"):
            try:
                return field.elem(int(c[2:]))
            except ValueError:
                raise ConfigError(path, f"bad exponent in {c!r}") from None
        raise ConfigError(path, f"coefficient {c!r} is not of the form g^e")
    if isinstance(c, int):
        v = field.from_int(c)
    elif isinstance(c, list) and all(isinstance(x, int) for x in c):
        v = field.from_vector(c)
    else:
        raise ConfigError(path, f"cannot read coefficient {c!r}")
    if v.is_zero():
        raise ConfigError(path, "coefficient is zero")
    return v


def build_input(cfg: JobConfig) -> WittInput:
    try:
        field = build_field(cfg.p, cfg.a, tuple(cfg.modulus) if cfg.modulus else None)
    except WittSumsError as exc:
        raise ConfigError("modulus", str(exc)) from None
    terms = []
    for idx, t in enumerate(cfg.terms):
        coeff = parse_coeff(t["coeff"], field, f"terms[{idx}].coeff")
        terms.append((t.get("level", 0), tuple(t["u"]), coeff))
    try:
        return WittInput.build(field, cfg.m, terms)
    except ValueError as exc:
        raise ConfigError("terms", str(exc)) from None


def run_job(cfg: JobConfig) -> tuple[dict, int, dict]:
    """Execute the tasks; returns (report, exit code, polygons to plot)."""
    from . import dwork, gh, lfunc

    f = build_input(cfg)
    s = tuple(cfg.s)
    tasks = set(cfg.tasks)
    out: dict = {}
    checks: dict = {}
    timings: dict = {}
    polygons: dict = {}
    exit_code = 0

    def timed(name, fn):
        t0 = time.perf_counter()
        val = fn()
        timings[name] = round(time.perf_counter() - t0, 4)
        return val

    try:
        nd = timed("build_delta", lambda: build_delta(f))
    except NotFullDimensional:
        red = timed("reduction", lambda: lfunc.reduction_check(f, s))
        checks["reduction"] = {k: v for k, v in red.items() if k != "reduction"}
        if not red["ok"]:
            exit_code = 2
        if not red["residual_trivial"]:
            out["lfunction"] = {"note": "residual character is nontrivial, every S_k vanishes",
                                "coeffs": [], "degree": 0}
            out["checks"] = checks
            report = {"schema_version": SCHEMA_VERSION, "config": cfg.echo(), "tasks": out,
                      "timings": timings}
            return report, exit_code, polygons
        f = red["reduction"].f
        s = red["reduction"].s
        nd = build_delta(f)
        out["reduced"] = {"n": f.n, "terms": [[t.level, list(t.u), repr(t.coeff)] for t in f.terms],
                          "s": list(s)}
    out["delta"] = nd.to_json()

    if "nondegeneracy" in tasks:
        v = timed("nondegeneracy", lambda: nondegeneracy_check(f, nd, cfg.R))
        checks["nondegeneracy"] = v.to_json()

    need_l = tasks & {"lfunction", "newton", "hodge", "hodge_bound", "closed_form"}
    result = None
    if need_l:
        result = timed("lfunction", lambda: lfunc.compute_lfunction(
            f, s, guard=cfg.guard, k_max=cfg.k_max, T=cfg.precision, nd=nd))
        out["sums"] = [{"k": k + 1, "S": x.to_json()} for k, x in enumerate(result.S)]
        out["lfunction"] = {
            "coeffs": [c.to_json() for c in result.coeffs],
            "degree": result.degree_claimed,
            "polynomiality": result.polynomiality.to_json(),
            "integral": result.integral,
            "precision": result.precision,
        }
        out["newton"] = {"vertices": result.newton.to_json()}
        out["hodge"] = {"vertices": result.hodge.to_json(),
                        "poly": [str(c) for c in result.hodge_poly]}
        polygons = {"Newton": result.newton, "Hodge": result.hodge}
        if not result.polynomiality.ok:
            exit_code = 2
    elif "sums" in tasks:
        K = cfg.k_max or nd.volume_deg + cfg.guard
        S = timed("sums", lambda: [lfunc.exp_sum(f, s, k) for k in range(1, K + 1)])
        out["sums"] = [{"k": k + 1, "S": x.to_json()} for k, x in enumerate(S)]

    if "hodge_bound" in tasks and result is not None:
        rep = lfunc.hodge_bound_check(f, s, result)
        checks["hodge_bound"] = rep.to_json()
        if not rep.ok:
            exit_code = 2
    if "closed_form" in tasks and result is not None:
        if gh.is_gh_shape(f):
            rep = gh.closed_form_check(f, s[0], result.newton)
            checks["closed_form"] = rep.to_json()
            polygons["closed form"] = rep.predicted
            if not rep.ok:
                exit_code = 2
        else:
            checks["closed_form"] = {"ok": None, "note": "input is not of Gauss-Heilbronn shape"}
    if "trace_formula" in tasks:
        rows = []
        ok = True
        for k in (1, 2):
            r = timed(f"trace_formula_k{k}", lambda k=k: dwork.trace_formula_check(f, s, k, cfg.T_check))
            rows += r.rows
            ok &= r.ok
        checks["trace_formula"] = {"ok": ok, "rows": rows}
        if not ok:
            exit_code = 2
    if "splitting" in tasks:
        rows = []
        ok = True
        for k in (1, 2):
            r = timed(f"splitting_k{k}", lambda k=k: dwork.splitting_check(f, k, T_check=cfg.T_check))
            rows += r.rows
            ok &= r.ok
        checks["splitting"] = {"ok": ok, "points": len(rows), "failures": [r for r in rows if not r["ok"]]}
        if not ok:
            exit_code = 2

    out["checks"] = checks
    report = {"schema_version": SCHEMA_VERSION, "config": cfg.echo(), "tasks": out, "timings": timings}
    return report, exit_code, polygons


def _cmd_run(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        if isinstance(raw, dict):
            for key, val in (("k_max", args.k_max), ("precision", args.precision), ("guard", args.guard)):
                if val is not None:
                    raw[key] = val
        cfg = parse_config(raw)
        if args.out:
            cfg.report = args.out
        if args.plot:
            cfg.plot = args.plot
        report, code, polygons = run_job(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(report, indent=2, sort_keys=False)
    if cfg.report:
        with open(cfg.report, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if cfg.plot and polygons:
        from .plot import write_plot

        write_plot(cfg.plot, polygons)
    return code


def _cmd_gh_grid(args) -> int:
    from .gh import gh_grid, grid_csv

    try:
        primes = [int(x) for x in args.p_list.split(",") if x.strip()]
    except ValueError:
        print("error: --p-list must be comma-separated integers", file=sys.stderr)
        return 1
    bad = [p for p in primes if not isprime(p)]
    if bad or args.a_max < 1 or args.m_max < 1:
        print(f"error: invalid grid parameters (non-primes: {bad})", file=sys.stderr)
        return 1
    rows = gh_grid(primes, args.a_max, args.m_max, max_field=args.max_field)
    text = grid_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 2 if any(r["verdict"] == "mismatch" for r in rows) else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wittsums", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run the tasks of a JSON job description")
    r.add_argument("config")
    r.add_argument("--out")
    r.add_argument("--plot")
    r.add_argument("--k-max", type=int)
    r.add_argument("--precision", type=int)
    r.add_argument("--guard", type=int)
    r.set_defaults(func=_cmd_run)
    g = sub.add_parser("gh-grid", help="compare Gauss-Heilbronn polygons with the closed form")
    g.add_argument("--p-list", default="2,3,5")
    g.add_argument("--a-max", type=int, default=2)
    g.add_argument("--m-max", type=int, default=2)
    g.add_argument("--max-field", type=int, default=100_000,
                   help="skip instances needing fields larger than this")
    g.add_argument("--out")
    g.set_defaults(func=_cmd_gh_grid)
    return ap


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
