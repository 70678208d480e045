"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 domain/usage error,
3 quadrature did not converge, 4 volume routes disagree.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

import mpmath as mp

from . import __version__
from .cache import ResultCache, atomic_write_text
from .errors import DomainError, NonConvergence, SimplexLabError
from .hiprec import PiMultiple, digits_for_tol
from .orbit import explore
from .ratlab import SCHEMA, band_rationals, f_decimal, scan
from .simplex import dihedral_to_edge, make_vertices
from .verify import run as run_verify
from .volume import mc_volume, vol_by_ode, vol_closed_form, vol_form8

EXIT_VERIFY = 1
EXIT_DOMAIN = 2
EXIT_NONCONV = 3
EXIT_DISAGREE = 4


@dataclass
class Config:
    precision_digits: int = 80
    tolerance: str = "1e-60"
    schlafli_coefficient: int = 3
    max_den: int = 10 ** 8
    cache_dir: str = ".simplexlab-cache"
    extended: bool = False
    mc_seed: int = 1

    def validate(self) -> None:
        if self.precision_digits < 30:
            raise DomainError("precision_digits must be >= 30")
        if self.schlafli_coefficient not in (3, 6):
            raise DomainError("schlafli_coefficient must be 3 or 6")
        digits_for_tol(self.tolerance)


_BOOL = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def load_config_file(path: str | os.PathLike) -> dict:
    """Parse ``key = value`` lines (``#`` comments allowed) into Config field values."""
    types = {f.name: f.type for f in fields(Config)}
    out = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in types:
            raise DomainError(f"{path}:{n}: unknown key {key!r}")
        kind = types[key]
        if kind in (int, "int"):
            out[key] = int(float(value)) if "e" in value.lower() else int(value)
        elif kind in (bool, "bool"):
            out[key] = _BOOL[value.lower()]
        else:
            out[key] = value
    return out


def build_config(args: argparse.Namespace) -> Config:
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    flag_map = {
        "digits": "precision_digits",
        "tol": "tolerance",
        "schlafli_coefficient": "schlafli_coefficient",
        "max_den": "max_den",
        "cache_dir": "cache_dir",
        "seed": "mc_seed",
    }
    for flag, key in flag_map.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    if getattr(args, "extended", False):
        values["extended"] = True
    cfg = Config(**values)
    cfg.validate()
    return cfg


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"not a rational number: {text!r}") from e


_PI_RE = re.compile(r"^\s*([+-]?\d*)(?:/(\d+))?\s*\*?\s*pi\s*$")


def parse_pi_multiple(text: str) -> PiMultiple:
    """Parse ``p/qpi``, ``ppi`` or ``pi``; bare radians are refused."""
    m = _PI_RE.match(text)
    if not m:
        raise DomainError(f"angle must be written as p/qpi (e.g. 1/2pi), got {text!r}")
    num = m.group(1)
    if num in ("", "+"):
        num = "1"
    elif num == "-":
        num = "-1"
    den = int(m.group(2) or 1)
    if den == 0:
        raise DomainError("zero denominator in angle")
    return PiMultiple(Fraction(int(num), den))


def _emit(args, obj: dict, text: str) -> None:
    if args.json:
        print(json.dumps(obj, sort_keys=True))
    else:
        print(text)


def cmd_f(args, cfg: Config) -> int:
    t = parse_rational(args.t)
    digits = cfg.precision_digits
    cache = ResultCache(cfg.cache_dir)
    value, err, hit = f_decimal(t, digits, cfg.extended, cache)
    _emit(
        args,
        {"t": f"{t.numerator}/{t.denominator}", "digits": digits, "f": value, "error_bound": err},
        f"f({t}) = {value}\nerror bound: {err}" + ("  (cached)" if hit else ""),
    )
    return 0


def _volume_routes(args, cfg: Config):
    if (args.phi is None) == (args.t is None):
        raise DomainError("give exactly one of --phi p/qpi or --t p/q")
    if args.phi is not None:
        phi = parse_pi_multiple(args.phi)
        t = phi.r - Fraction(1, 2)
    else:
        t = parse_rational(args.t)
        phi = PiMultiple(Fraction(1, 2) + t)
    dihedral_to_edge(phi, 30)
    return phi, t


def cmd_volume(args, cfg: Config) -> int:
    phi, t = _volume_routes(args, cfg)
    k = cfg.schlafli_coefficient
    tol = cfg.tolerance
    routes = ["form7", "form8", "closed10", "montecarlo"] if args.route == "all" else [args.route]
    rows: list[dict] = []
    with mp.workdps(digits_for_tol(tol)):
        for r in routes:
            if r in ("form7", "ode"):
                res = vol_by_ode(phi, tol, k)
                rows.append({"route": "form7", "volume": res.volume.value, "bound": res.error_bound.value})
            elif r == "form8":
                try:
                    res = vol_form8(t, tol, k)
                except DomainError:
                    if args.route != "all":
                        raise
                    continue
                rows.append({"route": "form8", "volume": res.volume.value, "bound": res.error_bound.value})
            elif r == "closed10":
                try:
                    res = vol_closed_form(t, tol, k, extended=cfg.extended)
                except DomainError:
                    if args.route != "all":
                        raise
                    continue
                rows.append({"route": "closed10", "volume": res.volume.value, "bound": res.error_bound.value})
            else:
                simplex = make_vertices(dihedral_to_edge(phi, 40))
                est, se = mc_volume(simplex, args.mc_n, cfg.mc_seed, args.workers)
                rows.append({"route": "montecarlo", "volume": mp.mpf(est), "bound": mp.mpf(4 * se),
                             "stderr": se})
        show = min(cfg.precision_digits, digits_for_tol(tol) - 15)
        deltas = []
        bad = False
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                a, b = rows[i], rows[j]
                d = abs(a["volume"] - b["volume"])
                lim = a["bound"] + b["bound"]
                ok = d <= lim
                bad |= not ok
                deltas.append({"pair": f"{a['route']}-{b['route']}", "delta": mp.nstr(d, 5),
                               "bound": mp.nstr(lim, 5), "ok": ok})
        pi2 = mp.pi ** 2
        out_rows = []
        lines = [f"phi = {phi}  (t = {t}),  schlafli coefficient {k}"]
        for row in rows:
            digits = 6 if row["route"] == "montecarlo" else show
            vol = mp.nstr(row["volume"], digits)
            ratio = mp.nstr(row["volume"] / pi2, digits)
            out_rows.append({"route": row["route"], "volume": vol, "volume_over_pi2": ratio,
                             "error_bound": mp.nstr(row["bound"], 5)})
            lines.append(f"{row['route']:>10}  {vol}  (= {ratio} pi^2, bound {mp.nstr(row['bound'], 3)})")
        for d in deltas:
            lines.append(f"  {d['pair']:>20}: delta {d['delta']} vs bound {d['bound']}  "
                         f"{'ok' if d['ok'] else 'DISAGREE'}")
    _emit(args, {"schema": SCHEMA, "phi": str(phi), "t": f"{t.numerator}/{t.denominator}",
                 "schlafli_coefficient": k, "routes": out_rows, "deltas": deltas},
          "\n".join(lines))
    return EXIT_DISAGREE if bad else 0


def cmd_scan(args, cfg: Config) -> int:
    extended = cfg.extended or args.band == "extended"
    ts = band_rationals(args.den_max, args.band)
    cache = ResultCache(cfg.cache_dir)
    report = scan(ts, cfg.precision_digits, cfg.max_den, extended=extended, cache=cache,
                  workers=args.workers)
    report.config = dict(report.config, band=args.band, den_max=args.den_max,
                         run=asdict(cfg))
    out = Path(args.out)
    atomic_write_text(out.with_suffix(".json"), report.to_json())
    atomic_write_text(out.with_suffix(".csv"), report.to_csv())
    summary = {"schema": SCHEMA, "entries": len(report.entries), "summary": report.summary,
               "cache_hits": report.cache_hits, "computed": report.computed,
               "report": str(out.with_suffix(".json"))}
    lines = [f"{'t':>8}  {'regime':<8}  verdict"]
    for e in report.entries:
        cand = f" {e.candidate}" if e.candidate is not None else ""
        lines.append(f"{str(e.t):>8}  {e.regime:<8}  {e.verdict}{cand}")
    lines.append("summary: " + ", ".join(f"{k}={v}" for k, v in report.summary.items()))
    lines.append(f"cache hits {report.cache_hits}, computed {report.computed}; "
                 f"wrote {out.with_suffix('.json')} and {out.with_suffix('.csv')}")
    _emit(args, summary, "\n".join(lines))
    return 0


def cmd_verify(args, cfg: Config) -> int:
    checks = run_verify(args.suite, cfg.schlafli_coefficient, args.mc_n, cfg.mc_seed)
    ok = all(c.passed for c in checks)
    _emit(
        args,
        {"schema": SCHEMA, "passed": ok,
         "checks": [{"suite": c.suite, "name": c.name, "passed": c.passed, "detail": c.detail}
                    for c in checks]},
        "\n".join(f"[{'PASS' if c.passed else 'FAIL'}] {c.suite}: {c.name} ({c.detail})"
                  for c in checks),
    )
    return 0 if ok else EXIT_VERIFY


def cmd_orbit(args, cfg: Config) -> int:
    phi = parse_pi_multiple(args.phi)
    dihedral_to_edge(phi, 30)
    rep = explore(phi, args.depth, args.max_tiles, args.orbit_digits, args.quantum,
                  args.samples, cfg.mc_seed, strict=False)
    doc = rep.to_dict()
    doc["run"] = asdict(cfg)
    atomic_write_text(Path(args.out), json.dumps(doc, indent=2, sort_keys=True) + "\n")
    text = (f"seed phi = {phi}\ntiles per depth: {rep.tiles_per_depth}\n"
            f"distinct tiles: {rep.distinct_tiles}, distinct vertices: {rep.distinct_vertices}\n"
            f"closed: {rep.closed} ({rep.stop_reason})\n"
            f"multiplicity histogram: {rep.multiplicity_histogram}\n"
            f"wrote {args.out}")
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(args, doc, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", help="key = value config file (flags override it)")
    g.add_argument("--digits", type=int, help="working/output decimal digits (default 80)")
    g.add_argument("--tol", help="absolute tolerance for volume routes (default 1e-60)")
    g.add_argument("--extended", action="store_true", default=None,
                   help="allow t outside |t| < 1/10, up to (-arcsin(1/3)/pi, 1/2]")
    g.add_argument("--schlafli-coefficient", type=int, choices=(3, 6),
                   help="dV/dphi = K * x(phi); default 3, 6 reproduces the doubled constants")
    g.add_argument("--max-den", type=int, help="denominator bound for reconstruction (default 1e8)")
    g.add_argument("--cache-dir", help="results cache directory (default .simplexlab-cache)")
    g.add_argument("--json", action="store_true", help="emit one JSON object on stdout")
    g.add_argument("--seed", type=int, help="Monte Carlo / sampling seed (default 1)")

    p = argparse.ArgumentParser(
        prog="simplexlab",
        description="Volumes of regular spherical simplices and rationality experiments on f(t).",
    )
    p.add_argument("--version", action="version", version=f"simplexlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("f", parents=[common], help="evaluate f(t) for rational t")
    f.add_argument("--t", required=True, help="rational t as p/q")
    f.set_defaults(func=cmd_f)

    v = sub.add_parser("volume", parents=[common], help="volume of sigma(phi) by one or all routes")
    v.add_argument("--phi", help="dihedral angle as p/qpi, e.g. 2/3pi")
    v.add_argument("--t", help="alternatively t = phi/pi - 1/2 as p/q")
    v.add_argument("--route", default="all",
                   choices=("ode", "form7", "form8", "closed10", "montecarlo", "all"))
    v.add_argument("--mc-n", type=int, default=10 ** 6, help="Monte Carlo samples (default 1e6)")
    v.add_argument("--workers", type=int, default=1)
    v.set_defaults(func=cmd_volume)

    s = sub.add_parser("scan", parents=[common], help="rationality scan over Farey fractions")
    s.add_argument("--den-max", type=int, required=True)
    s.add_argument("--band", choices=("paper", "extended"), default="paper")
    s.add_argument("--out", default="scan_report", help="report path prefix (.json and .csv)")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_scan)

    ve = sub.add_parser("verify", parents=[common], help="run self-check suites")
    ve.add_argument("--suite", default="all", choices=("chain", "schlafli", "tilings", "orbit", "all"))
    ve.add_argument("--mc-n", type=int, default=10 ** 6)
    ve.set_defaults(func=cmd_verify)

    o = sub.add_parser("orbit", parents=[common], help="facet-reflection orbit of sigma(phi)")
    o.add_argument("--phi", required=True, help="seed dihedral angle as p/qpi")
    o.add_argument("--depth", type=int, default=10)
    o.add_argument("--max-tiles", type=int, default=5000)
    o.add_argument("--orbit-digits", type=int, default=60)
    o.add_argument("--quantum", type=int, default=40)
    o.add_argument("--samples", type=int, default=100)
    o.add_argument("--out", default="orbit_report.json")
    o.set_defaults(func=cmd_orbit)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.func(args, cfg)
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except NonConvergence as e:
        print(f"error: quadrature did not converge: {e}", file=sys.stderr)
        return EXIT_NONCONV
    except SimplexLabError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
