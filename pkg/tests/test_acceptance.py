"""Acceptance criteria AC-1 .. AC-10.

Each test prints one ``AC-n PASS|FAIL`` line; the lines are also collected
and repeated in the pytest terminal summary.  Run with ``-s`` to see them
inline.
"""

import json
import math
import random
import time
from fractions import Fraction

import mpmath as mp
import numpy as np

from simplexlab import cli
from simplexlab.hiprec import HiReal, PiMultiple
from simplexlab.orbit import explore
from simplexlab.ratlab import rational_reconstruct
from simplexlab.simplex import dihedral_to_edge, make_vertices
from simplexlab.volume import (
    eval_f,
    form8_ratio,
    mc_volume,
    vol_by_ode,
    vol_closed_form,
    vol_form8,
)

AC_LINES: list[str] = []
MC_N = 10 ** 7


def check(ac, ok, detail):
    line = f"{ac} {'PASS' if ok else 'FAIL'}  {detail}"
    AC_LINES.append(line)
    print(line)
    assert ok, line


def exact(r):
    r = Fraction(r)
    return mp.mpf(r.numerator) / r.denominator


def mc_for(r):
    simplex = make_vertices(dihedral_to_edge(PiMultiple(Fraction(r)), 40), 40)
    return mc_volume(simplex, MC_N, seed=1)


def test_ac1_f_at_zero():
    res = eval_f(Fraction(0), "1e-60")
    ok = res.estimate.value == 0 and res.error_bound.value == 0 and res.evaluations == 0
    check("AC-1", ok, f"f(0) = {res.estimate.value} with bound {res.error_bound.value}")


def _tiling_case(ac, t, f_exact, phi, vol_frac):
    start = time.perf_counter()
    res = eval_f(Fraction(t), "1e-55", extended=True)
    quad_s = time.perf_counter() - start
    with mp.workdps(res.estimate.precision_digits):
        dev = abs(res.estimate.value - exact(f_exact))
        certified = res.error_bound.value < mp.mpf("1e-50")
    start = time.perf_counter()
    est, se = mc_for(phi)
    mc_s = time.perf_counter() - start
    target = math.pi ** 2 * float(Fraction(vol_frac))
    z = abs(est - target) / se
    ok = dev < mp.mpf("1e-50") and certified and z <= 4 and quad_s < 10 and mc_s < 60
    check(ac, ok, f"|f({t}) - {f_exact}| = {mp.nstr(dev, 3)}, bound {mp.nstr(res.error_bound.value, 3)}, "
                  f"MC {est:.6f} vs {target:.6f} ({z:.2f} stderr), {quad_s:.1f}s + {mc_s:.1f}s")


def test_ac2_five_cell():
    _tiling_case("AC-2", Fraction(1, 6), Fraction(3, 40), Fraction(2, 3), Fraction(2, 5))


def test_ac3_six_hundred_cell():
    _tiling_case("AC-3", Fraction(-1, 10), Fraction(-107, 1800), Fraction(2, 5), Fraction(1, 300))


def test_ac4_schlafli_coefficient():
    start = time.perf_counter()
    with mp.workdps(40):
        end = mp.pi - mp.mpf("1e-6")
        pi2 = mp.pi ** 2
        miss3 = abs(vol_by_ode(end, "1e-20", 3).volume.value - pi2)
        miss6 = abs(vol_by_ode(end, "1e-20", 6).volume.value - pi2)
        ok = miss3 < 1e-3 and abs(miss6 - 7 * pi2 / 8) < 1e-3
    secs = time.perf_counter() - start
    check("AC-4", ok and secs < 30,
          f"K=3 misses pi^2 by {mp.nstr(miss3, 3)}; K=6 misses by {mp.nstr(miss6, 6)} "
          f"(7pi^2/8 = {mp.nstr(7 * pi2 / 8, 6)}), {secs:.1f}s")


def test_ac5_route_agreement():
    start = time.perf_counter()
    tol = mp.mpf("1e-30")
    rng = random.Random(5)
    ts = sorted({Fraction(rng.randint(-9899, 9899), 100000) for _ in range(20)})
    worst = mp.mpf(0)
    for t in ts:
        a = vol_form8(t, tol).volume.value
        b = vol_by_ode(PiMultiple(Fraction(1, 2) + t), tol).volume.value
        c = vol_closed_form(t, tol).volume.value
        with mp.workdps(60):
            worst = max(worst, abs(a - b), abs(a - c), abs(b - c))
    secs = time.perf_counter() - start
    ok = len(ts) == 20 and worst <= 2 * tol and secs < 120
    check("AC-5", ok, f"20 t values, worst pairwise delta {mp.nstr(worst, 3)} <= 2e-30, {secs:.1f}s")


def test_ac6_right_angled_simplex():
    tol = mp.mpf("1e-30")
    routes = [
        vol_by_ode(PiMultiple(Fraction(1, 2)), tol),
        vol_form8(Fraction(0), tol),
        vol_closed_form(Fraction(0), tol),
    ]
    with mp.workdps(60):
        target = mp.pi ** 2 / 8
        devs = [abs(r.volume.value - target) for r in routes]
    est, se = mc_volume(make_vertices(PiMultiple(Fraction(1, 2)), 40), 10 ** 6, seed=1)
    z = abs(est - float(target)) / se
    ok = all(d <= tol for d in devs) and z <= 4
    check("AC-6", ok, "quadrature deltas " + ", ".join(mp.nstr(d, 2) for d in devs)
          + f"; MC {z:.2f} stderr")


def test_ac7_ratio_bounds():
    with mp.workdps(30):
        band = mp.pi / 10
        vals = [form8_ratio(-band + 2 * band * k / 1001) for k in range(1, 1001)]
        lo, hi = min(vals), max(vals)
        ok = len(vals) == 1000 and mp.mpf("0.636") < lo and hi < mp.mpf("0.952")
    check("AC-7", ok, f"1000 points, ratio range [{mp.nstr(lo, 6)}, {mp.nstr(hi, 6)}]")


def _decimal(r, digits):
    with mp.workdps(digits + 10):
        v = exact(r)
        return HiReal(mp.mpf(mp.nstr(v, digits + max(0, int(mp.log10(abs(v) + 1))) + 1)), digits + 10)


def test_ac8_rational_reconstruction():
    rng = random.Random(8)
    fails = 0
    for _ in range(500):
        q = rng.randint(1, 10 ** 5)
        r = Fraction(rng.randint(-q, q), q)
        fails += rational_reconstruct(_decimal(r, 60), 10 ** 5, 60) != r
    pool = [n for n in range(2, 201) if math.isqrt(n) ** 2 != n]
    false_pos = 0
    for n in rng.sample(pool, 100):
        with mp.workdps(70):
            v = HiReal(mp.sqrt(n), 60)
        false_pos += rational_reconstruct(v, 10 ** 4, 60) is not None
    f1 = rational_reconstruct(eval_f(Fraction(1, 6), "1e-100", extended=True).estimate, 10 ** 6, 100)
    f2 = rational_reconstruct(eval_f(Fraction(-1, 10), "1e-100", extended=True).estimate, 10 ** 6, 100)
    ok = fails == 0 and false_pos == 0 and f1 == Fraction(3, 40) and f2 == Fraction(-107, 1800)
    check("AC-8", ok, f"round-trip failures {fails}/500, false positives {false_pos}/100, "
                      f"f(1/6) -> {f1}, f(-1/10) -> {f2}")


def test_ac9_orbit_golden_case():
    start = time.perf_counter()
    rep = explore(Fraction(1, 2), 10)
    secs = time.perf_counter() - start
    ok = (rep.closed and rep.distinct_tiles == 16 and rep.distinct_vertices == 8
          and rep.multiplicity_histogram == {1: len(rep.multiplicity_samples)}
          and len(rep.multiplicity_samples) == 100 and secs < 10)
    check("AC-9", ok, f"closed={rep.closed}, tiles={rep.distinct_tiles}, vertices={rep.distinct_vertices}, "
                      f"multiplicities {rep.multiplicity_histogram}, {secs:.1f}s")


def test_ac10_scan_determinism(tmp_path, capsys):
    cache = tmp_path / "cache"

    def run(name):
        start = time.perf_counter()
        code = cli.main(["scan", "--den-max", "12", "--band", "paper", "--digits", "80",
                         "--cache-dir", str(cache), "--out", str(tmp_path / name), "--json"])
        secs = time.perf_counter() - start
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        return code, summary, (tmp_path / f"{name}.json").read_bytes(), secs

    c1, s1, b1, t1 = run("first")
    c2, s2, b2, t2 = run("second")
    ts = [Fraction(e["t"]) for e in json.loads(b1)["entries"]]
    farey = sorted({Fraction(p, q) for q in range(1, 13) for p in range(-q, q + 1)
                    if abs(Fraction(p, q)) < Fraction(1, 10)})
    ok = (c1 == c2 == 0 and b1 == b2 and s2["computed"] == 0 and s2["cache_hits"] == len(ts)
          and ts == farey and t1 < 600)
    check("AC-10", ok, f"{len(ts)} entries match Farey enumeration, first run {t1:.1f}s, "
                       f"rerun {s2['cache_hits']} hits / {s2['computed']} computed, "
                       f"reports identical: {b1 == b2}")
