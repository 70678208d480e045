"""Self-check suites run by ``simplexlab verify``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .hiprec import PiMultiple
from .orbit import explore
from .simplex import dihedral_to_edge, make_vertices
from .volume import mc_volume, vol_by_ode, vol_closed_form, vol_form8

SUITES = ("chain", "schlafli", "tilings", "orbit")
CHAIN_TOL = mp.mpf("1e-30")
# 20 points spread over (-0.099, 0.099)
CHAIN_TS = tuple(Fraction(k, 200) for k in range(-19, 20, 2))
# (dihedral angle / pi, volume / pi^2): right-angled simplex, 5-cell and 600-cell cells
TILINGS = (
    (Fraction(1, 2), Fraction(1, 8)),
    (Fraction(2, 3), Fraction(2, 5)),
    (Fraction(2, 5), Fraction(1, 300)),
)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str


def _fmt(v) -> str:
    return mp.nstr(v, 5)


def chain(coefficient: int = 3) -> list[Check]:
    out = []
    tol = CHAIN_TOL
    for t in CHAIN_TS:
        phi = PiMultiple(Fraction(1, 2) + t)
        with mp.workdps(60):
            a = vol_form8(t, tol, coefficient).volume.value
            b = vol_by_ode(phi, tol, coefficient).volume.value
            c = vol_closed_form(t, tol, coefficient).volume.value
            worst = max(abs(a - b), abs(a - c), abs(b - c))
        out.append(Check("chain", f"routes agree at t={t}", worst <= 2 * tol, f"max delta {_fmt(worst)}"))
    return out


def schlafli() -> list[Check]:
    with mp.workdps(40):
        end = mp.pi - mp.mpf("1e-6")
        v3 = vol_by_ode(end, "1e-20", 3).volume.value
        v6 = vol_by_ode(end, "1e-20", 6).volume.value
        pi2 = mp.pi ** 2
        miss3 = abs(v3 - pi2)
        miss6 = abs(v6 - pi2)
    return [
        Check("schlafli", "K=3 reaches the hemisphere volume pi^2", miss3 < 1e-3, f"|vol - pi^2| = {_fmt(miss3)}"),
        Check("schlafli", "K=6 overshoots by 7 pi^2/8", abs(miss6 - 7 * pi2 / 8) < 1e-3,
              f"|vol - pi^2| = {_fmt(miss6)}, 7pi^2/8 = {_fmt(7 * pi2 / 8)}"),
    ]


def tilings(coefficient: int = 3, mc_n: int = 10 ** 6, seed: int = 1) -> list[Check]:
    out = []
    tol = mp.mpf("1e-30")
    for r, frac in TILINGS:
        t = r - Fraction(1, 2)
        with mp.workdps(50):
            exact = mp.pi ** 2 * frac.numerator / frac.denominator
            closed = vol_closed_form(t, tol, coefficient, extended=True).volume.value
            ode = vol_by_ode(PiMultiple(r), tol, coefficient).volume.value
            out.append(Check("tilings", f"closed form at phi={r}pi is {frac} pi^2",
                             abs(closed - exact) <= tol, f"delta {_fmt(closed - exact)}"))
            out.append(Check("tilings", f"Schlaefli integral at phi={r}pi is {frac} pi^2",
                             abs(ode - exact) <= tol, f"delta {_fmt(ode - exact)}"))
        simplex = make_vertices(dihedral_to_edge(PiMultiple(r), 40))
        est, se = mc_volume(simplex, mc_n, seed)
        dev = abs(est - float(exact))
        out.append(Check("tilings", f"Monte Carlo at phi={r}pi ({mc_n} samples)",
                         dev <= 4 * se, f"{dev / se:.2f} stderr"))
    return out


def orbit() -> list[Check]:
    rep = explore(Fraction(1, 2), 10)
    counts = {c for _, c in rep.multiplicity_samples}
    return [
        Check("orbit", "sigma(pi/2) orbit closes", rep.closed, f"tiles per depth {rep.tiles_per_depth}"),
        Check("orbit", "16 tiles", rep.distinct_tiles == 16, str(rep.distinct_tiles)),
        Check("orbit", "8 vertices", rep.distinct_vertices == 8, str(rep.distinct_vertices)),
        Check("orbit", "multiplicity 1 at every sample", counts == {1}, str(rep.multiplicity_histogram)),
    ]


def run(suite: str, coefficient: int = 3, mc_n: int = 10 ** 6, seed: int = 1) -> list[Check]:
    if suite == "all":
        names = SUITES
    elif suite in SUITES:
        names = (suite,)
    else:
        raise ValueError(f"unknown suite {suite!r}")
    out: list[Check] = []
    for name in names:
        if name == "chain":
            out += chain(coefficient)
        elif name == "schlafli":
            out += schlafli()
        elif name == "tilings":
            out += tilings(coefficient, mc_n, seed)
        else:
            out += orbit()
    return out
