"""Volume of the regular spherical simplex sigma(phi) by independent routes.

Routes (the ``route`` tag of :class:`VolumeResult`):

``form7``
    pi^2/8 + integral from pi/2 to phi of the Schlaefli rate K * x(psi).
``form8``
    The same integral after psi = pi/2 + s, with x(psi) rewritten through
    the half-angle ratio (sin(s/2)+cos(s/2))/sqrt(2+4 sin s).  Valid for
    |t| < 1/10 only.
``closed10``
    pi^2/8 + K pi^2 t - K pi^2 f(t), with f the normalized integral below.
``montecarlo``
    Hit-or-miss sampling of S^3, an oracle independent of all the above.

Here phi = pi/2 + pi*t and K is the Schlaefli coefficient.  Six equal edges
of length x, each with dihedral angle phi, give dV/dphi = (1/2) * 6 * x, so
K = 3.  ``SCHLAFLI_COEFFICIENT`` may be set to 6 to reproduce the doubled
constants used in some write-ups; the hemisphere endpoint vol(pi) = pi^2
rules that value out.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath as mp
import numpy as np

from .errors import DomainError, SingularSimplex
from .hiprec import (
    HiReal,
    PiMultiple,
    QuadratureResult,
    RealLike,
    acos_clamped,
    digits_for_tol,
    digits_of,
    integrate,
    to_mpf,
)
from .simplex import SphericalSimplex, dihedral_to_edge, edge_from_dihedral

SCHLAFLI_COEFFICIENT = 3
NARROW_BAND = Fraction(1, 10)
EXTENDED_RIGHT = Fraction(1, 2)
MC_BLOCK = 1 << 18

TValue = Union[Fraction, HiReal]


@dataclass(frozen=True)
class EdgeTerm:
    length: HiReal
    dihedral: HiReal


@dataclass(frozen=True)
class VolumeResult:
    phi: HiReal
    t: TValue
    volume: HiReal
    route: str
    error_bound: HiReal


def extended_left(digits: int = 50) -> mp.mpf:
    """Left end of the extended t-range, -arcsin(1/3)/pi (where sin(pi t) = -1/3)."""
    with mp.workdps(digits):
        return -mp.asin(mp.mpf(1) / 3) / mp.pi


def check_t(t: RealLike, extended: bool = False) -> None:
    """Raise DomainError unless |t| < 1/10 (or t is in the extended range)."""
    if isinstance(t, Fraction) or isinstance(t, int):
        t = Fraction(t)
        if not extended:
            if abs(t) >= NARROW_BAND:
                raise DomainError(f"t = {t} outside |t| < 1/10 (use extended mode)")
            return
        with mp.workdps(40):
            below = mp.mpf(t.numerator) / t.denominator <= extended_left(40)
        if t > EXTENDED_RIGHT or below:
            raise DomainError(f"t = {t} outside (-arcsin(1/3)/pi, 1/2]")
        return
    with mp.workdps(digits_of(t)):
        v = to_mpf(t)
        if not extended:
            if abs(v) >= mp.mpf(1) / 10:
                raise DomainError(f"t = {mp.nstr(v, 15)} outside |t| < 1/10 (use extended mode)")
            return
        if v > mp.mpf(1) / 2 or v <= extended_left(mp.mp.dps):
            raise DomainError(f"t = {mp.nstr(v, 15)} outside (-arcsin(1/3)/pi, 1/2]")


def _f_integrand(s: mp.mpf) -> mp.mpf:
    sn = mp.sin(s)
    den = 1 + 2 * sn
    if den <= 0:
        raise DomainError("sin s <= -1/2 in f integrand")
    return acos_clamped(sn / den)


def f_integrand(s: RealLike, digits: int | None = None) -> HiReal:
    d = digits or digits_of(s)
    with mp.workdps(d):
        v = to_mpf(s)
        if 3 * mp.sin(v) < -1 - mp.mpf(10) ** (-d + 5):
            raise DomainError("sin s < -1/3: arccos argument below -1")
        return HiReal(_f_integrand(v), d)


def _t_times_pi(t: TValue):
    if isinstance(t, Fraction):
        return PiMultiple(t)
    return lambda: mp.pi * to_mpf(t)


def eval_f(t: TValue, tol: RealLike, extended: bool = False) -> QuadratureResult:
    """f(t) = (1/pi^2) * integral_0^{pi t} arccos(sin s / (1 + 2 sin s)) ds."""
    if isinstance(t, int):
        t = Fraction(t)
    check_t(t, extended)
    if t == 0:
        d = digits_for_tol(tol)
        zero = HiReal(mp.mpf(0), d)
        return QuadratureResult(zero, zero, 0)
    # scale the tolerance: the raw integral is pi^2 times larger
    with mp.workdps(digits_for_tol(tol)):
        raw_tol = to_mpf(tol) * 9
    raw = integrate(_f_integrand, 0, _t_times_pi(t), raw_tol)
    d = raw.estimate.precision_digits
    with mp.workdps(d):
        pi2 = mp.pi ** 2
        return QuadratureResult(
            HiReal(raw.estimate.value / pi2, d),
            HiReal(raw.error_bound.value / pi2, d),
            raw.evaluations,
        )


def edge_terms(phi: RealLike, digits: int | None = None) -> list[EdgeTerm]:
    """The six (edge length, dihedral angle) pairs entering Schlaefli's formula."""
    d = digits or digits_of(phi)
    x = dihedral_to_edge(phi, d)
    return [EdgeTerm(x, HiReal.of(phi, d))] * 6


def schlafli_rate(
    phi: RealLike, digits: int | None = None, coefficient: int = SCHLAFLI_COEFFICIENT
) -> HiReal:
    """d vol / d phi = coefficient * x(phi); the default 3 is half of the six edge lengths."""
    d = digits or digits_of(phi)
    x = dihedral_to_edge(phi, d)
    return x * coefficient


def _with_rounding(err: mp.mpf, vol: mp.mpf, digits: int) -> HiReal:
    """Quadrature bound plus the rounding of the final assembly at ``digits``."""
    with mp.workdps(digits):
        return HiReal(err + mp.mpf(10) ** (-digits + 3) * max(1, abs(vol)), digits)


def _phi_value(phi) -> HiReal:
    return HiReal.of(phi, max(digits_of(phi), 30))


def _t_of_phi(phi) -> TValue:
    if isinstance(phi, PiMultiple):
        return phi.r - Fraction(1, 2)
    d = max(digits_of(phi), 30)
    with mp.workdps(d):
        return HiReal((to_mpf(phi) - mp.pi / 2) / mp.pi, d)


def _phi_of_t(t: TValue):
    if isinstance(t, Fraction):
        return PiMultiple(Fraction(1, 2) + t)
    with mp.workdps(t.precision_digits):
        return HiReal(mp.pi / 2 + mp.pi * t.value, t.precision_digits)


def vol_by_ode(
    phi: RealLike, tol: RealLike, coefficient: int = SCHLAFLI_COEFFICIENT
) -> VolumeResult:
    """Integrate the Schlaefli rate from the right-angled simplex (volume pi^2/8) to phi.

    Pass ``phi`` as a :class:`PiMultiple` to keep it exact at any working
    precision.  Valid on the whole dihedral range (arctan 2*sqrt2, pi).
    """
    if isinstance(phi, int):
        phi = Fraction(phi)
    dihedral_to_edge(phi, 30)  # domain check
    res = integrate(
        lambda psi: coefficient * edge_from_dihedral(psi),
        PiMultiple(Fraction(1, 2)),
        phi,
        tol,
    )
    d = res.estimate.precision_digits
    with mp.workdps(d):
        vol = mp.pi ** 2 / 8 + res.estimate.value
    return VolumeResult(
        _phi_value(phi), _t_of_phi(phi), HiReal(vol, d), "form7",
        _with_rounding(res.error_bound.value, vol, d),
    )


def _form8_integrand(s: mp.mpf) -> mp.mpf:
    return acos_clamped(form8_ratio(s))


def form8_ratio(s: mp.mpf) -> mp.mpf:
    """(sin(s/2) + cos(s/2)) / sqrt(2 + 4 sin s), the arccos argument after psi = pi/2 + s."""
    return (mp.sin(s / 2) + mp.cos(s / 2)) / mp.sqrt(2 + 4 * mp.sin(s))


def vol_form8(
    t: TValue, tol: RealLike, coefficient: int = SCHLAFLI_COEFFICIENT
) -> VolumeResult:
    if isinstance(t, int):
        t = Fraction(t)
    check_t(t, extended=False)
    res = integrate(_form8_integrand, 0, _t_times_pi(t), mp.mpf(to_mpf(tol)) / (2 * coefficient))
    d = res.estimate.precision_digits
    with mp.workdps(d):
        vol = mp.pi ** 2 / 8 + 2 * coefficient * res.estimate.value
        err = 2 * coefficient * res.error_bound.value
    phi = _phi_of_t(t)
    return VolumeResult(_phi_value(phi), t, HiReal(vol, d), "form8", _with_rounding(err, vol, d))


def halfangle_reduce(u: RealLike, digits: int | None = None) -> HiReal:
    """2*arccos(u) via arccos(2u^2 - 1), with the 2pi - ... branch for negative u."""
    d = digits or digits_of(u)
    with mp.workdps(d):
        v = to_mpf(u)
        if not -1 <= v <= 1:
            raise DomainError(f"u = {mp.nstr(v, 15)} outside [-1, 1]")
        r = acos_clamped(2 * v * v - 1)
        if v < 0:
            r = 2 * mp.pi - r
        return HiReal(r, d)


def vol_closed_form(
    t: TValue,
    tol: RealLike,
    coefficient: int = SCHLAFLI_COEFFICIENT,
    extended: bool = False,
) -> VolumeResult:
    if isinstance(t, int):
        t = Fraction(t)
    k = coefficient
    with mp.workdps(digits_for_tol(tol)):
        f_tol = to_mpf(tol) / (k * 10)
    fr = eval_f(t, f_tol, extended=extended)
    d = fr.estimate.precision_digits
    with mp.workdps(d):
        pi2 = mp.pi ** 2
        vol = pi2 / 8 + k * pi2 * to_mpf(t) - k * pi2 * fr.estimate.value
        err = k * pi2 * fr.error_bound.value
    phi = _phi_of_t(t)
    return VolumeResult(_phi_value(phi), t, HiReal(vol, d), "closed10", _with_rounding(err, vol, d))


def _mc_block(inv: np.ndarray, seed: int, block: int, size: int) -> int:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, block])))
    pts = rng.standard_normal((size, 4))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    coeffs = pts @ inv
    return int(np.count_nonzero(np.all(coeffs >= 0.0, axis=1)))


def mc_volume(
    simplex: SphericalSimplex, n: int, seed: int = 1, workers: int = 1
) -> tuple[float, float]:
    """Hit-or-miss volume of ``simplex`` with n uniform points of S^3.

    Points are normalized 4-d standard normals drawn from PCG64.  Samples come
    in fixed blocks of ``MC_BLOCK`` whose streams are keyed by
    ``(seed, block index)``, so the estimate does not depend on ``workers``.
    Returns ``(estimate, stderr)`` in units where vol(S^3) = 2 pi^2.
    """
    if simplex.is_degenerate():
        raise SingularSimplex("Gram matrix has rank < 4")
    inv = np.linalg.inv(simplex.as_array())
    sizes = [MC_BLOCK] * (n // MC_BLOCK)
    if n % MC_BLOCK:
        sizes.append(n % MC_BLOCK)
    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            hits = sum(ex.map(lambda job: _mc_block(inv, seed, job[0], job[1]), jobs))
    else:
        hits = sum(_mc_block(inv, seed, b, s) for b, s in jobs)
    total = 2 * np.pi ** 2
    p = hits / n
    return total * p, total * float(np.sqrt(p * (1 - p) / n))
