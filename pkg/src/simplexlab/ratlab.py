"""Experimental rationality tests for f(t) at rational t.

If f(t) is irrational for some rational t with |t| < 1/10, the regular
simplex with dihedral angle pi/2 + pi*t has all dihedral angles in Q*pi but
volume outside Q*pi^2.  Nothing here can prove irrationality.  A verdict is
evidence only:

``exact-rational-candidate``
    some continued-fraction convergent p/q with q <= max_den reproduces the
    value to the certified digits and is followed by a huge partial quotient
    (or ends the expansion);
``no-small-rational``
    no such convergent exists up to max_den;
``inconclusive``
    the precision is too low for ``max_den`` or the evaluation failed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import mpmath as mp

from .cache import ResultCache
from .errors import PrecisionTooLow, SimplexLabError
from .hiprec import HiReal, RealLike, format_digits, to_mpf
from .volume import NARROW_BAND, check_t, eval_f

SCHEMA = "simplexlab/1"
EXACT = "exact-rational-candidate"
NO_SMALL = "no-small-rational"
INCONCLUSIVE = "inconclusive"
VERDICTS = (EXACT, NO_SMALL, INCONCLUSIVE)
CF_MAX_TERMS = 200
MIN_TEST_DIGITS = 60


@dataclass(frozen=True)
class RationalityVerdict:
    t: Fraction
    digits_used: int
    cf_terms: tuple[int, ...]
    candidate: Fraction | None
    verdict: str
    quality: HiReal | None
    regime: str = "paper"
    value: str = ""
    note: str = ""

    def __post_init__(self):
        if (self.candidate is not None) != (self.verdict == EXACT):
            raise ValueError("candidate must be present exactly for exact-rational-candidate")

    def to_dict(self) -> dict:
        return {
            "t": _frac_str(self.t),
            "regime": self.regime,
            "digits_used": self.digits_used,
            "value": self.value,
            "cf_terms": list(self.cf_terms),
            "candidate": None if self.candidate is None else _frac_str(self.candidate),
            "verdict": self.verdict,
            "quality": None if self.quality is None else _quality_str(self.quality),
            "note": self.note,
        }


@dataclass
class ScanReport:
    entries: list[RationalityVerdict]
    config: dict
    summary: dict = field(default_factory=dict)
    # run statistics, deliberately kept out of the serialized report
    cache_hits: int = 0
    computed: int = 0

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA,
            "config": self.config,
            "summary": self.summary,
            "entries": [e.to_dict() for e in self.entries],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "regime", "verdict", "candidate", "quality", "digits_used", "value", "note"])
        for e in self.entries:
            d = e.to_dict()
            w.writerow([d["t"], d["regime"], d["verdict"], d["candidate"] or "",
                        d["quality"] or "", d["digits_used"], d["value"], d["note"]])
        return buf.getvalue()


def _frac_str(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


def _quality_str(q: HiReal) -> str:
    if q.value == 0:
        return "0"
    with mp.workdps(q.precision_digits):
        return mp.nstr(q.value, 6)


def _expand(v: mp.mpf, tol: mp.mpf, max_terms: int) -> Iterator[tuple[int, int, int, mp.mpf]]:
    """Yield (a_k, p_k, q_k, remainder) for the continued fraction of v.

    ``remainder`` is the complete quotient x_{k+1} (``mp.inf`` once the
    expansion terminates).  Where rounding noise leaves x_k within
    sqrt(tol) below an integer and the rounded-up quotient already reproduces
    v within ``tol``, the short form [..., a] is used instead of
    [..., a - 1, 1].
    """
    p0, q0, p1, q1 = 1, 0, 0, 1
    x = v
    near = mp.sqrt(tol)
    for _ in range(max_terms):
        a = int(mp.floor(x))
        up = int(mp.nint(x))
        if up != a and up - x < near:
            pu, qu = up * p0 + p1, up * q0 + q1
            if abs(v - mp.mpf(pu) / qu) <= tol:
                yield up, pu, qu, mp.inf
                return
        p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
        frac = x - a
        if frac == 0:
            yield a, p0, q0, mp.inf
            return
        x = 1 / frac
        yield a, p0, q0, x


def continued_fraction(v: RealLike, max_terms: int, digits: int | None = None) -> list[int]:
    """Partial quotients [a0; a1, a2, ...] of v, dropping the noise beyond ``digits``.

    Stops at ``max_terms`` or once the running convergent matches v to within
    10**(-digits + 5).  ``digits`` defaults to the precision v carries.
    """
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    if isinstance(v, Fraction):
        out = []
        x = v
        while len(out) < max_terms:
            a = math.floor(x)
            out.append(a)
            if x == a:
                break
            x = 1 / (x - a)
        return out
    d = digits or (v.precision_digits if isinstance(v, HiReal) else mp.mp.dps)
    with mp.workdps(d + 10):
        val = to_mpf(v)
        tol = mp.mpf(10) ** (-d + 5)
        out = []
        for a, p, q, _ in _expand(val, tol, max_terms):
            out.append(a)
            if abs(val - mp.mpf(p) / q) <= tol:
                break
        return out


def _check_digits(digits: int, max_den: int) -> None:
    need = 2 * math.log10(max_den) + 20
    if digits < need:
        raise PrecisionTooLow(
            f"{digits} digits cannot support max_den = {max_den} (need >= {math.ceil(need)})"
        )


def huge_quotient_threshold(digits: int) -> mp.mpf:
    return mp.mpf(10) ** (mp.mpf(digits) / 4)


def _reconstruct(v: RealLike, max_den: int, digits: int):
    """Return (candidate or None, quality of the best convergent with q <= max_den)."""
    _check_digits(digits, max_den)
    with mp.workdps(digits + 10):
        val = to_mpf(v)
        close = 2 * mp.mpf(10) ** (-digits)
        huge = huge_quotient_threshold(digits)
        best_quality = None
        for a, p, q, rem in _expand(val, close, 4 * digits + 10):
            if q > max_den:
                break
            err = abs(val - mp.mpf(p) / q)
            best_quality = err * q * q
            if err <= close and (rem == mp.inf or rem > huge):
                return Fraction(p, q), best_quality
        return None, best_quality


def rational_reconstruct(v: RealLike, max_den: int, digits: int) -> Fraction | None:
    """The p/q with q <= max_den matching v to 2*10**-digits, if a huge quotient follows it.

    ``v`` must be accurate to 10**-digits.  Raises PrecisionTooLow when
    ``digits < 2*log10(max_den) + 20``.
    """
    return _reconstruct(v, max_den, digits)[0]


def regime_of(t: Fraction) -> str:
    return "paper" if abs(t) < NARROW_BAND else "extended"


def f_decimal(
    t: Fraction, digits: int, extended: bool = False, cache: ResultCache | None = None
) -> tuple[str, str, bool]:
    """f(t) as a decimal string with ``digits`` significant digits.

    Returns ``(value, error_bound, from_cache)``.  The quadrature runs at
    absolute tolerance 10**-digits.  Cache entries are keyed by
    ``("f", "p/q", digits)``.
    """
    t = Fraction(t)
    check_t(t, extended)
    key = ("f", _frac_str(t), digits)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit.value, hit.error_bound, True
    res = eval_f(t, mp.mpf(10) ** (-digits - 5), extended=extended)
    value = format_digits(res.estimate.value, digits)
    with mp.workdps(20):
        err = mp.nstr(res.error_bound.value, 6) if res.error_bound.value else "0"
    if cache is not None:
        cache.put(key, value, err)
    return value, err, False


def _verdict_from_value(
    t: Fraction, value: str, digits: int, max_den: int, regime: str, cf_max_terms: int
) -> RationalityVerdict:
    with mp.workdps(digits + 10):
        v = mp.mpf(value)
    cf = tuple(continued_fraction(HiReal.of(v, digits + 10), cf_max_terms, digits))
    try:
        cand, quality = _reconstruct(v, max_den, digits)
    except PrecisionTooLow as e:
        return RationalityVerdict(t, digits, cf, None, INCONCLUSIVE, None, regime, value, str(e))
    q = None if quality is None else HiReal(quality, max(digits, 30))
    return RationalityVerdict(
        t, digits, cf, cand, EXACT if cand is not None else NO_SMALL, q, regime, value
    )


def test_rationality(
    t: Fraction,
    digits: int,
    max_den: int,
    extended: bool = False,
    cache: ResultCache | None = None,
    cf_max_terms: int = CF_MAX_TERMS,
) -> RationalityVerdict:
    """Compute f(t) to ``digits`` digits and look for a small-denominator rational."""
    if digits < MIN_TEST_DIGITS:
        raise ValueError(f"digits must be >= {MIN_TEST_DIGITS}")
    t = Fraction(t)
    value, _, _ = f_decimal(t, digits, extended, cache)
    return _verdict_from_value(t, value, digits, max_den, regime_of(t), cf_max_terms)


# keep pytest from collecting the public API as a test
test_rationality.__test__ = False


def band_rationals(den_max: int, band: str = "paper") -> list[Fraction]:
    """All p/q in lowest terms with q <= den_max inside the band, sorted."""
    if den_max < 1:
        raise ValueError("den_max must be >= 1")
    if band == "paper":
        def inside(r):
            return abs(r) < NARROW_BAND
    elif band == "extended":
        def inside(r):
            try:
                check_t(r, extended=True)
            except SimplexLabError:
                return False
            return True
    else:
        raise ValueError(f"unknown band {band!r}")
    out = set()
    for q in range(1, den_max + 1):
        for p in range(-q, q + 1):
            if math.gcd(p, q) == 1 and inside(Fraction(p, q)):
                out.add(Fraction(p, q))
    return sorted(out)


def _scan_one(args) -> tuple[RationalityVerdict, bool]:
    t, digits, max_den, extended, cache_root, cf_max_terms = args
    cache = ResultCache(cache_root) if cache_root is not None else None
    regime = regime_of(t)
    try:
        value, _, hit = f_decimal(t, digits, extended, cache)
    except SimplexLabError as e:
        return RationalityVerdict(t, digits, (), None, INCONCLUSIVE, None, regime, "",
                                  f"{type(e).__name__}: {e}"), False
    return _verdict_from_value(t, value, digits, max_den, regime, cf_max_terms), hit


def scan(
    t_values: Iterable[Fraction],
    digits: int,
    max_den: int,
    extended: bool = False,
    cache: ResultCache | None = None,
    workers: int = 1,
    cf_max_terms: int = CF_MAX_TERMS,
) -> ScanReport:
    """One verdict per distinct t, sorted by t.  Failing entries become inconclusive."""
    ts = sorted({Fraction(t) for t in t_values})
    root = None if cache is None else str(cache.root)
    jobs = [(t, digits, max_den, extended, root, cf_max_terms) for t in ts]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_one, jobs))
    else:
        results = [_scan_one(j) for j in jobs]
    entries = [r for r, _ in results]
    hits = sum(1 for _, h in results if h)
    summary = {v: sum(1 for e in entries if e.verdict == v) for v in VERDICTS}
    config = {
        "digits": digits,
        "max_den": max_den,
        "extended": extended,
        "tolerance": f"1e-{digits}",
        "cf_max_terms": cf_max_terms,
        "huge_quotient": f"10^({digits}/4)",
    }
    if cache is not None:
        cache.hits += hits
        cache.misses += len(entries) - hits
    return ScanReport(entries, config, summary, cache_hits=hits, computed=len(entries) - hits)
