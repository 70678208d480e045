import json
import math
import random
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplexlab.cache import ResultCache
from simplexlab.errors import PrecisionTooLow
from simplexlab.hiprec import HiReal
from simplexlab.ratlab import (
    EXACT,
    INCONCLUSIVE,
    NO_SMALL,
    RationalityVerdict,
    band_rationals,
    continued_fraction,
    rational_reconstruct,
    scan,
    test_rationality as rationality,
)
from simplexlab.volume import eval_f


def machin_pi(digits):
    """pi as a Fraction accurate to about 10**-digits, integers only."""
    scale = 10 ** (digits + 10)

    def arctan_inv(n):
        total, term, k, sign = 0, scale // n, 1, 1
        while term:
            total += sign * (term // k)
            term //= n * n
            k += 2
            sign = -sign
        return total

    return Fraction(4 * (4 * arctan_inv(5) - arctan_inv(239)), scale)


def euclid(r, n):
    out = []
    for _ in range(n):
        a = math.floor(r)
        out.append(a)
        if r == a:
            break
        r = 1 / (r - a)
    return out


def fib_ratio(n):
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return Fraction(b, a)


def hi(x, digits):
    """x carried to ``digits`` decimal places (absolute error about 10**-digits)."""
    with mp.workdps(digits + 10):
        v = mp.mpf(x) if not isinstance(x, Fraction) else mp.mpf(x.numerator) / x.denominator
        return HiReal(mp.mpf(mp.nstr(v, digits + max(0, int(mp.log10(abs(v) + 1))) + 1)), digits + 10)


class TestContinuedFraction:
    def test_exact_rational(self):
        assert continued_fraction(Fraction(3, 40), 20) == [0, 13, 3]

    def test_decimal_rational(self):
        assert continued_fraction(hi(Fraction(3, 40), 50), 20) == [0, 13, 3]

    def test_golden_ratio(self):
        with mp.workdps(60):
            phi = HiReal((1 + mp.sqrt(5)) / 2, 50)
        cf = continued_fraction(phi, 200)
        assert len(cf) > 50 and set(cf) == {1}
        # oracle: F_{n+1}/F_n are exactly the convergents
        p0, q0, p1, q1 = 1, 0, 0, 1
        for k, a in enumerate(cf[:30]):
            p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
            assert Fraction(p0, q0) == fib_ratio(k)

    def test_pi(self):
        with mp.workdps(40):
            v = HiReal(+mp.pi, 30)
        cf = continued_fraction(v, 200)
        assert cf[:5] == [3, 7, 15, 1, 292]
        ref = euclid(machin_pi(40), 25)
        assert cf == ref[: len(cf)]
        assert len(cf) >= 15

    def test_max_terms(self):
        assert len(continued_fraction(hi("2.718281828459045235360287471352662497757", 40), 4)) == 4
        with pytest.raises(ValueError):
            continued_fraction(Fraction(1, 2), 0)


class TestReconstruct:
    def test_five_cell(self):
        v = eval_f(Fraction(1, 6), "1e-100", extended=True).estimate
        assert rational_reconstruct(v, 10 ** 6, 100) == Fraction(3, 40)

    def test_six_hundred_cell(self):
        v = eval_f(Fraction(-1, 10), "1e-100", extended=True).estimate
        assert rational_reconstruct(v, 10 ** 6, 100) == Fraction(-107, 1800)

    def test_pi_none(self):
        with mp.workdps(110):
            v = HiReal(+mp.pi, 100)
        assert rational_reconstruct(v, 10 ** 6, 100) is None

    def test_precision_too_low(self):
        with pytest.raises(PrecisionTooLow):
            rational_reconstruct(hi(Fraction(1, 3), 40), 10 ** 10, 39)
        assert rational_reconstruct(hi(Fraction(1, 3), 40), 10 ** 10, 40) == Fraction(1, 3)

    def test_round_trip_500(self):
        rng = random.Random(20240601)
        for _ in range(500):
            q = rng.randint(1, 10 ** 5)
            p = rng.randint(-10 * q, 10 * q)
            r = Fraction(p, q)
            assert rational_reconstruct(hi(r, 60), 10 ** 5, 60) == r

    def test_no_false_positives(self):
        rng = random.Random(7)
        pool = [n for n in range(2, 201) if math.isqrt(n) ** 2 != n]
        for n in rng.sample(pool, 100):
            with mp.workdps(70):
                v = HiReal(mp.sqrt(n), 60)
            assert rational_reconstruct(v, 10 ** 4, 60) is None

    @settings(max_examples=200, deadline=None)
    @given(st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 5))
    def test_round_trip_property(self, p, q):
        r = Fraction(p, q)
        assert rational_reconstruct(hi(r, 60), 10 ** 5, 60) == r


class TestRationality:
    def test_zero(self):
        v = rationality(Fraction(0), 60, 10 ** 6)
        assert v.verdict == EXACT and v.candidate == 0

    def test_five_cell(self):
        v = rationality(Fraction(1, 6), 80, 10 ** 6, extended=True)
        assert v.verdict == EXACT and v.candidate == Fraction(3, 40)
        assert v.regime == "extended"
        with mp.workdps(90):
            assert abs(mp.mpf(v.value) - mp.mpf(3) / 40) < mp.mpf(10) ** (-v.digits_used // 2)

    def test_open_case_is_well_formed_and_deterministic(self, tmp_path):
        a = rationality(Fraction(1, 12), 120, 10 ** 10)
        b = rationality(Fraction(1, 12), 120, 10 ** 10, cache=ResultCache(tmp_path))
        assert a.verdict in (EXACT, NO_SMALL, INCONCLUSIVE)
        assert a.to_dict() == b.to_dict()
        assert (a.candidate is None) == (a.verdict != EXACT)
        assert a.digits_used == 120 and a.cf_terms and a.regime == "paper"
        json.dumps(a.to_dict())

    def test_monotone_in_precision(self):
        lo = rationality(Fraction(-1, 10), 60, 10 ** 6, extended=True)
        hi_ = rationality(Fraction(-1, 10), 90, 10 ** 6, extended=True)
        assert lo.verdict == EXACT and hi_.verdict == EXACT
        assert lo.candidate == hi_.candidate

    def test_low_digits_refused(self):
        with pytest.raises(ValueError):
            rationality(Fraction(1, 20), 40, 100)

    def test_insufficient_precision_is_inconclusive(self):
        v = rationality(Fraction(1, 20), 60, 10 ** 25)
        assert v.verdict == INCONCLUSIVE and v.candidate is None and v.note

    def test_verdict_invariant(self):
        with pytest.raises(ValueError):
            RationalityVerdict(Fraction(0), 60, (0,), None, EXACT, None)
        with pytest.raises(ValueError):
            RationalityVerdict(Fraction(0), 60, (0,), Fraction(0), NO_SMALL, None)


class TestScan:
    def test_single_zero(self):
        rep = scan([Fraction(0)], 60, 10 ** 6)
        assert len(rep.entries) == 1 and rep.entries[0].verdict == EXACT
        assert rep.entries[0].candidate == 0

    def test_structure(self):
        rep = scan([Fraction(k, 20) for k in (1, -1, 0)], 80, 10 ** 6)
        ts = [e.t for e in rep.entries]
        assert ts == sorted(ts) and len(ts) == 3
        assert sum(rep.summary.values()) == 3
        doc = json.loads(rep.to_json())
        assert doc["schema"] and len(doc["entries"]) == 3
        assert rep.to_csv().count("\n") == 4

    def test_permutation_invariant(self):
        ts = [Fraction(1, 12), Fraction(0), Fraction(-1, 12), Fraction(1, 11)]
        a = scan(ts, 60, 10 ** 6)
        b = scan(list(reversed(ts)), 60, 10 ** 6)
        c = scan(ts + ts, 60, 10 ** 6)
        assert a.to_json() == b.to_json() == c.to_json()

    def test_out_of_range_entry_becomes_inconclusive(self):
        rep = scan([Fraction(1, 5), Fraction(0)], 60, 10 ** 6)
        bad = [e for e in rep.entries if e.t == Fraction(1, 5)][0]
        assert bad.verdict == INCONCLUSIVE and "DomainError" in bad.note
        assert rep.summary[INCONCLUSIVE] == 1

    def test_resumes_from_cache(self, tmp_path):
        cache = ResultCache(tmp_path)
        ts = [Fraction(1, 20), Fraction(-1, 20)]
        first = scan(ts, 60, 10 ** 6, cache=cache)
        assert first.computed == 2 and first.cache_hits == 0
        second = scan(ts + [Fraction(1, 15)], 60, 10 ** 6, cache=cache)
        assert second.cache_hits == 2 and second.computed == 1
        assert [e.to_dict() for e in second.entries if e.t != Fraction(1, 15)] == [
            e.to_dict() for e in first.entries
        ]

    def test_parallel_matches_serial(self):
        ts = [Fraction(k, 40) for k in range(-3, 4)]
        assert scan(ts, 60, 10 ** 6, workers=3).to_json() == scan(ts, 60, 10 ** 6).to_json()


def farey_band(n, bound=Fraction(1, 10)):
    return sorted({Fraction(p, q) for q in range(1, n + 1) for p in range(-q, q + 1) if abs(Fraction(p, q)) < bound})


def test_band_rationals_matches_brute_force():
    assert band_rationals(12) == farey_band(12)
    assert band_rationals(12) == [Fraction(-1, 11), Fraction(-1, 12), 0, Fraction(1, 12), Fraction(1, 11)]
    assert band_rationals(40) == farey_band(40)
    ext = band_rationals(12, "extended")
    assert Fraction(1, 2) in ext and Fraction(-1, 10) in ext and Fraction(-1, 9) not in ext
    with pytest.raises(ValueError):
        band_rationals(12, "nope")
