"""Arbitrary-precision reals and a tanh-sinh quadrature kernel.

All analytic evaluation in simplexlab runs on :mod:`mpmath` floats inside an
explicit ``workdps`` block.  :class:`HiReal` pins a value to the number of
decimal digits it was computed with so that precision is never silently
inherited from the global mpmath context.

The quadrature error bounds are heuristic: ten times the difference between
two successive tanh-sinh levels, plus a rounding floor.  For integrands that
are analytic on the open interval this is very conservative (the level
difference is roughly the error of the *previous* level), but it is not a
proved enclosure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import mpmath as mp

from .errors import DomainError, NonConvergence

MIN_DIGITS = 30
DEFAULT_DIGITS = 50
# extra digits carried beyond what the tolerance needs
GUARD_DIGITS = 15
SAFETY_FACTOR = 10
MAX_LEVEL = 12


RealLike = Union["HiReal", "PiMultiple", mp.mpf, Fraction, int, float, str]


@dataclass(frozen=True)
class PiMultiple:
    """The exact angle ``r*pi``; becomes a float only inside a precision context."""

    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))

    def __str__(self):
        return f"{self.r}pi"


@dataclass(frozen=True)
class HiReal:
    """A real number together with the decimal working precision it carries."""

    value: mp.mpf
    precision_digits: int

    def __post_init__(self):
        if self.precision_digits < MIN_DIGITS:
            raise ValueError(
                f"precision_digits must be >= {MIN_DIGITS}, got {self.precision_digits}"
            )

    @classmethod
    def of(cls, x: RealLike, digits: int | None = None) -> "HiReal":
        if isinstance(x, HiReal):
            d = x.precision_digits if digits is None else digits
            with mp.workdps(d):
                return cls(+x.value, d)
        d = DEFAULT_DIGITS if digits is None else digits
        with mp.workdps(d):
            return cls(to_mpf(x), d)

    def _binary(self, other, op):
        if isinstance(other, HiReal):
            d = min(self.precision_digits, other.precision_digits)
            o = other.value
        else:
            d = self.precision_digits
            o = None
        with mp.workdps(d):
            if o is None:
                o = to_mpf(other)
            return HiReal(op(self.value, o), d)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._binary(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._binary(other, lambda a, b: b * a)

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self):
        return HiReal(-self.value, self.precision_digits)

    def __abs__(self):
        return HiReal(abs(self.value), self.precision_digits)

    def _cmp_value(self, other):
        if isinstance(other, HiReal):
            return other.value
        with mp.workdps(self.precision_digits):
            return to_mpf(other)

    def __lt__(self, other):
        return self.value < self._cmp_value(other)

    def __le__(self, other):
        return self.value <= self._cmp_value(other)

    def __gt__(self, other):
        return self.value > self._cmp_value(other)

    def __ge__(self, other):
        return self.value >= self._cmp_value(other)

    def __float__(self):
        return float(self.value)

    def __str__(self):
        with mp.workdps(self.precision_digits):
            return mp.nstr(self.value, self.precision_digits)

    def __repr__(self):
        return f"HiReal({mp.nstr(self.value, 20)}, digits={self.precision_digits})"


def to_mpf(x: RealLike) -> mp.mpf:
    """Convert ``x`` to an mpf at the *current* working precision."""
    if isinstance(x, HiReal):
        return +x.value
    if isinstance(x, PiMultiple):
        return mp.pi * x.r.numerator / x.r.denominator
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, mp.mpf):
        return +x
    return mp.mpf(x)


def digits_of(x, default: int = DEFAULT_DIGITS) -> int:
    return x.precision_digits if isinstance(x, HiReal) else default


def digits_for_tol(tol: RealLike) -> int:
    """Working digits adequate for an absolute tolerance ``tol``."""
    t = float(to_mpf(tol)) if not isinstance(tol, float) else tol
    if not t > 0:
        raise ValueError("tolerance must be positive")
    if t < 1e-300:
        with mp.workdps(20):
            need = int(-mp.floor(mp.log10(to_mpf(tol))))
    else:
        need = int(math.ceil(-math.log10(t)))
    return max(MIN_DIGITS, need + GUARD_DIGITS)


def format_digits(v: mp.mpf, digits: int) -> str:
    """Fixed-point decimal string with ``digits`` significant digits (``"0"`` for zero)."""
    if v == 0:
        return "0"
    with mp.workdps(digits + 10):
        return mp.nstr(v, digits, strip_zeros=False, min_fixed=-mp.inf, max_fixed=mp.inf)


def acos_clamped(u: mp.mpf) -> mp.mpf:
    """arccos on the current context, clamping values that overshoot [-1, 1] by rounding."""
    band = mp.mpf(10) ** (-mp.mp.dps + 5)
    if u > 1:
        if u - 1 > band:
            raise DomainError(f"arccos argument {mp.nstr(u, 15)} > 1")
        return mp.mpf(0)
    if u < -1:
        if -1 - u > band:
            raise DomainError(f"arccos argument {mp.nstr(u, 15)} < -1")
        return +mp.pi
    return mp.acos(u)


def arccos_hp(u: RealLike, digits: int | None = None) -> HiReal:
    d = digits if digits is not None else digits_of(u)
    with mp.workdps(d):
        return HiReal(acos_clamped(to_mpf(u)), d)


@dataclass(frozen=True)
class QuadratureResult:
    estimate: HiReal
    error_bound: HiReal
    evaluations: int


@lru_cache(maxsize=64)
def _tanh_sinh_level(dps: int, level: int) -> tuple[tuple[mp.mpf, mp.mpf, mp.mpf], ...]:
    """Nodes on [-1, 1] added at ``level`` (step h = 2**-level) as ``(x, 1 - x, w)``.

    Weights exclude the factor h.  Level 0 holds k = 0, 1, 2, ...; level m > 0
    holds the odd multiples of 2**-m.  Each positive node stands for the pair
    +-x.  ``1 - x`` is computed without cancellation so that points next to an
    endpoint are placed accurately.
    """
    with mp.workdps(dps + 10):
        h = mp.ldexp(1, -level)
        floor = mp.mpf(10) ** (-(dps + 5))
        half_pi = mp.pi / 2
        out = []
        k = 0 if level == 0 else 1
        step = 1 if level == 0 else 2
        while True:
            u = k * h
            sh = half_pi * mp.sinh(u)
            ch = mp.cosh(sh)
            w = half_pi * mp.cosh(u) / (ch * ch)
            if w < floor:
                break
            out.append((mp.tanh(sh), 2 / (1 + mp.exp(2 * sh)), w))
            k += step
    return tuple(out)


def _lazy(v):
    return v() if callable(v) else to_mpf(v)


def integrate(
    f: Callable[[mp.mpf], mp.mpf],
    a,
    b,
    tol: RealLike,
    digits: int | None = None,
    max_digits: int | None = None,
) -> QuadratureResult:
    """Signed integral of ``f`` over [a, b] to absolute tolerance ``tol``.

    ``f`` receives and returns mpf values and is evaluated inside the
    kernel's ``workdps`` block.  ``a`` and ``b`` may be zero-argument callables
    so that limits such as ``pi/6`` are recomputed when the kernel escalates
    precision.

    Raises NonConvergence if ``tol`` is not met below ``max_digits`` and lets
    DomainError from the integrand propagate.
    """
    dps = max(digits or 0, digits_for_tol(tol))
    cap = max_digits if max_digits is not None else max(4 * dps, 200)
    while True:
        res = _integrate_at(f, a, b, tol, dps)
        if res is not None:
            return res
        if dps * 2 > cap:
            raise NonConvergence(
                f"tolerance {tol} not reached at {dps} digits (cap {cap})"
            )
        dps *= 2


def _integrate_at(f, a, b, tol, dps) -> QuadratureResult | None:
    with mp.workdps(dps):
        lo, hi = _lazy(a), _lazy(b)
        tol_v = to_mpf(tol)
        if lo == hi:
            zero = HiReal(mp.mpf(0), dps)
            return QuadratureResult(zero, zero, 0)
        sign = 1
        if lo > hi:
            lo, hi, sign = hi, lo, -1
        mid = (lo + hi) / 2
        half = (hi - lo) / 2
        rounding = mp.mpf(10) ** (-dps + 3)

        raw = mp.mpf(0)
        raw_abs = mp.mpf(0)
        tail = mp.mpf(0)
        evals = 0
        prev = None
        for level in range(MAX_LEVEL + 1):
            for x, c, w in _tanh_sinh_level(dps, level):
                if x == 0:
                    v = f(mid)
                    evals += 1
                    raw += w * v
                    raw_abs += w * abs(v)
                    continue
                if x > 0.5:
                    left, right = lo + half * c, hi - half * c
                else:
                    left, right = mid - half * x, mid + half * x
                if left == lo or right == hi:
                    # collapsed onto an endpoint at this precision
                    continue
                v1 = f(left)
                v2 = f(right)
                evals += 2
                term = w * (abs(v1) + abs(v2))
                raw += w * (v1 + v2)
                raw_abs += term
                if level == 0:
                    tail = term
            h = mp.ldexp(1, -level)
            est = half * h * raw
            floor = rounding * (half * h * raw_abs + 1) + SAFETY_FACTOR * half * tail
            if prev is not None and level >= 3:
                err = SAFETY_FACTOR * abs(est - prev) + floor
                if err <= tol_v:
                    return QuadratureResult(
                        HiReal(sign * est, dps), HiReal(err, dps), evals
                    )
                if floor > tol_v:
                    return None
            prev = est
    return None
