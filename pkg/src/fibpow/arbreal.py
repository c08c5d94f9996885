"""Certified arbitrary-precision real arithmetic.

Values are balls (midpoint, radius): the exact real always lies in
[midpoint - radius, midpoint + radius].  Every operation widens the radius
by the propagated input radii plus one ulp of the freshly rounded midpoint,
so soundness is a local, mechanically checkable property of each primitive.

Each value carries a recompute closure, so any derived quantity can be
re-evaluated from its exact inputs at higher precision.  Certified
predicates (floor, nearest-integer distance, comparisons) escalate
precision on a doubling ladder up to a cap (FIBPOW_MAX_BITS, default 8192)
and raise PrecisionExhausted if the cap is hit without a decision.
"""

from __future__ import annotations

import os
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpz

DEFAULT_BITS = 256
DEFAULT_MAX_BITS = 8192

_RAD_PREC = 64
_rup = gmpy2.context(precision=_RAD_PREC, round=gmpy2.RoundUp)
_rdown = gmpy2.context(precision=_RAD_PREC, round=gmpy2.RoundDown)

_ZERO = mpfr(0)

_mid_ctxs: dict[int, gmpy2.context] = {}


def _mid_ctx(bits: int) -> gmpy2.context:
    ctx = _mid_ctxs.get(bits)
    if ctx is None:
        ctx = gmpy2.context(precision=bits, round=gmpy2.RoundToNearest)
        _mid_ctxs[bits] = ctx
    return ctx


def max_bits() -> int:
    """Precision cap for the escalation ladder (env override FIBPOW_MAX_BITS)."""
    v = os.environ.get("FIBPOW_MAX_BITS")
    return int(v) if v else DEFAULT_MAX_BITS


def _cvt(ctx, x) -> mpfr:
    # round x (int/mpz/mpfr) into ctx's precision with ctx's rounding mode
    return ctx.add(x, 0)


class PrecisionExhausted(ArithmeticError):
    """A certified decision could not be reached below the precision cap."""


def _mpfr_to_fraction(x: mpfr) -> Fraction:
    if x == 0:
        return Fraction(0)
    p, q = x.as_integer_ratio()
    return Fraction(int(p), int(q))


def _ulp_term(mid: mpfr, bits: int) -> mpfr:
    # rounding error of a round-to-nearest result is <= |mid| * 2^(1-bits)
    if mid == 0:
        return _ZERO
    return _rup.div_2exp(_rup.abs(mid), bits - 1)


class CertifiedReal:
    """Ball (midpoint, radius) plus a closure recomputing it at any precision."""

    __slots__ = ("midpoint", "radius", "precision_bits", "_compute", "_cache")

    def __init__(self, compute, bits: int = DEFAULT_BITS):
        # escalate at construction if a primitive cannot certify at `bits`
        # (e.g. division by a not-yet-separated-from-zero interval)
        err = None
        for b in _ladder(bits):
            try:
                mid, rad = compute(b)
            except PrecisionExhausted as exc:
                err = exc
                continue
            self.midpoint = mid
            self.radius = rad
            self.precision_bits = b
            self._compute = compute
            self._cache = {b: (mid, rad)}
            return
        raise err if err is not None else PrecisionExhausted("construction failed")

    def eval_at(self, bits: int):
        """The (midpoint, radius) ball at the given precision, memoized."""
        got = self._cache.get(bits)
        if got is None:
            got = self._compute(bits)
            self._cache[bits] = got
        return got

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_int(cls, n, bits: int = DEFAULT_BITS) -> "CertifiedReal":
        n = mpz(n)

        def compute(b):
            m = _cvt(_mid_ctx(b), n)
            if m == n:
                return m, _ZERO
            return m, _rup.add(_ulp_term(m, b), _ulp_term(m, b))

        return cls(compute, bits)

    @classmethod
    def from_fraction(cls, fr, bits: int = DEFAULT_BITS) -> "CertifiedReal":
        fr = Fraction(fr)
        p, q = mpz(fr.numerator), mpz(fr.denominator)

        def compute(b):
            ctx = _mid_ctx(b)
            m = ctx.div(p, q)
            # quotient rounding plus nothing else: p, q are exact
            return m, _ulp_term(m, b)

        return cls(compute, bits)

    @classmethod
    def exact_zero(cls, bits: int = DEFAULT_BITS) -> "CertifiedReal":
        return cls(lambda b: (_ZERO, _ZERO), bits)

    # -- refinement --------------------------------------------------------

    def at(self, bits: int) -> "CertifiedReal":
        """Re-evaluate at the requested precision (memoized, cache shared)."""
        if bits == self.precision_bits:
            return self
        err = None
        for b in _ladder(bits):
            try:
                mid, rad = self.eval_at(b)
            except PrecisionExhausted as exc:
                err = exc
                continue
            clone = object.__new__(CertifiedReal)
            clone.midpoint = mid
            clone.radius = rad
            clone.precision_bits = b
            clone._compute = self._compute
            clone._cache = self._cache
            return clone
        raise err if err is not None else PrecisionExhausted("refinement failed")

    # -- endpoints ---------------------------------------------------------

    @property
    def lower(self) -> Fraction:
        return _mpfr_to_fraction(self.midpoint) - _mpfr_to_fraction(self.radius)

    @property
    def upper(self) -> Fraction:
        return _mpfr_to_fraction(self.midpoint) + _mpfr_to_fraction(self.radius)

    def contains(self, value) -> bool:
        v = Fraction(value)
        return self.lower <= v <= self.upper

    def __repr__(self):
        return f"CertifiedReal({self.midpoint!r} +/- {self.radius!r}, bits={self.precision_bits})"

    def __float__(self):
        return float(self.midpoint)

    # -- arithmetic --------------------------------------------------------

    def _binary(self, other, op):
        other = _coerce(other)
        bits = max(self.precision_bits, other.precision_bits)
        return CertifiedReal(
            lambda b: op(self.eval_at(b), other.eval_at(b), b), bits
        )

    def __add__(self, other):
        return self._binary(other, _ball_add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, _ball_sub)

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __mul__(self, other):
        return self._binary(other, _ball_mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, _ball_div)

    def __rtruediv__(self, other):
        return _coerce(other).__truediv__(self)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        out = CertifiedReal.from_int(1, self.precision_bits)
        base = self
        while e:
            if e & 1:
                out = out * base
            if e > 1:
                base = base * base
            e >>= 1
        return out

    def __neg__(self):
        return CertifiedReal(lambda b: _ball_neg(self.eval_at(b), b), self.precision_bits)

    def __abs__(self):
        return CertifiedReal(lambda b: _ball_abs(self.eval_at(b), b), self.precision_bits)

    def log(self) -> "CertifiedReal":
        return CertifiedReal(lambda b: _ball_log(self.eval_at(b), b), self.precision_bits)

    def sqrt(self) -> "CertifiedReal":
        return CertifiedReal(lambda b: _ball_sqrt(self.eval_at(b), b), self.precision_bits)

    def exp(self) -> "CertifiedReal":
        return CertifiedReal(lambda b: _ball_exp(self.eval_at(b), b), self.precision_bits)


def _coerce(x) -> CertifiedReal:
    if isinstance(x, CertifiedReal):
        return x
    if isinstance(x, Fraction):
        return CertifiedReal.from_fraction(x)
    if isinstance(x, (int, mpz)):
        return CertifiedReal.from_int(x)
    raise TypeError(f"cannot interpret {x!r} as CertifiedReal")


# -- ball primitives -------------------------------------------------------


def _ball_add(x, y, bits):
    m = _mid_ctx(bits).add(x[0], y[0])
    rad = _rup.add(_rup.add(x[1], y[1]), _ulp_term(m, bits))
    return m, rad


def _ball_sub(x, y, bits):
    m = _mid_ctx(bits).sub(x[0], y[0])
    rad = _rup.add(_rup.add(x[1], y[1]), _ulp_term(m, bits))
    return m, rad


def _ball_neg(x, bits):
    return _mid_ctx(bits).minus(x[0]), x[1]


def _ball_abs(x, bits):
    return _mid_ctx(bits).abs(x[0]), x[1]


def _ball_mul(x, y, bits):
    m = _mid_ctx(bits).mul(x[0], y[0])
    # |x*y - mx*my| <= |mx| ry + |my| rx + rx ry, plus rounding of m
    rad = _rup.add(
        _rup.add(_rup.mul(_rup.abs(x[0]), y[1]), _rup.mul(_rup.abs(y[0]), x[1])),
        _rup.add(_rup.mul(x[1], y[1]), _ulp_term(m, bits)),
    )
    return m, rad


def _ball_div(x, y, bits):
    my, ry = y[0], y[1]
    denom_low = _rdown.sub(_rdown.abs(my), ry)
    if denom_low <= 0:
        raise PrecisionExhausted("division by interval containing zero")
    m = _mid_ctx(bits).div(x[0], y[0])
    # |x/y - mx/my| <= (rx |my| + |mx| ry) / (|my| (|my| - ry))
    num = _rup.add(_rup.mul(x[1], _rup.abs(my)), _rup.mul(_rup.abs(x[0]), ry))
    rad = _rup.add(
        _rup.div(num, _rdown.mul(_rdown.abs(my), denom_low)), _ulp_term(m, bits)
    )
    return m, rad


def _ball_log(x, bits):
    mx, rx = x[0], x[1]
    low = _rdown.sub(mx, rx)
    if low <= 0:
        raise PrecisionExhausted("log of interval touching (-inf, 0]")
    m = _mid_ctx(bits).log(mx)
    # mean value: |log x - log mx| <= rx / (mx - rx)
    rad = _rup.add(_rup.div(rx, low), _ulp_term(m, bits))
    return m, rad


def _ball_sqrt(x, bits):
    mx, rx = x[0], x[1]
    low = _rdown.sub(mx, rx)
    if low < 0:
        raise PrecisionExhausted("sqrt of interval touching negatives")
    m = _mid_ctx(bits).sqrt(mx)
    if rx == 0:
        rad = _ulp_term(m, bits)
    elif low == 0:
        rad = _rup.add(_rup.sqrt(rx), _ulp_term(m, bits))
    else:
        # |sqrt x - sqrt mx| <= rx / (2 sqrt(mx - rx))
        rad = _rup.add(
            _rup.div(rx, _rdown.mul(mpfr(2), _rdown.sqrt(low))),
            _ulp_term(m, bits),
        )
    return m, rad


def _ball_exp(x, bits):
    mx, rx = x[0], x[1]
    m = _mid_ctx(bits).exp(mx)
    if rx == 0:
        rad = _ulp_term(m, bits)
    else:
        # mean value: |exp x - exp mx| <= exp(mx + rx) * rx
        rad = _rup.add(
            _rup.mul(_rup.exp(_rup.add(_cvt(_rup, mx), rx)), rx),
            _ulp_term(m, bits),
        )
    return m, rad


# -- public operations -----------------------------------------------------


def log_rational(p, q, bits: int = DEFAULT_BITS) -> CertifiedReal:
    """log(p/q) for positive integers p, q, radius well below 2^(1-bits)*max(1,|log|)."""
    p, q = mpz(p), mpz(q)
    if p < 1 or q < 1:
        raise ValueError("log_rational requires p, q >= 1")
    if p == q:
        return CertifiedReal.exact_zero(bits)

    def compute(b):
        ctx = _mid_ctx(b)
        m = ctx.div(p, q)
        return _ball_log((m, _ulp_term(m, b)), b)

    return CertifiedReal(compute, bits)


def _ladder(start_bits: int):
    bits = max(start_bits, DEFAULT_BITS)
    cap = max_bits()
    while True:
        yield min(bits, cap)
        if bits >= cap:
            return
        bits *= 2


def floor_scaled(x: CertifiedReal, C) -> int:
    """Exact floor(C * x) for a positive integer scale C, escalating precision."""
    C = int(C)
    if C < 1:
        raise ValueError("C must be >= 1")
    for bits in _ladder(x.precision_bits):
        try:
            xb = x.at(bits)
        except PrecisionExhausted:
            continue
        lo = (C * xb.lower).__floor__()
        hi = (C * xb.upper).__floor__()
        if lo == hi:
            return int(lo)
    raise PrecisionExhausted(
        f"floor_scaled undecided at cap (value may be an exact multiple of 1/{C})"
    )


def certified_floor(x: CertifiedReal) -> int:
    return floor_scaled(x, 1)


def nearest_int_distance(x: CertifiedReal) -> CertifiedReal:
    """||x|| = distance from x to the nearest integer, as a certified ball."""

    def compute(bits):
        xb = x.at(bits)
        lo, hi = xb.lower, xb.upper
        k_lo = round(lo)
        k_hi = round(hi)
        if k_lo != k_hi:
            # straddles a half-integer at this precision
            if hi - lo < Fraction(1, 4):
                # genuine near-half case: certified upper 1/2, conservative lower
                d_lo = min(abs(lo - k_lo), abs(hi - k_hi))
                mid = (Fraction(1, 2) + d_lo) / 2
                m = _mid_ctx(bits).div(mpz(mid.numerator), mpz(mid.denominator))
                r = _rup.add(
                    _frac_rad_up((Fraction(1, 2) - d_lo) / 2), _ulp_term(m, bits)
                )
                return m, r
            raise PrecisionExhausted("interval too wide for nearest-integer distance")
        mid, rad = x.eval_at(bits)
        m = _mid_ctx(bits).sub(mid, mpz(k_lo))
        return _mid_ctx(bits).abs(m), _rup.add(rad, _ulp_term(m, bits))

    for bits in _ladder(x.precision_bits):
        try:
            return CertifiedReal(compute, bits)
        except PrecisionExhausted:
            continue
    raise PrecisionExhausted("nearest_int_distance undecided at cap")


def _frac_rad_up(fr: Fraction) -> mpfr:
    return _rup.div(mpz(fr.numerator), mpz(fr.denominator))


def certified_less_than(x: CertifiedReal, y: CertifiedReal) -> bool:
    """True iff x < y certified; escalates precision, raises on possible equality."""
    x, y = _coerce(x), _coerce(y)
    for bits in _ladder(max(x.precision_bits, y.precision_bits)):
        try:
            xb, yb = x.at(bits), y.at(bits)
        except PrecisionExhausted:
            continue
        if xb.upper < yb.lower:
            return True
        if yb.upper < xb.lower:
            return False
    raise PrecisionExhausted("values may be equal")


def certified_sign(x: CertifiedReal) -> int:
    """Sign of x (-1/0/+1); 0 only for a width-zero ball, raises if undecidable."""
    if x.radius == 0 and x.midpoint == 0:
        return 0
    for bits in _ladder(x.precision_bits):
        try:
            xb = x.at(bits)
        except PrecisionExhausted:
            continue
        if xb.lower > 0:
            return 1
        if xb.upper < 0:
            return -1
    raise PrecisionExhausted("sign undecided (value may be zero)")
