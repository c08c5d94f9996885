"""Exact arithmetic in Q(sqrt(5)) plus Fibonacci/Lucas machinery.

QuadElement stores a + b*sqrt(5) with reduced rational coordinates, which
makes conjugation a sign flip and norms exact rationals.  On top of it sit
the constants alpha = (1+sqrt5)/2 and beta = (1-sqrt5)/2, the numbers
tau(t) = (alpha^t + 1)/sqrt(5), Weil and modified heights, Zeckendorf
expansion, and perfect-power decomposition.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpz

from .arbreal import DEFAULT_BITS, CertifiedReal, certified_less_than


@dataclass(frozen=True)
class QuadElement:
    """a + b*sqrt(5) with exact rational a, b."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    # -- ring/field operations --------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return QuadElement(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return QuadElement(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return QuadElement(-self.a, -self.b)

    def __mul__(self, other):
        other = _coerce(other)
        return QuadElement(
            self.a * other.a + 5 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = QuadElement(1, 0)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "QuadElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero element of Q(sqrt5)")
        return QuadElement(self.a / n, -self.b / n)

    def conj(self) -> "QuadElement":
        return QuadElement(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 5 * self.b * self.b

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def is_integral(self) -> bool:
        """Membership in the ring of integers Z[(1+sqrt5)/2]."""
        u, v = 2 * self.a, 2 * self.b
        if u.denominator != 1 or v.denominator != 1:
            return False
        return (u.numerator - v.numerator) % 2 == 0

    def is_unit(self) -> bool:
        return self.is_integral() and abs(self.norm()) == 1

    def sign(self) -> int:
        """Sign of the real value a + b*sqrt(5), computed exactly."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with 5 b^2
        big_a = a * a > 5 * b * b
        return (1 if a > 0 else -1) if big_a else (1 if b > 0 else -1)

    # -- certified evaluation ---------------------------------------------

    def to_certified(self, bits: int = DEFAULT_BITS) -> CertifiedReal:
        a, b = self.a, self.b
        x = CertifiedReal.from_fraction(a, bits)
        if b != 0:
            s5 = CertifiedReal.from_int(5, bits).sqrt()
            x = x + CertifiedReal.from_fraction(b, bits) * s5
        return x

    def log_certified(self, bits: int = DEFAULT_BITS) -> CertifiedReal:
        if self.sign() <= 0:
            raise ValueError("log of non-positive element")
        return self.to_certified(bits).log()

    def __str__(self):
        return f"({self.a}) + ({self.b})*sqrt(5)"


def _coerce(x) -> QuadElement:
    if isinstance(x, QuadElement):
        return x
    if isinstance(x, (int, mpz, Fraction)):
        return QuadElement(Fraction(x), Fraction(0))
    raise TypeError(f"cannot interpret {x!r} as QuadElement")


ALPHA = QuadElement(Fraction(1, 2), Fraction(1, 2))
BETA = QuadElement(Fraction(1, 2), Fraction(-1, 2))
SQRT5 = QuadElement(Fraction(0), Fraction(1))


@dataclass(frozen=True)
class SolutionTriple:
    """A verified solution (n, m, a, y) of F_n + F_m = y^a with n > m > 1, a > 0."""

    n: int
    m: int
    a: int
    y: int

    def is_valid(self) -> bool:
        if not (self.n > self.m > 1 and self.a > 0 and self.y > 1):
            return False
        return fibonacci(self.n) + fibonacci(self.m) == mpz(self.y) ** self.a


# -- Fibonacci / Lucas -----------------------------------------------------


def fibonacci(n: int):
    """F_n by fast doubling (F_0 = 0, F_1 = 1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return _fib_pair(int(n))[0]


def _fib_pair(n: int):
    # returns (F_n, F_{n+1})
    if n == 0:
        return mpz(0), mpz(1)
    f, g = _fib_pair(n >> 1)
    # F_{2k} = F_k (2 F_{k+1} - F_k);  F_{2k+1} = F_k^2 + F_{k+1}^2
    c = f * (2 * g - f)
    d = f * f + g * g
    if n & 1:
        return d, c + d
    return c, d


def lucas(n: int):
    """L_n = alpha^n + beta^n (L_0 = 2, L_1 = 1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return mpz(2)
    # L_n = F_{n-1} + F_{n+1} = 2 F_{n+1} - F_n
    f, g = _fib_pair(int(n))
    return 2 * g - f


def alpha_pow(n: int) -> QuadElement:
    """alpha^n exactly, any integer n."""
    if n < 0:
        return (BETA ** (-n)) * (-1) ** (n % 2)  # alpha^-1 = -beta
    if n == 0:
        return QuadElement(1, 0)
    return QuadElement(Fraction(int(lucas(n)), 2), Fraction(int(fibonacci(n)), 2))


def tau(t: int) -> QuadElement:
    """tau(t) = (alpha^t + 1)/sqrt(5)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return QuadElement(
        Fraction(int(fibonacci(t)), 2), Fraction(int(lucas(t)) + 2, 10)
    )


def norm(x: QuadElement) -> Fraction:
    return x.norm()


# -- heights ---------------------------------------------------------------


def _max0(x: CertifiedReal) -> CertifiedReal:
    # max{0, x} = (x + |x|)/2, exact as a ball identity
    return (x + abs(x)) / 2


def _ball_max(x: CertifiedReal, y: CertifiedReal) -> CertifiedReal:
    return (x + y + abs(x - y)) / 2


def weil_height(x: QuadElement, bits: int = DEFAULT_BITS) -> CertifiedReal:
    """Absolute logarithmic Weil height from the minimal polynomial of x."""
    if x.is_zero():
        raise ValueError("height of zero")
    if x.is_rational():
        p, q = x.a.numerator, x.a.denominator
        from .arbreal import log_rational

        return log_rational(max(abs(p), q), 1, bits)
    # degree 2: a0 X^2 + a1 X + a2 = a0 (X - x)(X - conj x), content-cleared
    two_a = 2 * x.a
    nrm = x.norm()
    den = _lcm(two_a.denominator, nrm.denominator)
    a0 = den
    a1 = int(-two_a * den)
    a2 = int(nrm * den)
    g = _gcd3(a0, abs(a1), abs(a2))
    a0 = abs(a0 // g)
    log_a0 = (
        CertifiedReal.from_int(a0, bits).log()
        if a0 > 1
        else CertifiedReal.exact_zero(bits)
    )
    t1 = _max0(_abs_log(x, bits))
    t2 = _max0(_abs_log(x.conj(), bits))
    return (log_a0 + t1 + t2) / 2


def _abs_log(x: QuadElement, bits: int) -> CertifiedReal:
    v = x.to_certified(bits)
    if x.sign() < 0:
        v = -v
    return v.log()


def _lcm(a: int, b: int) -> int:
    return abs(a * b) // gmpy2.gcd(mpz(a), mpz(b))


def _gcd3(a, b, c) -> int:
    return int(gmpy2.gcd(gmpy2.gcd(mpz(int(a)), mpz(int(b))), mpz(int(c))))


def modified_height(x: QuadElement, bits: int = DEFAULT_BITS) -> CertifiedReal:
    """h'(x) = max{2 h(x), |log x|, 0.16} over the real field Q(sqrt5)."""
    if x.is_zero():
        raise ValueError("height of zero")
    h2 = 2 * weil_height(x, bits)
    al = _abs_log(x, bits)
    m = _ball_max(h2, abs(al))
    return _ball_max(m, CertifiedReal.from_fraction(Fraction(16, 100), bits))


# -- Zeckendorf ------------------------------------------------------------

_FIB_CACHE = [mpz(0), mpz(1)]  # F_0, F_1


def _fib_list_upto(N):
    while _FIB_CACHE[-1] <= N:
        _FIB_CACHE.append(_FIB_CACHE[-1] + _FIB_CACHE[-2])
    return _FIB_CACHE


def zeckendorf(N) -> list[int]:
    """Indices d_1 < ... < d_k (all >= 2, gaps > 1) with sum F_{d_i} = N."""
    N = mpz(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    fibs = _fib_list_upto(N)
    out = []
    rem = N
    # greedy: largest F_d <= rem, with the index-2 convention for F = 1
    d = bisect_right(fibs, rem) - 1
    while rem > 0:
        while fibs[d] > rem:
            d -= 1
        idx = 2 if d == 1 else d
        out.append(idx)
        rem -= fibs[d]
        d -= 2
    out.reverse()
    return out


# -- perfect powers --------------------------------------------------------


def perfect_power_decompose(N) -> tuple[int, int]:
    """(y, a) with y^a = N, a maximal (y itself is not a perfect power)."""
    N = mpz(N)
    if N < 2:
        raise ValueError("N must be >= 2")
    y, a = N, 1
    reduced = True
    while reduced:
        reduced = False
        for p in _primes_upto(int(y).bit_length()):
            root, exact = gmpy2.iroot(y, p)
            if exact:
                y, a = root, a * p
                reduced = True
                break
    return int(y), a


def _primes_upto(n: int) -> list[int]:
    sieve = bytearray(n + 1)
    out = []
    for p in range(2, n + 1):
        if not sieve[p]:
            out.append(p)
            for q in range(p * p, n + 1, p):
                sieve[q] = 1
    return out


# -- Binet envelope --------------------------------------------------------


def binet_bounds_check(n: int, bits: int = DEFAULT_BITS) -> bool:
    """Certify 0.38 alpha^n < F_n < 0.48 alpha^n."""
    if n <= 1:
        raise ValueError("n must be > 1")
    an = alpha_pow(n).to_certified(bits)
    fn = CertifiedReal.from_int(fibonacci(n), bits)
    lo = CertifiedReal.from_fraction(Fraction(38, 100), bits) * an
    hi = CertifiedReal.from_fraction(Fraction(48, 100), bits) * an
    return certified_less_than(lo, fn) and certified_less_than(fn, hi)
