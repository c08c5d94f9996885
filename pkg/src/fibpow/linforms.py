"""Linear forms in logarithms and their certified lower bounds.

A LinearForm is Lambda = b_1 log x_1 + ... + b_n log x_n with integer
coefficients and algebraic bases from Q(sqrt5).  Two classical lower
bounds are provided (a Baker-type n-term bound and a sharper two-term
bound), together with the single-solution bound n < c (log y)^2 (log n)^2
and the explicit upper envelopes for the two linear forms attached to an
equation F_n + F_m = y^a.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .arbreal import DEFAULT_BITS, CertifiedReal, certified_less_than, log_rational
from .quadfield import ALPHA, QuadElement, alpha_pow, modified_height


class NonRealField(ValueError):
    """Raised for the complex-embedding variant, which is not implemented."""


@dataclass(frozen=True)
class FormTerm:
    coefficient: int
    base: QuadElement
    height_bound: CertifiedReal  # A_j >= h'(base)
    log_value: CertifiedReal


@dataclass(frozen=True)
class LinearForm:
    terms: list[FormTerm]
    field_degree: int = 2
    real_field: bool = True

    def value(self) -> CertifiedReal:
        acc = CertifiedReal.exact_zero()
        for t in self.terms:
            acc = acc + t.coefficient * t.log_value
        return acc


def form_term(
    coefficient: int,
    base,
    bits: int = DEFAULT_BITS,
    height_bound: CertifiedReal | None = None,
) -> FormTerm:
    """Build a term, deriving height and log from the exact base if not given."""
    if not isinstance(base, QuadElement):
        base = QuadElement(Fraction(base), Fraction(0))
    if base.is_zero() or base == QuadElement(Fraction(1), Fraction(0)):
        raise ValueError("base must be nonzero and != 1")
    if height_bound is None:
        height_bound = modified_height(base, bits)
    return FormTerm(int(coefficient), base, height_bound, base.log_certified(bits))


def linear_form(coeffs_and_bases, bits: int = DEFAULT_BITS) -> LinearForm:
    return LinearForm([form_term(c, b, bits) for c, b in coeffs_and_bases])


# -- Baker-type n-term lower bound -----------------------------------------


def _euler_e(bits: int) -> CertifiedReal:
    return CertifiedReal.from_int(1, bits).exp()


def _exp_fraction(fr: Fraction, bits: int) -> CertifiedReal:
    return CertifiedReal.from_fraction(fr, bits).exp()


def _c_of_n(n: int, kappa: int, bits: int) -> CertifiedReal:
    # C(n,kappa) = 16/(n! kappa) e^n (2n+1+2kappa)(n+2)(4(n+1))^{n+1} (en/2)^kappa
    rational = (
        Fraction(16, factorial(n) * kappa)
        * (2 * n + 1 + 2 * kappa)
        * (n + 2)
        * Fraction(4 * (n + 1)) ** (n + 1)
        * Fraction(n, 2) ** kappa
    )
    return CertifiedReal.from_fraction(rational, bits) * _exp_fraction(
        Fraction(n + kappa), bits
    )


def _c0(n: int, D: int, bits: int) -> CertifiedReal:
    # C0 = log(e^{4.4n+7} n^{5.5} D^2 log(eD))
    #    = (4.4n+7) + 5.5 log n + log(D^2 (1 + log D))
    out = CertifiedReal.from_fraction(Fraction(22 * n + 35, 5), bits)
    out = out + CertifiedReal.from_fraction(Fraction(11, 2), bits) * log_rational(
        n, 1, bits
    )
    tail = CertifiedReal.from_int(D * D, bits) * (1 + log_rational(D, 1, bits))
    return out + tail.log()


def w0_scale(D: int, bits: int = DEFAULT_BITS) -> CertifiedReal:
    """The factor s with W0 = log(s * B): s = 1.5 e D log(eD)."""
    return (
        CertifiedReal.from_fraction(Fraction(3 * D, 2), bits)
        * _euler_e(bits)
        * (1 + log_rational(D, 1, bits))
    )


def matveev_coefficient(n: int, D: int, bits: int = DEFAULT_BITS) -> CertifiedReal:
    """The constant c in the bound log|Lambda| >= -c * Omega * log(s B)."""
    kappa = 1
    c = _c_of_n(n, kappa, bits)
    if n > 6:
        c = c * Fraction(n, 6)
    return c * _c0(n, D, bits) * (D * D)


def matveev_lower_bound(form: LinearForm, bits: int = DEFAULT_BITS) -> CertifiedReal:
    """Certified lower bound for log|Lambda| of a nonzero n-term form."""
    if not form.real_field:
        raise NonRealField("only the real-embedding constant set is implemented")
    terms = [t for t in form.terms if t.coefficient != 0]
    if not terms:
        raise ValueError("form has no nonzero terms")
    n = len(terms)
    D = form.field_degree
    b_star = max(1, max(abs(t.coefficient) for t in terms))
    omega = CertifiedReal.from_int(1, bits)
    for t in terms:
        omega = omega * t.height_bound
    w0 = (w0_scale(D, bits) * b_star).log()
    return -(matveev_coefficient(n, D, bits) * w0 * omega)


# -- two-term lower bound ---------------------------------------------------


def laurent_lower_bound(
    b1: int,
    b2: int,
    logA1: CertifiedReal,
    logA2: CertifiedReal,
    D: int,
    bits: int = DEFAULT_BITS,
) -> CertifiedReal:
    """Lower bound -17.9 D^4 (max{log b' + 0.38, 30/D, 1})^2 logA1 logA2."""
    if b1 <= 0 or b2 <= 0:
        raise ValueError("coefficients must be positive")
    b_prime = (
        CertifiedReal.from_int(b1, bits) / (D * logA2)
        + CertifiedReal.from_int(b2, bits) / (D * logA1)
    )
    m = b_prime.log() + Fraction(38, 100)
    m = _cmax(m, CertifiedReal.from_fraction(Fraction(30, D), bits))
    m = _cmax(m, CertifiedReal.from_int(1, bits))
    coeff = CertifiedReal.from_fraction(Fraction(179, 10) * D**4, bits)
    return -(coeff * m * m * logA1 * logA2)


def _cmax(x: CertifiedReal, y: CertifiedReal) -> CertifiedReal:
    return (x + y + abs(x - y)) / 2


# -- single-solution bound --------------------------------------------------

_N_BOUND_COEFF = 34 * 10**21  # n < 3.4e22 (log y)^2 (log 13.81 n)^2
_GAP_COEFF = 234 * 10**9  # n - m < 2.34e11 log y log(13.81 n)
_W0_NUM = Fraction(1381, 100)  # 13.81 >= 1.5 e D log(eD) at D = 2


def log_poly_fixed_point(
    K: CertifiedReal, factors, bits: int = DEFAULT_BITS
) -> int:
    """Least certified N with K * prod_i log(c_i n)^{p_i} < n for all n >= N.

    `factors` is a list of (c_i: Fraction, p_i: positive integer).  The map
    f(x) = K prod log(c_i x)^{p_i} is increasing, so iterating from below
    approaches its fixed point without overshooting.  The returned N is
    certified directly (f(N) < N) together with sum_i p_i / log(c_i N) < 1,
    which makes x / prod log(c_i x)^{p_i} increasing on [N, inf) and hence
    extends the inequality to all n >= N.
    """
    factors = [(Fraction(c), int(p)) for c, p in factors]

    def f(x: Fraction) -> CertifiedReal:
        out = K
        for c, p in factors:
            cx = c * x
            lg = log_rational(cx.numerator, cx.denominator, bits)
            for _ in range(p):
                out = out * lg
        return out

    x = Fraction(10**3)
    for _ in range(300):
        nxt = f(x).upper
        if abs(nxt - x) < 1:
            break
        x = nxt
    n = int(x.__floor__()) + 1
    while True:
        f_n = f(Fraction(n))
        slope = sum(
            Fraction(p) / log_rational((c * n).numerator, (c * n).denominator).lower
            for c, p in factors
        )
        if f_n.upper < n and slope < 1:
            return n
        n = max(n + 1, int(n * 1.001) + 1)


def bravo_luca_n_bound(y: int, bits: int = DEFAULT_BITS) -> int:
    """Least certified N with n >= N implying n >= 3.4e22 (log y)^2 (log 13.81 n)^2."""
    if y < 2:
        raise ValueError("y must be >= 2")
    return n_bound_from_logy(log_rational(y, 1, bits), bits)


def n_bound_from_logy(log_y: CertifiedReal, bits: int = DEFAULT_BITS) -> int:
    """As bravo_luca_n_bound, but from a certified (upper bound on) log y."""
    K = _N_BOUND_COEFF * log_y * log_y
    return log_poly_fixed_point(K, [(_W0_NUM, 2)], bits)


def gap_bound(y: int, n_bound: int, bits: int = DEFAULT_BITS) -> int:
    """Integer upper bound for n - m: 2.34e11 log y log(13.81 n)."""
    if y < 2 or n_bound < 1:
        raise ValueError("need y >= 2 and n >= 1")
    w = _W0_NUM * n_bound
    v = _GAP_COEFF * log_rational(y, 1, bits) * log_rational(
        w.numerator, w.denominator, bits
    )
    return int(v.upper.__floor__()) + 1


# -- explicit upper envelopes ----------------------------------------------

L1 = "L1"
L2 = "L2"


def lambda_upper_bound(
    kind: str, n: int, m: int, bits: int = DEFAULT_BITS
) -> CertifiedReal:
    """Explicit upper bound for |Lambda| of the named form.

    L1 is the three-term form a log y - n log alpha + log sqrt5 (valid for
    n - m >= 3), bounded by 2.03 alpha^(m-n).  L2 is the form with the
    combined base (alpha^(n-m)+1)/sqrt5, bounded by 1.1 alpha^(-n).
    """
    if not n > m > 1:
        raise ValueError("need n > m > 1")
    if kind == L1:
        if n - m < 3:
            raise ValueError("L1 envelope requires n - m >= 3")
        return Fraction(203, 100) * alpha_pow(m - n).to_certified(bits)
    if kind == L2:
        return Fraction(11, 10) * alpha_pow(-n).to_certified(bits)
    raise ValueError(f"unknown kind {kind!r}")


def adjacent_gap_bounds(
    n: int, bits: int = DEFAULT_BITS
) -> tuple[CertifiedReal, CertifiedReal]:
    """Two-sided envelope for n - m = 2, where F_n + F_{n-2} = L_{n-1}.

    The form is log(alpha^(n-1)/L_{n-1}) = -log(1 -+ r) with
    r = alpha^(2-2n)/(1 -+ alpha^(2-2n)), so for n >= 4
    0.94 alpha^(2-2n) < |(n-1) log alpha - a log y| < 1.05 alpha^(2-2n)."""
    if n < 4:
        raise ValueError("adjacent-gap envelope requires n >= 4")
    e = alpha_pow(2 - 2 * n).to_certified(bits)
    return Fraction(94, 100) * e, Fraction(105, 100) * e


# -- build-time constant audit ---------------------------------------------


def verify_constants(bits: int = DEFAULT_BITS) -> dict[str, bool]:
    """Certify the hard-coded numeric constants instead of trusting them."""
    from .quadfield import binet_bounds_check

    out = {}
    out["w0_scale_2"] = certified_less_than(
        w0_scale(2, bits), CertifiedReal.from_fraction(_W0_NUM, bits)
    )
    coeff = matveev_coefficient(3, 2, bits)
    ref = Fraction(726 * 10**8)
    out["baker_3term_coeff"] = (
        coeff.upper < ref and coeff.lower > ref * Fraction(99, 100)
    )
    laurent = Fraction(179, 10) * 2**4 * Fraction(55, 100) * Fraction(81, 100) * 4
    out["two_term_coeff"] = abs(laurent - Fraction(51037, 100)) <= Fraction(
        51037, 100
    ) * Fraction(1, 1000)
    out["binet_envelope"] = all(binet_bounds_check(k, bits) for k in range(2, 61))
    # alpha^2 = alpha + 1, the identity behind every exponent rewrite
    out["alpha_quadratic"] = (ALPHA * ALPHA - ALPHA - 1).is_zero()
    return out
