"""Multiplicative (in)dependence of alpha, sqrt5 and tau(t), and
non-vanishing certificates for the pipeline's linear forms.

tau(t) = (alpha^t + 1)/sqrt5 satisfies exact identities for t in {1, 2, 10}
(tau(1) = alpha^2/sqrt5, tau(2) = alpha, tau(10) = 5 alpha^5); for every
other t the numbers are multiplicatively independent.  Dependence search
works with exact prime-ideal valuation vectors in Q(sqrt5): any
multiplicative relation must lie in the integer kernel of the valuation
matrix, and each kernel vector is resolved to an exact relation of the
form product = +-alpha^k.  For t > 15 the value alpha^t + 1 has a
primitive prime divisor, which rules out any relation; this cutoff is
additionally cross-checked empirically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .quadfield import ALPHA, SQRT5, QuadElement, alpha_pow, tau

PRIMITIVE_DIVISOR_CUTOFF = 15  # alpha^t + 1 has a primitive divisor for t > 15

NON_ZERO = "NonZero"
ZERO_CASE = "ZeroCase"

L4A = "L4a"
L4B = "L4b"
L5 = "L5"

# tau(t) = alpha^p * sqrt5^q for the exceptional t
TAU_AS_MONOMIAL = {1: (2, -1), 2: (1, 0), 10: (5, 2)}


@dataclass(frozen=True)
class DependenceRelation:
    """Exponents (e_alpha, e_sqrt5, e_tau1, ...) with product = +-1."""

    exponents: tuple
    sign: int  # the product equals this (+1 or -1)
    witness: str

    def verify(self, t_list) -> bool:
        e = self.exponents
        if all(x == 0 for x in e):
            return False
        prod = alpha_pow(e[0]) * SQRT5 ** e[1]
        for t, ex in zip(t_list, e[2:]):
            prod = prod * tau(t) ** ex
        return prod == QuadElement(Fraction(self.sign), Fraction(0))


# -- prime-ideal valuations -------------------------------------------------


def _factor(n: int) -> dict[int, int]:
    n = abs(int(n))
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _split_generator(p: int) -> QuadElement:
    """A generator pi of one prime above p = +-1 mod 5, norm(pi) = +-p."""
    for v in range(1, 20 * p):
        for s in (4 * p, -4 * p):
            u2 = 5 * v * v + s
            if u2 < 0:
                continue
            u = math.isqrt(u2)
            if u * u == u2 and (u - v) % 2 == 0:
                return QuadElement(Fraction(u, 2), Fraction(v, 2))
    raise ArithmeticError(f"no element of norm +-{p} found")  # pragma: no cover


def _division_valuation(x: QuadElement, pi: QuadElement) -> int:
    """v_pi(x) for integral x by repeated exact division."""
    k = 0
    while True:
        q = x / pi
        if not q.is_integral():
            return k
        x, k = q, k + 1


@lru_cache(maxsize=None)
def _ideals_and_valuations(t_tuple: tuple):
    """Valuation vectors of tau(t) (and sqrt5) over all relevant prime ideals."""
    zs = {t: alpha_pow(t) + 1 for t in t_tuple}
    norms = {t: int(z.norm()) for t, z in zs.items()}
    primes = sorted(set(p for n in norms.values() for p in _factor(n)) | {5})

    columns = []  # one entry per prime ideal: ("ram5",) / ("inert", p) / ("split", pi)
    for p in primes:
        if p == 5:
            columns.append(("ram5", None))
        elif p % 5 in (1, 4):
            pi = _split_generator(p)
            columns.append(("split", pi))
            columns.append(("split", pi.conj()))
        else:
            columns.append(("inert", p))

    def valuations(z: QuadElement, nrm: int) -> list[int]:
        row = []
        for kind, gen in columns:
            if kind == "ram5":
                v, n = 0, abs(nrm)
                while n % 5 == 0:
                    v, n = v + 1, n // 5
                row.append(v)
            elif kind == "inert":
                v, n = 0, abs(nrm)
                while n % gen == 0:
                    v, n = v + 1, n // gen
                row.append(v // 2)
            else:
                row.append(_division_valuation(z, gen))
        return row

    sqrt5_row = [1 if kind == "ram5" else 0 for kind, _ in columns]
    tau_rows = {}
    for t in t_tuple:
        zr = valuations(zs[t], norms[t])
        tau_rows[t] = [zv - sv for zv, sv in zip(zr, sqrt5_row)]
    return sqrt5_row, tau_rows


# -- integer kernel ---------------------------------------------------------


def _integer_kernel(rows: list[list[int]]) -> list[list[int]]:
    """Basis of {c integer: sum_i c_i * rows_i = 0}, primitive vectors."""
    n = len(rows)
    if n == 0:
        return []
    m = len(rows[0])
    # row-reduce the transpose (constraints on c) over Q
    a = [[Fraction(rows[i][j]) for i in range(n)] for j in range(m)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][col]
        a[r] = [x / inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -a[i][fc]
        den = math.lcm(*(x.denominator for x in vec))
        ints = [int(x * den) for x in vec]
        g = math.gcd(*(abs(x) for x in ints))
        basis.append([x // g for x in ints])
    return basis


# -- dependence search ------------------------------------------------------


def _alpha_exponent(u: QuadElement) -> tuple[int, int]:
    """For a value u = +-alpha^k return (k, sign); raise otherwise."""
    val = float(u.a) + float(u.b) * math.sqrt(5.0)
    if val == 0:
        raise ValueError("zero is not of the form +-alpha^k")
    k0 = round(math.log(abs(val)) / math.log((1 + math.sqrt(5)) / 2))
    for k in (k0, k0 - 1, k0 + 1):
        p = alpha_pow(k)
        if u == p:
            return k, 1
        if u == -p:
            return k, -1
    raise ArithmeticError("unit is not a power of alpha up to sign")


def find_dependence(t_list, include_sqrt5: bool = True):
    """A nontrivial multiplicative relation among alpha, sqrt5 (optional)
    and tau(t) for t in t_list, or None if they are independent."""
    t_list = list(t_list)
    if any(t < 1 or t > PRIMITIVE_DIVISOR_CUTOFF for t in t_list):
        raise ValueError(f"all t must lie in [1, {PRIMITIVE_DIVISOR_CUTOFF}]")
    if len(set(t_list)) != len(t_list):
        raise ValueError("t values must be distinct")
    sqrt5_row, tau_rows = _ideals_and_valuations(tuple(sorted(t_list)))
    rows = [tau_rows[t] for t in t_list]
    if include_sqrt5:
        rows = [sqrt5_row] + rows
    basis = _integer_kernel(rows)
    if not basis:
        return None
    vec = basis[0]
    if include_sqrt5:
        c_sqrt5, c_taus = vec[0], vec[1:]
    else:
        c_sqrt5, c_taus = 0, vec
    # orient so the first nonzero tau exponent is positive
    lead = next((c for c in c_taus if c != 0), c_sqrt5)
    if lead < 0:
        c_sqrt5, c_taus = -c_sqrt5, [-c for c in c_taus]
    prod = SQRT5 ** c_sqrt5
    for t, c in zip(t_list, c_taus):
        prod = prod * tau(t) ** c
    k, sign = _alpha_exponent(prod)
    rel = DependenceRelation(
        exponents=tuple([-k, c_sqrt5] + list(c_taus)),
        sign=sign,
        witness="integer kernel of the prime-ideal valuation matrix",
    )
    assert rel.verify(t_list)
    return rel


def independent_tau(t: int) -> bool:
    """True iff {alpha, sqrt5, tau(t)} is multiplicatively independent."""
    if t > PRIMITIVE_DIVISOR_CUTOFF:
        return True
    return find_dependence([t]) is None


def unit_test_tau(t: int) -> bool:
    """True iff tau(t) is a unit of Q(sqrt5) (norm +-1, integral)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    x = tau(t)
    return x.is_integral() and abs(x.norm()) == 1


# -- symbolic forms over {log alpha, log sqrt5, log tau(t)} ----------------

ALPHA_SYM = "alpha"
SQRT5_SYM = "sqrt5"


def tau_sym(t: int):
    return ("tau", t)


def symbol_value(sym) -> QuadElement:
    if sym == ALPHA_SYM:
        return ALPHA
    if sym == SQRT5_SYM:
        return SQRT5
    return tau(sym[1])


def collapse_form(terms):
    """Substitute tau(1), tau(2), tau(10) by their alpha/sqrt5 monomials and
    merge repeated symbols; zero coefficients are dropped."""
    acc: dict = {}
    for coeff, sym in terms:
        if isinstance(sym, tuple) and sym[1] in TAU_AS_MONOMIAL:
            p, q = TAU_AS_MONOMIAL[sym[1]]
            acc[ALPHA_SYM] = acc.get(ALPHA_SYM, 0) + coeff * p
            acc[SQRT5_SYM] = acc.get(SQRT5_SYM, 0) + coeff * q
        else:
            acc[sym] = acc.get(sym, 0) + coeff
    order = {ALPHA_SYM: 0, SQRT5_SYM: 1}
    syms = sorted(acc, key=lambda s: (order.get(s, 2), s if isinstance(s, tuple) else ()))
    return [(acc[s], s) for s in syms if acc[s] != 0]


def build_form(kind: str, t1: int, t2: int, a1: int, a2: int, delta: int):
    """Symbolic terms of the named linear form (L4a/L4b use only one tau)."""
    if kind == L4A:
        return [(delta, ALPHA_SYM), (-a1, SQRT5_SYM), (-a2, tau_sym(t1))]
    if kind == L4B:
        return [(delta, ALPHA_SYM), (-a2, SQRT5_SYM), (-a1, tau_sym(t2))]
    if kind == L5:
        return [(delta, ALPHA_SYM), (-a1, tau_sym(t1)), (a2, tau_sym(t2))]
    raise ValueError(f"unknown form kind {kind!r}")


def nonvanishing(kind: str, t1: int, t2: int, a1: int, a2: int, delta: int) -> str:
    """Certify the named form nonzero, or classify the single vanishing case."""
    if not 0 < a1 < a2:
        raise ValueError("need 0 < a1 < a2")
    if t1 < 1 or t2 < 1:
        raise ValueError("need t1, t2 >= 1")
    terms = collapse_form(build_form(kind, t1, t2, a1, a2, delta))
    if not terms:
        return ZERO_CASE
    taus = [s[1] for _, s in terms if isinstance(s, tuple)]
    small = [t for t in taus if t <= PRIMITIVE_DIVISOR_CUTOFF]
    # pairs of taus (L5) occur without sqrt5, so independence is needed only
    # in the subgroup actually spanned by the residual symbols
    with_sqrt5 = any(s == SQRT5_SYM for _, s in terms)
    if small and find_dependence(small, include_sqrt5=with_sqrt5) is not None:
        raise ArithmeticError(  # pragma: no cover
            "unexpected dependence among residual symbols"
        )
    return NON_ZERO


def rewrite_special_tau(form_kind: str, t1: int, t2: int, a1: int, a2: int, delta: int):
    """Collapse the exceptional tau values out of the named form.

    Returns the coefficient list of an equal-valued form with at most two
    terms; requires that the collapse actually eliminates a tau (i.e. the
    relevant t lies in {1, 2, 10}, or both taus of L5 coincide)."""
    relevant = (t1,) if form_kind == L4A else (t2,) if form_kind == L4B else (t1, t2)
    if not (
        any(t in TAU_AS_MONOMIAL for t in relevant)
        or (form_kind == L5 and t1 == t2)
    ):
        raise ValueError("no exceptional tau value to rewrite")
    terms = collapse_form(build_form(form_kind, t1, t2, a1, a2, delta))
    if len(terms) > 2:
        raise ArithmeticError("rewrite did not reach a two-term form")
    return terms


def form_value_certified(terms, bits: int = 256):
    """Evaluate sum coeff * log(symbol) as a certified real."""
    from .arbreal import CertifiedReal

    acc = CertifiedReal.exact_zero(bits)
    for coeff, sym in terms:
        acc = acc + coeff * symbol_value(sym).log_certified(bits)
    return acc
