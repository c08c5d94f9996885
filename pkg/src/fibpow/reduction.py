"""Bound-reduction engines: certified continued fractions, exact integer
LLL with de Weger approximation lattices, and the Baker-Davenport method.

All three take a huge analytic bound H and an inequality |linear form| <
c3*exp(-c4*H) and return a small explicit bound on H.  Soundness rests on
exact integer/rational arithmetic: continued fractions are expanded from
certified interval endpoints, LLL runs in the all-integer Gram
representation, and every threshold comparison is done on exact endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpz

from .arbreal import (
    DEFAULT_BITS,
    CertifiedReal,
    PrecisionExhausted,
    _ladder,
    floor_scaled,
    nearest_int_distance,
)


class TableTooShort(ValueError):
    """No convergent with a large enough denominator is stored."""


class SingularBasis(ValueError):
    """Lattice basis vectors are linearly dependent."""


class ReductionFailed(ArithmeticError):
    """The lattice test c1^2 >= T^2 + S failed even after escalating C."""


# -- continued fractions ----------------------------------------------------


@dataclass(frozen=True)
class ConvergentTable:
    mu: CertifiedReal
    partial_quotients: tuple  # a_0, a_1, ...
    convergents: tuple  # (p_l, q_l), same indexing

    def max_partial_quotient(self, upto: int) -> int:
        """A = max a_j over 1 <= j <= upto."""
        return max(self.partial_quotients[1 : upto + 1])

    def first_index_with_q_at_least(self, Q: int) -> int:
        for l, (_, q) in enumerate(self.convergents):
            if q >= Q:
                return l
        raise TableTooShort(f"no convergent with denominator >= {Q}")


def continued_fraction(mu: CertifiedReal, stop, max_terms: int = 100_000) -> ConvergentTable:
    """Expand mu until stop(l, q_l) fires, certifying every partial quotient.

    Partial quotients are read off the exact interval endpoints; whenever
    the endpoints disagree on a quotient the whole expansion restarts at
    doubled precision (a_l computed at low precision may be wrong, not
    merely imprecise).
    """
    for bits in _ladder(mu.precision_bits):
        xb = mu.at(bits)
        lo, hi = xb.lower, xb.upper
        quots: list[int] = []
        convs: list[tuple[int, int]] = []
        p_prev, q_prev = 0, 1
        p_cur, q_cur = 1, 0  # so that p = a*p_cur + p_prev etc. at step 0
        ambiguous = False
        while len(quots) < max_terms:
            a_lo = lo.__floor__()
            if a_lo != hi.__floor__():
                ambiguous = True
                break
            a = int(a_lo)
            if quots and a < 1:  # tail left the admissible range: not certifiable
                ambiguous = True
                break
            p, q = a * p_cur + p_prev, a * q_cur + q_prev
            quots.append(a)
            convs.append((p, q))
            p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p, q
            if stop(len(quots) - 1, q):
                return ConvergentTable(mu, tuple(quots), tuple(convs))
            lo, hi = lo - a, hi - a
            if lo <= 0:  # next quotient uncertifiable (mu may be rational)
                ambiguous = True
                break
            lo, hi = 1 / hi, 1 / lo
        if not ambiguous:
            raise ValueError(f"stop predicate did not fire within {max_terms} terms")
    raise PrecisionExhausted(
        "continued fraction could not be certified at the precision cap"
    )


def cf_gap_bound(table: ConvergentTable, Q: int) -> CertifiedReal:
    """Certified lower bound for |q*mu - p| over all |q| <= q_l, where l is
    minimal with q_l >= Q: the bound 1/((2+A) q_l) with A = max quotient."""
    l = table.first_index_with_q_at_least(Q)
    if l < 1:
        l = 1
        if len(table.convergents) < 2:
            raise TableTooShort("need at least two convergents")
    A = table.max_partial_quotient(l)
    q_l = table.convergents[l][1]
    return CertifiedReal.from_fraction(Fraction(1, (2 + A) * q_l))


# -- exact integer LLL ------------------------------------------------------


@dataclass(frozen=True)
class IntegerLattice:
    basis: tuple  # tuple of columns, each a tuple of ints

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def determinant(self) -> int:
        return _determinant([list(col) for col in self.basis])

    def to_text(self) -> str:
        """Rows of the basis matrix, decimal integers, space-separated."""
        k = self.dimension
        rows = []
        for i in range(k):
            rows.append(" ".join(str(int(col[i])) for col in self.basis))
        return "\n".join(rows) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IntegerLattice":
        rows = [[int(x) for x in line.split()] for line in text.strip().splitlines()]
        cols = tuple(tuple(r[j] for r in rows) for j in range(len(rows)))
        return cls(cols)


def _determinant(cols) -> int:
    # Bareiss fraction-free elimination on the column matrix
    k = len(cols)
    m = [[mpz(cols[j][i]) for j in range(k)] for i in range(k)]
    sign = 1
    prev = mpz(1)
    for c in range(k - 1):
        if m[c][c] == 0:
            piv = next((r for r in range(c + 1, k) if m[r][c] != 0), None)
            if piv is None:
                return 0
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        for r in range(c + 1, k):
            for j in range(c + 1, k):
                m[r][j] = (m[r][j] * m[c][c] - m[r][c] * m[c][j]) // prev
            m[r][c] = mpz(0)
        prev = m[c][c]
    return int(sign * m[k - 1][k - 1])


def _lll_core(bs: list[list], delta_num: int = 3, delta_den: int = 4):
    """In-place integral LLL (Gram coefficients lambda/d kept exact).

    Returns (d, lam) with d[j+1]/d[j] = ||b_j*||^2 for the final basis.
    """
    n = len(bs)
    d = [mpz(1)] * (n + 1)
    lam = [[mpz(0)] * n for _ in range(n)]

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def init_row(i):
        for j in range(i + 1):
            u = mpz(dot(bs[i], bs[j]))
            for t in range(j):
                u = (d[t + 1] * u - lam[i][t] * lam[j][t]) // d[t]
            if j < i:
                lam[i][j] = u
            else:
                d[i + 1] = u
                if u <= 0:
                    raise SingularBasis("linearly dependent basis vectors")

    def red(i, j):
        two = 2 * lam[i][j]
        if two > d[j + 1] or two < -d[j + 1]:
            q = (2 * lam[i][j] + d[j + 1]) // (2 * d[j + 1])
            bi, bj = bs[i], bs[j]
            for t in range(len(bi)):
                bi[t] -= q * bj[t]
            lam[i][j] -= q * d[j + 1]
            for t in range(j):
                lam[i][t] -= q * lam[j][t]

    k_max = 0
    init_row(0)
    k = 1
    while k < n:
        if k > k_max:
            k_max = k
            init_row(k)
        red(k, k - 1)
        if (
            delta_den * d[k + 1] * d[k - 1]
            < delta_num * d[k] * d[k] - delta_den * lam[k][k - 1] * lam[k][k - 1]
        ):
            # swap b_k and b_{k-1}, update the Gram data
            bs[k], bs[k - 1] = bs[k - 1], bs[k]
            for j in range(k - 1):
                lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
            lam_ = lam[k][k - 1]
            b_new = (d[k - 1] * d[k + 1] + lam_ * lam_) // d[k]
            for i in range(k + 1, k_max + 1):
                t = lam[i][k]
                lam[i][k] = (d[k + 1] * lam[i][k - 1] - lam_ * t) // d[k]
                lam[i][k - 1] = (b_new * t + lam_ * lam[i][k]) // d[k + 1]
            d[k] = b_new
            k = max(1, k - 1)
        else:
            for j in range(k - 2, -1, -1):
                red(k, j)
            k += 1
    return d, lam


def lll_reduce(lattice: IntegerLattice) -> IntegerLattice:
    """Exact LLL reduction (delta = 3/4) preserving the spanned lattice."""
    bs = [[mpz(x) for x in col] for col in lattice.basis]
    _lll_core(bs)
    return IntegerLattice(tuple(tuple(int(x) for x in col) for col in bs))


def gram_schmidt_norms_squared(lattice: IntegerLattice) -> list[Fraction]:
    """Exact ||b_j*||^2 for the basis as stored (no reduction performed)."""
    bs = [[mpz(x) for x in col] for col in lattice.basis]
    n = len(bs)
    d = [mpz(1)] * (n + 1)
    lam = [[mpz(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            u = mpz(sum(x * y for x, y in zip(bs[i], bs[j])))
            for t in range(j):
                u = (d[t + 1] * u - lam[i][t] * lam[j][t]) // d[t]
            if j < i:
                lam[i][j] = u
            else:
                if u <= 0:
                    raise SingularBasis("linearly dependent basis vectors")
                d[i + 1] = u
    return [Fraction(int(d[j + 1]), int(d[j])) for j in range(n)]


def _solve_exact(cols, y) -> list[Fraction]:
    """Solve B z = y exactly (B given by columns)."""
    k = len(cols)
    a = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(y[i])] for i in range(k)]
    for c in range(k):
        piv = next((r for r in range(c, k) if a[r][c] != 0), None)
        if piv is None:
            raise SingularBasis("linearly dependent basis vectors")
        a[c], a[piv] = a[piv], a[c]
        inv = a[c][c]
        a[c] = [x / inv for x in a[c]]
        for r in range(k):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * yv for x, yv in zip(a[r], a[c])]
    return [a[i][k] for i in range(k)]


def lattice_distance_lower_bound_squared(reduced: IntegerLattice, y) -> Fraction:
    """Exact c1^2 with l(L, y) >= c1 from a reduced basis."""
    cols = reduced.basis
    z = _solve_exact(cols, y)
    if all(zi.denominator == 1 for zi in z):
        sigma = Fraction(1)  # y in the lattice
    else:
        i0 = max(i for i, zi in enumerate(z) if zi != 0)
        frac = z[i0] - round(z[i0])
        sigma = abs(frac)
    norms = gram_schmidt_norms_squared(reduced)
    b1_sq = Fraction(sum(int(x) * int(x) for x in cols[0]))
    c2 = max(b1_sq / nj for nj in norms)
    return sigma * sigma * b1_sq / c2


def lattice_distance_lower_bound(reduced: IntegerLattice, y) -> CertifiedReal:
    c1_sq = lattice_distance_lower_bound_squared(reduced, y)
    return CertifiedReal.from_fraction(c1_sq).sqrt()


# -- de Weger approximation lattices ---------------------------------------


@dataclass(frozen=True)
class DeWegerOutcome:
    h_bound: int
    c_used: int
    c1_squared: Fraction
    degenerate_xk: Fraction | None  # the lemma's alternative branch, if real


def approximation_lattice(etas, C: int) -> IntegerLattice:
    """Columns e_1..e_{k-1} + floor(C eta_i) last row, and floor(C eta_k) e_k."""
    k = len(etas)
    floors = [floor_scaled(e, C) for e in etas]
    cols = []
    for i in range(k):
        col = [0] * k
        if i < k - 1:
            col[i] = 1
        col[k - 1] = floors[i]
        cols.append(tuple(col))
    return IntegerLattice(tuple(cols))


def de_weger_reduce(
    etas,
    eta0,
    X,
    c3: CertifiedReal,
    c4: CertifiedReal,
    C: int,
    escalations: int = 3,
    c1_cache: dict | None = None,
) -> DeWegerOutcome:
    """Bound H in |eta0 + x1 eta1 + ... + xk etak| <= c3 exp(-c4 H), |xi| <= Xi.

    Builds the approximation lattice at scale C, LLL-reduces it, and applies
    the distance test c1^2 >= T^2 + S; on failure C is escalated by 10^5 up
    to `escalations` times.  `c1_cache` (keyed by (C, floor entries)) lets a
    caller reuse the expensive reduction across instances that share etas.
    """
    k = len(etas)
    if len(X) != k:
        raise ValueError("need one bound X_i per eta_i")
    S = sum(x * x for x in X[:-1])
    T = Fraction(1 + sum(X), 2)
    target = T * T + S
    homogeneous = eta0 is None or (
        isinstance(eta0, CertifiedReal) and eta0.midpoint == 0 and eta0.radius == 0
    )
    last_exc = None
    for attempt in range(escalations + 1):
        C_try = C * (10**5) ** attempt
        try:
            lat = approximation_lattice(etas, C_try)
        except PrecisionExhausted as exc:
            last_exc = exc
            continue
        key = (C_try, lat.basis[-1]) if c1_cache is not None else None
        if homogeneous:
            y = [0] * k
            if key is not None and key in c1_cache:
                c1_sq = c1_cache[key]
                red = None
            else:
                red = lll_reduce(lat)
                c1_sq = lattice_distance_lower_bound_squared(red, y)
                if key is not None:
                    c1_cache[key] = c1_sq
            eta0_floor = 0
        else:
            eta0_floor = floor_scaled(eta0, C_try)
            y = [0] * (k - 1) + [-eta0_floor]
            red = lll_reduce(lat)
            c1_sq = lattice_distance_lower_bound_squared(red, y)
        if c1_sq < target:
            last_exc = None
            continue
        gap = CertifiedReal.from_fraction(c1_sq - S).sqrt() - T
        h = (C_try * c3).log() - gap.log()
        h_bound = int((h / c4).upper.__floor__())
        degenerate = None
        if not homogeneous:
            last_floor = lat.basis[-1][-1]
            degenerate = Fraction(-eta0_floor, last_floor)
        return DeWegerOutcome(h_bound, C_try, c1_sq, degenerate)
    raise ReductionFailed(
        f"c1^2 >= T^2 + S not reached after {escalations} escalations of C"
    ) from last_exc


# -- Baker-Davenport --------------------------------------------------------


@dataclass(frozen=True)
class KappaPair:
    kappa: Fraction  # certified lower bound, > 1
    q: int
    inv_kappa_up: object = None  # cached upper bound for 1/kappa (mpfr)


def build_kappa_list(
    mu: CertifiedReal, N: int, count: int = 250, max_terms: int = 5000
) -> list[KappaPair]:
    """Convergent denominators q of mu with kappa = 1/(2N ||q mu||) > 1."""
    pairs: list[KappaPair] = []
    scanned = 1
    terms = 64
    while True:
        limit = min(terms, max_terms)
        table = continued_fraction(mu, lambda l, q: l >= limit - 1, max_terms=max_terms)
        for l in range(scanned, len(table.convergents)):
            p, q = table.convergents[l]
            dist_upper = _qmu_distance_upper(mu, q, p)
            if dist_upper <= 0:
                continue
            kappa = Fraction(1) / (2 * N * dist_upper)
            if kappa > 1:
                inv_up = _err_up.div(mpz(kappa.denominator), mpz(kappa.numerator))
                pairs.append(KappaPair(kappa, q, inv_up))
                if len(pairs) >= count:
                    return pairs
        scanned = len(table.convergents)
        if limit >= max_terms:
            return pairs
        terms *= 2


def _qmu_distance_upper(mu: CertifiedReal, q: int, p: int) -> Fraction:
    """Certified upper bound for |q mu - p| (= ||q mu|| for a convergent)."""
    bits = mu.precision_bits
    m, r = mu.eval_at(bits)
    ctx = _nearest_ctx(bits)
    mid = ctx.mul(m, mpz(q))
    err = _err_up.add(_err_up.mul(r, mpz(q)), _err_up.div_2exp(_err_up.abs(mid), bits - 1))
    d = ctx.abs(ctx.sub(mid, mpz(p)))  # exact by cancellation at this precision
    up = _err_up.add(d, err)
    num, den = up.as_integer_ratio()
    return Fraction(int(num), int(den))


_err_up = gmpy2.context(precision=64, round=gmpy2.RoundUp)
_err_down = gmpy2.context(precision=64, round=gmpy2.RoundDown)
_nearest_ctxs: dict = {}


def _nearest_ctx(bits: int):
    ctx = _nearest_ctxs.get(bits)
    if ctx is None:
        ctx = gmpy2.context(precision=bits, round=gmpy2.RoundToNearest)
        _nearest_ctxs[bits] = ctx
    return ctx


def baker_davenport(
    mu: CertifiedReal,
    tau: CertifiedReal,
    N: int,
    c1: CertifiedReal,
    c2: CertifiedReal,
    kappa_pairs,
) -> int | None:
    """Bound H in |n mu + tau - x| < c1 exp(-c2 H) with 0 <= n < N.

    Scans the precomputed pairs; the first pair whose gap condition
    ||q tau|| > 1/kappa can be certified yields H <= log(2 kappa q c1)/c2.
    Pairs that cannot be certified either way are skipped.  Returns None if
    no pair qualifies (the caller falls back to a special-case route).

    The per-pair test runs in directed-rounding floating point on tau's
    ball (a certified one-sided bound suffices to accept or skip a pair);
    only the final H is evaluated through CertifiedReal.
    """
    bits = tau.precision_bits
    t_mid, t_rad = tau.eval_at(bits)
    ctx = _nearest_ctx(bits)
    for pair in kappa_pairs:
        q = mpz(pair.q)
        mid = ctx.mul(t_mid, q)
        err = _err_up.add(
            _err_up.mul(t_rad, q), _err_up.div_2exp(_err_up.abs(mid), bits - 1)
        )
        k = ctx.rint(mid)  # exact: the working precision covers the integer part
        frac = ctx.sub(mid, k)  # exact by cancellation
        dist_low = _err_down.sub(_err_down.abs(frac), err)
        if dist_low <= 0:
            continue
        thr = pair.inv_kappa_up
        if thr is None:
            thr = _err_up.div(mpz(pair.kappa.denominator), mpz(pair.kappa.numerator))
        if dist_low > thr:
            return _bakdav_h_bound(pair, c1, c2)
    return None


def _bakdav_h_bound(pair, c1: CertifiedReal, c2: CertifiedReal) -> int:
    """floor of an upper bound for log(2 kappa q c1)/c2, in directed rounding."""
    m1, r1 = c1.eval_at(c1.precision_bits)
    c1_up = _err_up.add(m1, r1)
    m2, r2 = c2.eval_at(c2.precision_bits)
    c2_low = _err_down.sub(m2, r2)
    if c1_up <= 0 or c2_low <= 0:
        raise ValueError("need c1 > 0 and c2 > 0")
    kappa_up = _err_up.div(mpz(pair.kappa.numerator), mpz(pair.kappa.denominator))
    arg = _err_up.mul(_err_up.mul(kappa_up, mpz(2 * pair.q)), c1_up)
    h = _err_up.div(_err_up.log(arg), c2_low)
    return int(gmpy2.ceil(h))
