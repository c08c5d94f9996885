"""End-to-end orchestration of the at-most-one-solution proof.

The pipeline has four layers:

1. ``derive_two_solution_bounds`` -- assuming F_n + F_m = y^a has two
   solutions, combine the two-term and n-term logarithm bounds into
   explicit absolute bounds on n2, n1 and log y (no reduction yet).
2. ``global_reduction`` -- shrink those astronomical bounds down to
   computer-search scale with three passes of continued-fraction and
   lattice (LLL) reduction.
3. ``solve_instance`` / ``solve_for_y`` -- for one candidate equation,
   certify a small bound on any further solution via Baker-Davenport
   reduction and enumerate all solutions through Zeckendorf expansions.
4. ``prove_theorem`` -- fan out over all candidate pairs and aggregate
   the final certificate.

Every inequality is decided through CertifiedReal ball arithmetic; every
claimed solution is re-checked with exact integer arithmetic.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool

from .arbreal import (
    DEFAULT_BITS,
    CertifiedReal,
    PrecisionExhausted,
    log_rational,
)
from .linforms import log_poly_fixed_point, matveev_coefficient
from .quadfield import (
    ALPHA,
    SQRT5,
    SolutionTriple,
    fibonacci,
    perfect_power_decompose,
    tau,
    zeckendorf,
)
from .reduction import (
    ReductionFailed,
    TableTooShort,
    baker_davenport,
    build_kappa_list,
    cf_gap_bound,
    continued_fraction,
    de_weger_reduce,
)

CERT_SCHEMA = "fibpow-cert/1"
DEFAULT_INSTANCE_BITS = 3072
EXPECTED_MULTI_Y = (2, 3, 4, 6, 10)

_COEFF_BITS = 320  # ball precision for cascade coefficient arithmetic
_CF_BITS = 1600  # precision for cascade continued fractions
_LLL_BITS = 2048  # precision for lattice floor entries (C up to ~10^482)


class StageFailed(RuntimeError):
    """A global-reduction stage could not certify a bound."""

    def __init__(self, stage: str, detail: str = ""):
        super().__init__(f"reduction stage {stage!r} failed: {detail}")
        self.stage = stage


class StepFailed(RuntimeError):
    """A per-instance solver step found no applicable reduction."""

    def __init__(self, step: str, t: int | None = None):
        super().__init__(f"solver step {step} failed" + (f" at t={t}" if t else ""))
        self.step = step
        self.t = t


# -- bound state ------------------------------------------------------------


@dataclass
class BoundState:
    """The evolving tuple of proved bounds, with a derivation trail.

    All integer fields are inclusive upper bounds; ``logy_max`` is a
    certified upper bound for log y.  Fields only ever decrease.
    """

    n2_max: int
    n1_max: int | None
    logy_max: CertifiedReal
    d_min_max: int  # bound on min{n1-m1, n2-m2}
    d1_max: int | None  # bound on n1-m1
    d2_max: int | None  # bound on n2-m2
    trail: list = field(default_factory=list)

    def tighten(self, stage: str, rule: str, **updates):
        shown = {}
        for name, value in updates.items():
            old = getattr(self, name)
            if isinstance(value, CertifiedReal):
                if old is not None and old.upper <= value.upper:
                    value = old
                shown[name] = float(value.upper)
            else:
                value = int(value)
                if old is not None:
                    value = min(old, value)
                shown[name] = value
            setattr(self, name, value)
        self.trail.append((stage, rule, shown))

    def note(self, stage: str, rule: str, **info):
        self.trail.append((stage, rule, dict(info)))


def _fl(x: CertifiedReal) -> int:
    """Certified floor (via the upper interval end) of a positive bound."""
    return int(x.upper.__floor__())


def _ceil_frac(num: int, den: int) -> int:
    return -((-num) // den)


def _c7(n: int) -> int:
    """ceil(0.7 n): a_i < n_i log(alpha)/log(y) < 0.7 n_i for y >= 2."""
    return _ceil_frac(7 * n, 10)


# -- layer 1: the two-solution bound cascade --------------------------------


def derive_two_solution_bounds(bits: int = _COEFF_BITS) -> BoundState:
    """Absolute bounds on (n2, n1, log y) for a hypothetical second solution.

    Writing d_i = n_i - m_i, the chain is: a two-term lower bound on
    Delta log alpha - (a2-a1) log sqrt5 gives min{d1,d2} = O((log n2)^2);
    three-term bounds on the forms with tau(d_i) give the complementary
    gap and n1 as powers of log n2; eliminating log y and feeding the
    result into the single-solution bound closes the loop to an explicit
    n2.  All coefficients are derived here in ball arithmetic rather than
    copied.  The chain assumes n2 >= 1809; smaller n2 is absorbed by
    returning at least that threshold.
    """
    la = ALPHA.log_certified(bits)
    l5 = log_rational(5, 1, bits)
    c3 = matveev_coefficient(3, 2, bits)  # three-term, real quadratic field

    # min gap: -510.3648 (log n2)^2 < log|Lambda| < -d_min log(alpha)
    #          + log(2.85 n2).  For n2 >= 1809 (log n2 >= 7.5) the additive
    #          term is below 0.2 (log n2)^2, and the slack only grows with n2.
    two_term = CertifiedReal.from_fraction(
        Fraction(179, 10) * 16 * 4 * Fraction(55, 100) * Fraction(81, 100), bits
    )
    assert Fraction(2, 10) * Fraction(15, 2) ** 2 > Fraction(15, 2) + Fraction(105, 100)
    k_dmin = (two_term + Fraction(2, 10)) / la

    # Height envelope h'(tau(t)) <= t log(alpha) + 1.29, so a bound t <= K L^e
    # turns into a height bound K L^e log(alpha) (1 + eps) with certified eps.
    l0 = Fraction(15, 2)  # log n2 >= 7.5
    l311 = Fraction(863, 100)  # log(3.11 n2) >= 8.63
    h_min = k_dmin * la * (1 + Fraction(129, 100) / (k_dmin * la * l0**2))

    # complementary gap (or n1): three logs alpha, sqrt5, tau(d_min);
    # log(9.67 n2^2) <= 2 log(3.11 n2) and log(2.842 n2^2)/log(alpha)
    # contributes at most 2/(log(alpha) * 8.63^2) per (log 3.11 n2)^3.
    k_max = (c3 * la * l5 * h_min * 2) / la + 2 / (la * l311**2)
    h_max = k_max * la * (1 + Fraction(129, 100) / (k_max * la * l311**3))

    # n1: three logs alpha, tau(d1), tau(d2) with t-bounds from above.
    m5 = c3 * la * h_min * h_max * 2  # coefficient of (log 3.11 n2)^6
    k_n1 = m5 / la + 2 / (la * l311**5)
    k_logy = k_n1 * la + Fraction(195, 100) / l311**6

    # close: n2 < 3.4e22 (log y)^2 (log 13.81 n2)^2 from the single-solution
    # bound, with (log y)^2 expanded through k_logy.
    k_close = Fraction(34) * 10**21 * k_logy * k_logy
    n2_max = max(
        log_poly_fixed_point(
            k_close, [(Fraction(311, 100), 12), (Fraction(1381, 100), 2)], bits
        ),
        1809,
    )

    log_n2 = log_rational(n2_max, 1, bits)
    log_311n2 = log_rational(311 * n2_max, 100, bits)
    d_min = _fl(k_dmin * log_n2 * log_n2) + 1
    n1_max = _fl(k_n1 * log_311n2**6) + 1
    logy_max = k_logy * log_311n2**6

    state = BoundState(
        n2_max=n2_max,
        n1_max=n1_max,
        logy_max=logy_max,
        d_min_max=d_min,
        d1_max=None,
        d2_max=None,
    )
    state.note(
        "two-solution:coefficients",
        "two-term and three-term log lower bounds",
        min_gap_per_log2=float(k_dmin.upper),
        max_gap_per_log3=float(k_max.upper),
        n1_per_log6=float(k_n1.upper),
        logy_per_log6=float(k_logy.upper),
    )
    state.note(
        "two-solution:close",
        "single-solution fixed point on n2",
        n2_max=n2_max,
        n1_max=n1_max,
        logy_max=float(logy_max.upper),
        d_min_max=d_min,
    )
    return state


# -- layer 2: global reduction ----------------------------------------------


def _mu_sqrt5_over_alpha(bits: int = _CF_BITS) -> CertifiedReal:
    return SQRT5.log_certified(bits) / ALPHA.log_certified(bits)


def _mu_tau_over_alpha(t: int, bits: int = _CF_BITS) -> CertifiedReal:
    return tau(t).log_certified(bits) / ALPHA.log_certified(bits)


class _CfTables:
    """Convergent tables for the cascade's fixed irrational ratios."""

    def __init__(self):
        self._tables = {}

    def get(self, label: str, factory, q_min: int):
        table = self._tables.get(label)
        if table is None or table.convergents[-1][1] < q_min:
            table = continued_fraction(factory(), lambda l, q: q >= q_min)
            self._tables[label] = table
        return table


def _cf_h_bound(table, q_min: int, c3: CertifiedReal, la: CertifiedReal) -> int:
    """H with |x mu - p| < c3 alpha^-H / log(alpha) impossible for |x| <= q_min.

    The gap lemma gives |x mu - p| > 1/((2+A) q_l) for |x| <= q_l >= q_min,
    so alpha^H < c3 / (log(alpha) * gap)."""
    gap = cf_gap_bound(table, q_min)
    return _fl((c3 / (la * gap)).log() / la)


def _lattice_scale(X) -> int:
    """Lattice scale C for a 3-dim box: cube of the coefficient range.

    The shortest vector of the scaled lattice grows like C^(1/3), so the
    distance test needs C^(1/3) to clear max|x_i|; a 10^2 margin keeps the
    first attempt from landing on the boundary."""
    return 10 ** (3 * len(str(max(X))) + 2)


def _min_gap_stage(state: BoundState, stage: str, tables: _CfTables, la) -> None:
    """|Lambda| = |(a2-a1) log sqrt5 - Delta log alpha| < 4.06*0.7 n2 alpha^-d."""
    q_min = _c7(state.n2_max) + 1
    table = tables.get("sqrt5/alpha", _mu_sqrt5_over_alpha, q_min)
    c3 = CertifiedReal.from_fraction(Fraction(406, 100) * Fraction(7, 10)) * state.n2_max
    d = _cf_h_bound(table, q_min, c3, la)
    state.tighten(stage, "convergent gap lower bound", d_min_max=d)


def _gap_lattice_stage(
    state: BoundState, stage: str, tables: _CfTables, la, l5cr, cache, progress=None
) -> None:
    """Bound n1-m1 and n2-m2 via the 3-log lattices with tau(t).

    For t = n1-m1 (the case d1 = min) the form Delta log(alpha) +
    a1 log(sqrt5) - a2 log(tau(t)) is below max{2.2 a2 alpha^-n1,
    4.06 a1 alpha^-(n2-m2)}; the two branches bound n1 and n2-m2, and
    the sweep's gap bounds are carried forward (the n1 alternative is
    recorded in the trail).  For t = n2-m2 (the case d2 = min) the form
    with a1 and a2 swapped is always below 4.06 a2 alpha^-(n1-m1).  t in
    {1, 2, 10} collapses to two logs and is handled by convergent gaps.
    """
    n1, n2, dmin = state.n1_max, state.n2_max, state.d_min_max
    xa1, xa2, xd = _c7(n1), _c7(n2), _c7(n1 * n2)
    c3_d2 = CertifiedReal.from_fraction(Fraction(406, 100)) * xa1
    c3_n1 = CertifiedReal.from_fraction(Fraction(22, 10)) * xa2
    c3_d1 = CertifiedReal.from_fraction(Fraction(406, 100)) * xa2
    C = _lattice_scale([xd, xa1, xa2])

    n1_alt = d1_new = d2_new = 0

    def etas(t):
        return [
            ALPHA.log_certified(_LLL_BITS),
            SQRT5.log_certified(_LLL_BITS),
            tau(t).log_certified(_LLL_BITS),
        ]

    for t in range(3, dmin + 1):
        if t == 10:
            continue
        e = etas(t)
        try:
            out_n1 = de_weger_reduce(e, None, [xd, xa1, xa2], c3_n1, la, C, c1_cache=cache)
            out_d2 = de_weger_reduce(e, None, [xd, xa1, xa2], c3_d2, la, C, c1_cache=cache)
            out_d1 = de_weger_reduce(e, None, [xd, xa2, xa1], c3_d1, la, C, c1_cache=cache)
        except ReductionFailed as exc:
            raise StageFailed(stage, f"t={t}: {exc}") from exc
        n1_alt = max(n1_alt, out_n1.h_bound)
        d2_new = max(d2_new, out_d2.h_bound)
        d1_new = max(d1_new, out_d1.h_bound)
        if progress and t % 200 == 0:
            progress(f"{stage}: t={t}/{dmin}")

    # t in {1, 2, 10}: tau(t) is a monomial in alpha and sqrt5, so the form
    # collapses to x log(sqrt5) - p log(alpha) with |x| <= 2.1 n2.
    q_min = _ceil_frac(21 * n2, 10) + 1
    table = tables.get("sqrt5/alpha", _mu_sqrt5_over_alpha, q_min)
    n1_alt = max(n1_alt, _cf_h_bound(table, q_min, c3_n1, la))
    d2_new = max(d2_new, _cf_h_bound(table, q_min, c3_d2, la))
    d1_new = max(d1_new, _cf_h_bound(table, q_min, c3_d1, la))

    state.tighten(
        stage,
        "lattice distance bound, both gap branches",
        d1_max=max(dmin, d1_new),
        d2_max=max(dmin, d2_new),
    )
    state.note(stage, "n1 alternative branch", n1_alt=n1_alt)


def _n2_fixed_point(logy: CertifiedReal, d2: int, c3, bits: int) -> int:
    """n2 from the single-solution 3-log form with combined base tau(n2-m2):
    n2 < c3 * 2 log(y) * max{3, d2} * log(13.81 n2) + O(1)."""
    k = c3 * 2 * logy * max(3, d2) + 1
    return log_poly_fixed_point(k, [(Fraction(1381, 100), 1)], bits)


def _recompute_stage(state: BoundState, stage: str, la, c3, bits: int) -> None:
    """Refresh n1, log y and n2 from the current gap bounds."""
    n2 = state.n2_max
    for _ in range(3):
        log_311n2 = log_rational(311 * n2, 100, bits)
        h1 = state.d1_max * la + Fraction(129, 100)
        h2 = state.d2_max * la + Fraction(129, 100)
        lam5 = c3 * la * h1 * h2 * (2 * log_311n2)
        n1 = _fl((lam5 + log_rational(_ceil_frac(154 * n2, 100), 1, bits)) / la) + 1
        n1 = min(n1, state.n1_max)
        logy = n1 * la + Fraction(195, 100)
        n2 = min(n2, _n2_fixed_point(logy, state.d2_max, c3, bits))
    state.tighten(
        stage,
        "3-log lower bounds with reduced gaps",
        n1_max=n1,
        logy_max=logy,
        n2_max=n2,
    )


def _lambda5_stage(
    state: BoundState, stage: str, tables: _CfTables, la, cache, bits, progress=None
) -> int:
    """Bound n1 via the 3-log form in tau(t1), tau(t2), alpha.

    Generic pairs go through the lattice; pairs containing 2, equal
    pairs, and {1, 10} are multiplicatively degenerate and collapse to
    two-log forms handled by convergent gaps.  t1 = t2 = 2 reduces to a
    one-log form (or the vanishing case, which forces y = 2).
    """
    n1, n2 = state.n1_max, state.n2_max
    t1_range, t2_range = state.d_min_max, max(state.d1_max, state.d2_max)
    xa, xd = _c7(n2), _c7(n1 * n2)
    c3 = CertifiedReal.from_fraction(Fraction(22, 10)) * xa
    C = _lattice_scale([xa, xa, xd])

    best = 0
    for t1 in range(1, t1_range + 1):
        if t1 == 2:
            continue
        for t2 in range(t1 + 1, t2_range + 1):
            if t2 == 2 or (t1, t2) == (1, 10):
                continue
            e = [
                tau(t1).log_certified(_LLL_BITS),
                tau(t2).log_certified(_LLL_BITS),
                ALPHA.log_certified(_LLL_BITS),
            ]
            try:
                out = de_weger_reduce(e, None, [xa, xa, xd], c3, la, C, c1_cache=cache)
            except ReductionFailed as exc:
                raise StageFailed(stage, f"(t1,t2)=({t1},{t2}): {exc}") from exc
            best = max(best, out.h_bound)
        if progress and t1 % 40 == 0:
            progress(f"{stage}: t1={t1}/{t1_range}")
    generic = best

    # a 2 in the pair, or an equal pair: collapses to x log(tau(t)) - p log(alpha)
    q_min = _c7(n2) + 1
    exc_t = 0
    for t in range(1, t2_range + 1):
        if t == 2:
            continue
        table = tables.get(f"tau{t}/alpha", lambda t=t: _mu_tau_over_alpha(t), q_min)
        exc_t = max(exc_t, _cf_h_bound(table, q_min, c3, la))

    # {1, 10}: collapses to x log(sqrt5) - p log(alpha) with |x| <= 2.1 n2
    q_min5 = _ceil_frac(21 * n2, 10) + 1
    table5 = tables.get("sqrt5/alpha", _mu_sqrt5_over_alpha, q_min5)
    exc_110 = _cf_h_bound(table5, q_min5, c3, la)

    # t1 = t2 = 2: the form is an integer multiple of log(alpha), so either
    # it vanishes (then y = 2) or log(alpha) <= |Lambda| < 2.2 a2 alpha^-n1.
    exc_22 = _fl((c3 / la).log() / la)

    n1_new = max(generic, exc_t, exc_110, exc_22)
    state.tighten(stage, "lattice + degenerate-pair gap bounds", n1_max=n1_new)
    state.note(
        stage,
        "branch detail",
        generic=generic,
        degenerate_pair=exc_t,
        pair_1_10=exc_110,
        pair_2_2=exc_22,
        vanishing_case="y=2",
    )
    return n1_new


def _close_stage(state: BoundState, stage: str, la, c3, bits: int) -> None:
    """From the current n1 bound: log y, then n2 for y != 2 and y = 2."""
    logy = state.n1_max * la + Fraction(195, 100)
    n2_big = _n2_fixed_point(logy, state.d2_max, c3, bits)
    log2 = log_rational(2, 1, bits)
    n2_two = _n2_fixed_point(log2, state.d2_max, c3, bits)
    state.tighten(
        stage,
        "log y from n1; n2 fixed points per y-case",
        logy_max=logy,
        n2_max=max(n2_big, n2_two),
    )
    state.note(stage, "n2 by case", y_generic=n2_big, y_equal_2=n2_two)


def global_reduction(state: BoundState, progress=None) -> BoundState:
    """Three passes of gap/lattice reduction down to search scale."""
    bits = _COEFF_BITS
    la = ALPHA.log_certified(bits)
    l5cr = log_rational(5, 1, bits)
    c3 = matveev_coefficient(3, 2, bits)
    tables = _CfTables()
    cache4: dict = {}
    cache5: dict = {}

    _min_gap_stage(state, "pass1:min-gap", tables, la)
    _gap_lattice_stage(state, "pass1:gap-lattice", tables, la, l5cr, cache4, progress)
    _recompute_stage(state, "pass1:recompute", la, c3, bits)

    _min_gap_stage(state, "pass2:min-gap", tables, la)
    _gap_lattice_stage(state, "pass2:gap-lattice", tables, la, l5cr, cache4, progress)
    _lambda5_stage(state, "pass2:n1-lattice", tables, la, cache5, bits, progress)
    _close_stage(state, "pass2:close", la, c3, bits)

    _min_gap_stage(state, "pass3:min-gap", tables, la)
    _gap_lattice_stage(state, "pass3:gap-lattice", tables, la, l5cr, cache4, progress)
    _lambda5_stage(state, "pass3:n1-lattice", tables, la, cache5, bits, progress)
    _close_stage(state, "pass3:close", la, c3, bits)

    return state


# -- layer 3: the per-instance solver ---------------------------------------


@dataclass
class InstanceReport:
    n1: int
    m1: int
    y_tilde: int
    y: int
    a1: int
    kappa_pairs_used: int
    per_t_bounds: dict
    N2_final: int
    A_final: int
    solutions: list
    special_cases: list
    elapsed: float

    def to_dict(self) -> dict:
        return {
            "n1": self.n1,
            "m1": self.m1,
            "y_tilde": str(self.y_tilde),
            "y": str(self.y),
            "a1": self.a1,
            "kappa_pairs_used": self.kappa_pairs_used,
            "per_t_bounds": {str(t): b for t, b in sorted(self.per_t_bounds.items())},
            "N2_final": self.N2_final,
            "A_final": self.A_final,
            "solutions": [[s.n, s.m, s.a, s.y] for s in self.solutions],
            "special_cases": list(self.special_cases),
            "elapsed": round(self.elapsed, 4),
        }


class _KappaBox:
    """Lazily grown KAPPA list: most reductions need only the first pairs,
    but near-degenerate instances need the deep tail (up to 250 pairs).

    A pair with quality kappa fails the reduction test for a fraction
    about 2/kappa of the targets, so weak pairs (kappa < 16) are kept
    only as a last resort behind the strong ones.
    """

    MAX_PAIRS = 250
    STRONG = 16

    def __init__(self, mu: CertifiedReal, N: int, initial: int = 24):
        self.mu = mu
        self.N = N
        self._store(build_kappa_list(mu, N, count=initial))
        self.exhausted = len(self.pairs) < initial

    def _store(self, pairs):
        strong = [p for p in pairs if p.kappa >= self.STRONG]
        weak = [p for p in pairs if p.kappa < self.STRONG]
        self.pairs = strong + weak

    def extend_full(self):
        if not self.exhausted and len(self.pairs) < self.MAX_PAIRS:
            self._store(build_kappa_list(self.mu, self.N, count=self.MAX_PAIRS))
            self.exhausted = True


def _bakdav(box: _KappaBox, mu, tau_val, N, c1, c2):
    h = baker_davenport(mu, tau_val, N, c1, c2, box.pairs)
    if h is None and not box.exhausted:
        box.extend_full()
        h = baker_davenport(mu, tau_val, N, c1, c2, box.pairs)
    return h


def _gap_n_bound(mu: CertifiedReal, q_min: int, c3: CertifiedReal, la) -> int:
    """n with |x mu - p| < c3 alpha^-n impossible for |x| <= q_min."""
    table = continued_fraction(mu, lambda l, q: q >= q_min)
    gap = cf_gap_bound(table, q_min)
    return _fl((c3 / gap).log() / la)


def _zeckendorf_solutions(y: int, a_max: int, n_cap: int) -> list:
    """All (n, m, a) with F_n + F_m = y^a, n > m > 1, a <= a_max, n <= n_cap."""
    out = []
    power = 1
    for a in range(1, a_max + 1):
        power *= y
        digits = zeckendorf(power)
        if len(digits) == 2 and digits[1] - digits[0] > 1:
            n, m = digits[1], digits[0]
        elif len(digits) == 1 and digits[0] >= 4:
            n, m = digits[0] - 1, digits[0] - 2
        else:
            continue
        if m > 1 and n <= n_cap:
            sol = SolutionTriple(n, m, a, y)
            assert sol.is_valid()
            out.append(sol)
    return out


def solve_instance(
    n1: int, m1: int, N2: int, bits: int = DEFAULT_INSTANCE_BITS
) -> InstanceReport:
    """Find every solution of F_n + F_m = y^a for y fixed by F_n1 + F_m1.

    The defining pair gives y; Baker-Davenport reduction of the two
    standard forms then caps any solution at a small n, and a Zeckendorf
    scan over y^a enumerates them all.
    """
    t0 = time.monotonic()
    if not 1 < m1 < n1:
        raise ValueError("need 1 < m1 < n1")
    y_tilde = int(fibonacci(n1) + fibonacci(m1))
    y, a1 = perfect_power_decompose(y_tilde)

    la = ALPHA.log_certified(bits)
    logy = log_rational(y, 1, bits)
    mu = la / logy
    box = _KappaBox(mu, N2)
    special: list[str] = []
    # the per-gap forms only need precision well past the deepest kappa
    # denominator; mu and the kappa list stay at full precision
    t_bits = min(bits, 1024)
    logy_t = logy.at(t_bits)

    # gap of the second solution: |n2 mu + log(sqrt5)/log(y) - a2| decays
    # like alpha^-(n2-m2)
    tau_iii = SQRT5.log_certified(bits) / logy
    c1_iii = CertifiedReal.from_fraction(Fraction(203, 100), bits) / logy
    n_tilde = _bakdav(box, mu, tau_iii, N2, c1_iii, la)
    if n_tilde is None:
        raise StepFailed("gap-reduction")
    n_tilde = max(n_tilde, 2)

    # per-gap bound on n2: |n2 mu + log(tau(t))/log(y) - a2| decays like
    # alpha^-n2; degenerate t values route to the two special rewrites
    c1_iv = CertifiedReal.from_fraction(Fraction(11, 10), bits) / logy
    per_t: dict[int, int] = {}
    n2_final = n1
    for t in range(1, n_tilde + 1):
        if t == 2:
            # tau(2) = alpha makes the form homogeneous: |(n2+1) mu - a2|
            # < 1.1 alpha^-n2 / log y, handled by the convergent gap of mu
            h = _gap_n_bound(mu.at(t_bits), N2 + 2, c1_iv, la)
            special.append(f"homogeneous-gap:t=2:n2<={h}")
            per_t[t] = h
            n2_final = max(n2_final, h)
            continue
        tau_t = tau(t).log_certified(t_bits) / logy_t
        h = _bakdav(box, mu, tau_t, N2, c1_iv, la)
        if h is not None:
            per_t[t] = h
            n2_final = max(n2_final, h)
            continue
        if y == 2 and t == 6:
            # tau(6) = 2 alpha^3: |(n2+3) log alpha - (a2-1) log 2| < 1.1 alpha^-n2
            q_min = _fl(N2 * la / logy) + 2
            h = _gap_n_bound(
                log_rational(2, 1, bits) / la,
                q_min,
                CertifiedReal.from_fraction(Fraction(11, 10), bits) / la,
                la,
            )
            special.append(f"power-of-two-rewrite:t={t}:n2<={h}")
        elif m1 == n1 - 1 and n1 % 2 == 0 and t == 2 * (n1 + 1):
            # tau(2 n1 + 2) = alpha^(n1+1) F_(n1+1) = alpha^(n1+1) y^a1:
            # |(n2+n1+1) log alpha - (a2-a1) log y| < 1.1 alpha^-n2
            q_min = _fl(N2 * la / logy) + 2
            h = _gap_n_bound(
                logy / la,
                q_min,
                CertifiedReal.from_fraction(Fraction(11, 10), bits) / la,
                la,
            )
            special.append(f"adjacent-index-rewrite:t={t}:n2<={h}")
        else:
            raise StepFailed("per-gap-reduction", t)
        per_t[t] = h
        n2_final = max(n2_final, h)

    a_final = max(_fl(n2_final * la / logy), a1)
    solutions = _zeckendorf_solutions(y, a_final, n2_final)

    return InstanceReport(
        n1=n1,
        m1=m1,
        y_tilde=y_tilde,
        y=y,
        a1=a1,
        kappa_pairs_used=len(box.pairs),
        per_t_bounds=per_t,
        N2_final=n2_final,
        A_final=a_final,
        solutions=solutions,
        special_cases=special,
        elapsed=time.monotonic() - t0,
    )


def solve_for_y(
    y: int, n_cap: int | None = None, bits: int = DEFAULT_INSTANCE_BITS
) -> list:
    """All solutions (n, m, a) of F_n + F_m = y^a for a fixed y >= 2.

    Uses the single-solution certified bound for this y, then the same
    reduction steps as ``solve_instance``.
    """
    from .linforms import bravo_luca_n_bound

    if y < 2:
        raise ValueError("y must be >= 2")
    N = bravo_luca_n_bound(y)
    if n_cap is not None:
        N = min(N, n_cap)

    la = ALPHA.log_certified(bits)
    logy = log_rational(y, 1, bits)
    mu = la / logy
    box = _KappaBox(mu, N)
    t_bits = min(bits, 1024)
    logy_t = logy.at(t_bits)

    tau_iii = SQRT5.log_certified(bits) / logy
    c1_iii = CertifiedReal.from_fraction(Fraction(203, 100), bits) / logy
    n_tilde = _bakdav(box, mu, tau_iii, N, c1_iii, la)
    if n_tilde is None:
        raise StepFailed("gap-reduction")
    n_tilde = max(n_tilde, 2)

    c1_iv = CertifiedReal.from_fraction(Fraction(11, 10), bits) / logy
    n_final = 3
    for t in range(1, n_tilde + 1):
        if t == 2:
            n_final = max(n_final, _gap_n_bound(mu.at(t_bits), N + 2, c1_iv, la))
            continue
        tau_t = tau(t).log_certified(t_bits) / logy_t
        h = _bakdav(box, mu, tau_t, N, c1_iv, la)
        if h is None:
            h = _degenerate_t_bound(y, t, N, la, logy, bits)
            if h is None:
                raise StepFailed("per-gap-reduction", t)
        n_final = max(n_final, h)

    a_final = max(_fl(n_final * la / logy), 1)
    return _zeckendorf_solutions(y, a_final, n_final)


def _degenerate_t_bound(y, t, N, la, logy, bits) -> int | None:
    """Handle gaps t where log(tau(t))/log(y) is degenerate against mu.

    This happens exactly when tau(t) = alpha^k y^j for integers k, j > 0,
    i.e. t = 2k with F_k = y^j; the form collapses to two logs."""
    if t % 2:
        return None
    k = t // 2
    f = int(fibonacci(k))
    if f < 2:
        return None
    base, exp = perfect_power_decompose(f)
    if base != y and f != y ** _round_log(f, y):
        return None
    q_min = _fl(N * la / logy) + 2
    return _gap_n_bound(
        logy / la,
        q_min,
        CertifiedReal.from_fraction(Fraction(11, 10), bits) / la,
        la,
    )


def _round_log(f: int, y: int) -> int:
    j = 0
    while y**j < f:
        j += 1
    return j


def verify_solution(n: int, m: int, a: int, y: int) -> bool:
    """Exact check of F_n + F_m = y^a with n > m > 1, a > 0, y > 1."""
    return SolutionTriple(n, m, a, y).is_valid()


# -- layer 4: proof orchestration -------------------------------------------


def enumerate_candidates(n1_max: int) -> list:
    """All pairs (n1, m1) with 1 < m1 < n1 <= n1_max."""
    return [(n1, m1) for n1 in range(3, n1_max + 1) for m1 in range(2, n1)]


def _solve_pair(args):
    n1, m1, N2, bits = args
    return solve_instance(n1, m1, N2, bits).to_dict()


def prove_theorem(
    n1_max: int = 470,
    jobs: int = 1,
    bits: int = DEFAULT_INSTANCE_BITS,
    out_path: str | None = None,
    resume: bool = False,
    progress=None,
) -> dict:
    """Run the complete proof and return the certificate as a dict.

    The certificate records the bound trail, one report per candidate
    pair, the multi-solution y values, and any refutation (a y outside
    the expected exceptional set with two or more solutions -- which
    must not occur).
    """
    t0 = time.monotonic()
    if progress:
        progress("deriving two-solution bounds")
    state = derive_two_solution_bounds()
    if progress:
        progress(f"reducing globally (n2 <= {state.n2_max:.3e})")
    state = global_reduction(state, progress=progress)
    if progress:
        progress(
            f"reduced: n1 <= {state.n1_max}, n2 <= {state.n2_max:.3e}, "
            f"log y <= {float(state.logy_max.upper):.2f}"
        )

    pairs = enumerate_candidates(n1_max)
    done: dict = {}
    part_path = f"{out_path}.part.jsonl" if out_path else None
    if part_path and resume and os.path.exists(part_path):
        with open(part_path) as fh:
            for line in fh:
                rec = json.loads(line)
                done[(rec["n1"], rec["m1"])] = rec
        if progress:
            progress(f"resuming: {len(done)} of {len(pairs)} instances on disk")

    todo = [(n1, m1, state.n2_max, bits) for (n1, m1) in pairs if (n1, m1) not in done]
    writer = open(part_path, "a") if part_path else None
    try:
        if jobs > 1 and todo:
            with Pool(jobs) as pool:
                stream = pool.imap_unordered(_solve_pair, todo, chunksize=64)
                for i, rec in enumerate(stream):
                    done[(rec["n1"], rec["m1"])] = rec
                    if writer:
                        writer.write(json.dumps(rec) + "\n")
                    if progress and (i + 1) % 2000 == 0:
                        progress(f"instances: {i + 1}/{len(todo)}")
        else:
            for i, item in enumerate(todo):
                rec = _solve_pair(item)
                done[(rec["n1"], rec["m1"])] = rec
                if writer:
                    writer.write(json.dumps(rec) + "\n")
                if progress and (i + 1) % 2000 == 0:
                    progress(f"instances: {i + 1}/{len(todo)}")
    finally:
        if writer:
            writer.close()

    instances = [done[p] for p in pairs]
    by_y: dict[int, set] = {}
    for rec in instances:
        yv = int(rec["y"])
        by_y.setdefault(yv, set()).update(tuple(s[:3]) for s in rec["solutions"])
    # a power y = b^k solves F_n + F_m = y^a exactly when the base b does
    # with exponent ka, so multi-solution powers derive from the base sets
    for b, sols in list(by_y.items()):
        a_max = max((a for (_, _, a) in sols), default=0)
        for k in range(2, a_max + 1):
            derived = {(n, m, a // k) for (n, m, a) in sols if a % k == 0}
            if len(derived) >= 2:
                by_y.setdefault(b**k, set()).update(derived)
    multi = {y: sorted(sols) for y, sols in by_y.items() if len(sols) >= 2}
    refutations = sorted(y for y in multi if y not in EXPECTED_MULTI_Y)

    report = {
        "schema_version": CERT_SCHEMA,
        "bound_trail": [[s, r, v] for (s, r, v) in state.trail],
        "bounds": {
            "n1_max": state.n1_max,
            "n2_max": state.n2_max,
            "logy_max": float(state.logy_max.upper),
            "d_min_max": state.d_min_max,
            "d1_max": state.d1_max,
            "d2_max": state.d2_max,
        },
        "instances": instances,
        "multi_solution_y": {
            str(y): [list(s) for s in sols] for y, sols in sorted(multi.items())
        },
        "refutations": refutations,
        "totals": {
            "instances": len(instances),
            "solutions": sum(len(r["solutions"]) for r in instances),
            "multi_solution_count": len(multi),
            "complete": n1_max >= (state.n1_max or n1_max),
        },
        "wall_time": round(time.monotonic() - t0, 3),
    }
    if out_path:
        write_certificate(report, out_path)
    return report


# -- certificate I/O --------------------------------------------------------


def write_certificate(report: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")


def write_solutions_csv(report: dict, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y", "n", "m", "a", "source_pair"])
        for rec in report["instances"]:
            for n, m, a, y in rec["solutions"]:
                w.writerow([y, n, m, a, f"({rec['n1']},{rec['m1']})"])
