"""Acceptance gate: the six headline checks for the certified solver.

The full-scale theorem run (all pairs up to 470) is hours of work and is
enabled with FIBPOW_FULL=1; the default run uses the documented
desk-scale variant (pairs up to 150), which already exhibits all five
exceptional y values.
"""

import itertools
import math
import os
import random
from fractions import Fraction

import pytest

from fibpow.arbreal import CertifiedReal, log_rational
from fibpow.independence import TAU_AS_MONOMIAL, find_dependence
from fibpow.linforms import laurent_lower_bound, linear_form, matveev_coefficient, matveev_lower_bound
from fibpow.pipeline import (
    derive_two_solution_bounds,
    global_reduction,
    prove_theorem,
    solve_for_y,
    solve_instance,
)
from fibpow.quadfield import ALPHA, SQRT5, fibonacci, lucas, tau, zeckendorf
from fibpow.reduction import (
    IntegerLattice,
    cf_gap_bound,
    continued_fraction,
    lattice_distance_lower_bound_squared,
    lll_reduce,
)

THEOREM_SOLUTIONS = {
    2: [(4, 2, 2), (5, 4, 3), (7, 4, 4)],
    3: [(3, 2, 1), (6, 2, 2)],
    4: [(4, 2, 1), (7, 4, 2)],
    6: [(5, 2, 1), (9, 3, 2)],
    10: [(6, 3, 1), (16, 7, 3)],
}

FULL_RUN = os.environ.get("FIBPOW_FULL") == "1"


# -- criterion 1: theorem reproduction ---------------------------------------


def _check_theorem_report(report):
    assert report["refutations"] == []
    multi = {int(y): [tuple(s) for s in sols] for y, sols in report["multi_solution_y"].items()}
    assert sorted(multi) == [2, 3, 4, 6, 10]
    for y, sols in THEOREM_SOLUTIONS.items():
        assert multi[y] == sols, (y, multi[y])


@pytest.mark.skipif(FULL_RUN, reason="superseded by the full run")
def test_theorem_desk_scale():
    report = prove_theorem(n1_max=150, jobs=os.cpu_count() or 1)
    assert report["totals"]["instances"] == 11026
    _check_theorem_report(report)


@pytest.mark.skipif(not FULL_RUN, reason="set FIBPOW_FULL=1 for the full theorem run")
def test_theorem_full_scale(tmp_path):
    report = prove_theorem(
        n1_max=470, jobs=os.cpu_count() or 1, out_path=str(tmp_path / "cert.json")
    )
    assert report["totals"]["instances"] == 109746
    _check_theorem_report(report)


# -- criterion 2: the continued-fraction stage --------------------------------


def test_convergent_denominator_at_index_216():
    mu = SQRT5.log_certified(4096) / ALPHA.log_certified(4096)
    table = continued_fraction(mu, lambda l, q: l >= 218)
    hits = [
        i
        for i in range(214, 219)
        if table.convergents[i][1] > 161 * 10**110
    ]
    assert hits, "no convergent denominator above 1.61e112 near index 216"
    i = hits[0]
    assert abs(i - 216) <= 2
    assert table.convergents[i][1] < 197 * 10**110
    assert table.max_partial_quotient(i) == 330


# -- criterion 3: reduction cascade endpoints ---------------------------------


def test_reduction_cascade_endpoints():
    state = derive_two_solution_bounds()
    state = global_reduction(state)
    trail = {(s, r): v for (s, r, v) in state.trail}

    assert state.trail and state.n1_max is not None

    d_min_first = trail[("pass1:min-gap", "convergent gap lower bound")]["d_min_max"]
    assert d_min_first <= 1091

    gap1 = trail[("pass1:gap-lattice", "lattice distance bound, both gap branches")]
    alt1 = trail[("pass1:gap-lattice", "n1 alternative branch")]
    assert gap1["d2_max"] <= 1698 * 1.1
    assert gap1["d1_max"] <= 2032 * 1.1
    assert alt1["n1_alt"] <= 2031 * 1.1

    red2 = trail[("pass1:recompute", "3-log lower bounds with reduced gaps")]
    assert red2["n2_max"] <= 1.26e35 * 1.1

    lam5 = trail[("pass2:n1-lattice", "branch detail")]
    assert lam5["generic"] <= 866 * 1.1
    assert lam5["degenerate_pair"] <= 362 * 1.1
    assert lam5["pair_1_10"] <= 345 * 1.1
    assert lam5["pair_2_2"] <= 168 * 1.1

    assert state.n1_max <= 470
    assert state.logy_max.upper <= Fraction(2505, 10)
    assert state.n2_max <= 481 * 10**15


# -- criterion 4: constant re-derivations -------------------------------------


def test_three_log_coefficient():
    c = matveev_coefficient(3, 2)
    ref = Fraction(726) * 10**8
    assert abs(float(c) - float(ref)) <= float(ref) * 0.01


def test_two_log_coefficient():
    val = Fraction(179, 10) * 2**4 * Fraction(55, 100) * Fraction(81, 100) * 4
    assert abs(val - Fraction(51037, 100)) <= Fraction(51037, 100) / 1000


def test_range_bound_after_reduction_single_instance():
    rep = solve_instance(6, 3, 437 * 10**15)
    assert rep.N2_final <= int(94 * 1.1)


# -- criterion 5: property suites ---------------------------------------------


def test_zeckendorf_round_trip_to_1e6():
    fib = [int(fibonacci(i)) for i in range(35)]
    for N in range(1, 10**6 + 1):
        digits = zeckendorf(N)
        assert sum(fib[d] for d in digits) == N
        assert all(b - a >= 2 for a, b in zip(digits, digits[1:]))
        assert digits[0] >= 2


def test_zeckendorf_uniqueness_to_1e4():
    """Every admissible digit set gives a distinct value: enumerate all
    subsets of {2..19} with no two consecutive indices and compare."""
    fib = [int(fibonacci(i)) for i in range(23)]
    seen = {}
    indices = list(range(2, 22))

    def rec(pos, chosen, total):
        if total > 10**4:
            return
        if chosen:
            assert total not in seen or seen[total] == tuple(chosen)
            seen[total] = tuple(chosen)
        for i in range(pos, len(indices)):
            idx = indices[i]
            if chosen and idx - chosen[-1] < 2:
                continue
            chosen.append(idx)
            rec(i + 1, chosen, total + fib[idx])
            chosen.pop()

    rec(0, [], 0)
    for N in range(1, 10**4 + 1):
        assert seen[N] == tuple(zeckendorf(N))


def test_tau_norm_identity_to_200():
    # N(tau(t)) = -(L_t + 1 + (-1)^t)/5, an exact identity
    for t in range(1, 201):
        expected = Fraction(int(lucas(t)) + 1 + (-1) ** t, -5)
        assert tau(t).norm() == expected


def test_dependence_brute_force_all_t_to_15():
    one = ALPHA**0
    for t in range(1, 16):
        rel = find_dependence([t])
        assert (rel is None) == (t not in TAU_AS_MONOMIAL)
        if rel is not None:
            assert rel.verify([t])
        # exhaustive small-exponent search agrees
        found = None
        for ea, e5, et in itertools.product(range(-6, 7), repeat=3):
            if ea == e5 == et == 0:
                continue
            prod = ALPHA**ea * SQRT5**e5 * tau(t) ** et
            if prod == one or prod == -one:
                found = (ea, e5, et)
                break
        assert (found is None) == (t not in TAU_AS_MONOMIAL)


def test_lll_certificate_on_500_random_lattices():
    rng = random.Random(11)

    def min_norm_sq(lat):
        best = None
        for coeffs in itertools.product(range(-4, 5), repeat=lat.dimension):
            if all(c == 0 for c in coeffs):
                continue
            v = [
                sum(c * int(col[i]) for c, col in zip(coeffs, lat.basis))
                for i in range(lat.dimension)
            ]
            n = sum(x * x for x in v)
            best = n if best is None else min(best, n)
        return best

    for _ in range(500):
        dim = rng.choice([2, 3])
        cols = tuple(
            tuple(rng.randrange(-25, 26) for _ in range(dim)) for _ in range(dim)
        )
        lat = IntegerLattice(cols)
        try:
            if lat.determinant() == 0:
                continue
        except Exception:
            continue
        red = lll_reduce(lat)
        assert abs(red.determinant()) == abs(lat.determinant())
        c1_sq = lattice_distance_lower_bound_squared(red, [0] * dim)
        assert c1_sq <= min_norm_sq(lat)


def test_cf_gap_bound_brute_force_to_1e4():
    mu = SQRT5.log_certified(1600) / ALPHA.log_certified(1600)
    table = continued_fraction(mu, lambda l, q: q >= 10**7)
    mu_val = mu.lower
    worst = Fraction(1)
    results = {}
    for q in range(1, 10**4 + 1):
        d = abs(q * mu_val - round(q * mu_val))
        worst = min(worst, d)
        results[q] = worst
    for Q in (10, 100, 1000, 10**4):
        gap = cf_gap_bound(table, Q).lower
        assert gap <= results[Q] + Fraction(1, 2**1000)


def test_log_form_lower_bounds_on_200_samples():
    rng = random.Random(12)
    la = ALPHA.log_certified(512)
    l5 = SQRT5.log_certified(512)
    logA1 = CertifiedReal.from_fraction(Fraction(1, 2))
    logA2 = CertifiedReal.from_fraction(Fraction(81, 100))
    checked = 0
    while checked < 200:
        b1 = rng.randrange(1, 10**5)
        b2 = rng.randrange(1, 10**5)
        lam = abs(b1 * la - b2 * l5)
        if lam.contains(Fraction(0)):
            continue
        log_lam = lam.log()
        low2 = laurent_lower_bound(b1, b2, logA1, logA2, 2)
        assert low2.upper <= log_lam.lower
        if checked % 2 == 0:  # alternate: also the n-term bound
            form = linear_form([(b1, ALPHA), (-b2, SQRT5)])
            low_n = matveev_lower_bound(form)
            assert low_n.upper <= log_lam.lower
        checked += 1


def test_solver_matches_brute_force_all_pairs_to_20():
    fibs = [int(fibonacci(i)) for i in range(101)]

    def brute(y):
        powers = {}
        p = y
        for a in range(1, 71):
            powers[p] = a
            p *= y
        return sorted(
            (n, m, powers[fibs[n] + fibs[m]])
            for n in range(3, 101)
            for m in range(2, n)
            if fibs[n] + fibs[m] in powers
        )

    for n1 in range(3, 21):
        for m1 in range(2, n1):
            rep = solve_instance(n1, m1, 437 * 10**15)
            got = sorted((s.n, s.m, s.a) for s in rep.solutions)
            assert got == brute(rep.y), (n1, m1, rep.y)


# -- criterion 6: cross-check with the a >= 2 literature ----------------------


def test_high_power_solutions_have_small_n():
    for y in range(2, 101):
        for s in solve_for_y(y):
            if s.a >= 2:
                assert s.n <= 36, (y, s)
