"""Multiplicative dependence search over Q(sqrt5) and the
non-vanishing certificates for the solver's linear forms."""

import itertools
import math

import pytest

from fibpow.independence import (
    L4A,
    L4B,
    L5,
    NON_ZERO,
    PRIMITIVE_DIVISOR_CUTOFF,
    TAU_AS_MONOMIAL,
    ZERO_CASE,
    collapse_form,
    build_form,
    find_dependence,
    form_value_certified,
    independent_tau,
    nonvanishing,
    rewrite_special_tau,
    unit_test_tau,
)
from fibpow.quadfield import ALPHA, SQRT5, alpha_pow, tau


def test_known_monomial_identities():
    for t, (p, q) in TAU_AS_MONOMIAL.items():
        assert tau(t) == alpha_pow(p) * SQRT5**q


def test_single_tau_dependence_matches_monomials():
    for t in range(1, PRIMITIVE_DIVISOR_CUTOFF + 1):
        rel = find_dependence([t])
        if t in TAU_AS_MONOMIAL:
            assert rel is not None and rel.verify([t])
        else:
            assert rel is None
        assert independent_tau(t) == (t not in TAU_AS_MONOMIAL)


def _brute_force_dependent(t_list, bound=6):
    """Exhaustive exponent search |e| <= bound over alpha, sqrt5, taus."""
    gens = [ALPHA, SQRT5] + [tau(t) for t in t_list]
    ranges = [range(-bound, bound + 1)] * len(gens)
    one = alpha_pow(0)
    for es in itertools.product(*ranges):
        if all(e == 0 for e in es):
            continue
        prod = one
        for g, e in zip(gens, es):
            prod = prod * g**e
        if prod == one or prod == -one:
            return es
    return None


def test_brute_force_cross_check_small_t():
    # exhaustive small-exponent oracle on pairs of small t values
    for t1, t2 in [(1, 3), (3, 4), (1, 10), (3, 10), (4, 5), (1, 2)]:
        rel = find_dependence([t1, t2])
        brute = _brute_force_dependent([t1, t2], bound=3)
        if t1 in TAU_AS_MONOMIAL or t2 in TAU_AS_MONOMIAL:
            # any exceptional tau creates a relation; verify() checks it exactly
            assert rel is not None and rel.verify([t1, t2])
        else:
            # independent taus: no relation with small exponents either
            assert rel is None
            assert brute is None
        if brute is not None:
            assert rel is not None  # brute force can never out-find the kernel


def test_pairs_without_sqrt5():
    # {alpha, tau(t1), tau(t2)} for distinct non-exceptional taus
    for t1, t2 in [(3, 4), (3, 5), (4, 6)]:
        assert find_dependence([t1, t2], include_sqrt5=False) is None
    # tau(1)^2 involves sqrt5, so excluding sqrt5 keeps alpha,tau(1) dependent
    rel = find_dependence([1], include_sqrt5=True)
    assert rel is not None


def test_tau_units():
    # tau(t) is integral with norm +-1 exactly for t in {2}
    units = [t for t in range(1, 16) if unit_test_tau(t)]
    assert 2 in units


def test_collapse_form_merges_exceptional_taus():
    terms = collapse_form([(3, ("tau", 2)), (1, "alpha")])
    assert terms == [(4, "alpha")]
    terms = collapse_form([(1, ("tau", 1)), (1, "sqrt5")])
    assert terms == [(2, "alpha")]
    terms = collapse_form([(1, ("tau", 10)), (-2, "sqrt5")])
    assert terms == [(5, "alpha")]


def test_nonvanishing_generic_forms():
    assert nonvanishing(L4A, 3, 5, 1, 2, 7) == NON_ZERO
    assert nonvanishing(L4B, 3, 5, 1, 2, 7) == NON_ZERO
    assert nonvanishing(L5, 3, 5, 1, 2, 7) == NON_ZERO
    assert nonvanishing(L5, 300, 500, 1, 2, 7) == NON_ZERO


def test_nonvanishing_zero_case():
    # L5 with t1 = t2 = 2 and delta = a1 - a2 collapses to 0
    assert nonvanishing(L5, 2, 2, 1, 2, -1) == ZERO_CASE
    assert nonvanishing(L5, 2, 2, 1, 2, 5) == NON_ZERO


def test_nonvanishing_input_validation():
    with pytest.raises(ValueError):
        nonvanishing(L5, 3, 5, 2, 1, 0)
    with pytest.raises(ValueError):
        nonvanishing(L5, 0, 5, 1, 2, 0)


def test_rewrite_special_tau():
    terms = rewrite_special_tau(L4A, 2, 9, 1, 2, 7)
    assert len(terms) <= 2
    with pytest.raises(ValueError):
        rewrite_special_tau(L4A, 3, 9, 1, 2, 7)


def test_form_value_certified_matches_float():
    terms = [(2, "alpha"), (-1, "sqrt5"), (3, ("tau", 4))]
    v = float(form_value_certified(terms))
    phi = (1 + math.sqrt(5)) / 2
    expect = 2 * math.log(phi) - 0.5 * math.log(5) + 3 * math.log((phi**4 + 1) / math.sqrt(5))
    assert abs(v - expect) < 1e-12
