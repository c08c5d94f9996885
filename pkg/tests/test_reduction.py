"""Continued fractions, exact-integer LLL, the approximation-lattice
distance bound, and the inhomogeneous gap reduction."""

import random
from fractions import Fraction

import pytest

from fibpow.arbreal import CertifiedReal, log_rational
from fibpow.quadfield import ALPHA, SQRT5, tau
from fibpow.reduction import (
    IntegerLattice,
    ReductionFailed,
    approximation_lattice,
    baker_davenport,
    build_kappa_list,
    cf_gap_bound,
    continued_fraction,
    de_weger_reduce,
    gram_schmidt_norms_squared,
    lattice_distance_lower_bound_squared,
    lll_reduce,
)


def _sqrt5_over_alpha(bits=1600):
    return SQRT5.log_certified(bits) / ALPHA.log_certified(bits)


# -- continued fractions -----------------------------------------------------


def test_convergents_of_golden_ratio():
    phi = (1 + CertifiedReal.from_int(5, 512).sqrt()) / 2
    table = continued_fraction(phi, lambda l, q: l >= 20)
    # all partial quotients of phi are 1; convergents are Fibonacci ratios
    assert all(a == 1 for a in table.partial_quotients[1:20])
    p, q = table.convergents[10]
    assert (p, q) == (144, 89)  # p_k/q_k = F_{k+2}/F_{k+1}


def test_rational_input_is_rejected():
    # exactly rational input: the expansion terminates and the final
    # quotient can never be certified, which must surface as an error
    from fibpow.arbreal import PrecisionExhausted

    x = CertifiedReal.from_fraction(Fraction(415, 93), 512)
    with pytest.raises(PrecisionExhausted):
        continued_fraction(x, lambda l, q: q >= 10**6)


def test_convergents_are_best_approximations():
    mu = _sqrt5_over_alpha()
    table = continued_fraction(mu, lambda l, q: q >= 10**6)
    mu_val = mu.lower
    for (p, q) in table.convergents[2:]:
        # |mu - p/q| < 1/q^2 for every convergent
        assert abs(mu_val - Fraction(p, q)) < Fraction(1, q * q)


def test_cf_gap_bound_brute_force():
    """||q mu|| >= gap for all 1 <= q <= Q, verified exhaustively."""
    mu = _sqrt5_over_alpha()
    table = continued_fraction(mu, lambda l, q: q >= 10**6)
    for Q in (100, 1000, 10**4):
        gap = cf_gap_bound(table, Q).lower
        mu_val = mu.at(256).lower  # rational stand-in within 2^-200 of mu
        worst = min(
            abs(q * mu_val - round(q * mu_val)) for q in range(1, Q + 1)
        )
        assert gap <= worst + Fraction(Q, 2**200)


def test_first_index_with_q_at_least():
    mu = _sqrt5_over_alpha()
    table = continued_fraction(mu, lambda l, q: q >= 10**8)
    i = table.first_index_with_q_at_least(10**4)
    assert table.convergents[i][1] >= 10**4
    assert table.convergents[i - 1][1] < 10**4


# -- LLL ---------------------------------------------------------------------


def _random_lattice(rng, dim, scale):
    while True:
        cols = tuple(
            tuple(rng.randrange(-scale, scale + 1) for _ in range(dim))
            for _ in range(dim)
        )
        lat = IntegerLattice(cols)
        try:
            if lat.determinant() != 0:
                return lat
        except Exception:
            continue


def _enumerate_min_norm_sq(lat):
    """Exhaustive shortest-vector search (small coefficients suffice here)."""
    dim = lat.dimension
    best = None
    rng = range(-4, 5)
    import itertools

    for coeffs in itertools.product(rng, repeat=dim):
        if all(c == 0 for c in coeffs):
            continue
        v = [
            sum(c * int(col[i]) for c, col in zip(coeffs, lat.basis))
            for i in range(dim)
        ]
        n = sum(x * x for x in v)
        best = n if best is None else min(best, n)
    return best


def test_lll_invariants_random():
    rng = random.Random(6)
    for trial in range(500):
        dim = rng.choice([2, 3])
        lat = _random_lattice(rng, dim, 30)
        red = lll_reduce(lat)
        # same lattice: equal determinant up to sign
        assert abs(red.determinant()) == abs(lat.determinant())
        # Lovasz/size-reduction implies ||b1||^2 <= 2^(d-1) lambda_1^2
        b1_sq = sum(int(x) * int(x) for x in red.basis[0])
        min_sq = _enumerate_min_norm_sq(lat)
        assert b1_sq <= 2 ** (dim - 1) * min_sq
        # distance lower bound never exceeds the true minimum distance
        c1_sq = lattice_distance_lower_bound_squared(red, [0] * dim)
        assert c1_sq <= min_sq


def test_gram_schmidt_norms():
    lat = IntegerLattice(((3, 0), (1, 2)))
    norms = gram_schmidt_norms_squared(lat)
    assert norms[0] == 9
    assert norms[1] == 4  # component of (1,2) orthogonal to (3,0)


def test_lattice_round_trip_text():
    lat = IntegerLattice(((1, 0, 5), (0, 2, -7), (3, 3, 10**40)))
    again = IntegerLattice.from_text(lat.to_text())
    assert again.basis == lat.basis


# -- de Weger reduction ------------------------------------------------------


def test_approximation_lattice_entries():
    C = 10**30
    etas = [ALPHA.log_certified(512), SQRT5.log_certified(512)]
    lat = approximation_lattice(etas, C)
    la = ALPHA.log_certified(512)
    assert lat.basis[0][0] == 1
    assert abs(lat.basis[0][-1] - int(la.lower * C)) <= 1


def test_de_weger_reduce_bounds_known_form():
    # |Delta log alpha + a1 log sqrt5 - a2 log tau(3)| with modest boxes
    bits = 1024
    etas = [
        ALPHA.log_certified(bits),
        SQRT5.log_certified(bits),
        tau(3).log_certified(bits),
    ]
    la = ALPHA.log_certified(bits)
    c3 = CertifiedReal.from_int(10**6)
    X = [10**12, 10**6, 10**6]
    out = de_weger_reduce(etas, None, X, c3, la, 10**45)
    assert 0 < out.h_bound < 400
    # the bound is monotone in c3
    out2 = de_weger_reduce(etas, None, X, c3 * 10**20, la, 10**45)
    assert out2.h_bound >= out.h_bound


def test_de_weger_soundness_random_forms():
    """No integer point in the box may violate the certified bound."""
    bits = 1024
    etas = [
        ALPHA.log_certified(bits),
        SQRT5.log_certified(bits),
        tau(4).log_certified(bits),
    ]
    la = ALPHA.log_certified(bits)
    c3 = CertifiedReal.from_int(100)
    X = [50, 50, 50]
    out = de_weger_reduce(etas, None, X, c3, la, 10**20)
    H = out.h_bound
    vals = [e.lower for e in etas]
    alpha_low = la.lower
    rng = random.Random(7)
    for _ in range(2000):
        xs = [rng.randrange(-x, x + 1) for x in X]
        if all(x == 0 for x in xs):
            continue
        lam = abs(sum(x * v for x, v in zip(xs, vals)))
        # if |Lambda| < 100 alpha^-h for h > H the certificate would be wrong
        if lam < Fraction(100) * Fraction(1, int(2 ** ((H + 1) * 0.6943))):
            h_implied = 0
            while Fraction(100) * alpha_low ** -(h_implied + 1) > lam:
                h_implied += 1
            assert h_implied <= H


def test_de_weger_escalates_c():
    bits = 1024
    etas = [ALPHA.log_certified(bits), SQRT5.log_certified(bits), tau(5).log_certified(bits)]
    la = ALPHA.log_certified(bits)
    out = de_weger_reduce(etas, None, [10**6, 10**6, 10**6], CertifiedReal.from_int(1), la, 10**10)
    assert out.c_used > 10**10  # the initial C is far too small and is escalated


def test_de_weger_failure_reported():
    bits = 512
    etas = [ALPHA.log_certified(bits), SQRT5.log_certified(bits)]
    la = ALPHA.log_certified(bits)
    with pytest.raises(ReductionFailed):
        # C pinned so low that escalation cannot fix it within 3 tries
        de_weger_reduce(etas, None, [10**30, 10**30], CertifiedReal.from_int(1), la, 10, escalations=1)


# -- Baker-Davenport ---------------------------------------------------------


def test_baker_davenport_known_instance():
    bits = 2048
    logy = log_rational(10, 1, bits)
    mu = ALPHA.log_certified(bits) / logy
    tau_v = SQRT5.log_certified(bits).__neg__() / logy
    N = 10**18
    pairs = build_kappa_list(mu, N, count=60)
    c1 = CertifiedReal.from_fraction(Fraction(203, 100)) / logy
    c2 = ALPHA.log_certified(bits)
    h = baker_davenport(mu, tau_v, N, c1, c2, pairs)
    assert h is not None and 0 < h < 200


def test_baker_davenport_soundness_brute():
    """Certified H really excludes larger h: check against direct search."""
    bits = 2048
    logy = log_rational(10, 1, bits)
    mu = ALPHA.log_certified(bits) / logy
    tau_v = SQRT5.log_certified(bits).__neg__() / logy
    N = 10**4
    pairs = build_kappa_list(mu, N, count=40)
    c1 = CertifiedReal.from_fraction(Fraction(203, 100)) / logy
    c2 = ALPHA.log_certified(bits)
    h = baker_davenport(mu, tau_v, N, c1, c2, pairs)
    assert h is not None
    mu_val, tau_val = mu.lower, tau_v.lower
    c1_val, alpha_val = c1.upper, c2.lower
    for n in range(0, N):
        x = round(n * mu_val + tau_val)
        lam = abs(n * mu_val + tau_val - x)
        if lam == 0:
            continue
        # the largest h with lam < c1 exp(-c2 h) must satisfy h <= bound
        h_true = -1
        t = Fraction(c1_val)
        while t > lam and h_true < h + 5:
            h_true += 1
            t = t / (Fraction(16180339887, 10**10))
        assert h_true <= h


def test_kappa_pairs_structure():
    mu = _sqrt5_over_alpha()
    pairs = build_kappa_list(mu, 10**12, count=30)
    assert pairs
    for p in pairs:
        assert p.q > 10**12  # denominators exceed the range bound
        assert p.kappa > 0
