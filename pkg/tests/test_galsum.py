import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from galres import galsum as gs
from galres.errors import (CapacityError, ConvergenceError,
                           UnsupportedAlgorithmError, ValidationError)
from galres.galsum import GalExponent, WeightDescriptor
from galres.ntcore import IntegerSet

from conftest import random_integer_set

SQ2 = math.sqrt(2)

set_strategy = st.lists(st.integers(min_value=1, max_value=600),
                        min_size=1, max_size=14, unique=True)


def brute_gal_sum(vals, alpha):
    a = float(alpha)
    return sum((math.gcd(m, n) / math.lcm(m, n)) ** a for m in vals for n in vals)


# ---------------------------------------------------------------- exponents

def test_exponent_parse_and_bounds():
    assert GalExponent.parse("1/2").alpha == Fraction(1, 2)
    assert GalExponent.parse(1).alpha == 1
    assert float(GalExponent.parse(0.25)) == 0.25
    for bad in (0, -1, Fraction(3, 2)):
        with pytest.raises(ValidationError):
            GalExponent.parse(bad)
    assert GalExponent.parse("1/2").twice_integral
    assert not GalExponent.parse("1/3").twice_integral


# ---------------------------------------------------------------- gal_sum

def test_gal_sum_two_elements():
    assert gs.gal_sum([1, 2]) == pytest.approx(2 + SQ2, rel=1e-15)
    assert gs.gal_sum([1]) == 1.0


def test_gal_sum_empty_rejected():
    with pytest.raises(ValidationError):
        gs.gal_sum([])


@given(set_strategy, st.sampled_from(["1/2", "1", "1/3", "3/4"]))
def test_gal_sum_matches_bruteforce(vals, alpha):
    got = gs.gal_sum(vals, alpha)
    assert got == pytest.approx(brute_gal_sum(vals, Fraction(alpha)), rel=1e-12)


@given(set_strategy, st.sampled_from(["1/2", "1"]))
def test_phi_identity_agrees_with_pairwise(vals, alpha):
    a = gs.gal_sum(vals, alpha, algorithm="pairwise")
    b = gs.gal_sum(vals, alpha, algorithm="phi_identity")
    assert b == pytest.approx(a, rel=1e-12)


def test_phi_identity_requires_integral_2alpha():
    with pytest.raises(UnsupportedAlgorithmError):
        gs.gal_sum([1, 2], "1/3", algorithm="phi_identity")


def test_phi_identity_divisor_budget():
    # 2^46-divisor element blows the enumeration budget
    from galres.ntcore import sieve_primes
    v = 1
    for p in sieve_primes(200):
        v *= p
    with pytest.raises(CapacityError):
        gs.gal_sum([v], "1/2", algorithm="phi_identity")


def test_unknown_algorithm():
    with pytest.raises(UnsupportedAlgorithmError):
        gs.gal_sum([1, 2], "1/2", algorithm="nope")


def test_gal_sum_huge_values_no_overflow():
    # values near 10^40; ratios stay modest, nothing overflows
    base = 2 ** 64 * 3 ** 30 * 5 ** 12
    M = [base, base * 7, base * 11, base // 2]
    got = gs.gal_sum(M)
    want = brute_gal_sum(M, 0.5)
    assert got == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------- subsum

def test_subsum_known_value():
    assert gs.gal_subsum([1, 2, 4]) == pytest.approx(3.5 + SQ2, rel=1e-15)


@given(set_strategy)
def test_subsum_below_full_sum(vals):
    assert gs.gal_subsum(vals) <= gs.gal_sum(vals) + 1e-12


@given(set_strategy)
def test_subsum_bruteforce(vals):
    want = sum((n / m) ** 0.5 for m in vals for n in vals if m % n == 0)
    assert gs.gal_subsum(vals) == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------- weights

def test_weight_validation():
    with pytest.raises(ValidationError):
        WeightDescriptor("bogus")
    with pytest.raises(ValidationError):
        WeightDescriptor("g0", 0.5)
    with pytest.raises(ValidationError):
        WeightDescriptor("g_alpha", 1.0)        # missing alpha_param
    with pytest.raises(ValidationError):
        WeightDescriptor("g_alpha", 1.0, Fraction(2))


def test_weight_g0_reduces_to_half_exponent():
    vals = random_integer_set(3, 40)
    w = WeightDescriptor("g0")
    assert gs.gal_sum_weighted(vals, w) == pytest.approx(
        gs.gal_sum(vals, "1/2"), rel=1e-12)


def test_weight_g1_matches_direct_evaluation():
    vals = [1, 2, 3, 5, 6, 30, 210]
    w = WeightDescriptor("g1", scale_C=2.0)
    from galres.ntcore import factorize
    want = 0.0
    for m in vals:
        for n in vals:
            q = math.lcm(m, n) // math.gcd(m, n)
            want += w.value(factorize(q))
    assert gs.gal_sum_weighted(vals, w) == pytest.approx(want, rel=1e-12)


def test_weight_galpha_matches_direct_evaluation():
    vals = [1, 2, 6, 10, 15, 30]
    w = WeightDescriptor("g_alpha", 1.5, Fraction(1, 3))
    from galres.ntcore import factorize
    want = 0.0
    for m in vals:
        for n in vals:
            q = math.lcm(m, n) // math.gcd(m, n)
            want += w.value(factorize(q))
    assert gs.gal_sum_weighted(vals, w) == pytest.approx(want, rel=1e-12)


@given(set_strategy, st.sampled_from(["g0", "g1"]))
def test_split_sum_dominates_termwise(vals, kind):
    """For multiplicative g the coprime cofactors give termwise equality,
    so the split form can never fall below the plain one."""
    w = WeightDescriptor(kind, scale_C=1.5)
    s = gs.gal_sum_weighted(vals, w)
    splus = gs.gal_sum_weighted_split(vals, w)
    assert s <= splus * (1 + 1e-12) + 1e-12


def test_pair_terms_cover_matrix():
    vals = [2, 3, 4]
    terms = {(m, n): t for m, n, t in gs.gal_pair_terms(vals)}
    assert terms[(2, 4)] == pytest.approx(1 / SQ2)
    assert terms[(2, 3)] == pytest.approx(1 / math.sqrt(6))
    assert terms[(4, 4)] == 1.0
    assert len(terms) == 9


# ---------------------------------------------------------------- norms

def test_quadratic_norm_known_values():
    assert gs.quadratic_norm([1, 2]) == pytest.approx(1 + 1 / SQ2, rel=1e-10)
    assert gs.quadratic_norm([2, 3]) == pytest.approx(1 + 1 / math.sqrt(6), rel=1e-10)


def test_quadratic_norm_divisibility_mode():
    got = gs.quadratic_norm([1, 2], mode="divisibility")
    B = np.array([[1.0, 0.0], [1 / SQ2, 1.0]])
    want = np.linalg.svd(B, compute_uv=False)[0]
    assert got == pytest.approx(want, rel=1e-10)
    with pytest.raises(UnsupportedAlgorithmError):
        gs.quadratic_norm([1, 2], mode="spectral")


@given(set_strategy)
def test_norm_sandwich(vals):
    n = len(vals)
    q = gs.quadratic_norm(vals)
    s = gs.gal_sum(vals)
    assert s / n <= q * (1 + 1e-9)
    assert q <= n * (1 + 1e-9)


@given(set_strategy)
def test_gal_matrix_psd_and_unit_diagonal(vals):
    gm = gs.build_gal_matrix(vals)
    assert np.allclose(np.diag(gm.entries), 1.0)
    assert np.allclose(gm.entries, gm.entries.T)
    evals = np.linalg.eigvalsh(gm.entries)
    assert evals.min() >= -1e-9


def test_power_iteration_convergence_error_payload():
    # ones vector is not the dominant eigenvector, so the iteration only
    # approaches it geometrically and a zero tolerance can never be met
    mat = np.array([[2.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ConvergenceError) as ei:
        gs._power_iteration(mat, rel_tol=0.0, max_iter=3)
    assert ei.value.last_iterate is not None
    assert ei.value.residual >= 0.0


# ---------------------------------------------------------------- sigma_p

def test_sigma_p_known():
    assert gs.sigma_p([0, 1], [0, 1], 2) == pytest.approx(2 + SQ2, rel=1e-15)
    assert gs.sigma_p([0], [3], 4) == pytest.approx(1 / 8)


def test_sigma_p_validation():
    with pytest.raises(ValidationError):
        gs.sigma_p([], [0], 2)
    with pytest.raises(ValidationError):
        gs.sigma_p([1, 1], [0], 2)
    with pytest.raises(ValidationError):
        gs.sigma_p([2, 1], [0], 2)
    with pytest.raises(ValidationError):
        gs.sigma_p([-1], [0], 2)
    with pytest.raises(ValidationError):
        gs.sigma_p([0], [0], 1)


def test_sigma_star_cases():
    g = 1 / (SQ2 - 1)
    assert gs.sigma_p_star(1, 1, 2) == pytest.approx(2 + 2 * g)
    assert gs.sigma_p_star(1, 2, 2) == pytest.approx(2 + 3 * g)
    assert gs.sigma_p_star(1, 5, 2) == pytest.approx(2 + 4 * g)
    assert gs.sigma_p_star(5, 1, 2) == gs.sigma_p_star(1, 5, 2)


def test_sigma_plus_known():
    g = 1 / (SQ2 - 1)
    assert gs.sigma_p_plus(1, 1, 2) == pytest.approx(2 + 2 * g)
    assert gs.sigma_p_plus(2, 2, 2) == pytest.approx(3 + 6 * g)


@st.composite
def valuation_pair(draw):
    p = draw(st.sampled_from([2, 3, 5, 7, 11]))
    nm = sorted(draw(st.sets(st.integers(0, 8), min_size=1, max_size=6)))
    nn = sorted(draw(st.sets(st.integers(0, 8), min_size=1, max_size=6)))
    return p, nm, nn


@given(valuation_pair())
def test_sigma_chain(args):
    # sigma_star takes cardinality-minus-one arguments and majorizes
    # sigma_p over every valuation-set pair of those sizes
    p, nm, nn = args
    r, s = len(nm) - 1, len(nn) - 1
    val = gs.sigma_p(nm, nn, p)
    star = gs.sigma_p_star(r, s, p)
    plus = gs.sigma_p_plus(r, s, p)
    eps = 1e-12
    assert val <= star * (1 + eps)
    assert star <= plus * (1 + eps)
    if abs(s - r) <= 1:
        # initial intervals attain the claimed maximum in the first two cases
        full = gs.sigma_p(range(r + 1), range(s + 1), p)
        assert val <= full * (1 + eps)


def test_sigma_plus_weight_cases():
    g = 1 / (SQ2 - 1)
    assert gs.sigma_p_plus_weight(3, 3, 2) == 1.0
    assert gs.sigma_p_plus_weight(2, 3, 2) == pytest.approx(g)
    assert gs.sigma_p_plus_weight(0, 2, 2) == pytest.approx(g)
    assert gs.sigma_p_plus_weight(1, 3, 2) == 0.0
    assert gs.sigma_p_plus_weight(2, 4, 2) == 0.0
