import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from galres.characters import (DirichletGroup, build_character_table,
                               character_sum, orthogonality_check, sigma_q,
                               sigma_q_case)
from galres.errors import CapacityError, ValidationError
from galres.ntcore import sieve_primes

ODD_PRIMES_TO_50 = [q for q in sieve_primes(50) if q >= 3]


# ---------------- prime-modulus tables

def test_table_q5_explicit():
    table = build_character_table(5)
    assert table.q == 5
    assert table.generator == 2
    chars = table.characters()
    assert len(chars) == 4
    # principal character: 1 on units, 0 at the origin
    chi0 = chars[0]
    assert chi0.is_principal and not chi0.is_primitive
    assert [chi0(n) for n in range(5)] == [0, 1, 1, 1, 1]
    # the order-2 character is the Legendre symbol mod 5
    chi2 = table.character(2)
    legendre = {1: 1, 2: -1, 3: -1, 4: 1}
    for n, want in legendre.items():
        assert chi2(n) == pytest.approx(want, abs=1e-12)
    # parities alternate with the index because -1 = g^((q-1)/2)
    assert [c.parity for c in chars] == [0, 1, 0, 1]


def test_table_group_law_q11():
    table = build_character_table(11)
    order = 10
    for j in (1, 3, 7):
        for k in (2, 5, 9):
            prod_index = (j + k) % order
            for n in range(1, 11):
                lhs = table.character(j)(n) * table.character(k)(n)
                rhs = table.character(prod_index)(n)
                assert lhs == pytest.approx(rhs, abs=1e-12)


def test_table_multiplicative_in_the_argument():
    table = build_character_table(13)
    for j in range(12):
        chi = table.character(j)
        for m in range(1, 13):
            for n in range(1, 13):
                assert chi(m * n) == pytest.approx(chi(m) * chi(n),
                                                   abs=1e-12)


def test_table_gram_matrix():
    for q in (5, 13, 47):
        table = build_character_table(q)
        mat = np.vstack([np.array([c(n) for n in range(q)])
                         for c in table.characters()])
        gram = mat @ mat.conj().T
        assert np.allclose(gram, (q - 1) * np.eye(q - 1), atol=1e-9)


def test_table_primitivity_counts():
    for q in ODD_PRIMES_TO_50:
        table = build_character_table(q)
        prim = table.primitive_characters()
        # everything except the principal character is primitive mod a prime
        assert len(prim) == q - 2
        even = table.primitive_characters(parity=0)
        odd = table.primitive_characters(parity=1)
        assert len(even) == (q - 3) // 2
        assert len(odd) == (q - 1) // 2


def test_table_rejects_bad_modulus():
    for q in (1, 2, 4, 9, 15, -7):
        with pytest.raises(ValidationError):
            build_character_table(q)
    with pytest.raises(ValidationError):
        build_character_table(7.0)


def test_table_is_cached():
    assert build_character_table(41) is build_character_table(41)


# ---------------- composite-modulus groups

@pytest.mark.parametrize("q,phi", [(4, 2), (8, 4), (9, 6), (12, 4),
                                   (15, 8), (45, 24)])
def test_group_size_and_gram(q, phi):
    G = DirichletGroup(q)
    assert G.phi == phi
    chars = list(G.characters())
    assert len(chars) == phi
    units = [n for n in range(q) if math.gcd(n, q) == 1]
    mat = np.vstack([np.array([c(n) for n in units]) for c in chars])
    gram = mat @ mat.conj().T
    assert np.allclose(gram, phi * np.eye(phi), atol=1e-9)


def test_group_principal_first_and_parity():
    for q in (8, 9, 15, 45):
        G = DirichletGroup(q)
        chars = list(G.characters())
        assert chars[0].is_principal
        for c in chars:
            want = 0 if abs(c(q - 1) - 1) < 1e-9 else 1
            assert c.parity == want
            assert c(q - 1) == pytest.approx((-1.0) ** c.parity, abs=1e-9)


def test_group_law_composite():
    G = DirichletGroup(45)
    units = [n for n in range(45) if math.gcd(n, 45) == 1]
    for c in G.characters():
        for m in units[:6]:
            for n in units[:6]:
                assert c(m * n) == pytest.approx(c(m) * c(n), abs=1e-12)


def test_group_matches_prime_table():
    table = build_character_table(13)
    G = DirichletGroup(13)
    got = {tuple(np.round([c(n) for n in range(13)], 9)) for c in G.characters()}
    want = {tuple(np.round([c(n) for n in range(13)], 9))
            for c in table.characters()}
    assert got == want


def test_group_validations():
    with pytest.raises(ValidationError):
        DirichletGroup(2)
    with pytest.raises(ValidationError):
        DirichletGroup(1)
    with pytest.raises(CapacityError):
        DirichletGroup(2000003)


# ---------------- partial character sums

def test_character_sum_hand_values():
    table = build_character_table(5)
    chi = table.character(2)            # the quadratic character
    assert character_sum(1, chi) == pytest.approx(1.0, abs=1e-12)
    assert character_sum(3, chi) == pytest.approx(-1.0, abs=1e-12)
    assert character_sum(4, chi) == pytest.approx(0.0, abs=1e-12)
    # a full period contributes zero for any non-principal character
    assert character_sum(9, chi) == pytest.approx(0.0, abs=1e-12)
    # many periods amplify the rounding in the stored value vector a bit
    assert character_sum(5 * 12345, chi) == pytest.approx(0.0, abs=1e-10)


def test_character_sum_principal_counts_units():
    table = build_character_table(7)
    chi0 = table.character(0)
    for x in (1, 6, 7, 13, 100):
        direct = sum(1 for n in range(1, x + 1) if n % 7 != 0)
        assert character_sum(x, chi0) == pytest.approx(direct, abs=1e-12)


@given(st.sampled_from([3, 5, 7, 11, 13, 29]),
       st.integers(min_value=0, max_value=30),
       st.integers(min_value=1, max_value=400))
def test_character_sum_matches_direct(q, j, x):
    table = build_character_table(q)
    chi = table.character(j % (q - 1))
    direct = sum(chi(n) for n in range(1, x + 1))
    got = character_sum(x, chi)
    assert cmath.isclose(got, direct, abs_tol=1e-10)


@given(st.sampled_from([4, 8, 9, 12, 15]),
       st.integers(min_value=0, max_value=30),
       st.integers(min_value=1, max_value=300))
def test_character_sum_matches_direct_composite(q, j, x):
    chars = list(DirichletGroup(q).characters())
    chi = chars[j % len(chars)]
    direct = sum(chi(n) for n in range(1, x + 1))
    got = character_sum(x, chi)
    assert cmath.isclose(got, direct, abs_tol=1e-10)


def test_character_sum_validations():
    chi = build_character_table(5).character(1)
    with pytest.raises(ValidationError):
        character_sum(0, chi)
    with pytest.raises(ValidationError):
        character_sum(-3, chi)


# ---------------- fixed-parity orthogonality

def test_orthogonality_exhaustive_small_primes():
    for q in (5, 7, 11, 13):
        for nu in (0, 1):
            for m in range(1, q):
                for n in range(1, q):
                    lhs, rhs = orthogonality_check(q, m, n, nu)
                    assert abs(lhs - rhs) < 1e-9


def test_orthogonality_diagonal_values():
    # m = n = 1: lhs is the number of primitive characters of that parity
    for q in (11, 31, 47):
        lhs0, rhs0 = orthogonality_check(q, 1, 1, 0)
        lhs1, rhs1 = orthogonality_check(q, 1, 1, 1)
        assert rhs0 == pytest.approx((q - 3) / 2, abs=1e-9)
        assert rhs1 == pytest.approx((q - 1) / 2, abs=1e-9)
        assert lhs0 == pytest.approx(rhs0, abs=1e-9)
        assert lhs1 == pytest.approx(rhs1, abs=1e-9)


def test_orthogonality_validations():
    with pytest.raises(ValidationError):
        orthogonality_check(7, 7, 2, 0)      # m not coprime to q
    with pytest.raises(ValidationError):
        orthogonality_check(7, 2, 14, 1)
    with pytest.raises(ValidationError):
        orthogonality_check(7, 1, 2, 2)      # bad parity
    with pytest.raises(ValidationError):
        orthogonality_check(12, 1, 5, 0)     # composite modulus


# ---------------- even-primitive pair weights

def test_sigma_q_against_character_sum():
    # sigma_q(m, n) = 2 Re sum over even primitive chi of chi(m) conj(chi(n))
    for q in (7, 11, 13):
        table = build_character_table(q)
        even_prim = table.primitive_characters(parity=0)
        for m in range(1, q):
            for n in range(1, q):
                direct = 2.0 * sum(c(m) * c(n).conjugate()
                                   for c in even_prim).real
                assert sigma_q(q, m, n) == pytest.approx(direct, abs=1e-9)


def test_sigma_q_case_table():
    for q in (5, 7, 11, 19):
        for m in range(1, q):
            for n in range(1, q):
                got = sigma_q_case(q, m, n)
                assert got == sigma_q(q, m, n)
                if m == n or (m + n) % q == 0:
                    assert got == q - 3
                else:
                    assert got == -2


def test_sigma_q_validations():
    with pytest.raises(ValidationError):
        sigma_q(7, 14, 3)
    with pytest.raises(ValidationError):
        sigma_q_case(7, 2, 21)
