import math

import pytest
from hypothesis import given, strategies as st

from galres.errors import ValidationError
from galres.ntcore import (FactoredInt, IntegerSet, arith_fn, factorize,
                           gcd_lcm, is_probable_prime, sieve_primes)

PRIMES_BELOW_100 = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43,
                    47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]


def test_sieve_small():
    assert sieve_primes(100) == PRIMES_BELOW_100
    assert sieve_primes(2) == [2]


def test_sieve_pi_of_10_to_6():
    assert len(sieve_primes(10 ** 6)) == 78498


def test_sieve_rejects_tiny_limit():
    with pytest.raises(ValidationError):
        sieve_primes(1)


@given(st.integers(min_value=1, max_value=10 ** 12))
def test_factorize_roundtrip(n):
    f = factorize(n)
    prod = 1
    for p, e in f.factors:
        assert is_probable_prime(p)
        assert e >= 1
        prod *= p ** e
    assert prod == n
    assert [p for p, _ in f.factors] == sorted({p for p, _ in f.factors})


def test_factorize_large_semiprime():
    p, q = 10000000019, 10000000033
    f = factorize(p * q)
    assert f.factors == ((p, 1), (q, 1))


def test_factored_int_validation():
    with pytest.raises(ValidationError):
        FactoredInt(12, ((2, 2),))          # product mismatch
    with pytest.raises(ValidationError):
        FactoredInt(12, ((3, 1), (2, 2)))   # unsorted
    with pytest.raises(ValidationError):
        FactoredInt(0, ())
    one = FactoredInt.from_value(1)
    assert one.factors == () and one.tau() == 1


@given(st.integers(min_value=1, max_value=10 ** 6),
       st.integers(min_value=1, max_value=10 ** 6))
def test_gcd_lcm_product_identity(a, b):
    g, l = gcd_lcm(factorize(a), factorize(b))
    assert g.value == math.gcd(a, b)
    assert l.value == math.lcm(a, b)
    assert g.value * l.value == a * b


@pytest.mark.parametrize("n,phi,mu,tau,om,big_om,rad", [
    (1, 1, 1, 1, 0, 0, 1),
    (2, 1, -1, 2, 1, 1, 2),
    (12, 4, 0, 6, 2, 3, 6),
    (30, 8, -1, 8, 3, 3, 30),
    (360, 96, 0, 24, 3, 6, 30),
])
def test_arith_fn_known(n, phi, mu, tau, om, big_om, rad):
    assert arith_fn(n, "phi") == phi
    assert arith_fn(n, "mu") == mu
    assert arith_fn(n, "tau") == tau
    assert arith_fn(n, "omega") == om
    assert arith_fn(n, "big_omega") == big_om
    assert arith_fn(n, "squarefree_kernel") == rad
    assert arith_fn(n, "Omega") == big_om
    assert arith_fn(n, "rad") == rad


@given(st.integers(min_value=1, max_value=3000),
       st.integers(min_value=1, max_value=3000))
def test_multiplicativity_on_coprime_pairs(a, b):
    if math.gcd(a, b) != 1:
        return
    for which in ("phi", "mu", "tau", "squarefree_kernel"):
        assert arith_fn(a * b, which) == arith_fn(a, which) * arith_fn(b, which)
    assert arith_fn(a * b, "omega") == arith_fn(a, "omega") + arith_fn(b, "omega")


@given(st.integers(min_value=1, max_value=20000))
def test_divisors_match_bruteforce(n):
    f = factorize(n)
    divs = sorted(d.value for d in f.divisors())
    brute = [d for d in range(1, n + 1) if n % d == 0]
    assert divs == brute
    assert len(divs) == f.tau()


def test_integer_set_validation_and_order():
    with pytest.raises(ValidationError):
        IntegerSet([factorize(2), factorize(2)])
    with pytest.raises(ValidationError):
        IntegerSet.from_values([0, 1])
    M = IntegerSet.from_values([6, 1, 2, 2, 3])
    assert M.values() == (1, 2, 3, 6)
    assert 3 in M and 5 not in M


def test_integer_set_flags():
    M = IntegerSet.from_values([1, 2, 3, 6])
    assert M.squarefree_all and M.divisor_closed and M.complete
    assert not IntegerSet.from_values([1, 4]).squarefree_all
    assert not IntegerSet.from_values([1, 2, 6]).divisor_closed
    assert not IntegerSet.from_values([1, 3]).complete
    # pushing 3 down to 2 lands in the set
    assert IntegerSet.from_values([1, 2, 3]).complete
    # every downward prime reassignment of 5 (to 2 or 3) is present
    assert IntegerSet.from_values([1, 2, 3, 5]).complete
    # 15 = 3*5 can be pushed to 2*3 = 6, absent here
    assert not IntegerSet.from_values([1, 3, 5, 15]).complete
    assert IntegerSet.from_values([1, 2, 3, 5, 6, 10, 15]).complete


def test_support_primes():
    M = IntegerSet.from_values([4, 15, 7])
    assert M.support_primes() == (2, 3, 5, 7)


def test_recompute_flags_round_trips():
    M = IntegerSet.from_values([1, 2, 4, 8])
    flags = M.recompute_flags()
    assert flags == {"squarefree_all": M.squarefree_all,
                     "divisor_closed": M.divisor_closed,
                     "complete": M.complete}


@given(st.lists(st.integers(min_value=1, max_value=500),
                min_size=1, max_size=12, unique=True))
def test_divisor_closed_brute(vals):
    M = IntegerSet.from_values(vals)
    expected = all(d in set(vals) for v in vals
                   for d in range(1, v + 1) if v % d == 0)
    assert M.divisor_closed == expected
