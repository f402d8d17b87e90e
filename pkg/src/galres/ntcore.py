"""Integer factorization core and factored-set containers.

Everything downstream (pair sums, constructions, resonators) consumes
integers together with their prime factorizations, so factoring happens
once at the boundary.  Strategy: trial division by a cached sieve up to
10**6, deterministic Miller-Rabin on the cofactor, Pollard-Brent rho for
anything composite that survives.  Arbitrary-size integers are supported
throughout; only desk-scale semiprimes (factors up to roughly 10**12)
are expected to be fed to rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, ValidationError

_TRIAL_LIMIT = 10 ** 6
_sieve_cache: dict[int, list[int]] = {}

# Witness set is deterministic for n < 3.317e24 (Sorenson-Webster).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def sieve_primes(limit: int) -> list[int]:
    """All primes p <= limit by Eratosthenes. Requires limit >= 2."""
    if limit < 2:
        raise ValidationError("sieve_primes requires limit >= 2", "limit >= 2")
    import numpy as np

    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return [int(p) for p in np.nonzero(mask)[0]]


def _trial_primes() -> list[int]:
    ps = _sieve_cache.get(_TRIAL_LIMIT)
    if ps is None:
        ps = sieve_primes(_TRIAL_LIMIT)
        _sieve_cache[_TRIAL_LIMIT] = ps
    return ps


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with a fixed witness set (deterministic below 3.3e24)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """A nontrivial factor of composite odd n.  Deterministic: the
    polynomial constant increases from 1 until a factor appears."""
    if n % 2 == 0:
        return 2
    for c in range(1, 10 ** 4):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise CapacityError(f"rho failed to split {n}", "factorable within rho budget")


def _factor_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_probable_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _factor_large(d, out)
    _factor_large(n // d, out)


@dataclass(frozen=True)
class FactoredInt:
    """A positive integer carried together with its factorization.

    ``factors`` is a tuple of (prime, exponent) pairs sorted by prime,
    exponents >= 1, and the product reproduces ``value`` exactly.
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.value < 1:
            raise ValidationError("FactoredInt requires value >= 1", "value >= 1")
        prod = 1
        last = 1
        for p, e in self.factors:
            if e < 1:
                raise ValidationError("exponents must be >= 1", "exponent >= 1")
            if p <= last:
                raise ValidationError("factors must be sorted by prime, duplicate-free",
                                      "factors sorted by prime")
            last = p
            prod *= p ** e
        if prod != self.value:
            raise ValidationError("factor product does not reproduce value",
                                  "product of factors == value")

    @classmethod
    def from_value(cls, n: int) -> "FactoredInt":
        return factorize(n)

    @classmethod
    def from_factors(cls, factors: Iterable[tuple[int, int]]) -> "FactoredInt":
        fs = tuple(sorted((int(p), int(e)) for p, e in factors if e > 0))
        v = 1
        for p, e in fs:
            v *= p ** e
        return cls(v, fs)

    # small conveniences used all over the package
    def omega(self) -> int:
        return len(self.factors)

    def big_omega(self) -> int:
        return sum(e for _, e in self.factors)

    def tau(self) -> int:
        t = 1
        for _, e in self.factors:
            t *= e + 1
        return t

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def exponent_of(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def log(self) -> float:
        return math.log(self.value)

    def divisors(self) -> Iterator["FactoredInt"]:
        """All divisors, as FactoredInt, in a deterministic order."""
        def rec(i: int, acc: list[tuple[int, int]]):
            if i == len(self.factors):
                yield FactoredInt.from_factors(acc)
                return
            p, e = self.factors[i]
            for k in range(e + 1):
                if k:
                    acc.append((p, k))
                    yield from rec(i + 1, acc)
                    acc.pop()
                else:
                    yield from rec(i + 1, acc)
        yield from rec(0, [])

    def mul(self, other: "FactoredInt") -> "FactoredInt":
        merged: dict[int, int] = dict(self.factors)
        for p, e in other.factors:
            merged[p] = merged.get(p, 0) + e
        return FactoredInt(self.value * other.value,
                           tuple(sorted(merged.items())))


def factorize(n: int) -> FactoredInt:
    """Full factorization of n >= 1."""
    if n < 1:
        raise ValidationError("factorize requires n >= 1", "n >= 1")
    if n == 1:
        return FactoredInt(1, ())
    m = n
    fs: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > m:
            break
        while m % p == 0:
            fs[p] = fs.get(p, 0) + 1
            m //= p
    if m > 1:
        # cofactor is prime whenever the trial loop broke on p*p > m;
        # _factor_large re-checks primality so the distinction is moot
        _factor_large(m, fs)
    return FactoredInt(n, tuple(sorted(fs.items())))


def gcd_lcm(a: FactoredInt, b: FactoredInt) -> tuple[FactoredInt, FactoredInt]:
    """Exponentwise (gcd, lcm); satisfies gcd.value*lcm.value == a.value*b.value."""
    ga: list[tuple[int, int]] = []
    la: dict[int, int] = dict(a.factors)
    for p, e in b.factors:
        ea = la.get(p, 0)
        if ea:
            ga.append((p, min(ea, e)))
        la[p] = max(ea, e)
    g = FactoredInt.from_factors(ga)
    l = FactoredInt.from_factors(sorted(la.items()))
    return g, l


_ARITH_NAMES = ("phi", "mu", "tau", "omega", "big_omega", "squarefree_kernel")


def arith_fn(n: int | FactoredInt, which: str) -> int:
    """Classical multiplicative statistics of n.

    which: one of phi, mu, tau, omega, big_omega (Omega), squarefree_kernel.
    """
    alias = {"Omega": "big_omega", "rad": "squarefree_kernel"}
    which = alias.get(which, which)
    if which not in _ARITH_NAMES:
        raise ValidationError(f"unknown arithmetic function {which!r}",
                              "which in {phi,mu,tau,omega,big_omega,squarefree_kernel}")
    fi = n if isinstance(n, FactoredInt) else factorize(n)
    if which == "phi":
        r = 1
        for p, e in fi.factors:
            r *= (p - 1) * p ** (e - 1)
        return r
    if which == "mu":
        return 0 if any(e > 1 for _, e in fi.factors) else (-1) ** len(fi.factors)
    if which == "tau":
        return fi.tau()
    if which == "omega":
        return fi.omega()
    if which == "big_omega":
        return fi.big_omega()
    r = 1
    for p, _ in fi.factors:
        r *= p
    return r


class IntegerSet:
    """A duplicate-free, value-sorted collection of factored integers.

    Predicate flags (squarefree, divisor-closed, complete) are computed
    lazily and cached; ``set_predicates`` in the extremal module wraps
    them together with the occupation-bound check.
    """

    __slots__ = ("elements", "_value_set", "__dict__")

    def __init__(self, elements: Sequence[FactoredInt]):
        vals = [e.value for e in elements]
        if any(v < 1 for v in vals):
            raise ValidationError("elements must be positive", "elements >= 1")
        if len(set(vals)) != len(vals):
            raise ValidationError("duplicate elements", "duplicate-free")
        order = sorted(range(len(elements)), key=lambda i: vals[i])
        self.elements: tuple[FactoredInt, ...] = tuple(elements[i] for i in order)
        self._value_set = frozenset(vals)

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "IntegerSet":
        uniq = sorted(set(int(v) for v in values))
        return cls([factorize(v) for v in uniq])

    @classmethod
    def from_factored(cls, elements: Iterable[FactoredInt]) -> "IntegerSet":
        seen: dict[int, FactoredInt] = {}
        for e in elements:
            seen.setdefault(e.value, e)
        return cls(list(seen.values()))

    def values(self) -> tuple[int, ...]:
        return tuple(e.value for e in self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[FactoredInt]:
        return iter(self.elements)

    def __contains__(self, v: int) -> bool:
        return v in self._value_set

    def __eq__(self, other) -> bool:
        return isinstance(other, IntegerSet) and self.values() == other.values()

    def __repr__(self) -> str:
        vs = self.values()
        body = ", ".join(map(str, vs[:8])) + (", ..." if len(vs) > 8 else "")
        return f"IntegerSet({{{body}}}, n={len(vs)})"

    def support_primes(self) -> tuple[int, ...]:
        """Sorted primes dividing at least one element."""
        ps: set[int] = set()
        for e in self.elements:
            ps.update(p for p, _ in e.factors)
        return tuple(sorted(ps))

    @cached_property
    def squarefree_all(self) -> bool:
        return all(e.is_squarefree() for e in self.elements)

    @cached_property
    def divisor_closed(self) -> bool:
        for e in self.elements:
            for d in e.divisors():
                if d.value not in self._value_set:
                    return False
        return True

    @cached_property
    def complete(self) -> bool:
        """Closure under pushing prime factors down.

        For each element with factor pairs (p_i, e_i), every integer
        obtained by an injective reassignment q_i <= p_i of distinct
        primes (same exponents) must belong to the set.
        """
        if not self.elements:
            return True
        max_p = max((e.factors[-1][0] for e in self.elements if e.factors), default=2)
        primes = sieve_primes(max(2, max_p))
        for e in self.elements:
            if not self._complete_for(e, primes):
                return False
        return True

    def _complete_for(self, e: FactoredInt, primes: list[int]) -> bool:
        pairs = list(e.factors)
        if not pairs:
            return True
        # candidate primes per slot: all primes <= p_i
        import bisect
        cand = [primes[: bisect.bisect_right(primes, p)] for p, _ in pairs]
        used: set[int] = set()

        def rec(i: int, val: int) -> bool:
            if i == len(pairs):
                return val in self._value_set
            for q in cand[i]:
                if q in used:
                    continue
                used.add(q)
                ok = rec(i + 1, val * q ** pairs[i][1])
                used.discard(q)
                if not ok:
                    return False
            return True

        return rec(0, 1)

    def recompute_flags(self) -> dict[str, bool]:
        """Recompute every cached predicate from scratch (test hook)."""
        fresh = IntegerSet(list(self.elements))
        return {
            "squarefree_all": fresh.squarefree_all,
            "divisor_closed": fresh.divisor_closed,
            "complete": fresh.complete,
        }
