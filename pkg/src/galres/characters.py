"""Dirichlet characters and the fixed-parity orthogonality identity.

For prime q every residue class mod q is a power of a primitive root g,
so the characters are exactly chi_j(g^k) = e(jk/(q-1)) for j = 0..q-2,
chi_0 principal, and every non-principal character is primitive.  The
parity is nu(chi_j) = j mod 2 because -1 = g^((q-1)/2).

For composite moduli (needed by the character-sum resonance, which puts
no restriction on q) the unit group is assembled from the prime-power
components: a primitive root for odd p^a, the classes of -1 and 5 for
2^a with a >= 3, and the class of 3 for modulus 4.

The key identity here is the fixed-parity orthogonality over primitive
characters: for gcd(mn, q) = 1,

    sum_{chi primitive, nu(chi)=nu} chi(m) conj(chi(n))
        = (1/2) sum_{d | (q, |m-n|)} phi(d) mu(q/d)
        + ((-1)^nu / 2) sum_{d | (q, m+n)} phi(d) mu(q/d),

with the convention gcd(q, 0) = q.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math
from typing import Iterator, Sequence

import numpy as np

from .accsum import neumaier_sum
from .errors import AccuracyError, CapacityError, ValidationError
from .ntcore import arith_fn, factorize

_VERIFY_LIMIT = 100


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = factorize(n).factors
    return len(f) == 1 and f[0][1] == 1


def _primitive_root_mod_prime(q: int) -> int:
    """Smallest positive primitive root mod prime q, by order checking."""
    if q == 2:
        return 1
    phi = q - 1
    prime_divs = [p for p, _ in factorize(phi).factors]
    for g in range(2, q):
        if all(pow(g, phi // p, q) != 1 for p in prime_divs):
            return g
    raise AccuracyError(f"no primitive root found mod {q}")  # pragma: no cover


class Character:
    """A single Dirichlet character, held as its value vector on the
    residues 0..q-1.  Callable on any integer; zero off the units."""

    __slots__ = ("q", "index", "parity", "is_principal", "is_primitive",
                 "_vector")

    def __init__(self, q: int, index: int, parity: int, is_principal: bool,
                 is_primitive: bool, vector: np.ndarray):
        self.q = q
        self.index = index
        self.parity = parity
        self.is_principal = is_principal
        self.is_primitive = is_primitive
        self._vector = vector

    def __call__(self, n: int) -> complex:
        return complex(self._vector[n % self.q])

    def vector(self) -> np.ndarray:
        """Values on residues 0..q-1 (read-only view)."""
        v = self._vector.view()
        v.flags.writeable = False
        return v

    def __repr__(self) -> str:
        tag = "principal" if self.is_principal else f"nu={self.parity}"
        return f"Character(q={self.q}, index={self.index}, {tag})"


class CharacterTable:
    """All q-1 characters modulo a prime q, through a primitive root.

    log_table[n] is the discrete logarithm of n (g^log_table[n] = n mod
    q) for 1 <= n < q, and -1 at n = 0.  chi_j(n) = e(j log(n)/(q-1)).
    """

    def __init__(self, q: int, generator: int, log_table: np.ndarray):
        self.q = q
        self.generator = generator
        self.log_table = log_table
        order = q - 1
        # e(m/(q-1)) for m = 0..q-2, indexed by the product j*log mod order
        self._roots = np.exp(2j * np.pi * np.arange(order) / order)
        self._chars: list[Character] = []
        for j in range(order):
            vec = np.zeros(q, dtype=complex)
            vec[1:] = self._roots[(j * log_table[1:]) % order]
            self._chars.append(Character(
                q=q, index=j, parity=j % 2, is_principal=(j == 0),
                is_primitive=(j != 0), vector=vec))

    def __len__(self) -> int:
        return len(self._chars)

    def character(self, j: int) -> Character:
        return self._chars[j % (self.q - 1)]

    def characters(self) -> Sequence[Character]:
        return tuple(self._chars)

    def primitive_characters(self, parity: int | None = None) -> list[Character]:
        out = [c for c in self._chars if c.is_primitive]
        if parity is not None:
            out = [c for c in out if c.parity == parity]
        return out

    def _verify(self) -> None:
        q = self.q
        mat = np.vstack([c._vector for c in self._chars])
        gram = mat @ mat.conj().T
        if not np.allclose(gram, (q - 1) * np.eye(q - 1), atol=1e-9):
            raise AccuracyError(f"orthogonality failed in the mod-{q} table")
        parities = [c.parity for c in self._chars]
        if parities.count(0) != (q - 1) // 2 or parities.count(1) != (q - 1) // 2:
            raise AccuracyError(f"parity counts wrong in the mod-{q} table")
        for j in range(q - 1):
            val = self._chars[j](q - 1)
            if abs(val - (-1.0) ** j) > 1e-12:
                raise AccuracyError(f"chi_{j}(-1) mismatch in the mod-{q} table")
        # group law on a generator pair
        a, b = 1, min(2, q - 2)
        lhs = self._chars[a]._vector * self._chars[b]._vector
        rhs = self._chars[(a + b) % (q - 1)]._vector
        if not np.allclose(lhs, rhs, atol=1e-12):
            raise AccuracyError(f"group law failed in the mod-{q} table")


@functools.lru_cache(maxsize=128)
def build_character_table(q: int) -> CharacterTable:
    """Character table for a prime modulus q >= 3; the structural
    invariants are verified at build time for q <= 100.  Tables are
    immutable once built, so repeated lookups share one instance."""
    if not isinstance(q, int) or isinstance(q, bool):
        raise ValidationError("q must be an integer", "q integral")
    if q < 3 or not _is_prime(q):
        raise ValidationError(f"q = {q} must be an odd prime >= 3",
                              "q prime, q >= 3")
    g = _primitive_root_mod_prime(q)
    log_table = np.full(q, -1, dtype=np.int64)
    acc = 1
    for k in range(q - 1):
        log_table[acc] = k
        acc = acc * g % q
    table = CharacterTable(q, g, log_table)
    if q <= _VERIFY_LIMIT:
        table._verify()
    return table


# ---------------------------------------------------------------------------
# composite moduli

def _unit_group_generators(q: int) -> list[tuple[int, int]]:
    """(generator, order) pairs whose direct product is (Z/q)*.

    Odd prime powers contribute one cyclic factor; 2^a contributes none
    (a=1), the class of 3 (a=2), or the classes of -1 and 5 (a>=3).
    Generators are lifted to mod q with residue 1 at the other
    components.
    """
    fac = factorize(q).factors
    gens: list[tuple[int, int]] = []
    for p, a in fac:
        pa = p ** a
        rest = q // pa
        if p == 2:
            if a == 1:
                continue
            local = [(pa - 1, 2)]
            if a >= 3:
                local.append((5, 2 ** (a - 2)))
            else:
                local = [(3, 2)]
        else:
            g = _primitive_root_mod_prime(p)
            if a > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            local = [(g, (p - 1) * p ** (a - 1))]
        for g, order in local:
            if rest == 1:
                gens.append((g % q, order))
            else:
                # CRT: g at this component, 1 elsewhere
                inv = pow(pa, -1, rest)
                lifted = (g + pa * ((1 - g) * inv % rest)) % q
                gens.append((lifted, order))
    return gens


class DirichletGroup:
    """The full character group modulo any q >= 3.

    Characters are indexed by exponent tuples c against the unit-group
    generators; chi_c(n) = e(sum_i c_i e_i(n) / d_i) where (e_i(n)) is
    the discrete-log tuple of n.  Enumeration order is the row-major
    order of the tuples, so index 0 is always the principal character.
    """

    def __init__(self, q: int):
        if not isinstance(q, int) or isinstance(q, bool) or q < 3:
            raise ValidationError("q must be an integer >= 3", "q >= 3")
        phi = arith_fn(q, "phi")
        if phi > 10 ** 6:
            raise CapacityError(
                f"phi(q) = {phi} exceeds the table limit 10^6",
                "phi(q) <= 10^6")
        self.q = q
        self.phi = phi
        self.generators = _unit_group_generators(q)
        self.orders = tuple(order for _, order in self.generators)
        # discrete-log tuples for every unit, by direct enumeration
        self._dlog: dict[int, tuple[int, ...]] = {}
        base: list[tuple[int, tuple[int, ...]]] = [(1 % q, ())]
        for g, order in self.generators:
            nxt = []
            for n, tup in base:
                acc = n
                for e in range(order):
                    nxt.append((acc, tup + (e,)))
                    acc = acc * g % q
            base = nxt
        for n, tup in base:
            self._dlog[n] = tup
        if len(self._dlog) != phi:
            raise AccuracyError(
                f"unit group enumeration mod {q} found {len(self._dlog)} "
                f"residues, expected {phi}")

    def __len__(self) -> int:
        return self.phi

    def characters(self) -> Iterator[Character]:
        q = self.q
        minus_one = (q - 1) % q
        units = sorted(self._dlog)
        dim = len(self.orders)
        for index, c in enumerate(itertools.product(
                *(range(d) for d in self.orders))):
            vec = np.zeros(q, dtype=complex)
            for n in units:
                tup = self._dlog[n]
                s = sum(c[i] * tup[i] / self.orders[i] for i in range(dim))
                vec[n] = cmath.exp(2j * cmath.pi * s)
            principal = all(x == 0 for x in c)
            parity = 0 if abs(vec[minus_one] - 1.0) < 1e-9 else 1
            yield Character(q=q, index=index, parity=parity,
                            is_principal=principal, is_primitive=False,
                            vector=vec)


# ---------------------------------------------------------------------------
# finite character sums

def character_sum(x: int, chi: Character) -> complex:
    """S(x, chi) = sum_{n <= x} chi(n), exactly, via residue counts and
    compensated summation (the count of n <= x in class r is x//q plus
    one when 0 < r <= x mod q)."""
    if not isinstance(x, int) or isinstance(x, bool) or x < 1:
        raise ValidationError("x must be a positive integer", "x >= 1")
    q = chi.q
    full, part = divmod(x, q)
    vec = chi._vector
    weights = np.full(q, float(full))
    weights[1:part + 1] += 1.0
    re = neumaier_sum(float(t) for t in weights * vec.real)
    im = neumaier_sum(float(t) for t in weights * vec.imag)
    return complex(re, im)


# ---------------------------------------------------------------------------
# fixed-parity orthogonality (prime modulus)

def _phi_mu_divisor_sum(q: int, c: int) -> int:
    """sum over d | gcd(q, c) of phi(d) mu(q/d), with gcd(q, 0) = q."""
    g = q if c == 0 else math.gcd(q, c)
    G = factorize(g)
    total = 0
    for d in G.divisors():
        total += arith_fn(d, "phi") * arith_fn(q // d.value, "mu")
    return total


def orthogonality_check(q: int, m: int, n: int, nu: int) -> tuple[float, float]:
    """Both sides of the fixed-parity orthogonality identity.

    lhs: direct summation of chi(m) conj(chi(n)) over the primitive
    characters mod prime q of parity nu.  rhs: the two divisor sums.
    Returns (lhs, rhs); the identity makes them equal up to rounding.
    """
    if nu not in (0, 1):
        raise ValidationError("nu must be 0 or 1", "nu in {0, 1}")
    if math.gcd(m * n, q) != 1:
        raise ValidationError(
            f"m, n must be coprime to q (m={m}, n={n}, q={q})",
            "gcd(mn, q) = 1")
    table = build_character_table(q)
    terms = [chi(m) * chi(n).conjugate()
             for chi in table.primitive_characters(parity=nu)]
    lhs_re = neumaier_sum(t.real for t in terms)
    lhs_im = neumaier_sum(t.imag for t in terms)
    if abs(lhs_im) > 1e-9:
        raise AccuracyError(
            f"orthogonality lhs has imaginary part {lhs_im!r}",
            achieved=abs(lhs_im), requested=1e-9)
    rhs = 0.5 * _phi_mu_divisor_sum(q, abs(m - n)) \
        + 0.5 * (-1.0) ** nu * _phi_mu_divisor_sum(q, m + n)
    return lhs_re, rhs


# ---------------------------------------------------------------------------
# the sigma_q weights of the even-parity resonance expansion

def sigma_q(q: int, m: int, n: int) -> int:
    """2 sum over even primitive chi mod prime q of chi(m) conj(chi(n)),
    through the divisor sums: sigma_q = D(|m-n|) + D(m+n) where D(c) =
    sum_{d | gcd(q,c)} phi(d) mu(q/d)."""
    if math.gcd(m * n, q) != 1:
        raise ValidationError(
            f"m, n must be coprime to q (m={m}, n={n}, q={q})",
            "gcd(mn, q) = 1")
    return _phi_mu_divisor_sum(q, abs(m - n)) + _phi_mu_divisor_sum(q, m + n)


def sigma_q_case(q: int, m: int, n: int) -> int:
    """Case-table form of sigma_q for prime q and gcd(mn, q) = 1:

        -2     if q divides neither m-n nor m+n,
        q - 3  if q divides exactly one of them.

    Both divisibilities together would force q | 2m, impossible for odd
    prime q with gcd(m, q) = 1, so that branch is unreachable here.
    """
    if not _is_prime(q) or q < 3:
        raise ValidationError("q must be an odd prime", "q prime, q >= 3")
    if math.gcd(m * n, q) != 1:
        raise ValidationError(
            f"m, n must be coprime to q (m={m}, n={n}, q={q})",
            "gcd(mn, q) = 1")
    div_diff = (m - n) % q == 0
    div_sum = (m + n) % q == 0
    if div_diff and div_sum:  # pragma: no cover
        raise AccuracyError("q | m-n and q | m+n cannot both hold for "
                            "coprime inputs and odd q")
    if div_diff or div_sum:
        return q - 3
    return -2
