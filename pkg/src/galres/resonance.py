"""Resonance lower bounds over character families.

A finite multiset M of integers coprime to q turns into a resonator on
the units mod q: the weight at residue h is r(h) = sqrt(#{m in M :
m = h (q)}), so sum_h r(h)^2 = |M| exactly.  Against a character chi
the resonator registers R(chi) = sum_h r(h) chi(h), and orthogonality
gives the mass identity

    sum_{all chi mod q} |R(chi)|^2 = phi(q) |M|,

checked at run time; in particular the non-principal family never
carries more than phi(q) |M|.  For any family F of characters with
nonnegative weights w(chi), termwise averaging yields

    max_{chi in F} w(chi) >= sum_F |R(chi)|^2 w(chi)
                             / sum_F |R(chi)|^2,

which is the implied bound reported here, sound by construction.  Two
instantiations: w = |L(1/2, chi)|^2 over the even non-principal family
of a prime modulus, and w = |S(x, chi)|^2 over every non-principal
character of an arbitrary modulus, whose true extremum Delta(x, q) is
found by exhaustive scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .accsum import neumaier_sum
from .characters import (Character, DirichletGroup, build_character_table,
                         character_sum, sigma_q_case)
from .errors import AccuracyError, CapacityError, ValidationError
from .lfunc import _series_cut, _w_on_ladder, l_half_sq

_SCAN_LIMIT = 10 ** 4


class Resonator:
    """Square-root-of-multiplicity weights of a source set on the
    units mod q."""

    def __init__(self, q: int, source: Iterable[int]):
        if not isinstance(q, int) or isinstance(q, bool) or q < 3:
            raise ValidationError("q must be an integer >= 3", "q >= 3")
        values = [int(m) for m in source]
        if not values:
            raise ValidationError("the source set is empty", "|M| >= 1")
        counts = np.zeros(q)
        for m in values:
            if m < 1:
                raise ValidationError(f"source element {m} must be >= 1",
                                      "m >= 1")
            if math.gcd(m, q) != 1:
                raise ValidationError(
                    f"source element {m} shares a factor with q = {q}",
                    "gcd(m, q) = 1")
            counts[m % q] += 1.0
        self.q = q
        self.size = len(values)
        self.r = np.sqrt(counts)

    def resonate(self, chi: Character) -> complex:
        """R(chi) = sum_h r(h) chi(h)."""
        if chi.q != self.q:
            raise ValidationError(
                f"character modulus {chi.q} does not match q = {self.q}",
                "chi.q == q")
        return complex(self.r @ chi.vector())


@dataclass(frozen=True)
class ResonanceRow:
    """One character of the family: its resonator value and its squared
    family weight (|L(1/2, chi)|^2 or |S(x, chi)|^2)."""
    char_index: int
    parity: int
    r_value: complex
    weight_sq: float


@dataclass(frozen=True)
class ResonanceReport:
    kind: str
    q: int
    x: int | None
    set_size: int
    family_size: int
    numerator: float
    denominator: float
    implied_bound: float
    true_extremum: float
    witness_character_index: int
    rows: tuple[ResonanceRow, ...]


def _mass_check(r_sq_all: list[float], phi: int, size: int) -> None:
    total = neumaier_sum(r_sq_all)
    expect = float(phi * size)
    if abs(total - expect) > 1e-8 * expect:
        raise AccuracyError(
            f"resonator mass {total!r} drifted from phi(q) |M| = {expect!r}",
            achieved=abs(total - expect), requested=1e-8 * expect)


def resonate_L(q: int, source: Iterable[int], tol: float = 1e-8) -> ResonanceReport:
    """Resonance bound for the largest central value max |L(1/2, chi)|
    over the even non-principal characters of a prime modulus q >= 5.
    """
    table = build_character_table(q)
    if q < 5:
        raise ValidationError(
            "q = 3 has no even non-principal character to resonate",
            "q >= 5")
    res = Resonator(q, source)
    family = table.primitive_characters(parity=0)
    rows = []
    for chi in family:
        big_r = res.resonate(chi)
        rows.append(ResonanceRow(chi.index, chi.parity, big_r,
                                 l_half_sq(chi, tol=tol).value))
    _mass_check([abs(res.resonate(c)) ** 2 for c in table.characters()],
                q - 1, res.size)
    v1 = neumaier_sum(abs(r.r_value) ** 2 for r in rows)
    v2 = neumaier_sum(abs(r.r_value) ** 2 * r.weight_sq for r in rows)
    if v1 <= 0.0:
        raise ValidationError(
            "the resonator annihilates the whole family (V1 = 0)",
            "V1 > 0")
    best = max(rows, key=lambda r: r.weight_sq)
    return ResonanceReport(
        kind="L", q=q, x=None, set_size=res.size, family_size=len(rows),
        numerator=v2, denominator=v1,
        implied_bound=math.sqrt(v2 / v1),
        true_extremum=math.sqrt(best.weight_sq),
        witness_character_index=best.char_index, rows=tuple(rows))


def resonate_charsum(q: int, x: int, source: Iterable[int]) -> ResonanceReport:
    """Resonance bound for Delta(x, q) = max over non-principal chi of
    |sum_{n <= x} chi(n)|, any modulus q >= 3.

    The extremum scan is exhaustive over the full character group and
    is refused beyond phi(q) = 10^4.
    """
    if not isinstance(x, int) or isinstance(x, bool) or x < 1:
        raise ValidationError("x must be a positive integer", "x >= 1")
    group = DirichletGroup(q)
    if group.phi > _SCAN_LIMIT:
        raise CapacityError(
            f"phi(q) = {group.phi} characters exceed the exhaustive scan "
            f"limit {_SCAN_LIMIT}", "phi(q) <= 10^4")
    res = Resonator(q, source)
    rows = []
    r_sq_all = []
    for chi in group.characters():
        big_r = res.resonate(chi)
        r_sq_all.append(abs(big_r) ** 2)
        if chi.is_principal:
            continue
        s_val = character_sum(x, chi)
        rows.append(ResonanceRow(chi.index, chi.parity, big_r,
                                 abs(s_val) ** 2))
    _mass_check(r_sq_all, group.phi, res.size)
    w1 = neumaier_sum(abs(r.r_value) ** 2 for r in rows)
    w2 = neumaier_sum(abs(r.r_value) ** 2 * r.weight_sq for r in rows)
    if w1 > group.phi * res.size * (1.0 + 1e-12):
        raise AccuracyError("W1 exceeded phi(q) |M|",
                            achieved=w1, requested=group.phi * res.size)
    if w1 <= 0.0:
        raise ValidationError(
            "the resonator annihilates the whole family (W1 = 0)",
            "W1 > 0")
    best = max(rows, key=lambda r: r.weight_sq)
    return ResonanceReport(
        kind="charsum", q=q, x=x, set_size=res.size, family_size=len(rows),
        numerator=w2, denominator=w1,
        implied_bound=math.sqrt(w2 / w1),
        true_extremum=math.sqrt(best.weight_sq),
        witness_character_index=best.char_index, rows=tuple(rows))


def v2_matched_pair(q: int, source: Iterable[int],
                    tol: float = 1e-8) -> tuple[float, float]:
    """The resonance numerator V2 computed two ways at one shared
    truncation: spectrally (per character, collapsed coefficients) and
    arithmetically (the fourfold sum with the sigma_q weights).

    Spectral: V2 = sum_chi |R(chi)|^2 * 2 sum_{n <= n_cut} c_n W_n /
    sqrt(n).  Arithmetic: expanding |R|^2 |L|^2 and summing over the
    even non-principal characters first turns the same truncation into

        sum_{j k <= n_cut, gcd(jk, q) = 1} W(pi j k / q) / sqrt(j k)
            * sum_{h, l} r(h) r(l) sigma_q(h j, l k),

    with sigma_q = -2 + (q - 1) [a = b] + (q - 1) [a = -b] on coprime
    pairs.  The two evaluations agree to rounding; the pair is exposed
    for cross-validation.
    """
    table = build_character_table(q)
    res = Resonator(q, source)
    n_cut, _ = _series_cut(q, tol)
    w_vals = _w_on_ladder(q, n_cut, 0, tol)

    spectral_terms = []
    for chi in table.primitive_characters(parity=0):
        vec = chi.vector()
        c = np.zeros(n_cut + 1, dtype=complex)
        for d in range(1, n_cut + 1):
            mult = np.arange(d, n_cut + 1, d)
            c[mult] += vec[d % q] * np.conj(vec[(mult // d) % q])
        n = np.arange(1, n_cut + 1)
        lsq = 2.0 * float(np.sum(c.real[1:] * w_vals / np.sqrt(n)))
        spectral_terms.append(abs(res.resonate(chi)) ** 2 * lsq)
    spectral = neumaier_sum(spectral_terms)

    r = res.r
    units = [h for h in range(1, q) if r[h] > 0.0]
    arith_terms = []
    for j in range(1, n_cut + 1):
        if j % q == 0:
            continue
        for k in range(1, n_cut // j + 1):
            if k % q == 0:
                continue
            weight = w_vals[j * k - 1] / math.sqrt(j * k)
            inner = 0.0
            for h in units:
                for l in units:
                    inner += r[h] * r[l] * sigma_q_case(
                        q, (h * j) % q, (l * k) % q)
            arith_terms.append(weight * inner)
    arithmetic = neumaier_sum(arith_terms)
    return spectral, arithmetic
