import math

import numpy as np
import pytest

from galres.characters import build_character_table, character_sum
from galres.errors import CapacityError, ValidationError
from galres.lfunc import l_half_sq
from galres.resonance import (ResonanceReport, Resonator, resonate_L,
                              resonate_charsum, v2_matched_pair)


# ---------------- the resonator itself

def test_resonator_weights_are_sqrt_counts():
    res = Resonator(7, [1, 2, 2, 3])
    assert res.q == 7 and res.size == 4
    want = np.zeros(7)
    want[1], want[2], want[3] = 1.0, math.sqrt(2.0), 1.0
    assert np.allclose(res.r, want)


def test_resonator_mass_identity():
    # Parseval: sum over all chi mod q of |R(chi)|^2 = (q - 1) |M|
    for q, source in [(7, [1, 2, 3]), (11, [1, 2, 4, 8, 5]),
                      (13, [1, 1, 2, 3, 5, 8])]:
        res = Resonator(q, source)
        table = build_character_table(q)
        total = sum(abs(res.resonate(c)) ** 2 for c in table.characters())
        assert total == pytest.approx((q - 1) * len(source), rel=1e-12)


def test_resonator_resonate_matches_direct_sum():
    res = Resonator(11, [1, 3, 3, 9])
    chi = build_character_table(11).character(4)
    # r(1) chi(1) + r(3) chi(3) + r(9) chi(9), with r(3) = sqrt(2)
    direct = chi(1) + math.sqrt(2.0) * chi(3) + chi(9)
    assert res.resonate(chi) == pytest.approx(direct, abs=1e-12)


def test_resonator_validations():
    with pytest.raises(ValidationError):
        Resonator(7, [])
    with pytest.raises(ValidationError):
        Resonator(7, [1, 7])        # shares a factor with q
    with pytest.raises(ValidationError):
        Resonator(7, [0, 1])
    with pytest.raises(ValidationError):
        Resonator(2, [1])
    res = Resonator(7, [1, 2])
    with pytest.raises(ValidationError):
        res.resonate(build_character_table(11).character(1))


# ---------------- resonance against the central-value family

@pytest.mark.parametrize("q", [5, 7, 11, 13, 17, 19, 23])
def test_resonate_L_soundness(q):
    source = list(range(1, min(q - 1, 12) + 1))
    report = resonate_L(q, source)
    assert report.kind == "L"
    assert report.family_size == (q - 3) // 2
    assert report.set_size == len(source)
    assert report.implied_bound <= report.true_extremum + 1e-9
    assert report.denominator > 0.0


def test_resonate_L_witness_is_family_max():
    report = resonate_L(13, [1, 2, 3, 4])
    best = max(report.rows, key=lambda r: r.weight_sq)
    assert report.witness_character_index == best.char_index
    assert report.true_extremum == pytest.approx(math.sqrt(best.weight_sq))
    # row weights are the actual central values of the even family
    table = build_character_table(13)
    for row in report.rows:
        assert row.parity == 0
        want = l_half_sq(table.character(row.char_index)).value
        assert row.weight_sq == pytest.approx(want, rel=1e-12)


def test_resonate_L_quotient_is_weighted_mean():
    # V2 / V1 is an |R|^2-weighted average of the weights, so it lies
    # between the family minimum and maximum
    report = resonate_L(17, [1, 2, 4, 8, 16])
    weights = [r.weight_sq for r in report.rows]
    ratio = report.numerator / report.denominator
    assert min(weights) - 1e-12 <= ratio <= max(weights) + 1e-12


def test_resonate_L_validations():
    with pytest.raises(ValidationError):
        resonate_L(12, [1, 5])       # composite modulus
    with pytest.raises(ValidationError):
        resonate_L(3, [1, 2])        # no even non-principal character
    with pytest.raises(ValidationError):
        resonate_L(7, [2, 7])        # source not coprime to q


def test_v2_matched_pair_agreement():
    for q, source in [(7, [1, 2, 3, 4, 5]), (11, [1, 2, 5, 7]),
                      (13, [1, 1, 2, 3, 5, 8])]:
        spectral, arithmetic = v2_matched_pair(q, source)
        scale = max(abs(spectral), abs(arithmetic), 1e-30)
        assert abs(spectral - arithmetic) / scale < 1e-9


# ---------------- resonance against partial character sums

@pytest.mark.parametrize("q", [3, 8, 12, 50, 97])
def test_resonate_charsum_soundness(q):
    units = [m for m in range(1, min(q, 21)) if math.gcd(m, q) == 1]
    for x in (max(1, q // 4), max(1, q // 2)):
        report = resonate_charsum(q, x, units)
        assert report.kind == "charsum"
        assert report.q == q and report.x == x
        assert report.implied_bound <= report.true_extremum + 1e-9


def test_resonate_charsum_weights_are_partial_sums():
    q = 11
    report = resonate_charsum(q, 5, [1, 2, 3])
    table = build_character_table(q)
    for row in report.rows:
        want = abs(character_sum(5, table.character(row.char_index))) ** 2
        assert row.weight_sq == pytest.approx(want, abs=1e-12)
    # the family is every non-principal character, both parities
    assert report.family_size == q - 2
    assert {r.parity for r in report.rows} == {0, 1}


def test_resonate_charsum_full_period_kills_numerator():
    # x = q - 1 sums every non-principal character over a full period
    report = resonate_charsum(7, 6, [1])
    assert report.numerator == pytest.approx(0.0, abs=1e-18)
    assert report.true_extremum == pytest.approx(0.0, abs=1e-10)
    assert report.implied_bound <= report.true_extremum + 1e-9


def test_resonate_charsum_denominator_mass():
    # W1 = sum over non-principal chi of |R(chi)|^2 <= phi(q) |M|
    for q, source in [(12, [1, 5, 7]), (50, [1, 3, 7, 9])]:
        report = resonate_charsum(q, q // 2, source)
        phi = sum(1 for n in range(1, q) if math.gcd(n, q) == 1)
        assert report.denominator <= phi * len(source) + 1e-9


def test_resonate_charsum_validations():
    with pytest.raises(ValidationError):
        resonate_charsum(7, 0, [1])
    with pytest.raises(ValidationError):
        resonate_charsum(7, 3, [6, 7])
    with pytest.raises(CapacityError):
        resonate_charsum(10007, 5, [1])
