"""Gal-type GCD sums, weighted variants, quadratic norms, and local
valuation bounds.

The central object is, for a finite set M of positive integers and an
exponent 0 < alpha <= 1,

    S_alpha(M) = sum over (m, n) in M x M of ((m, n) / [m, n])**alpha,

with (m, n) the gcd and [m, n] the lcm.  Two evaluation routes are kept:
the direct pairwise route (compiled kernel) and, when 2*alpha is an
integer, the multiplicative decomposition

    S_alpha(M) = sum over d of J(d) * (sum_{m in M, d | m} m**-alpha)**2

where J is the multiplicative function with sum_{d | n} J(d) = n**(2 alpha)
(the Euler phi for alpha = 1/2).  The second form is evaluated in a
normalized shape, J(d)/d**(2 alpha) * (sum (m/d)**-alpha)**2, so that it
cannot overflow even on primorial-scale elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Literal

import numpy as np

from . import _kernels
from .accsum import NeumaierAccumulator, neumaier_sum
from .errors import (CapacityError, ConvergenceError,
                     UnsupportedAlgorithmError, ValidationError)
from .ntcore import FactoredInt, IntegerSet


@dataclass(frozen=True)
class GalExponent:
    """Exact rational exponent alpha with 0 < alpha <= 1."""

    alpha: Fraction

    def __post_init__(self):
        a = self.alpha
        if not isinstance(a, Fraction):
            raise ValidationError("alpha must be a Fraction", "alpha rational")
        if not (0 < a <= 1):
            raise ValidationError("alpha must satisfy 0 < alpha <= 1",
                                  "0 < alpha <= 1")

    @classmethod
    def parse(cls, text: str | Fraction | int | float) -> "GalExponent":
        if isinstance(text, GalExponent):
            return text
        if isinstance(text, Fraction):
            return cls(text)
        if isinstance(text, int):
            return cls(Fraction(text))
        if isinstance(text, float):
            return cls(Fraction(text).limit_denominator(10 ** 9))
        return cls(Fraction(text.strip()))

    def __float__(self) -> float:
        return float(self.alpha)

    @property
    def twice_integral(self) -> bool:
        return (2 * self.alpha).denominator == 1


HALF = GalExponent(Fraction(1, 2))
ONE = GalExponent(Fraction(1))


def as_exponent(alpha) -> GalExponent:
    return GalExponent.parse(alpha)


def _as_set(M) -> IntegerSet:
    if isinstance(M, IntegerSet):
        return M
    return IntegerSet.from_values(M)


def _require_nonempty(M: IntegerSet, op: str) -> None:
    if len(M) == 0:
        raise ValidationError(f"{op} requires a non-empty set", "M non-empty")


# ---------------------------------------------------------------------------
# plain and weighted pair sums

def gal_sum(M, alpha=HALF, algorithm: Literal["pairwise", "phi_identity"] = "pairwise") -> float:
    """S_alpha(M) over all ordered pairs (diagonal contributes |M|)."""
    M = _as_set(M)
    alpha = as_exponent(alpha)
    _require_nonempty(M, "gal_sum")
    if algorithm == "pairwise":
        return _kernels.pair_gal_sum(_kernels.pack(M.elements), float(alpha))
    if algorithm == "phi_identity":
        return _gal_sum_phi(M, alpha)
    raise UnsupportedAlgorithmError(
        f"unknown algorithm {algorithm!r}", "algorithm in {pairwise, phi_identity}")


def _gal_sum_phi(M: IntegerSet, alpha: GalExponent) -> float:
    if not alpha.twice_integral:
        raise UnsupportedAlgorithmError(
            "phi_identity requires 2*alpha to be an integer (the divisor "
            "decomposition of gcd**(2 alpha) is exact only then)",
            "2*alpha integral")
    two_alpha = int(2 * alpha.alpha)
    af = float(alpha)
    work = sum(m.tau() for m in M.elements)
    if work > 5_000_000:
        raise CapacityError(
            f"phi_identity enumerates divisors; {work} total divisors is "
            "past the 5e6 budget, use the pairwise route",
            "sum of tau(m) <= 5e6 for phi_identity")
    # accumulate sum_{m: d|m} (m/d)**-alpha per divisor d, then weight by
    # J(d)/d**(2 alpha) = prod_{p|d} (1 - p**-(2 alpha)); everything stays O(1)
    acc: dict[int, NeumaierAccumulator] = {}
    jbar: dict[int, float] = {}
    for m in M.elements:
        logm = m.log()
        for d in m.divisors():
            a = acc.get(d.value)
            if a is None:
                a = NeumaierAccumulator()
                acc[d.value] = a
                w = 1.0
                for p, _ in d.factors:
                    w *= 1.0 - p ** (-two_alpha)
                jbar[d.value] = w
            a.add(math.exp(-af * (logm - d.log())))
    total = NeumaierAccumulator()
    for dv in sorted(acc):
        w = acc[dv].value
        total.add(jbar[dv] * w * w)
    return total.value


@dataclass(frozen=True)
class WeightDescriptor:
    """Weight g(n) = C**omega(n) * base(n) applied to n = [m,n']/(m,n').

    kind g0:      base(n) = n**-0.5
    kind g1:      base(n) = mu(n)**2 / prod_{p | n} (sqrt(p) - 1)
    kind g_alpha: base(n) = mu(n)**2 / prod_{p | n} (p**(alpha/2) - 1)
    """

    kind: Literal["g0", "g1", "g_alpha"]
    scale_C: float = 1.0
    alpha_param: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("g0", "g1", "g_alpha"):
            raise ValidationError(f"unknown weight kind {self.kind!r}",
                                  "kind in {g0, g1, g_alpha}")
        if self.scale_C < 1.0:
            raise ValidationError("scale_C must be >= 1", "scale_C >= 1")
        if self.kind == "g_alpha":
            if self.alpha_param is None:
                raise ValidationError("g_alpha requires alpha_param",
                                      "alpha_param set for g_alpha")
            a = Fraction(self.alpha_param)
            if not (0 < a <= 1):
                raise ValidationError("alpha_param must be in (0, 1]",
                                      "0 < alpha_param <= 1")

    def base_value(self, n: FactoredInt) -> float:
        """base(n) alone, without the C**omega factor."""
        if self.kind == "g0":
            return math.exp(-0.5 * n.log())
        if not n.is_squarefree():
            return 0.0
        half = 0.5 if self.kind == "g1" else float(self.alpha_param) / 2.0
        w = 1.0
        for p, _ in n.factors:
            w /= math.exp(half * math.log(p)) - 1.0
        return w

    def value(self, n: FactoredInt) -> float:
        return self.scale_C ** n.omega() * self.base_value(n)


_KIND_CODE = {"g0": 0, "g1": 1, "g_alpha": 2}


def gal_sum_weighted(M, weight: WeightDescriptor) -> float:
    """S(M; g) = sum over ordered pairs of g([m,n]/(m,n))."""
    M = _as_set(M)
    _require_nonempty(M, "gal_sum_weighted")
    apar = float(weight.alpha_param) if weight.alpha_param is not None else 0.0
    return _kernels.pair_gal_weighted(
        _kernels.pack(M.elements), _KIND_CODE[weight.kind],
        float(weight.scale_C), apar)


def gal_sum_weighted_split(M, weight: WeightDescriptor) -> float:
    """S_plus(M; g) = sum over ordered pairs of g(m/(m,n)) * g(n/(m,n)).

    Dominates gal_sum_weighted termwise for submultiplicative g; kept in
    pure Python since it only backs comparison tests.
    """
    M = _as_set(M)
    _require_nonempty(M, "gal_sum_weighted_split")
    total = NeumaierAccumulator()
    for m, n, co_m, co_n in _pair_cofactors(M):
        total.add(weight.value(co_m) * weight.value(co_n))
    return total.value


def _pair_cofactors(M: IntegerSet) -> Iterator[tuple[FactoredInt, FactoredInt, FactoredInt, FactoredInt]]:
    """Yields (m, n, m/(m,n), n/(m,n)) over all ordered pairs."""
    els = M.elements
    for m in els:
        em = dict(m.factors)
        for n in els:
            en = dict(n.factors)
            com = []
            con = []
            for p in em:
                d = em[p] - en.get(p, 0)
                if d > 0:
                    com.append((p, d))
            for p in en:
                d = en[p] - em.get(p, 0)
                if d > 0:
                    con.append((p, d))
            yield m, n, FactoredInt.from_factors(com), FactoredInt.from_factors(con)


def gal_pair_terms(M, alpha=HALF) -> Iterator[tuple[int, int, float]]:
    """(m, n, ((m,n)/[m,n])**alpha) over ordered pairs; test support."""
    M = _as_set(M)
    alpha = as_exponent(alpha)
    af = float(alpha)
    for m, n, com, con in _pair_cofactors(M):
        yield m.value, n.value, math.exp(-af * (com.log() + con.log()))


def gal_subsum(M, alpha=HALF) -> float:
    """Divisor-restricted sum: pairs with n | m only, diagonal included."""
    M = _as_set(M)
    alpha = as_exponent(alpha)
    _require_nonempty(M, "gal_subsum")
    return _kernels.pair_gal_subsum(_kernels.pack(M.elements), float(alpha))


# ---------------------------------------------------------------------------
# Gal matrix and quadratic norms

@dataclass(frozen=True)
class GalMatrix:
    """Symmetric matrix with entries ((m_i,m_j)/[m_i,m_j])**alpha.

    Unit diagonal; positive semidefinite (the quadratic form equals
    sum_d J(d) * |sum_{d|m} c_m m**-alpha|**2 >= 0).
    """

    order: int
    alpha: GalExponent
    entries: np.ndarray
    values: tuple[int, ...]

    def __post_init__(self):
        if self.entries.shape != (self.order, self.order):
            raise ValidationError("entry shape mismatch", "entries order x order")


def build_gal_matrix(M, alpha=HALF) -> GalMatrix:
    M = _as_set(M)
    alpha = as_exponent(alpha)
    _require_nonempty(M, "build_gal_matrix")
    ent = _kernels.gal_matrix(_kernels.pack(M.elements), float(alpha))
    return GalMatrix(len(M), alpha, ent, tuple(M.values()))


def _power_iteration(mat: np.ndarray, rel_tol: float = 1e-12,
                     max_iter: int = 10 ** 5) -> float:
    """Largest eigenvalue of a symmetric PSD matrix, all-ones start."""
    n = mat.shape[0]
    v = np.ones(n) / math.sqrt(n)
    lam = float(v @ (mat @ v))
    for _ in range(max_iter):
        w = mat @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        v = w / nw
        w2 = mat @ v
        lam = float(v @ w2)
        resid = float(np.linalg.norm(w2 - lam * v))
        if resid <= rel_tol * max(abs(lam), 1e-300):
            return lam
    raise ConvergenceError("power iteration hit its iteration cap",
                           last_iterate=v, residual=resid)


def quadratic_norm(M, alpha=HALF, mode: Literal["full", "divisibility"] = "full") -> float:
    """Largest eigenvalue of the Gal matrix (full mode), or the operator
    norm of the divisibility-masked matrix sqrt(n/m) * [n | m]."""
    M = _as_set(M)
    alpha = as_exponent(alpha)
    _require_nonempty(M, "quadratic_norm")
    ps = _kernels.pack(M.elements)
    if mode == "full":
        return _power_iteration(_kernels.gal_matrix(ps, float(alpha)))
    if mode == "divisibility":
        B = _kernels.divis_matrix(ps)
        return math.sqrt(_power_iteration(B.T @ B))
    raise UnsupportedAlgorithmError(f"unknown mode {mode!r}",
                                    "mode in {full, divisibility}")


# ---------------------------------------------------------------------------
# single-prime valuation sums and their closed-form bounds

def _check_val_sequence(nu, name: str) -> list[int]:
    vs = list(nu)
    if not vs:
        raise ValidationError(f"{name} must be non-empty", "valuation set non-empty")
    if any(v < 0 for v in vs):
        raise ValidationError(f"{name} entries must be >= 0", "valuations >= 0")
    if sorted(set(vs)) != vs:
        raise ValidationError(f"{name} must be strictly increasing",
                              "valuations strictly increasing")
    return vs


def sigma_p(nu_m, nu_n, p: int) -> float:
    """Double sum of p**(-|a - b|/2) over valuation sets a in nu_m, b in nu_n."""
    if p < 2:
        raise ValidationError("p must be >= 2", "p >= 2")
    a = _check_val_sequence(nu_m, "nu_m")
    b = _check_val_sequence(nu_n, "nu_n")
    sp = math.sqrt(p)
    return neumaier_sum(sp ** (-abs(x - y)) for x in a for y in b)


def sigma_p_star(r: int, s: int, p: int) -> float:
    """Closed-form majorant of sigma_p over all pairs of valuation sets
    with r + 1 and s + 1 distinct values respectively; symmetric in
    (r, s).  For s <= r + 1 the maximum is attained at the initial
    intervals {0..r}, {0..s}."""
    if r < 0 or s < 0:
        raise ValidationError("r, s must be >= 0", "r >= 0 and s >= 0")
    if p < 2:
        raise ValidationError("p must be >= 2", "p >= 2")
    if s < r:
        r, s = s, r
    g = 1.0 / (math.sqrt(p) - 1.0)
    if s == r:
        return r + 1 + 2 * r * g
    if s == r + 1:
        return r + 1 + (2 * r + 1) * g
    return r + 1 + (2 * r + 2) * g


def sigma_p_plus(r: int, s: int, p: int) -> float:
    """Grid sum of the sparse pair weight h(p**a, p**b) over the full
    rectangle 0 <= a <= r, 0 <= b <= s; h is 1 on the diagonal,
    1/(sqrt(p)-1) at distance 1, the same at distance 2 when
    min(a, b) = 0, and zero elsewhere.  Dominates sigma_p_star."""
    if r < 0 or s < 0:
        raise ValidationError("r, s must be >= 0", "r >= 0 and s >= 0")
    if p < 2:
        raise ValidationError("p must be >= 2", "p >= 2")
    g = 1.0 / (math.sqrt(p) - 1.0)
    u = min(r, s) + 1
    v = sum(1 for a in range(r + 1) for b in range(s + 1) if abs(a - b) == 1)
    w = sum(1 for a in range(r + 1) for b in range(s + 1)
            if abs(a - b) == 2 and min(a, b) == 0)
    return u + (v + w) * g


def sigma_p_plus_weight(a: int, b: int, p: int) -> float:
    """The pair weight h(p**a, p**b) itself, exposed for tests."""
    if a < 0 or b < 0:
        raise ValidationError("exponents must be >= 0", "a >= 0 and b >= 0")
    d = abs(a - b)
    if d == 0:
        return 1.0
    if d == 1 or (d == 2 and min(a, b) == 0):
        return 1.0 / (math.sqrt(p) - 1.0)
    return 0.0
