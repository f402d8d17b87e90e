"""Extremal sets for GCD sums.

Builds the block product sets whose Gal sum per element grows like a
power of L(N) = exp sqrt(log N log3 N / log2 N), applies the completion
and coprime-adjustment lemmas, evaluates divisor-set sums in closed
form, and optimizes the exponent profile whose series constants produce

    B = 4 * sqrt( sum_{k >= 1} 1 / (k^2 (k+1)^2 log(1 + 1/k)) ).

Everything here is exact arithmetic plus plain float sums; the only
iterative pieces are the fixed point for the profile scale y and the
budget allocation that enforces cardinality <= N at finite N.
"""

from __future__ import annotations

import itertools
import math
import warnings
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .accsum import neumaier_sum
from .errors import (AccuracyError, CapacityError, ValidationError)
from .galsum import HALF, GalExponent, as_exponent, gal_sum
from .ntcore import FactoredInt, IntegerSet, factorize, sieve_primes

LAMBDA_STAR = 1.0 / (4.0 * math.log(2.0))


# ---------------------------------------------------------------------------
# the constant B and its defining series

def _b_term(k: int) -> float:
    return 1.0 / (k * k * (k + 1) * (k + 1) * math.log1p(1.0 / k))


@dataclass(frozen=True)
class BEstimate:
    """Partial evaluation of B with a rigorous enclosure.

    value is 4 * sqrt(partial sum); [lower, upper] brackets the full
    series.  Upper: log(1+1/k) >= 2/(2k+1) telescopes the tail to at
    most 1/(2(K+1)^2).  Lower: log(1+1/k) <= 1/k gives term_k >=
    1/(k(k+1)^2), whose tail integral is log(1+1/(K+1)) - 1/(K+2).
    """

    terms: int
    partial_sum: float
    value: float
    lower: float
    upper: float

    def __float__(self) -> float:
        return self.value


def constant_B(terms: int) -> BEstimate:
    if not isinstance(terms, int) or isinstance(terms, bool) or terms < 1:
        raise ValidationError("terms must be an integer >= 1", "terms >= 1")
    s = neumaier_sum(_b_term(k) for k in range(1, terms + 1))
    tail_hi = 0.5 / (terms + 1) ** 2
    tail_lo = math.log1p(1.0 / (terms + 1)) - 1.0 / (terms + 2)
    # one ulp outward: the partial sum itself is only good to rounding
    return BEstimate(
        terms=terms,
        partial_sum=s,
        value=4.0 * math.sqrt(s),
        lower=math.nextafter(4.0 * math.sqrt(s + tail_lo), 0.0),
        upper=math.nextafter(4.0 * math.sqrt(s + tail_hi), math.inf),
    )


def sqrt_prime_sum(y: float) -> dict:
    """sum of p**-1/2 over primes p <= y, with the ratio against the
    smooth main term 2 sqrt(y) / log y."""
    if y < 2:
        raise ValidationError("y must be >= 2", "y >= 2")
    ps = sieve_primes(int(y))
    s = neumaier_sum(1.0 / math.sqrt(p) for p in ps)
    main = 2.0 * math.sqrt(y) / math.log(y)
    return {"value": s, "main_term": main, "ratio": s / main,
            "prime_count": len(ps)}


# ---------------------------------------------------------------------------
# divisor-set sums in closed form

def _as_factored(D) -> FactoredInt:
    if isinstance(D, FactoredInt):
        return D
    return factorize(int(D))


def divisor_set_sum(D, alpha=HALF) -> float:
    """S_alpha over the full divisor set of D, in closed form:

        tau(D) * prod over p**mu || D of
            (1 + (2 mu / ((1+mu) p**alpha)) * sum_{0<=k<mu} (1-k/mu) p**-k alpha).
    """
    D = _as_factored(D)
    a = float(as_exponent(alpha))
    out = float(D.tau())
    for p, mu in D.factors:
        pa = math.exp(-a * math.log(p))
        inner = sum((1.0 - k / mu) * pa ** k for k in range(mu))
        out *= 1.0 + (2.0 * mu / (1.0 + mu)) * pa * inner
    return out


def divisor_set_upper_bound(D, alpha=HALF) -> float:
    """tau(D) * exp of sum over p**mu || D of 2 mu / ((1+mu)(p**alpha - 1))."""
    D = _as_factored(D)
    a = float(as_exponent(alpha))
    s = sum(2.0 * mu / ((1.0 + mu) * (math.exp(a * math.log(p)) - 1.0))
            for p, mu in D.factors)
    return D.tau() * math.exp(s)


def divisor_set_squarefree_bounds(D, alpha=HALF) -> tuple[float, float]:
    """Two-sided enclosure of S(T_D)/tau(D) for squarefree D:

        exp(sum p**-a) * prod(1 + p**-2a / 2)**-1  <=  S/tau  <=  exp(sum p**-a).
    """
    D = _as_factored(D)
    if not D.is_squarefree():
        raise ValidationError("D must be squarefree", "D squarefree")
    a = float(as_exponent(alpha))
    s = sum(math.exp(-a * math.log(p)) for p, _ in D.factors)
    corr = 1.0
    for p, _ in D.factors:
        corr *= 1.0 + 0.5 * math.exp(-2.0 * a * math.log(p))
    return math.exp(s) / corr, math.exp(s)


def primorial(k: int) -> FactoredInt:
    """Product of the first k primes."""
    if k < 0:
        raise ValidationError("k must be >= 0", "k >= 0")
    if k == 0:
        return FactoredInt.from_value(1)
    limit = max(16, int(k * (math.log(k + 1) + math.log(math.log(k + 2)) + 2)))
    ps = sieve_primes(limit)
    while len(ps) < k:
        limit *= 2
        ps = sieve_primes(limit)
    return FactoredInt.from_factors([(p, 1) for p in ps[:k]])


# ---------------------------------------------------------------------------
# block construction

@dataclass(frozen=True)
class ConstructionParams:
    """Parameters of the block product construction.

    The admissible region is u in (1, e], a > 1, gamma in (0, 1) with
    a * gamma * log u < 1; alpha_res only enters the reported
    diagnostics (j_k, T_k, beta), not the set itself.

    squarefree switches each block from disjoint (ell, q) divisor pairs
    (elements ell * q^2, exponents in {0, 1, 2}) to single squarefree
    divisors under the same budget ladder, with omega <= budget/2 per
    element.  This variant is experimental: the budget allocator and the
    diagnostics are reused as-is.
    """

    N: int
    u: float
    a: float
    gamma: float
    alpha_res: float = 1.0
    materialize_limit: int = 20000
    verify_product: bool = False
    squarefree: bool = False

    def __post_init__(self):
        if not isinstance(self.N, int) or isinstance(self.N, bool):
            raise ValidationError("N must be an integer", "N integral")
        if self.N < 1000:
            raise ValidationError("N must be at least 10^3", "N >= 1000")
        if not (1.0 < self.u <= math.e):
            raise ValidationError("u must lie in (1, e]", "1 < u <= e")
        if not self.a > 1.0:
            raise ValidationError("a must exceed 1", "a > 1")
        if not (0.0 < self.gamma < 1.0):
            raise ValidationError("gamma must lie in (0, 1)", "0 < gamma < 1")
        if not self.alpha_res > 0.0:
            raise ValidationError("alpha_res must be positive", "alpha_res > 0")
        if self.a * self.gamma * math.log(self.u) >= 1.0:
            raise ValidationError(
                f"a*gamma*log u = {self.a * self.gamma * math.log(self.u):.6f} "
                "must be < 1", "a*gamma*log(u) < 1")
        l3 = math.log(math.log(math.log(self.N)))
        if l3 < 0.1:
            raise ValidationError("log3 N must be >= 0.1", "log3 N >= 0.1")


@dataclass(frozen=True)
class BlockReport:
    k: int
    interval: tuple[float, float]
    prime_count: int
    budget: int
    budget_initial: int
    clamped: bool
    cardinality: int
    log_gal_sum: float
    j_k: int
    T_k: float
    V_k: float


@dataclass(frozen=True)
class ConstructionReport:
    params: ConstructionParams
    K: int
    blocks: tuple[BlockReport, ...]
    cardinality: int
    log_cardinality: float
    gal_sum_value: float
    log_gal_sum: float
    normalized_exponent: float
    h: float
    beta: float
    alpha_optimal: float
    beta_optimal: float
    budget_reductions: int
    final_set: IntegerSet | None
    verified_blocks: tuple[int, ...]
    verified_full: bool


def _block_cardinality(P: int, J2: int) -> int:
    """Number of pairs (ell, q) of disjoint squarefree divisors of the
    block primorial with omega <= J2 each."""
    if J2 < 0:
        return 0
    total = 0
    for j in range(min(J2, P) + 1):
        cj = math.comb(P, j)
        total += cj * sum(math.comb(P - j, h) for h in range(min(J2, P - j) + 1))
    return total


def _block_gal_sum(primes: Sequence[int], J2: int) -> float:
    """Gal sum of a single block via dynamic programming over primes.

    Element state at p is 0 (p | q, exponent 0), 1 (exponent 1) or
    2 (p | ell, exponent 2); a pair of elements contributes
    p ** (-|state difference| / 2) at each prime.  The array is indexed
    by (ell-count of m, q-count of m, ell-count of n, q-count of n)
    and entries past J2 fall off the array, which is exactly the
    budget constraint.
    """
    shape = (J2 + 1,) * 4
    cur = np.zeros(shape)
    cur[0, 0, 0, 0] = 1.0
    for p in primes:
        w = 1.0 / math.sqrt(p)
        w2 = 1.0 / p
        new = cur.copy()                                  # (1,1)
        new[1:, :, 1:, :] += cur[:-1, :, :-1, :]          # (2,2)
        new[:, 1:, :, 1:] += cur[:, :-1, :, :-1]          # (0,0)
        new[1:, :, :, :] += w * cur[:-1, :, :, :]         # (2,1)
        new[:, 1:, :, :] += w * cur[:, :-1, :, :]         # (0,1)
        new[:, :, 1:, :] += w * cur[:, :, :-1, :]         # (1,2)
        new[:, :, :, 1:] += w * cur[:, :, :, :-1]         # (1,0)
        new[1:, :, :, 1:] += w2 * cur[:-1, :, :, :-1]     # (2,0)
        new[:, 1:, 1:, :] += w2 * cur[:, :-1, :-1, :]     # (0,2)
        cur = new
    return float(cur.sum())


def _block_elements(primes: Sequence[int], J2: int) -> list[tuple[tuple[int, int], ...]]:
    """All factor tuples of one block: choose disjoint ell-set and q-set
    of at most J2 primes each; exponent 2 on ell, 0 on q, 1 elsewhere."""
    out = []
    P = len(primes)
    idx = range(P)
    for ell in itertools.chain.from_iterable(
            itertools.combinations(idx, j) for j in range(min(J2, P) + 1)):
        rest = [i for i in idx if i not in ell]
        for q in itertools.chain.from_iterable(
                itertools.combinations(rest, h) for h in range(min(J2, len(rest)) + 1)):
            qs = set(q)
            els = set(ell)
            fac = tuple((primes[i], 2 if i in els else 1)
                        for i in idx if i not in qs)
            out.append(fac)
    return out


def _block_cardinality_sf(P: int, J: int) -> int:
    """Number of squarefree divisors of the block primorial with
    omega <= J."""
    if J < 0:
        return 0
    return sum(math.comb(P, j) for j in range(min(J, P) + 1))


def _block_gal_sum_sf(primes: Sequence[int], J: int) -> float:
    """Gal sum of a squarefree block: a pair of divisors contributes
    p^(-1/2) at each prime dividing exactly one of the two."""
    cur = np.zeros((J + 1, J + 1))
    cur[0, 0] = 1.0
    for p in primes:
        w = 1.0 / math.sqrt(p)
        new = cur.copy()
        new[1:, 1:] += cur[:-1, :-1]
        new[1:, :] += w * cur[:-1, :]
        new[:, 1:] += w * cur[:, :-1]
        cur = new
    return float(cur.sum())


def _block_elements_sf(primes: Sequence[int], J: int) -> list[tuple[tuple[int, int], ...]]:
    """All factor tuples of one squarefree block: subsets of at most J
    primes, exponent 1 each."""
    P = len(primes)
    return [tuple((primes[i], 1) for i in sub)
            for sub in itertools.chain.from_iterable(
                itertools.combinations(range(P), j)
                for j in range(min(J, P) + 1))]


def _allocate_budgets(prime_counts: Sequence[int], ceilings: Sequence[int],
                      prime_lists: Sequence[Sequence[int]],
                      N: int, card_fn=_block_cardinality,
                      gal_fn=_block_gal_sum) -> tuple[list[int], int]:
    """Pick per-block budgets maximizing S(M)/|M| under |M| <= N.

    The formula budgets (already clamped to two thirds of each block's
    prime count) act as ceilings.  Among all budget vectors whose block
    cardinality product stays at most N, only the maximal ones matter:
    raising any single block past a maximal vector overflows N, and the
    per-block ratio S_k / |M_k| grows with the budget.  The maximal
    vectors form a short Pareto frontier, so we enumerate it exactly and
    keep the vector with the largest log S - log |M|.  Ties keep the
    first vector in lexicographically decreasing budget order, which
    makes the choice deterministic.

    Returns the chosen even budgets and the total number of half-budget
    steps given up relative to the ceilings.
    """
    K = len(ceilings)
    tops = []
    ladders = []
    for P, J in zip(prime_counts, ceilings):
        top = min(J // 2, P)
        cards = [card_fn(P, t) for t in range(top + 1)]
        while len(cards) > 1 and cards[-1] > N:
            cards.pop()
        tops.append(len(cards) - 1)
        ladders.append(cards)

    ratio_memo: dict[tuple[int, int], float] = {}

    def log_ratio(i: int, t: int) -> float:
        key = (i, t)
        if key not in ratio_memo:
            if t > 0 and prime_lists[i]:
                S = gal_fn(prime_lists[i], t)
            else:
                S = 1.0
            ratio_memo[key] = math.log(S) - math.log(ladders[i][t])
        return ratio_memo[key]

    best_val = -math.inf
    best_vec: list[int] | None = None

    def walk(i: int, prod: int, prefix: list[int]) -> None:
        nonlocal best_val, best_vec
        if i == K:
            for j in range(K):
                t = prefix[j]
                if t < tops[j] and prod // ladders[j][t] * ladders[j][t + 1] <= N:
                    return
            val = sum(log_ratio(j, prefix[j]) for j in range(K))
            if val > best_val:
                best_val = val
                best_vec = list(prefix)
            return
        for t in range(tops[i], -1, -1):
            c = ladders[i][t]
            if prod * c <= N:
                prefix.append(t)
                walk(i + 1, prod * c, prefix)
                prefix.pop()

    walk(0, 1, [])
    assert best_vec is not None
    reductions = sum(c // 2 - t for c, t in zip(ceilings, best_vec))
    return [2 * t for t in best_vec], reductions


def construct_extremal_set(params: ConstructionParams) -> ConstructionReport:
    """Build the block product set and report exact cardinality, the
    exact per-block Gal sums, and the growth diagnostics.

    The budget formula J_k = 2 floor(a log N / (2 k^2 log3 N)) is tuned
    for the asymptotic regime and overshoots the cardinality target
    badly at desk scales, so the formula values are treated as ceilings
    and the actual budgets come from _allocate_budgets, which maximizes
    S(M)/|M| over the feasible budget vectors with |M| <= N.
    """
    N = params.N
    logN = math.log(N)
    log2N = math.log(logN)
    log3N = math.log(log2N)
    K = int(math.floor(log2N ** params.gamma))
    L = logN * log2N
    sqrt_u = math.sqrt(params.u)

    if params.squarefree:
        card_fn, gal_fn, elems_fn = (_block_cardinality_sf,
                                     _block_gal_sum_sf, _block_elements_sf)
    else:
        card_fn, gal_fn, elems_fn = (_block_cardinality,
                                     _block_gal_sum, _block_elements)

    lo_hi = []
    prime_lists = []
    budgets0 = []
    clamped_flags = []
    budgets = []
    hi_max = params.u ** (K + 1) * L
    all_primes = sieve_primes(max(4, int(hi_max) + 1))
    for k in range(1, K + 1):
        lo = params.u ** k * L
        hi = params.u ** (k + 1) * L
        lo_hi.append((lo, hi))
        ps = [p for p in all_primes if lo < p <= hi]
        prime_lists.append(ps)
        P = len(ps)
        J0 = 2 * int(math.floor(params.a * logN / (2.0 * k * k * log3N)))
        cap = 2 * ((2 * P) // 3)
        J = min(J0, cap)
        if J < J0:
            warnings.warn(
                f"block k={k}: budget {J0} clamped to {J} "
                f"(half-budget may not exceed two thirds of {P} primes)",
                RuntimeWarning, stacklevel=2)
        budgets0.append(J0)
        clamped_flags.append(J < J0)
        budgets.append(J)

    budgets, reductions = _allocate_budgets(
        [len(ps) for ps in prime_lists], budgets, prime_lists, N,
        card_fn=card_fn, gal_fn=gal_fn)
    cards = [card_fn(len(prime_lists[i]), budgets[i] // 2)
             for i in range(K)]

    sqrt_ratio = math.sqrt(logN / log2N)
    blocks = []
    log_S = 0.0
    for i in range(K):
        k = i + 1
        ps = prime_lists[i]
        J2 = budgets[i] // 2
        if not ps or J2 <= 0:
            S_k = 1.0
            card_k = 1
        else:
            S_k = gal_fn(ps, J2)
            card_k = cards[i]
        j_k = int(math.floor(params.alpha_res / k
                             * math.sqrt(logN / (log2N * log3N))))
        if j_k > 0:
            T_k = 2.0 * math.e * (sqrt_u - 1.0) * params.u ** (k / 2.0) \
                / j_k * sqrt_ratio
        else:
            T_k = math.inf
        P = len(ps)
        R = J2 - j_k
        V_k = float(card_fn(P, R)) if R >= 0 else 0.0
        blocks.append(BlockReport(
            k=k, interval=lo_hi[i], prime_count=P, budget=budgets[i],
            budget_initial=budgets0[i], clamped=clamped_flags[i],
            cardinality=card_k, log_gal_sum=math.log(S_k),
            j_k=j_k, T_k=T_k, V_k=V_k))
        log_S += math.log(S_k)

    cardinality = math.prod(b.cardinality for b in blocks)
    log_card = math.log(cardinality)
    norm = (log_S - log_card) / math.sqrt(logN * log3N / log2N)
    h = 2.0 * math.e ** 2 * params.a * (sqrt_u - 1.0) / (sqrt_u + 1.0)
    beta = 2.0 * params.gamma * params.alpha_res \
        * math.log(h / params.alpha_res ** 2)
    alpha_opt = math.sqrt(h) / math.e
    beta_opt = 4.0 * params.gamma * math.sqrt(h) / math.e

    final_set = None
    verified_blocks: list[int] = []
    verified_full = False
    if cardinality <= params.materialize_limit:
        factor_lists = []
        for i in range(K):
            ps = prime_lists[i]
            J2 = budgets[i] // 2
            if not ps or J2 <= 0:
                factor_lists.append([()])
            else:
                factor_lists.append(elems_fn(ps, J2))
        elements = []
        for combo in itertools.product(*factor_lists):
            fac = sorted(itertools.chain.from_iterable(combo))
            elements.append(FactoredInt.from_factors(fac))
        final_set = IntegerSet(elements)
        if len(final_set) != cardinality:
            raise AccuracyError(
                "materialized cardinality disagrees with the counting formula")

    if params.verify_product:
        for i in range(K):
            ps = prime_lists[i]
            J2 = budgets[i] // 2
            if not ps or J2 <= 0:
                continue
            if blocks[i].cardinality <= 3000:
                els = [FactoredInt.from_factors(f)
                       for f in elems_fn(ps, J2)]
                direct = gal_sum(IntegerSet(els))
                dp = math.exp(blocks[i].log_gal_sum)
                if abs(direct - dp) > 1e-9 * abs(direct):
                    raise AccuracyError(
                        f"block k={i + 1}: direct sum {direct!r} vs "
                        f"dynamic program {dp!r}")
                verified_blocks.append(i + 1)
        if final_set is not None and cardinality <= 3000:
            direct = gal_sum(final_set)
            if abs(direct - math.exp(log_S)) > 1e-9 * abs(direct):
                raise AccuracyError(
                    f"product identity: direct {direct!r} vs "
                    f"block product {math.exp(log_S)!r}")
            verified_full = True

    return ConstructionReport(
        params=params, K=K, blocks=tuple(blocks), cardinality=cardinality,
        log_cardinality=log_card, gal_sum_value=math.exp(log_S),
        log_gal_sum=log_S, normalized_exponent=norm, h=h, beta=beta,
        alpha_optimal=alpha_opt, beta_optimal=beta_opt,
        budget_reductions=reductions, final_set=final_set,
        verified_blocks=tuple(verified_blocks), verified_full=verified_full)


# ---------------------------------------------------------------------------
# parameter sweep over the admissible grid

SWEEP_U = (1.2, 1.5, 2.0, math.e)
SWEEP_GAMMA = (0.5, 0.7, 0.9)
SWEEP_FRAC = (0.7, 0.85, 0.97, 0.99)


def default_grid() -> list[tuple[float, float, float, float]]:
    """(u, gamma, a, alpha_res) tuples with a > 1 and a*gamma*log u < 1.

    a is parametrized through the product f = a*gamma*log u, which the
    growth exponent pushes toward 1 while u pushes toward 1."""
    grid = []
    for u in SWEEP_U:
        for g in SWEEP_GAMMA:
            glu = g * math.log(u)
            for f in SWEEP_FRAC:
                if f <= glu:
                    continue
                grid.append((u, g, f / glu, 1.0))
    return grid


@dataclass(frozen=True)
class SweepRow:
    N: int
    u: float
    a: float
    gamma: float
    alpha_res: float
    cardinality: int
    gal_sum_value: float
    normalized_exponent: float


def _sweep_one(task: tuple) -> SweepRow:
    N, u, gamma, a, alpha_res, *rest = task
    squarefree = bool(rest[0]) if rest else False
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = construct_extremal_set(ConstructionParams(
            N=N, u=u, a=a, gamma=gamma, alpha_res=alpha_res,
            materialize_limit=0, squarefree=squarefree))
    return SweepRow(N=N, u=u, a=a, gamma=gamma, alpha_res=alpha_res,
                    cardinality=rep.cardinality,
                    gal_sum_value=rep.gal_sum_value,
                    normalized_exponent=rep.normalized_exponent)


def sweep_construction(N_values: Iterable[int], grid=None,
                       map_fn=map, squarefree: bool = False) -> list[SweepRow]:
    """Run the construction over a parameter grid, in deterministic
    (N, grid) order.  map_fn may be a multiprocessing map."""
    if grid is None:
        grid = default_grid()
    tasks = [(N, u, g, a, ar, squarefree)
             for N in N_values for (u, g, a, ar) in grid]
    return list(map_fn(_sweep_one, tasks))


def best_rows_by_N(rows: Sequence[SweepRow],
                   within_budget: bool = True) -> list[SweepRow]:
    """Best demonstrated exponent per cardinality budget N.

    A row built for target N' exhibits a concrete set of at most N'
    elements, so it witnesses every budget N >= N'.  The best witness
    within budget is therefore nondecreasing in N, exactly like the
    supremum it lower-bounds; the raw per-target maximum (within_budget
    False) oscillates at desk scale because the prime intervals inflate
    with N while the budget ladder moves in coarse steps.  Ties keep
    the earliest row, which makes the output deterministic.
    """
    best: dict[int, SweepRow] = {}
    for r in rows:
        cur = best.get(r.N)
        if cur is None or r.normalized_exponent > cur.normalized_exponent:
            best[r.N] = r
    per_target = [best[N] for N in sorted(best)]
    if not within_budget:
        return per_target
    out: list[SweepRow] = []
    champion: SweepRow | None = None
    for row in per_target:
        if champion is None or row.normalized_exponent > champion.normalized_exponent:
            champion = row
        out.append(champion)
    return out


def fitted_exponent(rows: Sequence[SweepRow]) -> float:
    """Least-squares slope of log(S/|M|) against the L(N) exponent scale
    sqrt(log N log3 N / log2 N), fitted through the origin over the best
    rows.  This is the finite-scale stand-in for the limiting constant
    2*sqrt(2) and is reported, never asserted."""
    best = best_rows_by_N(rows)
    num = 0.0
    den = 0.0
    for r in best:
        logN = math.log(r.N)
        log2N = math.log(logN)
        log3N = math.log(log2N)
        x = math.sqrt(logN * log3N / log2N)
        y = r.normalized_exponent * x
        num += x * y
        den += x * x
    if den == 0.0:
        raise ValidationError("fitted_exponent needs at least one row")
    return num / den


# ---------------------------------------------------------------------------
# completion and adjustment lemmas

def _fresh_primes(M: IntegerSet, count: int, exclude: frozenset[int] = frozenset()) -> list[int]:
    """Smallest primes dividing no element of M and not in exclude."""
    used = set(M.support_primes()) | set(exclude)
    out: list[int] = []
    limit = 64
    while len(out) < count:
        out = [p for p in sieve_primes(limit) if p not in used]
        limit *= 2
    return out[:count]


def complete_set(M: IntegerSet, N: int) -> IntegerSet:
    """Grow M to exactly N elements without letting the Gal-sum ratio
    drop below half its value: first multiply by the divisor set of a
    product D of fresh primes (doubling the set per prime), then pad
    with fresh-prime multiples of the smallest element."""
    if not isinstance(M, IntegerSet):
        M = IntegerSet.from_values(M)
    if len(M) > N:
        raise ValidationError("M already exceeds the target size", "|M| <= N")
    if len(M) == N:
        return M
    k = 0
    while (len(M) << (k + 1)) <= N:
        k += 1
    doubling = _fresh_primes(M, k)
    elements = list(M.elements)
    for p in doubling:
        elements = elements + [m.mul(FactoredInt.from_factors([(p, 1)]))
                               for m in elements]
    grown = IntegerSet(elements)
    pad = N - len(grown)
    if pad > 0:
        m0 = grown.elements[0]
        extra = _fresh_primes(grown, pad)
        elements = list(grown.elements) + [
            m0.mul(FactoredInt.from_factors([(p, 1)])) for p in extra]
        grown = IntegerSet(elements)
    return grown


def coprime_adjust(M: IntegerSet, q) -> IntegerSet:
    """Swap every prime shared with q for a smaller fresh prime, making
    the set coprime to q without decreasing the Gal sum.

    Each shared prime ell must map to a fresh prime p <= ell (ascending
    assignment of the smallest candidates); otherwise the pairwise GCD
    ratios could drop and a capacity error is raised.
    """
    if not isinstance(M, IntegerSet):
        M = IntegerSet.from_values(M)
    q = _as_factored(q)
    q_primes = {p for p, _ in q.factors}
    shared = sorted(q_primes & set(M.support_primes()))
    if not shared:
        return M
    fresh = _fresh_primes(M, len(shared), exclude=frozenset(q_primes))
    for p_new, ell in zip(fresh, shared):
        if p_new > ell:
            raise CapacityError(
                f"no fresh prime <= {ell} available to replace it "
                f"(smallest candidate is {p_new})",
                "replacement prime <= replaced prime")
    swap = dict(zip(shared, fresh))
    new_elements = []
    for m in M.elements:
        fac = sorted((swap.get(p, p), e) for p, e in m.factors)
        new_elements.append(FactoredInt.from_factors(fac))
    return IntegerSet(new_elements)


def dyadic_split(M: IntegerSet) -> tuple[tuple[IntegerSet, ...], IntegerSet]:
    """Partition by dyadic intervals ]2^j, 2^(j+1)] and return the block
    with the largest Gal sum (ties to the lowest interval)."""
    if not isinstance(M, IntegerSet):
        M = IntegerSet.from_values(M)
    if len(M) == 0:
        raise ValidationError("M must be non-empty", "M non-empty")
    groups: dict[int, list[FactoredInt]] = {}
    for m in M.elements:
        j = (m.value - 1).bit_length() - 1
        groups.setdefault(j, []).append(m)
    blocks = tuple(IntegerSet(groups[j]) for j in sorted(groups))
    best = max(blocks, key=lambda b: (gal_sum(b), ))
    # max() keeps the first of equal keys, which is the lowest interval
    return blocks, best


# ---------------------------------------------------------------------------
# strictness predicates and the prime-index bound

def set_predicates(M: IntegerSet) -> dict[str, bool]:
    """Structural predicates with N taken as |M|.

    gal_bound_holds checks, with y the floor(log N / log 2)-th prime,
    that every element has at most log N / log 2 prime factors above y
    and that the ascending prime indices j_1 < ... < j_nu of those
    factors satisfy sum log(j_h / (2h)) <= log N.
    """
    if not isinstance(M, IntegerSet):
        M = IntegerSet.from_values(M)
    if len(M) == 0:
        raise ValidationError("M must be non-empty", "M non-empty")
    N = len(M)
    logN = math.log(N)
    idx_cap = int(logN / math.log(2))
    max_p = max((p for m in M.elements for p, _ in m.factors), default=2)
    ps = sieve_primes(max(4, max_p))
    while len(ps) < max(idx_cap, 1):
        ps = sieve_primes(2 * ps[-1])
    y = ps[idx_cap - 1] if idx_cap >= 1 else 1
    ok = True
    for m in M.elements:
        above = [p for p, _ in m.factors if p > y]
        if len(above) > logN / math.log(2):
            ok = False
            break
        total = 0.0
        for h, p in enumerate(sorted(above), start=1):
            j = bisect_left(ps, p) + 1
            total += math.log(j / (2.0 * h))
        if total > logN + 1e-12:
            ok = False
            break
    flags = {
        "squarefree_all": M.squarefree_all,
        "divisor_closed": M.divisor_closed,
        "complete": M.complete,
    }
    flags["strict"] = flags["divisor_closed"] and flags["complete"]
    flags["gal_bound_holds"] = ok
    return flags


# ---------------------------------------------------------------------------
# exhaustive tiny-N suprema

def gamma_bruteforce(N: int, alpha=HALF, universe_max: int = 40) -> tuple[float, IntegerSet]:
    """Exact sup of S_alpha(M)/|M| over all N-subsets of {1..universe_max}."""
    if not (1 <= N <= 6):
        raise CapacityError("N must lie in 1..6 for the exhaustive search",
                            "N <= 6")
    if not (N <= universe_max <= 40):
        raise CapacityError("universe_max must lie in N..40",
                            "universe_max <= 40")
    a = float(as_exponent(alpha))
    U = universe_max
    ratio = np.empty((U, U))
    for i in range(U):
        for j in range(U):
            g = math.gcd(i + 1, j + 1)
            l = (i + 1) * (j + 1) // g
            ratio[i, j] = (g / l) ** a
    best_sum, idx = _kernels.max_subset_sum(ratio, N)
    witness = IntegerSet.from_values([i + 1 for i in idx])
    return best_sum / N, witness


# ---------------------------------------------------------------------------
# exponent profile and the scale y

@dataclass(frozen=True)
class ExponentProfile:
    N: int
    y: float
    y_unconstrained: float
    lam: float
    K: int
    r_sequence: tuple[float, ...]
    mu_map: dict[int, int] = field(repr=False)
    C1: float
    C2: float
    c2_fixed_point: float
    predicted_log_gamma: float
    D: FactoredInt = field(repr=False)
    tau_D: int


def profile_r(k: int, lam: float = LAMBDA_STAR) -> float:
    """r_k = (2 lam k (k+1) log(1+1/k))^2; r_1 = 1 at the default lam."""
    return (2.0 * lam * k * (k + 1) * math.log1p(1.0 / k)) ** 2


def _c2_truncated(K: int, lam: float) -> float:
    """sum_{k<=K} log(k+1) (1/r_k - 1/r_{k+1}), the weight sum of the
    profile truncated at exponent K."""
    return sum(math.log(k + 1) * (1.0 / profile_r(k, lam)
                                  - 1.0 / profile_r(k + 1, lam))
               for k in range(1, K + 1))


def _max_exponent(y: float, lam: float) -> int:
    """Largest k with r_k <= y/2, the exponent assigned to p = 2."""
    k = 1
    while profile_r(k + 1, lam) <= y / 2.0:
        k += 1
    return k


def optimal_profile(N: int, series_terms: int = 10 ** 5,
                    lam: float = LAMBDA_STAR) -> ExponentProfile:
    """Solve for the scale y of the optimizing divisor set D and assign
    the exponent staircase mu_p = k for p in ]y/r_{k+1}, y/r_k].

    The fixed point y = log N * log y / C2(K(y)) realizes the constraint
    that log tau(D) stays near log N; because the error term in that
    constraint is O(1/log y), at desk scales the resulting tau(D) can
    still overshoot N, so y is then shrunk geometrically (factor 0.995)
    until tau(D) <= N holds exactly.
    """
    if not isinstance(N, int) or isinstance(N, bool) or N < 16:
        raise ValidationError("N must be an integer >= 16", "N >= 16")
    logN = math.log(N)
    y = logN * math.log(logN)
    if y < 4.0:
        y = 4.0
    for _ in range(64):
        K = _max_exponent(y, lam)
        c2 = _c2_truncated(K, lam)
        y_next = logN * math.log(y) / c2
        if y_next < 4.0:
            y_next = 4.0
        if abs(y_next - y) <= 1e-12 * y:
            y = y_next
            break
        y = y_next
    y_unconstrained = y

    def build(yv: float):
        Kv = _max_exponent(yv, lam)
        rs = [profile_r(k, lam) for k in range(1, Kv + 2)]
        mu: dict[int, int] = {}
        for p in sieve_primes(max(4, int(yv))):
            if p > yv:
                continue
            for k in range(1, Kv + 1):
                if yv / rs[k] < p <= yv / rs[k - 1]:
                    mu[p] = k
                    break
        tau = math.prod(m + 1 for m in mu.values())
        return Kv, rs, mu, tau

    K, rs, mu, tau = build(y)
    shrink = 0
    while tau > N:
        y *= 0.995
        shrink += 1
        if shrink > 5000:
            raise AccuracyError("tau(D) <= N could not be reached by "
                                "shrinking y", requested=float(N))
        K, rs, mu, tau = build(y)

    terms = [_b_term(k) for k in range(1, series_terms + 1)]
    s = neumaier_sum(terms)
    C1 = s / (2.0 * lam)
    C2 = _c2_truncated(series_terms, lam)
    predicted = 4.0 * C1 / math.sqrt(C2) * math.sqrt(logN / math.log(logN))
    D = FactoredInt.from_factors(sorted(mu.items()))
    return ExponentProfile(
        N=N, y=y, y_unconstrained=y_unconstrained, lam=lam, K=K,
        r_sequence=tuple(rs), mu_map=mu, C1=C1, C2=C2,
        c2_fixed_point=_c2_truncated(K, lam),
        predicted_log_gamma=predicted, D=D, tau_D=tau)
