"""Critical-line tools: zeta evaluation, max scans, smoothing kernels,
a convolution identity, and a real-frequency resonator.

Zeta values come from Euler-Maclaurin with an explicit remainder: for
s = sigma + it and a cut N > |s|,

    zeta(s) = sum_{n < N} n^-s + N^(1-s)/(s-1) + N^-s / 2
            + sum_{k=1}^{6} B_2k/(2k)! (s)_(2k-1) N^(1-s-2k) + R,

    |R| <= |B_14/14! (s)_(13) N^(-s-13)| * |s + 13| / (sigma + 13),

where (s)_m is the rising product s(s+1)...(s+m-1).  The cut n < N
with N ~ 2|t| keeps the remainder far below any requested tolerance.

The two smoothing kernels and their Fourier transforms (with the
convention F^(xi) = int F(u) exp(-i u xi) du):

    Phi(u) = exp(-u^2/2)            Phi^ = sqrt(2 pi) Phi
    K(u)   = sin^2(a u)/(pi a u^2)  K^(xi) = (1 - |xi|/(2a))+,

with a = eps log T.  Both extend to entire functions, which feeds the
convolution identity checked by lemma53_check: for s = sigma + it,
0 < sigma < 1, t != 0, and F one of the two kernels,

    int zeta(s+iu) conj(zeta(s-iu)) F(u) du
        = sum_{k,l} F^(log kl) k^-s l^-conj(s)
        - 2 pi zeta(1-2it) F(i(s-1)) - 2 pi zeta(1+2it) F(i(conj(s)-1)),

the last two terms being the pole crossings at u = i(s-1) and
u = i(conj(s)-1).

The real resonator groups a set M into multiplicative blocks
M_j = M intersect ]( 1+1/T)^j, (1+1/T)^(j+1)], takes the smallest
member of each block as representative h_j with weight r_j =
sqrt(|M_j|), and forms R(t) = sum_j r_j h_j^-it.  Its Gaussian-kernel
moments connect to the pair sums computed elsewhere; the first moment
obeys an explicit finite bound proportional to T |M| / log T.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .accsum import neumaier_sum
from .errors import AccuracyError, CapacityError, ValidationError
from .extremal import set_predicates
from .galsum import gal_subsum
from .ntcore import IntegerSet

_GL16_NODES, _GL16_WEIGHTS = np.polynomial.legendre.leggauss(16)

# B_2k / (2k)! for k = 1..7 (the 7th backs the remainder bound)
_B_OVER_FACT = (
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
)

_T_CAP = 1.0e6


def _zeta_em_batch(sigma: float, ts: np.ndarray, n_cut: int
                   ) -> tuple[np.ndarray, np.ndarray]:
    """zeta(sigma + i t) for every t in ts with one shared cut, plus
    the per-point remainder bounds.  The main sum is chunked over t to
    hold the (chunk, n_cut) phase table."""
    ts = np.asarray(ts, dtype=float)
    s = sigma + 1j * ts
    n = np.arange(1, n_cut, dtype=float)
    log_n = np.log(n)
    amp = n ** (-sigma)
    main = np.empty(ts.shape, dtype=complex)
    chunk = max(1, int(4.0e6 / max(len(n), 1)))
    for lo in range(0, len(ts), chunk):
        tt = ts[lo:lo + chunk, None]
        main[lo:lo + chunk] = (amp[None, :]
                               * np.exp(-1j * tt * log_n[None, :])).sum(axis=1)
    big_n = float(n_cut)
    val = main + big_n ** (1.0 - s) / (s - 1.0) + 0.5 * big_n ** (-s)
    rising = np.ones_like(s)
    power = big_n ** (1.0 - s)
    for k, coef in enumerate(_B_OVER_FACT, start=1):
        if k == 1:
            rising = s.copy()
        else:
            rising = rising * (s + (2 * k - 3)) * (s + (2 * k - 2))
        power = power / (big_n * big_n)
        term = coef * rising * power
        if k <= 6:
            val = val + term
        else:
            rem = (np.abs(term)
                   * np.abs(s + 13.0) / (sigma + 13.0))
    return val, rem


def zeta_critical(t: float, tol: float = 1e-10) -> complex:
    """zeta(1/2 + it) within tol, |t| <= 10^6."""
    if not math.isfinite(t) or abs(t) > _T_CAP:
        raise ValidationError(f"|t| = {abs(t)} exceeds the cap 10^6",
                              "|t| <= 10^6")
    if tol < 1e-10:
        raise ValidationError("tol below the supported floor 1e-10",
                              "tol >= 1e-10")
    n_cut = max(50, int(math.ceil(2.0 * abs(t))))
    for _ in range(4):
        vals, rems = _zeta_em_batch(0.5, np.array([t]), n_cut)
        if rems[0] <= tol:
            return complex(vals[0])
        n_cut *= 2
    raise AccuracyError("Euler-Maclaurin remainder stuck above tol",
                        achieved=float(rems[0]), requested=tol)


def zeta_grid(ts: Sequence[float], tol: float = 1e-10,
              sigma: float = 0.5) -> np.ndarray:
    """zeta(sigma + it) on a batch of points, one shared cut sized by
    the largest |t|."""
    ts = np.asarray(ts, dtype=float)
    if ts.size == 0:
        return np.zeros(0, dtype=complex)
    if not np.all(np.isfinite(ts)) or np.max(np.abs(ts)) > _T_CAP:
        raise ValidationError("grid points must be finite with |t| <= 10^6",
                              "|t| <= 10^6")
    n_cut = max(50, int(math.ceil(2.0 * float(np.max(np.abs(ts))))))
    vals, rems = _zeta_em_batch(sigma, ts, n_cut)
    worst = float(np.max(rems))
    if worst > tol:
        vals, rems = _zeta_em_batch(sigma, ts, 2 * n_cut)
        worst = float(np.max(rems))
        if worst > tol:
            raise AccuracyError("Euler-Maclaurin remainder stuck above tol",
                                achieved=worst, requested=tol)
    return vals


# ---------------------------------------------------------------------------
# kernels

@dataclass(frozen=True)
class KernelParams:
    """Scan window T, kernel aperture eps, and scan floor exponent
    beta."""
    T: float
    eps: float = 0.5
    beta: float = 0.0

    def __post_init__(self):
        if not (self.T > 1.0):
            raise ValidationError(f"T = {self.T} must exceed 1", "T > 1")
        if not (0.0 < self.eps < 1.0):
            raise ValidationError(f"eps = {self.eps} must lie in (0, 1)",
                                  "eps in (0, 1)")
        if not (0.0 <= self.beta < 1.0):
            raise ValidationError(f"beta = {self.beta} must lie in [0, 1)",
                                  "beta in [0, 1)")

    @property
    def aperture(self) -> float:
        """a = eps log T, the frequency scale of K."""
        return self.eps * math.log(self.T)


_KERNEL_NAMES = ("Phi", "Phi_hat", "K", "K_hat")


def kernels(params: KernelParams, x: float, which: str) -> float:
    """Closed-form evaluation of the two kernels and their transforms.
    K at 0 returns the removable-singularity limit a / pi."""
    if which not in _KERNEL_NAMES:
        raise ValidationError(f"unknown kernel {which!r}",
                              "which in {Phi, Phi_hat, K, K_hat}")
    if which == "Phi":
        return math.exp(-0.5 * x * x)
    if which == "Phi_hat":
        return math.sqrt(2.0 * math.pi) * math.exp(-0.5 * x * x)
    a = params.aperture
    if which == "K":
        if x == 0.0:
            return a / math.pi
        return math.sin(a * x) ** 2 / (math.pi * a * x * x)
    return max(0.0, 1.0 - abs(x) / (2.0 * a))


def _kernel_complex(z: complex, fn: str, a: float) -> complex:
    """Entire extension of Phi or K, needed at the pole crossings."""
    if fn == "gaussian":
        return cmath.exp(-0.5 * z * z)
    if z == 0:
        return complex(a / math.pi)
    return cmath.sin(a * z) ** 2 / (math.pi * a * z * z)


# ---------------------------------------------------------------------------
# scan of the critical line

def z_beta_max(params: KernelParams, grid_step: float = 0.05
               ) -> tuple[float, float]:
    """max |zeta(1/2 + i tau)| over T^beta <= tau <= T: grid scan with
    both endpoints, then a three-point parabolic refinement around the
    discrete argmax."""
    if not (0.0 < grid_step <= 0.05):
        raise ValidationError("grid_step must lie in (0, 0.05]",
                              "grid_step <= 0.05")
    lo = params.T ** params.beta
    hi = params.T
    if not lo < hi:
        raise ValidationError("T^beta must be below T", "T^beta < T")
    count = int(math.floor((hi - lo) / grid_step))
    taus = np.concatenate([lo + grid_step * np.arange(count + 1), [hi]])
    mags = np.abs(zeta_grid(taus))
    i = int(np.argmax(mags))
    best_tau, best = float(taus[i]), float(mags[i])
    if 0 < i < len(taus) - 1:
        x0, x1, x2 = taus[i - 1], taus[i], taus[i + 1]
        y0, y1, y2 = mags[i - 1], mags[i], mags[i + 1]
        denom = (y0 - 2.0 * y1 + y2)
        if denom < 0.0:
            shift = 0.5 * (y0 - y2) / denom
            cand = float(x1 + shift * grid_step)
            if lo <= cand <= hi:
                mag = abs(zeta_critical(cand))
                if mag > best:
                    best_tau, best = cand, mag
    return best, best_tau


# ---------------------------------------------------------------------------
# the convolution identity

def _zeta_abs_bound(sigma: float, v: float) -> float:
    """Crude but safe |zeta(sigma + iv)| majorant for sigma in (0, 1],
    used only to size quadrature tails."""
    return 6.0 * (1.0 + abs(v)) ** (1.0 - 0.5 * sigma)


def _gaussian_cut(sigma: float, t: float, tol: float) -> float:
    u = max(8.0, abs(t) + 6.0)
    while True:
        amp = (_zeta_abs_bound(sigma, t + u) * _zeta_abs_bound(sigma, t - u))
        if amp * math.exp(-0.5 * u * u) * (1.0 + u) <= 0.1 * tol:
            return u
        u += 1.0


def _osc_tail_integral(omega: float, u0: float) -> complex:
    """int_u0^inf exp(-i omega u) / u^2 du, by parts through E_1."""
    if omega == 0.0:
        return complex(1.0 / u0)
    from scipy.special import exp1
    e1 = exp1(1j * omega * u0) if omega > 0.0 \
        else np.conj(exp1(-1j * omega * u0))
    return cmath.exp(-1j * omega * u0) / u0 - 1j * omega * complex(e1)


def _k_tail_correction(s: complex, a: float, u0: float,
                       n_tail: int = 300) -> float:
    """2 Re int_u0^inf zeta(s+iu) zeta(conj(s)+iu) K(u) du, through the
    Dirichlet expansion zeta zeta = sum_n D_n(t) n^(-sigma) n^(-iu)
    with D_n(t) = sum_{kl=n} (l/k)^(it), and K = (1 - cos 2au)
    / (2 pi a u^2).  Truncated at n_tail; the neglected terms carry
    frequencies log n well away from the kernel's +-2a lines and fall
    off like 1/u0^2 each, so they sit far below the pre-correction
    1/u0 tail that this removes."""
    sigma, t = s.real, s.imag
    total = 0.0
    for n in range(1, n_tail + 1):
        d_n = 0.0
        for k in range(1, n + 1):
            if n % k == 0:
                d_n += math.cos(t * math.log((n // k) / k))
        ln = math.log(n)
        piece = (_osc_tail_integral(ln, u0)
                 - 0.5 * _osc_tail_integral(ln - 2.0 * a, u0)
                 - 0.5 * _osc_tail_integral(ln + 2.0 * a, u0))
        total += d_n * n ** (-sigma) * piece.real / (2.0 * math.pi * a)
    return 2.0 * total


def _lemma53_lhs(s: complex, fn: str, a: float, u_max: float,
                 width: float, tol: float) -> float:
    """2 Re int_0^U zeta(s+iu) conj(zeta(s-iu)) F(u) du by fixed
    Gauss panels; the minus branch uses zeta(conj(s) + iu) =
    conj(zeta(s - iu)).  The K kernel's tail decays only like 1/U, so
    its truncation is repaired analytically by _k_tail_correction."""
    sigma, t = s.real, s.imag
    edges = np.arange(0.0, u_max + width, width)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mids[:, None] + half[:, None] * _GL16_NODES[None, :]).ravel()
    w = (half[:, None] * _GL16_WEIGHTS[None, :]).ravel()
    z_plus = zeta_grid(t + pts, tol=1e-10, sigma=sigma)
    z_minus_conj = zeta_grid(pts - t, tol=1e-10, sigma=sigma)
    if fn == "gaussian":
        f_vals = np.exp(-0.5 * pts * pts)
    else:
        f_vals = np.empty_like(pts)
        nz = pts != 0.0
        f_vals[nz] = (np.sin(a * pts[nz]) ** 2
                      / (math.pi * a * pts[nz] * pts[nz]))
        f_vals[~nz] = a / math.pi
    integrand = (z_plus * z_minus_conj * f_vals).real
    value = 2.0 * float(np.dot(w, integrand))
    if fn == "K":
        value += _k_tail_correction(s, a, float(edges[-1]))
    return value


def _lemma53_rhs(s: complex, fn: str, a: float, tol: float) -> float:
    sigma, t = s.real, s.imag
    if fn == "gaussian":
        v = 3.0
        while v * math.exp((1.0 - sigma) * v - 0.5 * v * v) > 0.05 * tol:
            v += 0.5
        x_cut = int(math.ceil(math.exp(v)))

        def f_hat(ln: float) -> float:
            return math.sqrt(2.0 * math.pi) * math.exp(-0.5 * ln * ln)
    else:
        x_cut = int(math.floor(math.exp(2.0 * a)))
        if math.exp(2.0 * a) == float(x_cut):
            x_cut -= 1  # the hat vanishes on the support edge

        def f_hat(ln: float) -> float:
            return max(0.0, 1.0 - ln / (2.0 * a))

    terms = []
    for k in range(1, x_cut + 1):
        k_pow = k ** (-s)
        for seq in range(1, x_cut // k + 1):
            terms.append((f_hat(math.log(k * seq))
                          * (k_pow * seq ** (-s.conjugate())).real))
    series = neumaier_sum(terms)

    z_minus = complex(zeta_grid(np.array([-2.0 * t]), sigma=1.0)[0])
    z_plus = complex(zeta_grid(np.array([2.0 * t]), sigma=1.0)[0])
    corr = (2.0 * math.pi * z_minus
            * _kernel_complex(1j * (s - 1.0), fn, a)
            + 2.0 * math.pi * z_plus
            * _kernel_complex(1j * (s.conjugate() - 1.0), fn, a))
    if abs(corr.imag) > 1e-8 * max(1.0, abs(corr.real)):
        raise AccuracyError("pole corrections failed to pair up",
                            achieved=abs(corr.imag), requested=1e-8)
    return series - corr.real


def lemma53_check(s: complex, fn: str = "gaussian", tol: float = 1e-6,
                  params: KernelParams | None = None,
                  u_max: float | None = None) -> tuple[float, float, float]:
    """Both sides of the convolution identity and their gap.

    fn = "gaussian" uses Phi and a rigorously sized quadrature window;
    fn = "K" needs params for (T, eps) and truncates the slowly
    decaying oscillatory tail at a heuristic window (default 2000)
    chosen so the cancellation-aware tail estimate sits well under
    1e-5.  The series side of K is exactly finite because its hat
    vanishes past kl = T^(2 eps).
    """
    if fn not in ("gaussian", "K"):
        raise ValidationError(f"unknown test function {fn!r}",
                              "fn in {gaussian, K}")
    sigma, t = s.real, s.imag
    if not (0.0 < sigma < 1.0):
        raise ValidationError(f"Re(s) = {sigma} must lie in (0, 1)",
                              "0 < Re(s) < 1")
    if t == 0.0:
        raise ValidationError("Im(s) must be nonzero", "Im(s) != 0")
    if fn == "K":
        if params is None:
            raise ValidationError("fn='K' requires KernelParams",
                                  "params given")
        a = params.aperture
        u = float(u_max) if u_max is not None else 1500.0
        width = 0.5
    else:
        a = 0.0
        u = float(u_max) if u_max is not None else _gaussian_cut(sigma, t, tol)
        width = 0.25
    lhs = _lemma53_lhs(s, fn, a, u, width, tol)
    rhs = _lemma53_rhs(s, fn, a, tol)
    return lhs, rhs, abs(lhs - rhs)


# ---------------------------------------------------------------------------
# the real-frequency resonator

class RealResonator:
    """Block representatives h_j, weights r_j = sqrt(|M_j|), and the
    trigonometric polynomial R(t) = sum r_j h_j^-it."""

    def __init__(self, T: float, reps: tuple[int, ...], weights: np.ndarray,
                 blocks: tuple[tuple[int, ...], ...]):
        self.T = T
        self.reps = reps
        self.weights = weights
        self.blocks = blocks
        self.size = int(round(float(np.dot(weights, weights))))
        self._log_h = np.log(np.asarray(reps, dtype=float))

    def resonate(self, ts) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.exp(-1j * ts[:, None] * self._log_h[None, :]) @ self.weights

    def r_zero(self) -> float:
        return float(self.weights.sum())


def build_real_resonator(M, T: float) -> RealResonator:
    """Group M into the multiplicative blocks of ratio 1 + 1/T.

    Block j is ]( 1+1/T)^j, (1+1/T)^(j+1)]; the representative is the
    block minimum.  R(0) is verified against the direct sum and obeys
    R(0)^2 <= max(M) |M|.
    """
    if not (T > 1.0):
        raise ValidationError(f"T = {T} must exceed 1", "T > 1")
    if isinstance(M, IntegerSet):
        values = sorted(int(f.value) for f in M.elements)
    else:
        values = sorted(int(v) for v in M)
    if not values:
        raise ValidationError("M must be non-empty", "M non-empty")
    if values[0] < 1:
        raise ValidationError("elements must be positive", "m >= 1")
    ratio = 1.0 + 1.0 / T
    log_ratio = math.log1p(1.0 / T)
    groups: dict[int, list[int]] = {}
    for m in values:
        j = int(math.ceil(math.log(m) / log_ratio - 1e-12)) - 1
        while ratio ** j >= m:
            j -= 1
        while ratio ** (j + 1) < m:
            j += 1
        groups.setdefault(j, []).append(m)
    keys = sorted(groups)
    reps = tuple(min(groups[j]) for j in keys)
    weights = np.sqrt([len(groups[j]) for j in keys])
    res = RealResonator(T, reps, weights, tuple(tuple(groups[j]) for j in keys))
    if res.size != len(values):
        raise AccuracyError("block weights lost mass",
                            achieved=float(res.size),
                            requested=float(len(values)))
    direct = float(np.sum(weights))
    if abs(res.r_zero() - direct) > 1e-9 * max(1.0, direct):
        raise AccuracyError("R(0) mismatch against the direct sum",
                            achieved=res.r_zero(), requested=direct)
    if res.r_zero() ** 2 > values[-1] * len(values) * (1.0 + 1e-12):
        raise AccuracyError("R(0)^2 exceeded max(M) |M|",
                            achieved=res.r_zero() ** 2,
                            requested=float(values[-1] * len(values)))
    return res


def _gauss_nodes(u_max: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    edges = np.arange(-u_max, u_max + width, width)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mids[:, None] + half[:, None] * _GL16_NODES[None, :]).ravel()
    w = (half[:, None] * _GL16_WEIGHTS[None, :]).ravel()
    return pts, w


def m1_explicit_bound(T: float, size: int) -> float:
    """Finite-form cap for the Gaussian first moment: writing the
    moment as a double Gaussian sum over block pairs and using that
    representatives of blocks d apart differ by at least a factor
    (1+1/T)^(d-1),

        M1 <= sqrt(2 pi) (T / log T) |M| (3 + sqrt(2 pi) log T / c),

    with c = T log(1+1/T) the per-block log gap times T."""
    c = T * math.log1p(1.0 / T)
    log_t = math.log(T)
    return (math.sqrt(2.0 * math.pi) * (T / log_t) * size
            * (3.0 + math.sqrt(2.0 * math.pi) * log_t / c))


@dataclass(frozen=True)
class MomentReport:
    T: float
    eps: float
    set_size: int
    m1: float
    m1_bound: float
    i1_estimate: float
    gal_direct: float
    pair_count: int


def resonance_moment(M, params: KernelParams, tol: float = 1e-8
                     ) -> MomentReport:
    """First moment, kernel-weighted moment, and the direct pair sum.

    m1 = int |R(t)|^2 Phi(t log T / T) dt over the effective support
    |t| <= 10 T / log T; i1_estimate uses the finite Dirichlet series
    G(t) = sum_{kl <= T^(2 eps)} K^(log kl) (kl)^(-1/2) (k/l)^(it) as
    an extra factor; gal_direct = (T / log T) * sum over ordered pairs
    of M with lcm/gcd <= T^eps of sqrt(gcd/lcm).  m1 must respect
    m1_explicit_bound; i1 is nonnegative because every symmetrized
    term integrates a Gaussian.
    """
    if isinstance(M, IntegerSet):
        values = sorted(int(f.value) for f in M.elements)
    else:
        values = sorted(int(v) for v in M)
    if len(values) > 2000:
        raise CapacityError(f"|M| = {len(values)} exceeds the quadrature "
                            "budget 2000", "|M| <= 2000")
    res = build_real_resonator(values, params.T)
    lam = math.log(params.T) / params.T
    u_max = 10.0 / lam
    rate = max(1.0, math.log(values[-1]) + 2.0 * params.aperture)
    pts, w = _gauss_nodes(u_max, width=min(1.0, 3.0 / rate))

    x_cut = int(math.floor(params.T ** (2.0 * params.eps)))
    deltas, g_weights = [], []
    two_a = 2.0 * params.aperture
    for k in range(1, x_cut + 1):
        for seq in range(1, x_cut // k + 1):
            ln = math.log(k * seq)
            hat = 1.0 - ln / two_a
            if hat <= 0.0:
                continue
            deltas.append(math.log(k / seq))
            g_weights.append(hat / math.sqrt(k * seq))
    deltas = np.asarray(deltas)
    g_weights = np.asarray(g_weights)

    # chunk the node dimension: the phase tables are nodes x blocks and
    # nodes x pairs, either of which can reach ~10^7 entries
    m1 = 0.0
    i1 = 0.0
    chunk = max(1, int(2.0e6 / max(len(res.reps), len(deltas), 1)))
    for lo in range(0, len(pts), chunk):
        pc, wc = pts[lo:lo + chunk], w[lo:lo + chunk]
        r_sq = np.abs(res.resonate(pc)) ** 2
        phi = np.exp(-0.5 * (pc * lam) ** 2)
        m1 += float(np.dot(wc, r_sq * phi))
        g_vals = np.cos(pc[:, None] * deltas[None, :]) @ g_weights
        i1 += float(np.dot(wc, g_vals * r_sq * phi))
    bound = m1_explicit_bound(params.T, res.size)
    if m1 > bound * (1.0 + 1e-9):
        raise AccuracyError("first moment exceeded its explicit bound",
                            achieved=m1, requested=bound)

    thresh = params.T ** params.eps
    if values[-1] < 2 ** 62:
        v = np.asarray(values, dtype=np.int64)
        g = np.gcd.outer(v, v)
        ratio = (v[:, None] // g) * (v[None, :] // g)
        mask = ratio <= thresh
        pair_sum = float(np.sum(1.0 / np.sqrt(ratio[mask])))
        pair_count = int(np.count_nonzero(mask))
    else:
        # elements past the int64 range: exact big-int pair loop
        pair_sum = 0.0
        pair_count = 0
        for i, m in enumerate(values):
            for n in values[i:]:
                g = math.gcd(m, n)
                ratio = (m // g) * (n // g)
                if ratio <= thresh:
                    mult = 1 if n == m else 2
                    pair_sum += mult / math.sqrt(float(ratio))
                    pair_count += mult
    gal_direct = (params.T / math.log(params.T)) * pair_sum
    return MomentReport(T=params.T, eps=params.eps, set_size=res.size,
                        m1=m1, m1_bound=bound, i1_estimate=i1,
                        gal_direct=gal_direct, pair_count=pair_count)


# ---------------------------------------------------------------------------
# divisor-closed sub-sum bound

def subsum_bound_check(M) -> tuple[float, float, bool]:
    """lhs = subsum over divisor pairs, rhs = sum over m of
    prod_{p | m} (1 - p^-1/2)^-1, for divisor-closed M.

    per_element_ok records that every member satisfies the two finite
    inequalities behind the bound: sum_{d | m} d^-1/2 <= the local
    Euler product, and omega(m) <= log|M| / log 2.
    """
    if not isinstance(M, IntegerSet):
        M = IntegerSet.from_values(M)
    flags = set_predicates(M)
    if not flags["divisor_closed"]:
        raise ValidationError("M must be divisor-closed", "M divisor-closed")
    lhs = gal_subsum(M)
    rhs_terms = []
    omega_cap = math.log(max(len(M), 2)) / math.log(2.0)
    per_element_ok = True
    for m in M.elements:
        prod = 1.0
        for p, _ in m.factors:
            prod /= 1.0 - p ** (-0.5)
        rhs_terms.append(prod)
        local = neumaier_sum(float(d.value) ** (-0.5) for d in m.divisors())
        if local > prod * (1.0 + 1e-12):
            per_element_ok = False
        if len(m.factors) > omega_cap + 1e-12:
            per_element_ok = False
    rhs = neumaier_sum(rhs_terms)
    if lhs > rhs * (1.0 + 1e-12):
        raise AccuracyError("subsum exceeded its divisor-product bound",
                            achieved=lhs, requested=rhs)
    return lhs, rhs, per_element_ok
