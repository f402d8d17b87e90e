"""Central values of Dirichlet L-functions through a smoothed square.

For a primitive non-principal character chi of parity nu modulo q, the
square of the central value unfolds into an absolutely convergent
double series

    |L(1/2, chi)|^2 = 2 sum_{k,l >= 1} chi(k) conj(chi(l))
                        / sqrt(k l) * W_nu(pi k l / q),

where the smoothing weight is the Mellin pair

    W_nu(x) = (1 / 2 pi i) int_{Re s = 2}
              Gamma(1/4 + s/2 + nu/2)^2
              / (Gamma(1/4 + nu/2)^2 * s * x^s) ds.

Collapsing the gamma quotient through the duplication identity and the
Bessel integral int_0^inf exp(-v^2 - (t/v)^2) dv / v = K_0(2t) gives
the real form used here,

    W_nu(x) = [4 / Gamma(1/4 + nu/2)^2]
              * int_x^inf t^(nu - 1/2) K_0(2t) dt,

so W_nu decreases from W_nu(0) = 1 and dies like exp(-2x).  The double
series therefore only sees products k*l up to a small multiple of q,
and collapsing over n = k*l with the divisor-type coefficient

    c_n = sum_{d | n} chi(d) conj(chi(n/d))        (real by symmetry)

reduces the whole computation to one pass over n <= n_cut.

w_kernel evaluates W by adaptive quadrature; w_kernel_contour is a
deliberately independent check that integrates the defining contour
directly and is kept slow and simple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as _gamma_fn
from scipy.special import k0, loggamma

from .accsum import neumaier_sum
from .characters import Character
from .errors import AccuracyError, ValidationError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _w_integrand(t, nu: int):
    return t ** (nu - 0.5) * k0(2.0 * t)


def _w_norm(nu: int) -> float:
    return 4.0 / _gamma_fn(0.25 + 0.5 * nu) ** 2


def w_kernel(x: float, nu: int = 0, tol: float = 1e-10) -> float:
    """W_nu(x) by quadrature of the Bessel form.

    At x = 0 the substitution t = u^2 removes the t^(-1/2) singularity
    before integrating; the exact value there is 1 for either parity.
    """
    if nu not in (0, 1):
        raise ValidationError("nu must be 0 or 1", "nu in {0, 1}")
    if not (x >= 0.0) or not math.isfinite(x):
        raise ValidationError(f"x = {x} must be finite and >= 0", "x >= 0")
    if not (0.0 < tol <= 1e-2):
        raise ValidationError("tol must lie in (0, 1e-2]", "0 < tol <= 1e-2")
    if x == 0.0:
        sub = lambda u: 2.0 * u ** (2 * nu) * k0(2.0 * u * u)  # noqa: E731
        v1, e1 = quad(sub, 0.0, 1.0, epsabs=tol / 16.0, epsrel=tol, limit=200)
        v2, e2 = quad(sub, 1.0, np.inf, epsabs=tol / 16.0, epsrel=tol,
                      limit=200)
        val, err = v1 + v2, e1 + e2
    elif x < 1.0:
        v1, e1 = quad(_w_integrand, x, 1.0, args=(nu,), epsabs=tol / 16.0,
                      epsrel=tol, limit=200)
        v2, e2 = quad(_w_integrand, 1.0, np.inf, args=(nu,),
                      epsabs=tol / 16.0, epsrel=tol, limit=200)
        val, err = v1 + v2, e1 + e2
    else:
        val, err = quad(_w_integrand, x, np.inf, args=(nu,),
                        epsabs=tol / 8.0, epsrel=tol, limit=200)
    if err > max(tol, 1e-13):
        raise AccuracyError(
            f"W quadrature error estimate {err:.3e} exceeds tol",
            achieved=err, requested=tol)
    return float(_w_norm(nu) * val)


def w_kernel_contour(x: float, nu: int = 0, half_width: float = 80.0,
                     step: float = 0.05) -> float:
    """W_nu(x) straight from the defining contour on Re s = 2.

    Trapezoid in tau over s = 2 + i tau, |tau| <= half_width; the gamma
    factor decays like exp(-pi |tau| / 2), so the truncation is far
    below double precision at the default width.  Kept independent of
    w_kernel on purpose: no Bessel functions, no shared code path.
    """
    if nu not in (0, 1):
        raise ValidationError("nu must be 0 or 1", "nu in {0, 1}")
    if not (x > 0.0) or not math.isfinite(x):
        raise ValidationError(f"x = {x} must be finite and > 0", "x > 0")
    tau = np.arange(0.0, half_width + 0.5 * step, step)
    s = 2.0 + 1j * tau
    log_term = (2.0 * loggamma(0.25 + 0.5 * s + 0.5 * nu)
                - 2.0 * loggamma(0.25 + 0.5 * nu)
                - s * math.log(x))
    vals = np.exp(log_term) / s
    # the integrand is conjugate-even in tau, so the line integral is
    # (1/pi) times the half-line integral of the real part
    return float(np.trapezoid(vals.real, dx=step) / math.pi)


def _w_tail_bound(x: float, nu: int) -> float:
    """Upper bound for W_nu(x) when x >= 1, from K_0(2t) <=
    sqrt(pi/(4t)) exp(-2t): W_nu(x) <= 5 exp(-2x) covers both parities
    with slack."""
    return 5.0 * math.exp(-2.0 * x)


@dataclass(frozen=True)
class LCentralValue:
    """|L(1/2, chi)|^2 with its truncation diagnostics."""
    q: int
    character_index: int
    parity: int
    value: float
    n_cut: int
    tail_bound: float
    coefficient_drift: float

    def __float__(self) -> float:
        return self.value


def _series_cut(q: int, tol: float) -> tuple[int, float]:
    """Smallest n_cut with the proven series tail below tol/2.

    Tail of sum tau(n) W(pi n / q) / sqrt(n) past n0, bounded by
    5 sum_{n > n0} n z^n with z = exp(-2 pi / q), summed in closed
    form.  The hard cap max(q log(1/tol)^2, 64 q) is never reached at
    sane tolerances.
    """
    cap = int(max(q * math.log(1.0 / tol) ** 2, 64 * q))
    z = math.exp(-2.0 * math.pi / q)
    T = max(4.0, 0.5 * math.log(1.0 / tol))
    while True:
        n0 = int(math.ceil(T * q / math.pi))
        tail = 5.0 * z ** (n0 + 1) * ((n0 + 1) - n0 * z) / (1.0 - z) ** 2
        if tail <= 0.5 * tol:
            if n0 > cap:
                raise AccuracyError(
                    f"series cut {n0} exceeds the cap {cap} at tol={tol}",
                    achieved=float(n0), requested=float(cap))
            return n0, tail
        T += 1.0


def _w_on_ladder(q: int, n_cut: int, nu: int, tol: float) -> np.ndarray:
    """W_nu(pi n / q) for n = 1..n_cut in one sweep.

    The integral from the top edge to infinity comes from quad; the
    panel integrals between consecutive edges use 8-point Gauss
    rungs (the panels have width pi/q and the integrand is analytic on
    each), accumulated by a descending prefix sum.  The first dozen
    panels sit closest to the t^(nu-1/2) log-type behaviour at 0 and
    get an 8-fold subdivision.
    """
    h = math.pi / q
    edges = h * np.arange(1, n_cut + 1)
    tail_int, tail_err = quad(_w_integrand, edges[-1], np.inf, args=(nu,),
                              epsabs=tol * 1e-3, epsrel=1e-12, limit=200)
    if tail_err > max(tol, 1e-12):
        raise AccuracyError("tail quadrature did not converge",
                            achieved=tail_err, requested=tol)
    integrals = np.empty(n_cut)
    integrals[-1] = tail_int
    if n_cut > 1:
        mids = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * h
        pts = mids[:, None] + half * _GL_NODES[None, :]
        panel = half * (_w_integrand(pts, nu) @ _GL_WEIGHTS)
        for i in range(min(12, len(panel))):
            sub = np.linspace(edges[i], edges[i + 1], 9)
            sm = 0.5 * (sub[:-1] + sub[1:])
            sh = 0.5 * (sub[1] - sub[0])
            p = sm[:, None] + sh * _GL_NODES[None, :]
            panel[i] = sh * float((_w_integrand(p, nu) @ _GL_WEIGHTS).sum())
        integrals[:-1] = tail_int + np.cumsum(panel[::-1])[::-1]
    return _w_norm(nu) * integrals


def l_half_sq(chi: Character, tol: float = 1e-8) -> LCentralValue:
    """|L(1/2, chi)|^2 for a primitive non-principal character.

    The double series is collapsed over products n = k*l; the divisor
    coefficients c_n are sieved in O(n_cut log n_cut), the weights come
    from _w_on_ladder, and the truncation point from _series_cut.  The
    result is clamped at zero; a value below -tol trips AccuracyError
    because the exact quantity is a square.
    """
    if chi.is_principal:
        raise ValidationError("the principal character has no central "
                              "L-value in this normalization",
                              "chi non-principal")
    if not chi.is_primitive:
        raise ValidationError(
            "chi must be primitive (use a prime-modulus table)",
            "chi primitive")
    if not (0.0 < tol <= 1e-4):
        raise ValidationError("tol must lie in (0, 1e-4]", "0 < tol <= 1e-4")
    q, nu = chi.q, chi.parity
    n_cut, tail = _series_cut(q, tol)
    W = _w_on_ladder(q, n_cut, nu, tol)

    vec = chi.vector()
    c = np.zeros(n_cut + 1, dtype=complex)
    for d in range(1, n_cut + 1):
        mult = np.arange(d, n_cut + 1, d)
        c[mult] += vec[d % q] * np.conj(vec[(mult // d) % q])
    drift = float(np.max(np.abs(c.imag)))
    if drift > 1e-9 * max(1.0, float(np.max(np.abs(c.real)))):
        raise AccuracyError(
            "divisor coefficients picked up an imaginary part",
            achieved=drift, requested=1e-9)

    n = np.arange(1, n_cut + 1)
    terms = 2.0 * c.real[1:] * W / np.sqrt(n)
    value = neumaier_sum(float(t) for t in terms)
    if value < -tol:
        raise AccuracyError(
            f"|L|^2 evaluated to {value:.3e} < 0 beyond tolerance",
            achieved=value, requested=-tol)
    return LCentralValue(q=q, character_index=chi.index, parity=nu,
                         value=max(value, 0.0), n_cut=n_cut,
                         tail_bound=tail, coefficient_drift=drift)
