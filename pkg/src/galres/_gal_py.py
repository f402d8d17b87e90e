"""Pure-Python pair kernels (fallback backend).

Operates on the packed factored-set layout produced by ``_kernels.pack``:
per-element CSR slices of (prime code, exponent) with a shared log-prime
table, so element values never enter the inner loops and arbitrary-size
integers cost nothing here.  The compiled backend mirrors these loops
operation for operation; keep the two in sync.
"""

from __future__ import annotations

import math


def _as_list(x):
    return x.tolist() if hasattr(x, "tolist") else list(x)


def _dist(codes, exps, a0, a1, b0, b1, logp):
    """Sum of |e_m(p) - e_n(p)| * log p over the merged code lists."""
    d = 0.0
    i, j = a0, b0
    while i < a1 and j < b1:
        ci, cj = codes[i], codes[j]
        if ci == cj:
            diff = exps[i] - exps[j]
            if diff:
                d += (diff if diff > 0 else -diff) * logp[ci]
            i += 1
            j += 1
        elif ci < cj:
            d += exps[i] * logp[ci]
            i += 1
        else:
            d += exps[j] * logp[cj]
            j += 1
    while i < a1:
        d += exps[i] * logp[codes[i]]
        i += 1
    while j < b1:
        d += exps[j] * logp[codes[j]]
        j += 1
    return d


def pair_gal_sum(indptr, codes, exps, logp, alpha):
    """Sum over all ordered pairs of ((m,n)/[m,n])**alpha.

    Equals n + 2 * sum_{i<j} exp(-alpha * dist_ij); accumulation is
    Neumaier-compensated in fixed row-major order.
    """
    indptr = _as_list(indptr)
    codes = _as_list(codes)
    exps = _as_list(exps)
    logp = _as_list(logp)
    n = len(indptr) - 1
    s = 0.0
    c = 0.0
    for i in range(n):
        a0, a1 = indptr[i], indptr[i + 1]
        for j in range(i + 1, n):
            x = math.exp(-alpha * _dist(codes, exps, a0, a1,
                                        indptr[j], indptr[j + 1], logp))
            t = s + x
            if abs(s) >= abs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return float(n) + 2.0 * (s + c)


def pair_gal_weighted(indptr, codes, exps, logp, kind, scale_c, apar):
    """Weighted pair sum: sum over ordered pairs of C**omega(v) * g(v),
    v = [m,n]/(m,n).

    kind 0: g(v) = v**-0.5
    kind 1: g(v) = mu(v)**2 / prod_{p|v} (sqrt(p) - 1)
    kind 2: g(v) = mu(v)**2 / prod_{p|v} (p**(apar/2) - 1)
    """
    indptr = _as_list(indptr)
    codes = _as_list(codes)
    exps = _as_list(exps)
    logp = _as_list(logp)
    n = len(indptr) - 1
    s = 0.0
    c = 0.0
    for i in range(n):
        a0, a1 = indptr[i], indptr[i + 1]
        for j in range(i + 1, n):
            b0, b1 = indptr[j], indptr[j + 1]
            w = 1.0
            ii, jj = a0, b0
            while w != 0.0 and (ii < a1 or jj < b1):
                if ii < a1 and jj < b1 and codes[ii] == codes[jj]:
                    diff = exps[ii] - exps[jj]
                    lp = logp[codes[ii]]
                    ii += 1
                    jj += 1
                elif jj >= b1 or (ii < a1 and codes[ii] < codes[jj]):
                    diff = exps[ii]
                    lp = logp[codes[ii]]
                    ii += 1
                else:
                    diff = exps[jj]
                    lp = logp[codes[jj]]
                    jj += 1
                if diff == 0:
                    continue
                if diff < 0:
                    diff = -diff
                if kind == 0:
                    w *= scale_c * math.exp(-0.5 * diff * lp)
                elif diff > 1:
                    w = 0.0
                elif kind == 1:
                    w *= scale_c / (math.exp(0.5 * lp) - 1.0)
                else:
                    w *= scale_c / (math.exp(0.5 * apar * lp) - 1.0)
            t = s + w
            if abs(s) >= abs(w):
                c += (s - t) + w
            else:
                c += (w - t) + s
            s = t
    return float(n) + 2.0 * (s + c)


def _divides(codes, exps, a0, a1, b0, b1):
    """True when element B (slice b) divides element A (slice a)."""
    i = a0
    for j in range(b0, b1):
        cj = codes[j]
        while i < a1 and codes[i] < cj:
            i += 1
        if i == a1 or codes[i] != cj or exps[i] < exps[j]:
            return False
        i += 1
    return True


def pair_gal_subsum(indptr, codes, exps, logp, logm, alpha):
    """Sum of (n/m)**alpha over ordered pairs with n | m (diagonal included)."""
    indptr = _as_list(indptr)
    codes = _as_list(codes)
    exps = _as_list(exps)
    logm = _as_list(logm)
    n = len(indptr) - 1
    s = 0.0
    c = 0.0
    for i in range(n):
        a0, a1 = indptr[i], indptr[i + 1]
        for j in range(n):
            if i == j:
                continue
            if logm[j] <= logm[i] and _divides(codes, exps, a0, a1,
                                               indptr[j], indptr[j + 1]):
                x = math.exp(-alpha * (logm[i] - logm[j]))
                t = s + x
                if abs(s) >= abs(x):
                    c += (s - t) + x
                else:
                    c += (x - t) + s
                s = t
    return float(n) + (s + c)


def gal_matrix_fill(indptr, codes, exps, logp, alpha, out):
    """Fill out[i][j] = ((m_i,m_j)/[m_i,m_j])**alpha (symmetric, unit diagonal)."""
    indptr_l = _as_list(indptr)
    codes_l = _as_list(codes)
    exps_l = _as_list(exps)
    logp_l = _as_list(logp)
    n = len(indptr_l) - 1
    for i in range(n):
        out[i, i] = 1.0
        a0, a1 = indptr_l[i], indptr_l[i + 1]
        for j in range(i + 1, n):
            v = math.exp(-alpha * _dist(codes_l, exps_l, a0, a1,
                                        indptr_l[j], indptr_l[j + 1], logp_l))
            out[i, j] = v
            out[j, i] = v


def divis_matrix_fill(indptr, codes, exps, logp, logm, out):
    """Fill out[i][j] = sqrt(m_j/m_i) if m_j | m_i else 0."""
    indptr_l = _as_list(indptr)
    codes_l = _as_list(codes)
    exps_l = _as_list(exps)
    logm_l = _as_list(logm)
    n = len(indptr_l) - 1
    for i in range(n):
        a0, a1 = indptr_l[i], indptr_l[i + 1]
        for j in range(n):
            if i == j:
                out[i, j] = 1.0
            elif logm_l[j] <= logm_l[i] and _divides(codes_l, exps_l, a0, a1,
                                                     indptr_l[j], indptr_l[j + 1]):
                out[i, j] = math.exp(-0.5 * (logm_l[i] - logm_l[j]))
            else:
                out[i, j] = 0.0


def max_subset_sum(ratio, n_pick):
    """Exhaustive maximum of the pair quadratic form over n_pick-subsets.

    ratio is a symmetric universe matrix with unit diagonal; the value
    maximized is n_pick + 2 * sum_{i<j in subset} ratio[i][j].  Returns
    (best_value, best_indices); ties resolve to the lexicographically
    first subset.
    """
    u = len(ratio)
    rows = [_as_list(r) for r in ratio]
    best = [-1.0, None]
    chosen: list[int] = []

    def rec(start, pairsum):
        if len(chosen) == n_pick:
            if pairsum > best[0]:
                best[0] = pairsum
                best[1] = tuple(chosen)
            return
        need = n_pick - len(chosen)
        for e in range(start, u - need + 1):
            gain = 0.0
            re = rows[e]
            for s_ in chosen:
                gain += re[s_]
            chosen.append(e)
            rec(e + 1, pairsum + gain)
            chosen.pop()

    rec(0, 0.0)
    return float(n_pick) + 2.0 * best[0], list(best[1])
