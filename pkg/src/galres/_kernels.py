"""Backend dispatch and the packed factored-set layout.

``pack`` flattens a sequence of FactoredInt into CSR-style arrays of
(prime code, exponent) plus a shared log-prime table; the pair kernels
work entirely in that coded representation, so element magnitude is
irrelevant (primorial-scale values cost the same as small ones).

The compiled backend is preferred when importable; set
GALRES_BACKEND=python to force the fallback.  Both backends execute the
same operation sequence and return bit-identical floats.
"""

from __future__ import annotations

import os
from typing import NamedTuple, Sequence

import numpy as np

from .ntcore import FactoredInt

if os.environ.get("GALRES_BACKEND", "auto") == "python":
    from . import _gal_py as _impl
    _BACKEND = "python"
else:
    try:
        from . import _gal_cy as _impl  # type: ignore[attr-defined]
        _BACKEND = "compiled"
    except ImportError:
        from . import _gal_py as _impl
        _BACKEND = "python"


def backend_name() -> str:
    return _BACKEND


def get_backend(name: str):
    """Explicit backend module, for benchmarks and cross-checks."""
    if name == "python":
        from . import _gal_py
        return _gal_py
    if name == "compiled":
        from . import _gal_cy  # type: ignore[attr-defined]
        return _gal_cy
    raise ValueError(f"unknown backend {name!r}")


class PackedSet(NamedTuple):
    indptr: np.ndarray   # int64, len n+1
    codes: np.ndarray    # int64, prime codes sorted within each element
    exps: np.ndarray     # int64, exponents >= 1
    logp: np.ndarray     # float64, log prime by code
    logm: np.ndarray     # float64, log value per element

    @property
    def n(self) -> int:
        return len(self.indptr) - 1


def pack(elements: Sequence[FactoredInt]) -> PackedSet:
    primes = sorted({p for e in elements for p, _ in e.factors})
    code = {p: i for i, p in enumerate(primes)}
    logp = np.array([float(np_log_int(p)) for p in primes], dtype=np.float64)
    indptr = np.zeros(len(elements) + 1, dtype=np.int64)
    codes: list[int] = []
    exps: list[int] = []
    logm = np.zeros(len(elements), dtype=np.float64)
    for i, e in enumerate(elements):
        for p, k in e.factors:
            codes.append(code[p])
            exps.append(k)
        indptr[i + 1] = len(codes)
        logm[i] = sum(k * logp[code[p]] for p, k in e.factors)
    return PackedSet(indptr,
                     np.array(codes, dtype=np.int64),
                     np.array(exps, dtype=np.int64),
                     logp, logm)


def np_log_int(p: int) -> float:
    """log of a (possibly huge) positive integer."""
    import math
    return math.log(p)


def pair_gal_sum(ps: PackedSet, alpha: float) -> float:
    return _impl.pair_gal_sum(ps.indptr, ps.codes, ps.exps, ps.logp, alpha)


def pair_gal_weighted(ps: PackedSet, kind: int, scale_c: float, apar: float) -> float:
    return _impl.pair_gal_weighted(ps.indptr, ps.codes, ps.exps, ps.logp,
                                   kind, scale_c, apar)


def pair_gal_subsum(ps: PackedSet, alpha: float) -> float:
    return _impl.pair_gal_subsum(ps.indptr, ps.codes, ps.exps, ps.logp,
                                 ps.logm, alpha)


def gal_matrix(ps: PackedSet, alpha: float) -> np.ndarray:
    out = np.empty((ps.n, ps.n), dtype=np.float64)
    _impl.gal_matrix_fill(ps.indptr, ps.codes, ps.exps, ps.logp, alpha, out)
    return out


def divis_matrix(ps: PackedSet) -> np.ndarray:
    out = np.empty((ps.n, ps.n), dtype=np.float64)
    _impl.divis_matrix_fill(ps.indptr, ps.codes, ps.exps, ps.logp, ps.logm, out)
    return out


def max_subset_sum(ratio: np.ndarray, n_pick: int):
    ratio = np.ascontiguousarray(ratio, dtype=np.float64)
    return _impl.max_subset_sum(ratio, n_pick)
