"""Compensated floating-point summation.

All quadratic-form accumulations in the package run in a fixed element
order with Neumaier's variant of Kahan summation, so results are
reproducible bit for bit across runs and across the compiled/pure
backends (both execute the identical IEEE operation sequence).
"""

from __future__ import annotations

from typing import Iterable


class NeumaierAccumulator:
    """Running sum with first-order error compensation."""

    __slots__ = ("s", "c")

    def __init__(self) -> None:
        self.s = 0.0
        self.c = 0.0

    def add(self, x: float) -> None:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def value(self) -> float:
        return self.s + self.c


def neumaier_sum(values: Iterable[float]) -> float:
    acc = NeumaierAccumulator()
    for v in values:
        acc.add(v)
    return acc.value
