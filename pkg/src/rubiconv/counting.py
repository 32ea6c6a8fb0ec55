"""Process-wide multiplication counters.

Wall-clock numbers do not transfer between machines; multiplication counts
do.  Every compute kernel in this package reports its semantic cost here so
benchmarks and scaling tests can compare algorithms by counted work.
Counting is a no-op unless a ``count_ops`` block is active.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator


@dataclass
class OpCounts:
    """Tallies recorded while a ``count_ops`` block is active.

    complex_muls: scalar complex multiplications (one per product inside a
        GEMM or Hadamard step).
    real_muls: real multiplications; a complex product contributes 4 in
        standard mode and 3 in karatsuba mode, a real multiply-accumulate
        in the direct baselines contributes 1.
    built_elements: elements written while constructing layout-adaptive
        structures (twiddles, block DFT matrices, index maps).
    """

    complex_muls: int = 0
    real_muls: int = 0
    built_elements: int = 0


_ACTIVE: list[OpCounts] = []


@contextmanager
def count_ops() -> Iterator[OpCounts]:
    """Collect operation counts for everything executed inside the block."""
    counts = OpCounts()
    _ACTIVE.append(counts)
    try:
        yield counts
    finally:
        _ACTIVE.remove(counts)


def add_complex_muls(n: int, real_muls_each: int = 4) -> None:
    if _ACTIVE:
        n = int(n)
        for counts in _ACTIVE:
            counts.complex_muls += n
            counts.real_muls += n * real_muls_each


def add_real_muls(n: int) -> None:
    if _ACTIVE:
        n = int(n)
        for counts in _ACTIVE:
            counts.real_muls += n


def add_built_elements(n: int) -> None:
    if _ACTIVE:
        n = int(n)
        for counts in _ACTIVE:
            counts.built_elements += n
