"""Tolerance policy, compensated sums and subset enumeration.

Every inequality in the package is reduced to a signed margin; a margin
passes when ``margin >= -tol * scale`` where ``scale`` is the largest
absolute term that entered the sum (or the largest operand spectral radius
for Löwner comparisons).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterator, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


def passes(margin: float, scale: float, tol: float = DEFAULT_TOL) -> bool:
    return margin >= -tol * scale


@dataclass(frozen=True)
class Verdict:
    """Outcome of a sampled probe.

    ``witness`` holds the inputs of the reported tuple.  When no sampled
    tuple fails, it is the tuple of smallest margin; otherwise it is the
    most negative failing tuple, so ``passed`` always agrees with
    ``min_margin >= -tol * scale``.
    """

    min_margin: float
    witness: Any
    passed: bool
    scale: float
    tol: float = DEFAULT_TOL
    failures: int = 0
    evaluations: int = 0
    order: int | None = None
    extra: dict = field(default_factory=dict)


def select_witness(margins: np.ndarray, scales: np.ndarray, tol: float) -> tuple[int, int]:
    """Index of the reported tuple and the number of failing tuples."""
    failing = margins < -tol * scales
    nfail = int(np.count_nonzero(failing))
    if nfail == 0:
        return int(np.argmin(margins)), 0
    idx = np.flatnonzero(failing)
    return int(idx[np.argmin(margins[idx])]), nfail


def subsets(n: int, include_empty: bool = True) -> Iterator[tuple[int, ...]]:
    """Subsets of ``range(n)`` by increasing size, lexicographic within a size."""
    for k in range(0 if include_empty else 1, n + 1):
        yield from combinations(range(n), k)


def signed_fsum(terms: Sequence[float], signs: Sequence[int]) -> tuple[float, float]:
    """Correctly rounded signed sum and the largest absolute term."""
    vals = [s * t for s, t in zip(signs, terms)]
    scale = max((abs(t) for t in terms), default=0.0)
    return math.fsum(vals), scale


def compensated_sum(arrays: Sequence[np.ndarray], signs: Sequence[int]) -> np.ndarray:
    """Elementwise Neumaier summation of ``sign * array`` in the given order."""
    total = np.zeros_like(arrays[0], dtype=float)
    comp = np.zeros_like(total)
    for s, a in zip(signs, arrays):
        term = a if s > 0 else -a
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
    return total + comp
