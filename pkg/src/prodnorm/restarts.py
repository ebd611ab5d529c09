"""Seeded restart harness.

Every stochastic start is a pure function of an explicit seed. Seeds for
restart ``k`` are derived through ``numpy.random.SeedSequence`` and fed to the
counter-based Philox generator, so restarts can run in any order (or
concurrently) and still reproduce bit for bit.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Protocol, TypeVar

import numpy as np

from .constants import TIE_TOL

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *path: int) -> int:
    """Hash ``(seed, *path)`` into a fresh 64-bit seed."""
    entropy = [seed & _MASK64, *(p & _MASK64 for p in path)]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])


def make_rng(seed: int, *path: int) -> np.random.Generator:
    entropy = [seed & _MASK64, *(p & _MASK64 for p in path)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


class Scored(Protocol):
    @property
    def value(self) -> float: ...

    @property
    def restart_index(self) -> int: ...


C = TypeVar("C", bound=Scored)


def run_restarts(fn: Callable[[int], C], count: int, workers: int = 1) -> list[C]:
    """Evaluate ``fn(k)`` for ``k = 0..count-1`` and return results in index order."""
    if workers <= 1 or count <= 1:
        return [fn(k) for k in range(count)]
    with ThreadPoolExecutor(max_workers=min(workers, count)) as executor:
        return list(executor.map(fn, range(count)))


def best_of(results: Sequence[C]) -> C:
    """Highest value wins; values within TIE_TOL go to the lowest restart index."""
    ordered = sorted(results, key=lambda r: r.restart_index)
    best = ordered[0]
    for r in ordered[1:]:
        if r.value > best.value + TIE_TOL:
            best = r
    logger.debug("best restart %d with value %.12g", best.restart_index, best.value)
    return best
