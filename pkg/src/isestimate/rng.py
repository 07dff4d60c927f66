"""Seeded random streams and fast Bernoulli subset sampling.

Every random draw in the package is derived from a single 64-bit seed.
Named substreams and keyed streams are built with ``numpy.random.SeedSequence``
spawn keys, so independent components can be replayed in isolation.
"""

from __future__ import annotations

import zlib

import numpy as np

from .errors import InvalidInputError

# Above this inclusion probability, plain coin flips beat geometric skipping.
_DENSE_P = 0.25


def _name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def substream(seed: int, name: str) -> np.random.Generator:
    """Generator for the named component ``name`` under the run seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_name_key(name),)))


def keyed_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator determined by ``seed`` and a tuple of non-negative ints."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def draw_seed(rng: np.random.Generator) -> int:
    """Draw a fresh 63-bit seed from ``rng``."""
    return int(rng.integers(0, 2**63 - 1))


def _check_p(p: float) -> None:
    if not (0.0 <= p <= 1.0) or np.isnan(p):
        raise InvalidInputError(f"probability must lie in [0, 1], got {p}")


def sample_bernoulli_subset(universe, p: float, rng: np.random.Generator) -> np.ndarray:
    """Include each element of ``universe`` independently with probability ``p``.

    The universe is sorted ascending first. A binomial count is drawn and that
    many distinct positions are chosen uniformly, which has the same law as
    independent coin flips.
    """
    _check_p(p)
    items = np.unique(np.asarray(universe, dtype=np.int64))
    if p == 0.0 or items.size == 0:
        return items[:0]
    if p == 1.0:
        return items
    k = int(rng.binomial(items.size, p))
    pos = np.sort(rng.choice(items.size, size=k, replace=False))
    return items[pos]


def bernoulli_batch(
    rng: np.random.Generator,
    n_rows: int,
    size: int,
    p: float,
    skip: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``n_rows`` independent Bernoulli(p) subsets of ``range(size)``.

    Returns ``(rows, cols)`` in row-major order, one entry per included
    element; empty rows simply have no entries. With ``skip`` set, the
    universe is ``range(size)`` minus that one vertex.

    Sparse draws walk the concatenated row-major stream of coin flips with
    geometric gaps, so the cost is proportional to the number of successes.
    """
    _check_p(p)
    width = size - 1 if skip is not None else size
    empty = np.zeros(0, dtype=np.int64)
    if n_rows <= 0 or width <= 0 or p == 0.0:
        return empty, empty
    total = n_rows * width
    if p >= _DENSE_P:
        flat = np.flatnonzero(rng.random(total) < p)
    else:
        mean = total * p
        chunk = int(mean + 6.0 * np.sqrt(mean) + 16)
        pieces = []
        last = -1
        while True:
            gaps = rng.geometric(p, size=chunk)
            pos = last + np.cumsum(gaps)
            pieces.append(pos)
            last = int(pos[-1])
            if last >= total:
                break
            chunk = max(16, chunk // 4)
        flat = np.concatenate(pieces)
        flat = flat[flat < total]
    rows = flat // width
    cols = flat % width
    if skip is not None:
        cols = cols + (cols >= skip)
    return rows, cols
