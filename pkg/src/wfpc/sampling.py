"""Seeded randomness shared by the simulator and the Monte-Carlo estimators.

Generator family: numpy ``PCG64`` fed by ``SeedSequence``. A repetition
seed is ``SeedSequence(base_seed, spawn_key=(rep,)).generate_state(1,
uint64)[0]``; a run seed is split into independent child streams with
``SeedSequence(seed).spawn``.
"""

from __future__ import annotations

import numpy as np

_U64 = (1 << 64) - 1


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed <= _U64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def derive_seed(base_seed: int, index: int) -> int:
    """Deterministic per-repetition seed from ``(base_seed, index)``."""
    ss = np.random.SeedSequence(check_seed(base_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def child_generators(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(check_seed(seed)).spawn(n)]


def make_cdf(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0):
        raise ValueError("probabilities must be a non-empty non-negative vector")
    cdf = np.cumsum(p)
    if cdf[-1] <= 0:
        raise ValueError("probabilities sum to zero")
    return cdf / cdf[-1]


def sample_quorum(rng: np.random.Generator, probs, k: int, size: int | None = None, cdf=None) -> np.ndarray:
    """Draw ``k`` node indices with replacement (inverse-CDF sampling).

    With ``size`` the result has shape ``(size, k)``: one quorum per row.
    Zero-probability nodes are never drawn. A precomputed ``cdf`` from
    :func:`make_cdf` may be passed to skip recomputation.
    """
    if k < 1:
        raise ValueError("quorum size must be >= 1")
    if cdf is None:
        cdf = make_cdf(probs)
    shape = (k,) if size is None else (size, k)
    return np.searchsorted(cdf, rng.random(shape), side="right")
