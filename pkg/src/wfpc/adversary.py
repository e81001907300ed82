"""Cautious-minority adversary.

The adversary holds a fraction ``q`` of the total weight spread evenly over
``round(q * N)`` identities. Every identity answers every query in round
``t + 1`` with the opinion held by the lighter (weight-wise) honest camp at
round ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .weights import InvalidParameterError, WeightVector, zipf_weights

CAUTIOUS = "cautious-minority"
NONE = "none"


@dataclass(frozen=True)
class AdversaryConfig:
    q: float = 0.0
    strategy: str = CAUTIOUS

    def __post_init__(self):
        if self.strategy not in (CAUTIOUS, NONE):
            raise InvalidParameterError(f"unknown adversary strategy {self.strategy!r}")
        if not 0 <= self.q < 1:
            raise InvalidParameterError(f"q must lie in [0, 1), got {self.q!r}")

    def adversarial_count(self, N: int) -> int:
        if self.strategy == NONE:
            return 0
        return int(round(self.q * N))


@dataclass(frozen=True)
class Population:
    """Honest nodes first, in rank order, then the adversarial identities."""

    weights: WeightVector
    adversarial: np.ndarray  # bool mask

    @property
    def honest(self) -> np.ndarray:
        return ~self.adversarial

    @property
    def n_honest(self) -> int:
        return int(self.honest.sum())

    @property
    def roles(self) -> list[str]:
        return ["adversarial" if a else "honest" for a in self.adversarial]


def build_population(adv: AdversaryConfig, N: int, s: float = 0.0, honest: WeightVector | None = None) -> Population:
    """``N`` identities: ``A = round(q * N)`` adversarial, ``N - A`` honest.

    Honest mass ``1 - q`` follows ``Zipf(s, N - A)`` unless an explicit
    honest weight vector of length ``N - A`` is given. Each adversarial
    identity holds ``q / A``.
    """
    A = adv.adversarial_count(N)
    if A >= N:
        raise InvalidParameterError("adversary would own every identity")
    if honest is None:
        honest = zipf_weights(s, N - A)
    elif len(honest) != N - A:
        raise InvalidParameterError(f"expected {N - A} honest weights, got {len(honest)}")
    q = adv.q if A else 0.0
    ranked = honest.ranked * (1.0 - q)
    masses = np.concatenate([ranked, np.full(A, q / A)]) if A else ranked
    mask = np.zeros(N, dtype=bool)
    mask[N - A :] = True
    return Population(WeightVector(masses), mask)


def adversary_opinion(opinions, weights) -> int:
    """Opinion of the lighter honest camp; an exact tie answers 0."""
    s = np.asarray(opinions)
    m = np.asarray(weights, dtype=float)
    if s.size == 0:
        raise InvalidParameterError("need at least one honest node")
    mass_one = m[s == 1].sum()
    mass_zero = m[s == 0].sum()
    return 1 if mass_one < mass_zero else 0
