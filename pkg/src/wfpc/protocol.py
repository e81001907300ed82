"""FPC node update rules with weighted sampling and weighted quorum means.

Round 1 compares the quorum mean against the fixed threshold ``tau``; every
later round compares it against a threshold ``U_t`` drawn uniformly from
``[beta, 1 - beta]`` and shared by all nodes. A node finalizes once its
opinion has survived ``l`` consecutive random-threshold rounds unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .sampling import check_seed, sample_quorum  # noqa: F401  (sample_quorum re-exported)
from .scheme import FAIR, VotingScheme
from .weights import InvalidParameterError

HONEST = "honest"
ADVERSARIAL = "adversarial"


class NoRepliesError(ValueError):
    """No queried node replied; the caller keeps its previous opinion."""


@dataclass(frozen=True)
class NodeState:
    opinion: int
    counter: int = 0
    finalized: bool = False
    role: str = HONEST


@dataclass(frozen=True)
class ProtocolConfig:
    N: int = 100
    k: int = 20
    tau: float = 0.66
    beta: float = 0.3
    l: int = 10
    max_it: int = 50
    scheme: VotingScheme = field(default=FAIR)
    seed: int = 0
    # probability that a single query goes unanswered
    reply_drop: float = 0.0

    def __post_init__(self):
        if self.N < 1:
            raise InvalidParameterError("N must be >= 1")
        if self.k < 1:
            raise InvalidParameterError("k must be >= 1")
        if not 0 <= self.tau <= 1:
            raise InvalidParameterError("tau must lie in [0, 1]")
        if not 0 <= self.beta <= 0.5:
            raise InvalidParameterError("beta must lie in [0, 1/2]")
        if not 1 <= self.l <= self.max_it:
            raise InvalidParameterError("need 1 <= l <= max_it")
        if not 0 <= self.reply_drop < 1:
            raise InvalidParameterError("reply_drop must lie in [0, 1)")
        check_seed(self.seed)

    def replace(self, **changes) -> "ProtocolConfig":
        return replace(self, **changes)


def threshold_sequence(rng: np.random.Generator, beta: float, length: int) -> np.ndarray:
    """Common thresholds ``U_1..U_length``, uniform on ``[beta, 1 - beta]``."""
    return beta + (1.0 - 2.0 * beta) * rng.random(length)


def eta(opinions: Sequence[int], g_values: Sequence[float], replied: Sequence[bool] | None = None) -> float:
    """Weighted mean ``sum g_j s_j / sum g_j`` over the replies received."""
    s = np.asarray(opinions, dtype=float)
    g = np.asarray(g_values, dtype=float)
    if replied is not None:
        mask = np.asarray(replied, dtype=bool)
        s, g = s[mask], g[mask]
    if s.size == 0:
        raise NoRepliesError("no replies received")
    if np.any(g <= 0):
        raise InvalidParameterError("opinion weights must be positive")
    return float(np.dot(g, s) / g.sum())


def update_opinion(state: NodeState, eta: float, round: int, tau: float, u: float, l: int) -> NodeState:
    """Apply one round's update to a single node.

    ``round == 1`` uses ``tau`` (inclusive) and leaves the counter alone;
    later rounds use the shared threshold ``u`` and keep the opinion on an
    exact tie.
    """
    if round < 1:
        raise InvalidParameterError("rounds are numbered from 1")
    if state.finalized:
        raise ValueError("finalized nodes do not update")
    if round == 1:
        return replace(state, opinion=int(eta >= tau))
    if eta > u:
        new = 1
    elif eta < u:
        new = 0
    else:
        new = state.opinion
    counter = state.counter + 1 if new == state.opinion else 0
    return replace(state, opinion=new, counter=counter, finalized=counter >= l)


def update_opinions(
    opinions: np.ndarray,
    counters: np.ndarray,
    finalized: np.ndarray,
    eta: np.ndarray,
    round: int,
    tau: float,
    u: float,
    l: int,
    active: np.ndarray | None = None,
) -> None:
    """Vectorized :func:`update_opinion`, in place, on nodes in ``active``.

    ``active`` defaults to every non-finalized node; ``eta`` entries outside
    it are ignored.
    """
    if active is None:
        active = ~finalized
    e = eta[active]
    old = opinions[active]
    if round == 1:
        opinions[active] = e >= tau
        return
    new = np.where(e > u, 1, np.where(e < u, 0, old)).astype(opinions.dtype)
    c = np.where(new == old, counters[active] + 1, 0)
    opinions[active] = new
    counters[active] = c
    finalized[active] = c >= l


def majority_update(eta: float, prev: int) -> int:
    """Strict majority, keeping the previous opinion on a tie."""
    if eta > 0.5:
        return 1
    if eta < 0.5:
        return 0
    return prev


def majority_reduction_check(
    config: ProtocolConfig | None = None,
    grid: int = 101,
    random_pairs: int = 1000,
    seed: int = 0,
) -> bool:
    """Check that ``tau = beta = 1/2`` turns the update into plain majority.

    Compares the random-threshold rule against :func:`majority_update` on a
    grid ``eta in {0, 1/(grid-1), ..., 1}`` and on random ``(eta, prev)``
    pairs, for both previous opinions. The first round has no previous
    opinion, so it is compared only off the tie.
    """
    if config is None:
        config = ProtocolConfig(N=1, k=1, tau=0.5, beta=0.5, l=1, max_it=1)
    if config.tau != 0.5 or config.beta != 0.5:
        raise InvalidParameterError("majority reduction needs tau = beta = 1/2")
    rng = np.random.default_rng(seed)
    u = threshold_sequence(rng, config.beta, 1)[0]
    etas = np.concatenate([np.arange(grid) / (grid - 1), rng.random(random_pairs)])
    for e in etas.tolist():
        for prev in (0, 1):
            got = update_opinion(NodeState(prev), e, 2, config.tau, u, config.l).opinion
            if got != majority_update(e, prev):
                return False
        if e != 0.5 and update_opinion(NodeState(0), e, 1, config.tau, u, config.l).opinion != majority_update(e, 0):
            return False
    return True
