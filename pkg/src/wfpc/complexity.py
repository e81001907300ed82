"""Query load under Zipf weights and the fair gossip threshold.

With sampling proportional to weight, a node of rank ``h`` answers on
average ``k * N * h**-s / sum_n n**-s`` queries per round. Asymptotically
(``N -> inf``) that is

* ``Theta(N**s h**-s)`` for ``s < 1``,
* ``Theta(N / log N * h**-1)`` for ``s == 1``,
* ``Theta(N h**-s)`` for ``s > 1``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .weights import InvalidInputError, InvalidParameterError, zipf_constant


@dataclass(frozen=True)
class QueryLoadProfile:
    expected: np.ndarray  # per rank, per round
    N: int
    s: float
    k: int

    @property
    def total(self) -> float:
        return float(self.expected.sum())


@dataclass(frozen=True)
class TelemetryReport:
    profile: QueryLoadProfile
    observed_mean: np.ndarray
    rel_error: np.ndarray
    max_rel_error: float
    rounds: int

    def rows(self):
        for r in range(self.profile.N):
            yield r + 1, float(self.profile.expected[r]), float(self.observed_mean[r]), float(self.rel_error[r])


def _check_Ns(N: int, s: float):
    if N < 1:
        raise InvalidParameterError("N must be >= 1")
    if s < 0:
        raise InvalidParameterError("s must be >= 0")


def expected_queries(N: int, s: float, rank: int, k: int) -> float:
    _check_Ns(N, s)
    if not 1 <= rank <= N:
        raise InvalidParameterError(f"rank {rank} outside [1, {N}]")
    return k * N * rank ** (-float(s)) * zipf_constant(s, N)


def query_load_profile(N: int, s: float, k: int) -> QueryLoadProfile:
    _check_Ns(N, s)
    ranks = np.arange(1, N + 1, dtype=float)
    return QueryLoadProfile(k * N * ranks ** (-float(s)) * zipf_constant(s, N), N, s, k)


def asymptotic_class(s: float, which: str = "rank") -> str:
    """Order label for the per-round query load; ``which="top"`` sets ``h = 1``."""
    if s < 0:
        raise InvalidParameterError("s must be >= 0")
    top = which in ("top", "top-rank")
    if not top and which not in ("rank", "rank-function"):
        raise ValueError(f"unknown selector {which!r}")
    if s < 1:
        return f"Θ(N^{s:g})" if top else f"Θ(N^{s:g} h^-{s:g})"
    if s == 1:
        return "Θ(N/log N)" if top else "Θ(N/log N · h^-1)"
    return "Θ(N)" if top else f"Θ(N h^-{s:g})"


def _ceil_power(N: int, exponent: float) -> int:
    x = N**exponent
    r = round(x)
    # exact powers such as 10**4 ** 0.25 may land a hair above the integer
    if abs(x - r) <= 1e-9 * max(1.0, x):
        return max(int(r), 1)
    return math.ceil(x)


def fair_gossip_threshold(N: int, s: float) -> int:
    """Rank cutoff equalizing gossip and query load.

    ``ceil(N**(s/(s+1)))`` for ``s <= 1`` and ``ceil(N**(1/(s+1)))`` for
    ``s > 1``; both equal ``ceil(sqrt(N))`` at ``s = 1``.
    """
    _check_Ns(N, s)
    if s == 1:
        return math.isqrt(N - 1) + 1
    exponent = s / (s + 1) if s < 1 else 1 / (s + 1)
    return _ceil_power(N, exponent)


def gossip_message_load(N: int, s: float) -> int:
    """Messages each node handles at the fair threshold, ``O(sqrt(N))`` worst case."""
    return fair_gossip_threshold(N, s)


def compare_telemetry(profile: QueryLoadProfile, observed, rounds: int) -> TelemetryReport:
    """Relative error of observed per-rank query counts against the profile.

    ``observed`` holds total queries received per rank over ``rounds``.
    The headline ``max_rel_error`` covers ranks expecting at least one query
    per round.
    """
    obs = np.asarray(observed, dtype=float)
    if obs.shape != profile.expected.shape:
        raise InvalidInputError(f"observed has shape {obs.shape}, profile has {profile.expected.shape}")
    if rounds < 1:
        raise InvalidInputError("rounds must be >= 1")
    mean = obs / rounds
    exp = profile.expected
    rel = np.divide(np.abs(mean - exp), exp, out=np.full_like(exp, np.inf), where=exp > 0)
    rel[(exp == 0) & (mean == 0)] = 0.0
    head = exp >= 1
    max_err = float(rel[head].max()) if head.any() else 0.0
    return TelemetryReport(profile, mean, rel, max_err, rounds)


def telemetry_gof(observed, probs) -> float:
    """Chi-square goodness-of-fit p-value of query counts against ``probs``."""
    obs = np.asarray(observed, dtype=float)
    p = np.asarray(probs, dtype=float)
    keep = p > 0
    if np.any(obs[~keep] > 0):
        return 0.0
    exp = p[keep] / p[keep].sum() * obs.sum()
    return float(stats.chisquare(obs[keep], exp).pvalue)


def telemetry_csv(report: TelemetryReport | QueryLoadProfile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "expected", "observed_mean", "rel_error"])
    if isinstance(report, QueryLoadProfile):
        for r, e in enumerate(report.expected, 1):
            w.writerow([r, repr(float(e)), "", ""])
    else:
        for r, e, o, err in report.rows():
            w.writerow([r, repr(e), repr(o), repr(err)])
    return buf.getvalue()
