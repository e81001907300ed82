"""Agreement-failure experiments for weighted FPC under a cautious adversary.

A run builds the population (Zipf honest weights plus adversarial
identities), gives opinion 1 to the heaviest honest nodes holding more than
``p0`` of the honest mass, and iterates query rounds until every honest node
has finalized or ``max_it`` rounds have passed. Repetitions use seeds
derived from the base seed, so every table is reproducible bit for bit.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .adversary import AdversaryConfig, Population, adversary_opinion, build_population
from .complexity import QueryLoadProfile, compare_telemetry
from .protocol import ProtocolConfig, threshold_sequence, update_opinions
from .sampling import child_generators, derive_seed, make_cdf, sample_quorum
from .scheme import sampling_probs
from .weights import InvalidParameterError, WeightVector

log = logging.getLogger(__name__)

SWEEP_COLUMNS = ["axis_value", "repetitions", "failures", "failure_rate", "ci_low", "ci_high", "mean_rounds"]
AXES = ("q", "k", "s")


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    adversary: AdversaryConfig = field(default_factory=AdversaryConfig)
    p0: float = 0.66
    s: float = 1.0
    repetitions: int = 300
    failure_threshold: float = 0.01

    def __post_init__(self):
        if not 0 <= self.p0 <= 1:
            raise InvalidParameterError("p0 must lie in [0, 1]")
        if self.s < 0:
            raise InvalidParameterError("s must be >= 0")
        if self.repetitions < 1:
            raise InvalidParameterError("repetitions must be >= 1")

    @property
    def seed(self) -> int:
        return self.protocol.seed

    def with_axis(self, axis: str, value) -> "ExperimentConfig":
        if axis == "q":
            return replace(self, adversary=replace(self.adversary, q=float(value)))
        if axis == "k":
            return replace(self, protocol=self.protocol.replace(k=int(value)))
        if axis == "s":
            return replace(self, s=float(value))
        raise ValueError(f"unknown sweep axis {axis!r} (expected one of {AXES})")

    def to_dict(self) -> dict:
        p = self.protocol
        return {
            "N": p.N,
            "k": p.k,
            "tau": p.tau,
            "beta": p.beta,
            "l": p.l,
            "max_it": p.max_it,
            "f": p.scheme.f.name,
            "g": p.scheme.g.name,
            "seed": p.seed,
            "reply_drop": p.reply_drop,
            "q": self.adversary.q,
            "strategy": self.adversary.strategy,
            "p0": self.p0,
            "s": self.s,
            "repetitions": self.repetitions,
            "failure_threshold": self.failure_threshold,
        }


@dataclass
class RunRecord:
    seed: int
    failure: bool
    terminated: bool  # every honest node finalized before the round cap
    rounds: int
    queries: np.ndarray  # queries received per node, honest ranks then adversarial
    final_opinions: np.ndarray
    quorums: int = 0  # quorums drawn over the run
    trace: dict | None = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[RunRecord]

    @property
    def repetitions(self) -> int:
        return len(self.records)

    @property
    def failures(self) -> int:
        return sum(r.failure for r in self.records)

    @property
    def failure_rate(self) -> float:
        return self.failures / self.repetitions

    @property
    def confidence_interval(self) -> tuple[float, float]:
        """Clopper-Pearson 95% interval for the failure rate."""
        ci = stats.binomtest(self.failures, self.repetitions).proportion_ci(0.95, method="exact")
        return float(ci.low), float(ci.high)

    @property
    def mean_rounds(self) -> float:
        return float(np.mean([r.rounds for r in self.records]))

    @property
    def queries(self) -> np.ndarray:
        return np.sum([r.queries for r in self.records], axis=0)

    def query_telemetry(self):
        """Observed query load against ``k * p_i`` per quorum actually drawn."""
        cfg = self.config
        p = cfg.protocol
        pop = build_population(cfg.adversary, p.N, cfg.s)
        probs = sampling_probs(pop.weights, p.scheme)
        total_rounds = sum(r.rounds for r in self.records)
        quorums_per_round = sum(r.quorums for r in self.records) / total_rounds
        profile = QueryLoadProfile(p.k * quorums_per_round * probs, p.N, cfg.s, p.k)
        return compare_telemetry(profile, self.queries, total_rounds)

    def row(self, axis_value) -> list:
        lo, hi = self.confidence_interval
        return [axis_value, self.repetitions, self.failures, self.failure_rate, lo, hi, self.mean_rounds]


def assign_initial_opinions(w, p0: float) -> np.ndarray:
    """Opinion 1 for the heaviest nodes whose cumulative mass first exceeds ``p0``.

    Returns opinions in the node order of ``w``.
    """
    if not isinstance(w, WeightVector):
        w = WeightVector.from_values(w)
    order = w.order
    cum = np.cumsum(w.values[order])
    over = np.flatnonzero(cum > p0)
    n_ones = over[0] + 1 if over.size else len(w)
    opinions = np.zeros(len(w), dtype=np.int8)
    opinions[order[:n_ones]] = 1
    return opinions


def agreement_failure(final_opinions, threshold: float = 0.01) -> bool:
    """True when at least ``threshold`` of the nodes hold the minority opinion."""
    s = np.asarray(final_opinions)
    n = s.size
    if n == 0:
        raise InvalidParameterError("need at least one honest node")
    ones = int(np.count_nonzero(s))
    return min(ones, n - ones) / n >= threshold


def run_once(config: ExperimentConfig, seed: int, trace: bool = False) -> RunRecord:
    """One seeded run; see the module docstring for the round structure."""
    p = config.protocol
    pop: Population = build_population(config.adversary, p.N, config.s)
    H = pop.n_honest
    A = p.N - H
    masses = pop.weights.values
    honest_mass = masses[:H]

    rng_u, rng_q, rng_drop = child_generators(seed, 3)
    thresholds = threshold_sequence(rng_u, p.beta, p.max_it)
    cdf = make_cdf(sampling_probs(pop.weights, p.scheme))
    gv = p.scheme.g(masses)

    opinions = assign_initial_opinions(WeightVector(honest_mass), config.p0)
    counters = np.zeros(H, dtype=np.int64)
    finalized = np.zeros(H, dtype=bool)
    queries = np.zeros(p.N, dtype=np.int64)
    replies = np.empty(p.N, dtype=np.int8)
    eta = np.zeros(H)
    steps = [] if trace else None

    rounds = 0
    quorums = 0
    for r in range(1, p.max_it + 1):
        replies[:H] = opinions
        adv_reply = -1
        if A:
            # the adversary reacts to the honest opinions of the previous round
            adv_reply = adversary_opinion(opinions, honest_mass)
            replies[H:] = adv_reply
        askers = np.flatnonzero(~finalized)
        idx = sample_quorum(rng_q, None, p.k, size=askers.size, cdf=cdf)
        queries += np.bincount(idx.ravel(), minlength=p.N)
        quorums += askers.size
        g = gv[idx]
        if p.reply_drop:
            g = g * (rng_drop.random(idx.shape) >= p.reply_drop)
        num = (g * replies[idx]).sum(axis=1)
        den = g.sum(axis=1)
        answered = den > 0
        eta[askers[answered]] = num[answered] / den[answered]
        active = np.zeros(H, dtype=bool)
        active[askers[answered]] = True
        u = thresholds[r - 2] if r >= 2 else np.nan
        update_opinions(opinions, counters, finalized, eta, r, p.tau, u, p.l, active=active)
        rounds = r
        if trace:
            steps.append((opinions.copy(), counters.copy(), finalized.copy(), adv_reply))
        if finalized.all():
            break

    record = RunRecord(
        seed=seed,
        failure=agreement_failure(opinions, config.failure_threshold),
        terminated=bool(finalized.all()),
        rounds=rounds,
        queries=queries,
        final_opinions=opinions.copy(),
        quorums=quorums,
    )
    if trace:
        record.trace = {
            "opinions": np.array([s[0] for s in steps]),
            "counters": np.array([s[1] for s in steps]),
            "finalized": np.array([s[2] for s in steps]),
            "adversary": np.array([s[3] for s in steps]),
            "thresholds": thresholds,
            "initial": assign_initial_opinions(WeightVector(honest_mass), config.p0),
        }
    return record


def _run_seeds(args):
    config, seeds = args
    return [run_once(config, s) for s in seeds]


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """All repetitions of one configuration; ``workers > 1`` uses processes."""
    seeds = [derive_seed(config.seed, i) for i in range(config.repetitions)]
    if workers <= 1:
        records = [run_once(config, s) for s in seeds]
    else:
        chunks = [seeds[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_run_seeds, [(config, c) for c in chunks]))
        by_seed = {rec.seed: rec for part in parts for rec in part}
        records = [by_seed[s] for s in seeds]
    return ExperimentResult(config, records)


@dataclass
class SweepTable:
    axis: str
    results: list[tuple[float, ExperimentResult]]

    @property
    def values(self) -> list:
        return [v for v, _ in self.results]

    @property
    def failure_rates(self) -> list[float]:
        return [r.failure_rate for _, r in self.results]

    def rows(self) -> list[list]:
        return [res.row(v) for v, res in self.results]

    def to_csv(self) -> str:
        return rows_to_csv(self.rows())


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def sweep(config: ExperimentConfig, axis: str, values, workers: int = 1) -> SweepTable:
    """Failure rate per axis value; every point reuses the same repetition seeds."""
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r} (expected one of {AXES})")
    values = sorted(values)
    if not values:
        raise InvalidParameterError("sweep needs at least one value")
    out = []
    for v in values:
        res = run_experiment(config.with_axis(axis, v), workers=workers)
        log.info("%s=%s: %d/%d failures", axis, v, res.failures, res.repetitions)
        out.append((v, res))
    return SweepTable(axis, out)


def measure_query_load(config: ExperimentConfig, rounds: int, seed: int) -> np.ndarray:
    """Queries received per node over ``rounds`` rounds with nobody finalizing.

    The round cap and the finalization streak are both set to ``rounds``, so
    every honest node queries in every round.
    """
    cfg = replace(config, protocol=config.protocol.replace(max_it=rounds, l=rounds))
    rec = run_once(cfg, seed)
    assert rec.rounds == rounds
    return rec.queries
