"""End-to-end acceptance checks, one test per criterion.

Each test prints a ``criterion N: PASS|FAIL`` line; the session summary
repeats them all. Simulations use fixed seeds and are computed twice so the
determinism check can compare bytes.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from oracles import binomial_oracle
from wfpc.adversary import AdversaryConfig
from wfpc.complexity import compare_telemetry, fair_gossip_threshold, query_load_profile, telemetry_csv
from wfpc.protocol import ProtocolConfig, majority_reduction_check
from wfpc.scheme import FAIR, Constant, Identity, VotingScheme, fairness_gap, voting_power_exact, voting_power_mc
from wfpc.sim import ExperimentConfig, measure_query_load, sweep

SEED = 7
UNIFORM_SAMPLING = VotingScheme(f=Constant, g=Identity)


def _random_weights(rng, n):
    return rng.dirichlet(np.ones(n))


def test_criterion_1_fair_scheme_is_exact(verdict):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst_power = worst_gap = 0.0
    for _ in range(50):
        m = _random_weights(rng, int(rng.integers(1, 7)))
        for k in range(1, 7):
            v = voting_power_exact(m, FAIR, k).values
            worst_power = max(worst_power, float(np.max(np.abs(v - m))))
            node, x = int(rng.integers(len(m))), float(rng.uniform(0.01, 0.99))
            worst_gap = max(worst_gap, abs(fairness_gap(m, FAIR, k, node, x)))
    elapsed = time.perf_counter() - start
    ok = worst_power <= 1e-12 and worst_gap <= 1e-12 and elapsed < 60
    verdict(1, ok, f"max|v-m|={worst_power:.2e} max|gap|={worst_gap:.2e} in {elapsed:.1f}s")


def test_criterion_2_uniform_sampling_counterexample(verdict):
    start = time.perf_counter()
    m = [Fraction(2, 3), Fraction(1, 3)]
    values = [voting_power_exact(m, UNIFORM_SAMPLING, k, precision="exact").exact[0] for k in range(1, 11)]
    oracle = [binomial_oracle(Fraction(2, 3), Fraction(1, 3), k) for k in range(1, 11)]
    elapsed = time.perf_counter() - start
    ok = (
        values == oracle
        and values[0] == Fraction(1, 2)
        and values[1] == Fraction(7, 12)
        and all(v < Fraction(2, 3) for v in values)
        and len(set(values)) > 1
        and elapsed < 10
    )
    verdict(2, ok, f"v(k=1..10)={[round(float(v), 4) for v in values]} in {elapsed:.2f}s")


def test_criterion_3_monte_carlo_agrees_with_exact(verdict):
    rng = np.random.default_rng(SEED)
    schemes = [FAIR, UNIFORM_SAMPLING, VotingScheme(Identity, Identity)]
    start = time.perf_counter()
    worst = 0.0
    misses = []
    for i in range(20):
        n, k = int(rng.integers(2, 6)), int(rng.integers(1, 7))
        m = _random_weights(rng, n)
        scheme = schemes[i % len(schemes)]
        exact = voting_power_exact(m, scheme, k).values
        mc = voting_power_mc(m, scheme, k, samples=100_000, seed=int(rng.integers(2**63)))
        z = np.abs(mc.values - exact) / np.maximum(mc.std_err, 1e-300)
        z[np.abs(mc.values - exact) <= 1e-15] = 0.0
        worst = max(worst, float(z.max()))
        if np.any(z > 3):
            misses.append(i)
    elapsed = time.perf_counter() - start
    ok = not misses and elapsed < 60
    verdict(3, ok, f"max deviation {worst:.2f} SE over 20 instances, misses={misses}, {elapsed:.1f}s")


def test_criterion_4_majority_reduction(verdict):
    cfg = ProtocolConfig(tau=0.5, beta=0.5)
    ok = majority_reduction_check(cfg, grid=101, random_pairs=0)
    verdict(4, ok, "eta grid 0..1 step 0.01 x prev {0,1}")


# --- simulation-backed criteria, each computed twice for criterion 9 --------


def _telemetry_csv():
    cfg = ExperimentConfig(ProtocolConfig(N=100, k=20), AdversaryConfig(0.0), s=1.0, repetitions=1)
    observed = measure_query_load(cfg, 1000, SEED)
    report = compare_telemetry(query_load_profile(100, 1.0, 20), observed, 1000)
    return report, telemetry_csv(report)


def _fig3_sweep():
    cfg = ExperimentConfig(ProtocolConfig(N=100, k=20, seed=SEED), AdversaryConfig(0.25), s=1.0, repetitions=300)
    return sweep(cfg, "k", [5, 10, 20, 40])


def _fig2_sweeps():
    out = {}
    for s in (0.0, 2.0):
        cfg = ExperimentConfig(ProtocolConfig(N=100, k=20, seed=SEED), AdversaryConfig(0.1), s=s, repetitions=300)
        out[s] = sweep(cfg, "q", [0.1, 0.2, 0.3])
    return out


def _timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


@pytest.fixture(scope="module")
def telemetry_runs():
    return [_timed(_telemetry_csv) for _ in range(2)]


@pytest.fixture(scope="module")
def fig3_runs():
    return [_timed(_fig3_sweep) for _ in range(2)]


@pytest.fixture(scope="module")
def fig2_runs():
    return [_timed(_fig2_sweeps) for _ in range(2)]


def test_criterion_5_query_load_telemetry(verdict, telemetry_runs):
    (report, _), elapsed = telemetry_runs[0]
    total_gap = abs(report.profile.total - 20 * 100)
    ok = report.max_rel_error < 0.10 and total_gap <= 1e-9 and elapsed < 60
    verdict(5, ok, f"max rel error {report.max_rel_error:.4f}, |sum-kN|={total_gap:.1e}, {elapsed:.1f}s")


def test_criterion_6_fair_threshold_is_ceil_sqrt(verdict):
    cases = {N: fair_gossip_threshold(N, 1) for N in (4, 100, 1024, 10**6)}
    ok = all(r == math.ceil(math.sqrt(N)) for N, r in cases.items())
    verdict(6, ok, f"thresholds {cases}")


def test_criterion_7_failure_decays_with_k(verdict, fig3_runs):
    table, elapsed = fig3_runs[0]
    rates = table.failure_rates
    monotone = all(b <= a for a, b in zip(rates, rates[1:]))
    nonzero = [(k, r) for k, r in zip(table.values, rates) if r > 0]
    slope = None
    if len(nonzero) >= 3:
        ks, rs = zip(*nonzero)
        slope = float(np.polyfit(ks, np.log(rs), 1)[0])
    ok = monotone and (slope is None or slope < 0) and elapsed < 600
    slope_text = "n/a" if slope is None else f"{slope:.4f}"
    verdict(7, ok, f"k={table.values} rates={rates} log-slope={slope_text}, {elapsed:.1f}s")


def test_criterion_8_failure_grows_with_q(verdict, fig2_runs):
    tables, elapsed = fig2_runs[0]
    rates = {s: t.failure_rates for s, t in tables.items()}
    monotone = all(all(b >= a for a, b in zip(r, r[1:])) for r in rates.values())
    centralization_helps = rates[2.0][-1] <= rates[0.0][-1]
    ok = monotone and centralization_helps and elapsed < 600
    verdict(8, ok, f"q=[0.1,0.2,0.3] s=0 {rates[0.0]} s=2 {rates[2.0]}, {elapsed:.1f}s")


def test_criterion_9_reruns_are_bit_identical(verdict, telemetry_runs, fig3_runs, fig2_runs):
    same_5 = telemetry_runs[0][0][1] == telemetry_runs[1][0][1]
    same_7 = fig3_runs[0][0].to_csv() == fig3_runs[1][0].to_csv()
    same_8 = all(fig2_runs[0][0][s].to_csv() == fig2_runs[1][0][s].to_csv() for s in (0.0, 2.0))
    verdict(9, same_5 and same_7 and same_8, f"telemetry={same_5} k-sweep={same_7} q-sweeps={same_8}")
