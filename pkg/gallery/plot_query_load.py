"""
Query load and the gossip threshold
===================================

Under the fair scheme a node is queried in proportion to its weight, so
heavy nodes answer far more queries than light ones. Above some rank it is
cheaper for a node to broadcast its opinion than to answer each query.
"""

# %%
from wfpc import asymptotic_class, fair_gossip_threshold, query_load_profile
from wfpc.adversary import AdversaryConfig
from wfpc.complexity import compare_telemetry
from wfpc.protocol import ProtocolConfig
from wfpc.sim import ExperimentConfig, measure_query_load

N, k = 1000, 20
for s in (0.5, 1.0, 2.0):
    prof = query_load_profile(N, s, k)
    print(
        f"s={s}: top node {prof.expected[0]:8.1f} queries/round, median {prof.expected[N // 2]:.3f}, "
        f"class {asymptotic_class(s)}, gossip threshold rank {fair_gossip_threshold(N, s)}"
    )

# %%
# Simulated counts over 1000 rounds land close to the expectation.
cfg = ExperimentConfig(ProtocolConfig(N=100, k=k), AdversaryConfig(0.0), s=1.0, repetitions=1)
obs = measure_query_load(cfg, rounds=1000, seed=1)
rep = compare_telemetry(query_load_profile(100, 1.0, k), obs, 1000)
for rank, expected, seen, err in list(rep.rows())[:5]:
    print(f"rank {rank}: expected {expected:7.2f}, observed {seen:7.2f}, rel. error {err:.3f}")
print(f"worst relative error over ranks expecting >= 1 query: {rep.max_rel_error:.3f}")
