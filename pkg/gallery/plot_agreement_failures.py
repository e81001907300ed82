"""
Agreement failures under a cautious adversary
=============================================

A coalition holding a fraction q of the weight always answers with the
honest minority opinion of the previous round. Each repetition starts with
about 66% of the honest weight on opinion 1 and counts as a failure when at
least 1% of honest nodes end up disagreeing with the rest.

Runs take a few seconds each at N=100 with 300 repetitions per point.
"""

# %%
from wfpc.adversary import AdversaryConfig
from wfpc.protocol import ProtocolConfig
from wfpc.sim import ExperimentConfig, run_once, sweep

base = ExperimentConfig(ProtocolConfig(N=100, k=20, seed=7), AdversaryConfig(0.25), s=1.0, repetitions=300)

# %%
# Bigger quorums average out the adversary's replies.
print(sweep(base, "k", [5, 10, 20, 40]).to_csv())

# %%
# A stronger coalition does more damage. Compare a flat weight distribution
# with a centralized one.
for s in (0.0, 2.0):
    print(f"s={s}")
    print(sweep(base.with_axis("s", s), "q", [0.1, 0.2, 0.3]).to_csv())

# %%
# One run in detail: the fraction of honest nodes holding opinion 1 per round.
rec = run_once(base, seed=12345, trace=True)
share = rec.trace["opinions"].mean(axis=1)
print(" ".join(f"{x:.2f}" for x in share))
print(f"rounds={rec.rounds} failure={rec.failure}")
