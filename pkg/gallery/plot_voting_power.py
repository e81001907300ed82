"""
Who gets heard in a weighted quorum?
====================================

A node's voting power is the share of a quorum's opinion it controls on
average. This walk-through compares the fair scheme, where nodes are queried
in proportion to their weight and every reply counts once, with the
alternative of querying uniformly and weighting the replies instead.
"""

# %%
# Two nodes holding 2/3 and 1/3 of the weight. Under the fair scheme the
# voting power matches the weight for every quorum size.
from fractions import Fraction

import numpy as np

from wfpc import FAIR, Constant, Identity, VotingScheme, fairness_gap, voting_power_exact, zipf_weights

m = [Fraction(2, 3), Fraction(1, 3)]
for k in (1, 5, 20):
    v = voting_power_exact(m, FAIR, k, precision="exact").exact
    print(f"fair, k={k:2d}: {[str(x) for x in v]}")

# %%
# Query uniformly and weight the replies by mana: the heavy node is
# under-represented, and the shortfall shrinks only slowly with k.
uniform = VotingScheme(f=Constant, g=Identity)
for k in (1, 2, 5, 10, 40):
    v = voting_power_exact(m, uniform, k, precision="exact").exact[0]
    print(f"uniform sampling, k={k:2d}: v_1 = {v} ~ {float(v):.4f}  (weight 0.6667)")

# %%
# Splitting a node into two identities is neutral under the fair scheme and
# profitable under uniform sampling (negative gap: the parts gain power).
w = zipf_weights(1.0, 4)
for scheme in (FAIR, uniform):
    gaps = [fairness_gap(w, scheme, 6, node=0, x=x) for x in (0.1, 0.25, 0.5)]
    print(f"{scheme}: gaps {np.round(gaps, 6).tolist()}")
