"""
Fitting a Zipf law to a weight distribution
===========================================

Weight held by the rank-n node is modelled as proportional to n^-s. The
exponent is recovered by least squares on the log-log rank plot.
"""

# %%
import numpy as np

from wfpc import fit_zipf, zipf_weights

# A perfect Zipf profile gives back its own exponent with r^2 = 1.
print(fit_zipf(zipf_weights(1.1, 500).values))

# %%
# Real holdings are noisy. Perturb each weight multiplicatively and refit,
# once on all ranks and once on the top 50 only.
rng = np.random.default_rng(3)
noisy = zipf_weights(0.9, 2000).values * rng.lognormal(0.0, 0.3, 2000)
print("all ranks:", fit_zipf(noisy))
print("top 50   :", fit_zipf(noisy, max_rank=50))

# %%
# The fit ranks values itself, so the input order does not matter.
shuffled = rng.permutation(noisy)
print(np.isclose(fit_zipf(shuffled).s, fit_zipf(noisy).s))
