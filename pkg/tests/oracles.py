"""Independent oracles shared by the test modules."""

import itertools
import math
from fractions import Fraction


def brute_force_power(m, f_alpha, g_alpha, k):
    """Voting power by walking every ordered quorum of ``k`` draws, in rationals.

    Shares nothing with the library: no count vectors, no multinomials.
    ``f_alpha``/``g_alpha`` are integer exponents (0 meaning the constant 1).
    """
    m = [Fraction(x) for x in m]
    total = sum(m)
    m = [x / total for x in m]

    def fn(alpha, x):
        return Fraction(1) if alpha == 0 else x**alpha

    fm = [fn(f_alpha, x) for x in m]
    p = [x / sum(fm) for x in fm]
    g = [fn(g_alpha, x) for x in m]
    v = [Fraction(0)] * len(m)
    for quorum in itertools.product(range(len(m)), repeat=k):
        prob = math.prod((p[j] for j in quorum), start=Fraction(1))
        if prob == 0:
            continue
        mass = sum(g[j] for j in quorum)
        if mass == 0:
            continue
        for j in quorum:
            v[j] += prob * g[j] / mass
    return v


def binomial_oracle(a, b, k):
    """E[X a / (X a + (k - X) b)] for X ~ Binomial(k, 1/2), in rationals."""
    return sum(
        (Fraction(math.comb(k, x), 2**k) * Fraction(x * a, x * a + (k - x) * b) for x in range(1, k + 1)),
        start=Fraction(0),
    )

