"""Voting schemes ``(f, g)`` and voting power.

``f`` shapes the probability that a node is queried, ``g`` the weight its
reply carries inside the quorum mean. A node's voting power is its expected
share of a quorum's weighted mean; the scheme is fair when that share is
additive under splitting and merging of weight.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln, xlogy

from .sampling import make_cdf, sample_quorum
from .weights import InvalidParameterError, WeightVector, split_weight

DEFAULT_BUDGET = 10**7


class DegenerateSchemeError(ValueError):
    """All sampling weights vanish."""


class InvalidSchemeError(ValueError):
    """A weight function is not strictly positive where it must be."""


class EnumerationTooLargeError(RuntimeError):
    """Exact enumeration would exceed the term budget; use Monte Carlo."""


@dataclass(frozen=True)
class WeightFn:
    """``m -> m**alpha``; ``alpha == 0`` is the constant 1 (also at ``m == 0``)."""

    alpha: float = 1.0

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a) or a < 0:
            raise InvalidParameterError(f"power exponent must be >= 0, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def name(self) -> str:
        if self.alpha == 0:
            return "const"
        if self.alpha == 1:
            return "id"
        return f"pow:{self.alpha:g}"

    @classmethod
    def parse(cls, text: str) -> "WeightFn":
        """Parse ``const``, ``id`` or ``pow:<alpha>``."""
        t = text.strip().lower()
        if t in ("const", "constant", "1"):
            return cls(0.0)
        if t in ("id", "identity"):
            return cls(1.0)
        if t.startswith(("pow:", "power:")):
            return cls(float(t.split(":", 1)[1]))
        raise ValueError(f"unknown weight function {text!r} (expected const, id or pow:<alpha>)")

    def __call__(self, m):
        if isinstance(m, Fraction):
            if self.alpha == 0:
                return Fraction(1)
            if not self.alpha.is_integer():
                raise ValueError("exact arithmetic needs an integer exponent")
            return m ** int(self.alpha)
        m = np.asarray(m, dtype=float)
        if self.alpha == 0:
            return np.ones_like(m)
        return m**self.alpha


Constant = WeightFn(0.0)
Identity = WeightFn(1.0)


def Power(alpha: float) -> WeightFn:
    return WeightFn(alpha)


@dataclass(frozen=True)
class VotingScheme:
    f: WeightFn = Identity
    g: WeightFn = Constant

    def __str__(self) -> str:
        return f"(f={self.f.name}, g={self.g.name})"


FAIR = VotingScheme(Identity, Constant)


@dataclass
class VotingPowerReport:
    values: np.ndarray
    method: str
    samples: int | None = None
    std_err: np.ndarray | None = None
    exact: tuple[Fraction, ...] | None = None

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, i):
        return self.values[i]


def _as_array(w) -> np.ndarray:
    if isinstance(w, WeightVector):
        return w.values
    return WeightVector.from_values(float(x) for x in w).values


def sampling_probs(w, scheme: VotingScheme) -> np.ndarray:
    """``p_j = f(m_j) / sum_i f(m_i)``."""
    fm = scheme.f(_as_array(w))
    total = fm.sum()
    if total <= 0:
        raise DegenerateSchemeError(f"f={scheme.f.name} vanishes on every node")
    return fm / total


def composition_count(k: int, N: int) -> int:
    return math.comb(k + N - 1, N - 1)


def compositions(k: int, N: int, chunk: int = 1 << 16):
    """Yield arrays of shape ``(c, N)`` covering every ``y >= 0`` with ``sum(y) == k``.

    Stars and bars: each choice of ``N - 1`` bar slots among ``k + N - 1``
    gives one composition, produced in lexicographic order of the bars.
    """
    if N == 1:
        yield np.array([[k]], dtype=np.int64)
        return
    slots = k + N - 1
    bars = itertools.combinations(range(slots), N - 1)
    while True:
        flat = np.fromiter(itertools.chain.from_iterable(itertools.islice(bars, chunk)), dtype=np.int64)
        if flat.size == 0:
            return
        b = flat.reshape(-1, N - 1)
        edges = np.concatenate([np.full((b.shape[0], 1), -1), b, np.full((b.shape[0], 1), slots)], axis=1)
        yield np.diff(edges, axis=1) - 1


def _check_budget(k: int, N: int, budget: int):
    if k < 1:
        raise InvalidParameterError("quorum size k must be >= 1")
    terms = N * composition_count(k, N)
    if terms > budget:
        raise EnumerationTooLargeError(
            f"exact enumeration needs {terms} terms (budget {budget}); use the Monte-Carlo method"
        )


def voting_power_exact(
    w,
    scheme: VotingScheme,
    k: int,
    precision: str = "float",
    budget: int = DEFAULT_BUDGET,
) -> VotingPowerReport:
    """Voting power by enumerating every quorum count vector.

    ``v_i = sum_y multinomial(k; y) prod_j p_j**y_j * y_i g_i / sum_n y_n g_n``.
    A quorum whose total g-mass is zero contributes nothing.

    ``precision="exact"`` runs in rational arithmetic. Weights given as
    ``Fraction`` are used as is; floats are converted to their exact binary
    value. Only integer exponents are supported there.
    """
    if precision == "exact":
        return _voting_power_rational(w, scheme, k, budget)
    if precision != "float":
        raise ValueError(f"unknown precision {precision!r}")

    m = _as_array(w)
    N = m.size
    _check_budget(k, N, budget)
    p = sampling_probs(m, scheme)
    g = scheme.g(m)
    logp_const = gammaln(k + 1)
    v = np.zeros(N)
    for Y in compositions(k, N):
        logpmf = logp_const - gammaln(Y + 1).sum(axis=1) + xlogy(Y, p).sum(axis=1)
        pmf = np.exp(logpmf)
        yg = Y * g
        mass = yg.sum(axis=1)
        live = mass > 0
        v += pmf[live] @ (yg[live] / mass[live, None])
    return VotingPowerReport(values=v, method="exact-enumeration")


def _voting_power_rational(w, scheme: VotingScheme, k: int, budget: int) -> VotingPowerReport:
    if isinstance(w, WeightVector):
        w = w.values
    m = [x if isinstance(x, Fraction) else Fraction(float(x)) for x in w]
    total = sum(m)
    m = [x / total for x in m]
    N = len(m)
    _check_budget(k, N, budget)
    fm = [scheme.f(x) for x in m]
    fsum = sum(fm)
    if fsum == 0:
        raise DegenerateSchemeError(f"f={scheme.f.name} vanishes on every node")
    p = [x / fsum for x in fm]
    g = [scheme.g(x) for x in m]
    kfact = math.factorial(k)
    v = [Fraction(0)] * N
    for Y in compositions(k, N):
        for y in Y.tolist():
            mass = sum(yi * gi for yi, gi in zip(y, g))
            if mass == 0:
                continue
            coef = kfact
            for yi in y:
                coef //= math.factorial(yi)
            prob = Fraction(coef)
            for pj, yj in zip(p, y):
                if yj:
                    prob *= pj**yj
            if prob == 0:
                continue
            for i, yi in enumerate(y):
                if yi:
                    v[i] += prob * yi * g[i] / mass
    return VotingPowerReport(
        values=np.array([float(x) for x in v]),
        method="exact-enumeration",
        exact=tuple(v),
    )


def voting_power_mc(
    w,
    scheme: VotingScheme,
    k: int,
    samples: int,
    seed: int,
    chunk: int = 100_000,
) -> VotingPowerReport:
    """Monte-Carlo voting power with per-node standard errors.

    Each sample is a quorum of ``k`` draws with replacement; node ``i`` is
    credited ``y_i g_i / sum_n y_n g_n``.
    """
    if samples < 1:
        raise InvalidParameterError("samples must be >= 1")
    if k < 1:
        raise InvalidParameterError("quorum size k must be >= 1")
    m = _as_array(w)
    N = m.size
    cdf = make_cdf(sampling_probs(m, scheme))
    g = scheme.g(m)
    rng = np.random.default_rng(seed)

    total = np.zeros(N)
    total_sq = np.zeros(N)
    done = 0
    while done < samples:
        c = min(chunk, samples - done)
        idx = sample_quorum(rng, None, k, size=c, cdf=cdf)
        rows = np.repeat(np.arange(c), k)
        Y = np.bincount(rows * N + idx.ravel(), minlength=c * N).reshape(c, N)
        yg = Y * g
        mass = yg.sum(axis=1, keepdims=True)
        share = np.divide(yg, mass, out=np.zeros_like(yg), where=mass > 0)
        total += share.sum(axis=0)
        total_sq += (share**2).sum(axis=0)
        done += c

    mean = total / samples
    if samples > 1:
        var = np.maximum(total_sq - samples * mean**2, 0.0) / (samples - 1)
        se = np.sqrt(var / samples)
    else:
        se = np.full(N, np.inf)
    return VotingPowerReport(values=mean, method="monte-carlo", samples=samples, std_err=se)


def fairness_gap(
    w,
    scheme: VotingScheme,
    k: int,
    node: int,
    x: float,
    precision: str = "float",
    budget: int = DEFAULT_BUDGET,
) -> float:
    """Power of ``node`` minus the summed power of its two split parts.

    Positive: splitting loses power (Sybil-robust). Negative: merging loses
    power (merge-robust). Zero: fair for this split.
    """
    if precision == "exact":
        vals = w.values if isinstance(w, WeightVector) else w
        return _fairness_gap_rational(list(vals), scheme, k, node, x, budget)
    if not isinstance(w, WeightVector):
        w = WeightVector.from_values(w)
    split = split_weight(w, node, x)
    node %= len(w)
    whole = voting_power_exact(w, scheme, k, budget=budget).values
    parts = voting_power_exact(split, scheme, k, budget=budget).values
    return float(whole[node] - (parts[node] + parts[node + 1]))


def _fairness_gap_rational(m: list, scheme, k, node, x, budget) -> float:
    if not 0 < x < 1:
        raise InvalidParameterError(f"split ratio must lie in (0, 1), got {x!r}")
    m = [Fraction(v) for v in m]
    x = Fraction(x)
    node %= len(m)
    split = m[:node] + [x * m[node], (1 - x) * m[node]] + m[node + 1 :]
    whole = voting_power_exact(m, scheme, k, "exact", budget).exact
    parts = voting_power_exact(split, scheme, k, "exact", budget).exact
    return float(whole[node] - parts[node] - parts[node + 1])


def theorem2_counterexample(g: WeightFn, k: int, exact: bool = False):
    """Two nodes of weight 2/3 and 1/3 queried uniformly, replies weighted by ``g``.

    Returns ``(value, limit)`` where ``value = E[X a / (X a + (k - X) b)]``
    with ``X ~ Binomial(k, 1/2)``, ``a = g(2/3)``, ``b = g(1/3)``, and
    ``limit = a / (a + b)`` is its large-``k`` limit. ``value < limit``
    whenever ``a > b``.
    """
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    if exact:
        a, b = g(Fraction(2, 3)), g(Fraction(1, 3))
    else:
        a, b = float(g(2 / 3)), float(g(1 / 3))
    if a <= 0 or b <= 0:
        raise InvalidSchemeError(f"g={g.name} must be strictly positive at 1/3 and 2/3")
    value = Fraction(0) if exact else 0.0
    for x in range(1, k + 1):
        share = x * a / (x * a + (k - x) * b)
        if exact:
            value += Fraction(math.comb(k, x), 2**k) * share
        else:
            value += math.comb(k, x) / 2**k * share
    return value, a / (a + b)


def voting_power(
    w,
    scheme: VotingScheme,
    k: int,
    method: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> VotingPowerReport:
    if method == "exact":
        return voting_power_exact(w, scheme, k, budget=budget)
    if method == "mc":
        return voting_power_mc(w, scheme, k, samples, seed)
    raise ValueError(f"unknown method {method!r} (expected exact or mc)")


def power_rows(w: WeightVector, report: VotingPowerReport) -> list[tuple]:
    """``(rank, weight, voting_power, std_err)`` rows in rank order."""
    se = report.std_err if report.std_err is not None else np.zeros(len(report))
    return [(r + 1, float(w[i]), float(report[i]), float(se[i])) for r, i in enumerate(w.order)]

