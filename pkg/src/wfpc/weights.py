"""Node weight vectors and the Zipf family.

Weights are kept in node-identity order; ``WeightVector.order`` gives the
rank permutation (heaviest first, ties broken by node index).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SUM_TOL = 1e-12


class InvalidParameterError(ValueError):
    """Raised for out-of-range parameters."""


class InvalidInputError(ValueError):
    """Raised for malformed input data."""


@dataclass(frozen=True, eq=False)
class WeightVector:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise InvalidInputError("weights must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidInputError("weights must be finite and non-negative")
        total = v.sum()
        if total <= 0:
            raise InvalidInputError("weights must have positive total mass")
        v = v / total
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "WeightVector":
        """Normalize arbitrary non-negative masses into a weight vector."""
        return cls(np.fromiter(values, dtype=float))

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __repr__(self) -> str:
        return f"WeightVector({np.array2string(self.values, precision=6)})"

    @property
    def order(self) -> np.ndarray:
        """Node indices from heaviest to lightest (stable on ties)."""
        return np.argsort(-self.values, kind="stable")

    @property
    def ranked(self) -> np.ndarray:
        return self.values[self.order]

    def scaled(self, mass: float) -> np.ndarray:
        return self.values * mass


@dataclass(frozen=True)
class ZipfParams:
    s: float
    N: int
    C: float
    r_squared: float = 1.0

    def weights(self) -> WeightVector:
        return zipf_weights(self.s, self.N)


def _zipf_raw(s: float, N: int) -> np.ndarray:
    return np.arange(1, N + 1, dtype=float) ** (-float(s))


def zipf_constant(s: float, N: int) -> float:
    """Normalizing constant ``1 / sum_n n**-s``."""
    return 1.0 / _zipf_raw(s, N).sum()


def zipf_weights(s: float, N: int) -> WeightVector:
    """Weights ``n**-s / sum_j j**-s`` for ranks ``n = 1..N``."""
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise InvalidParameterError(f"N must be a positive integer, got {N!r}")
    if not np.isfinite(s) or s < 0:
        raise InvalidParameterError(f"s must be finite and >= 0, got {s!r}")
    return WeightVector(_zipf_raw(s, int(N)))


def fit_zipf(
    values: Sequence[float],
    ranks: Sequence[int] | None = None,
    max_rank: int | None = None,
) -> ZipfParams:
    """Fit ``value = C * rank**-s`` by OLS of log(value) on log(rank).

    Without explicit ranks the values are sorted non-increasing and ranked
    1..n. ``max_rank`` restricts the fit to the head of the distribution.
    The returned ``N`` is the number of points used in the fit.
    """
    y = np.asarray(values, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise InvalidInputError("need at least two values to fit")
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise InvalidInputError("all values must be strictly positive")
    if ranks is None:
        y = -np.sort(-y, kind="stable")
        r = np.arange(1, y.size + 1, dtype=float)
    else:
        r = np.asarray(ranks, dtype=float)
        if r.shape != y.shape:
            raise InvalidInputError("ranks and values differ in length")
        if np.any(r < 1) or np.any(r != np.floor(r)):
            raise InvalidInputError("ranks must be positive integers")
    if max_rank is not None:
        keep = r <= max_rank
        r, y = r[keep], y[keep]
        if y.size < 2:
            raise InvalidInputError("fewer than two points below max_rank")

    lx, ly = np.log(r), np.log(y)
    if np.ptp(lx) == 0:
        raise InvalidInputError("ranks must not all be equal")
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    ss_res = np.sum(resid**2)
    # flat data (up to rounding) is fit exactly by the horizontal line
    r2 = 1.0 if ss_tot <= 1e-20 * ly.size else 1.0 - ss_res / ss_tot
    return ZipfParams(s=float(-slope), N=int(y.size), C=float(np.exp(intercept)), r_squared=float(r2))


def read_values(path: str | Path) -> np.ndarray:
    """Read one positive decimal per line; blank lines and ``#`` comments skipped."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                out.append(float(text))
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: not a number: {text!r}") from None
    return np.asarray(out, dtype=float)


def fit_zipf_file(path: str | Path, max_rank: int | None = None) -> ZipfParams:
    return fit_zipf(read_values(path), max_rank=max_rank)


def split_weight(w: WeightVector, node: int, x: float) -> WeightVector:
    """Split ``node`` into two identities holding ``x*m`` and ``(1-x)*m``.

    The two parts occupy positions ``node`` and ``node + 1``; every other
    node keeps its mass and relative position.
    """
    if not 0 < x < 1:
        raise InvalidParameterError(f"split ratio must lie in (0, 1), got {x!r}")
    n = len(w)
    if not -n <= node < n:
        raise InvalidParameterError(f"node {node} out of range for {n} nodes")
    node %= n
    v = w.values
    m = v[node]
    return WeightVector(np.concatenate([v[:node], [x * m, (1 - x) * m], v[node + 1 :]]))


def merge_weight(w: WeightVector, node: int) -> WeightVector:
    """Inverse of :func:`split_weight`: merge ``node`` and ``node + 1``."""
    v = w.values
    if not 0 <= node < v.size - 1:
        raise InvalidParameterError(f"cannot merge node {node} with its successor")
    return WeightVector(np.concatenate([v[:node], [v[node] + v[node + 1]], v[node + 2 :]]))
