"""Rank-based pseudo-observations for bivariate tail dependence.

From a paired sample (x_i, y_i) three sequences are built out of the
marginal ranks r = (rx_i, ry_i):

* ``t``      standard-Pareto scale,  T_i = min over margins of (n+1)/(n+1-r)
* ``v``      unit-Frechet scale,     V_i = -1 / log(min(rx_i, ry_i)/(n+1))
* ``vstar``  the location-shifted    V*_i = V_i + 1/2

All three are invariant under strictly increasing transforms of either
margin, and their upper order statistics are what the eta estimators
consume.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DataError, TieError

__all__ = [
    "TiePolicy",
    "BivariateSample",
    "PseudoSample",
    "compute_ranks",
    "pareto_pseudo",
    "frechet_pseudo",
    "shift_half",
    "joint_exceedance_count",
]

logger = logging.getLogger(__name__)


class TiePolicy(str, Enum):
    FIRST_OCCURRENCE = "first_occurrence"
    STRICT = "strict"
    JITTER = "jitter"


@dataclass(frozen=True)
class BivariateSample:
    """Paired observations; the raw input to everything downstream."""

    x: np.ndarray
    y: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
            raise DataError("x and y must be 1d arrays of equal length")
        if len(x) < 2:
            raise DataError(f"need at least 2 observations, got {len(x)}")
        if np.isnan(x).any() or np.isnan(y).any():
            raise DataError("NaN values must be filtered out before constructing a sample")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return len(self.x)


def _ordinal_ranks(values: np.ndarray) -> np.ndarray:
    # stable sort => ties ranked by order of first occurrence
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.int64)
    ranks[order] = np.arange(1, len(values) + 1)
    return ranks


def _rank_one_margin(values, policy, rng, name):
    if policy is TiePolicy.JITTER:
        spread = float(np.max(values) - np.min(values))
        amplitude = 1e-9 * max(1.0, spread)
        values = values + rng.uniform(0.0, amplitude, size=len(values))
    elif policy is TiePolicy.STRICT:
        uniq, counts = np.unique(values, return_counts=True)
        if (counts > 1).any():
            offender = uniq[counts > 1][0]
            raise TieError(f"tied value {offender!r} in {name} under strict tie policy")
    return _ordinal_ranks(values)


def compute_ranks(sample: BivariateSample, tie_policy=TiePolicy.FIRST_OCCURRENCE,
                  jitter_seed: int = 0):
    """Marginal ranks rx, ry, each a permutation of 1..n.

    For distinct values rx[i] equals the count of x_j <= x_i.  Ties are
    resolved by the policy: ``first_occurrence`` assigns stable ordinal
    ranks in input order, ``strict`` raises ``TieError``, and ``jitter``
    breaks ties with uniform noise at 1e-9 scale drawn from ``jitter_seed``
    (logged, so the run stays reproducible).
    """
    policy = TiePolicy(tie_policy)
    rng = None
    if policy is TiePolicy.JITTER:
        rng = np.random.default_rng(jitter_seed)
        logger.info("jitter tie policy active, seed=%d", jitter_seed)
    rx = _rank_one_margin(sample.x, policy, rng, "x")
    ry = _rank_one_margin(sample.y, policy, rng, "y")
    return rx, ry


def pareto_pseudo(rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    """Standard-Pareto pseudo-observations T_i from the rank pair."""
    n = len(rx)
    rmin = np.minimum(rx, ry)
    return (n + 1.0) / (n + 1.0 - rmin)


def frechet_pseudo(rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    """Unit-Frechet pseudo-observations V_i from the rank pair."""
    n = len(rx)
    rmin = np.minimum(rx, ry)
    return -1.0 / np.log(rmin / (n + 1.0))


def shift_half(v: np.ndarray) -> np.ndarray:
    """The shifted sequence V* = V + 1/2."""
    return v + 0.5


@dataclass(frozen=True)
class PseudoSample:
    """Ranks plus the sorted T, V and V* sequences of one sample."""

    n: int
    rx: np.ndarray
    ry: np.ndarray
    t_sorted: np.ndarray
    v_sorted: np.ndarray
    vstar_sorted: np.ndarray

    @classmethod
    def from_sample(cls, sample: BivariateSample,
                    tie_policy=TiePolicy.FIRST_OCCURRENCE,
                    jitter_seed: int = 0) -> "PseudoSample":
        rx, ry = compute_ranks(sample, tie_policy, jitter_seed)
        return cls.from_ranks(rx, ry)

    @classmethod
    def from_ranks(cls, rx: np.ndarray, ry: np.ndarray) -> "PseudoSample":
        rx = np.asarray(rx, dtype=np.int64)
        ry = np.asarray(ry, dtype=np.int64)
        n = len(rx)
        v_sorted = np.sort(frechet_pseudo(rx, ry))
        return cls(
            n=n,
            rx=rx,
            ry=ry,
            t_sorted=np.sort(pareto_pseudo(rx, ry)),
            v_sorted=v_sorted,
            vstar_sorted=shift_half(v_sorted),
        )


def joint_exceedance_count(sample: BivariateSample, k: int, x: float) -> int:
    """Count of pairs jointly exceeding their m-th largest order statistics.

    With m = floor(k * x), counts the i for which x_i >= x_(n-m+1) and
    y_i >= y_(n-m+1) (order statistics ascending).  Serves as a brute-force
    oracle for the count of T_i above the matching threshold.
    """
    n = sample.n
    m = int(np.floor(k * x))
    if not 1 <= m <= n:
        raise ValueError(f"floor(k*x) = {m} out of range 1..{n}")
    xs = np.sort(sample.x)
    ys = np.sort(sample.y)
    return int(np.count_nonzero((sample.x >= xs[n - m]) & (sample.y >= ys[n - m])))
