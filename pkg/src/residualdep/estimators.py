"""The power-mean estimator kernel for the residual dependence index.

The kernel is the two-parameter functional

    M_{a,b}(tail) = (A_a^b - 1) / b,
    A_a = [ (1/k) sum_{i=0}^{k-1} (z_(n-i) / z_(n-k))^a ]^{1/a},

over the top k order statistics of a pseudo-observation sequence, with
the a = 0 and/or b = 0 members understood as log-limits; a = b = 0 is
the Hill estimator.  Members with b = -a estimate eta directly, and two
conjugate parametrisations in a single distortion parameter q > 0 are
provided, both collapsing symbolically to Hill at q = 1:

    conjugate:        a = 1 - 1/q,  b = -a
    mean-of-order-p:  a = 1 - q,    b = -a

Closed-form asymptotic variance and dominant bias of the b = -a subclass
accompany the point estimates, together with plug-in normal confidence
intervals (valid only while a * eta < 1/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtri

from .errors import NumericDomainError, VarianceDomainError
from .pseudo import PseudoSample

__all__ = [
    "Margin",
    "EstimatorSpec",
    "EtaEstimate",
    "m_ab",
    "eta_hat",
    "point_estimate",
    "asymptotic_variance",
    "asymptotic_bias",
    "confidence_interval",
]


class Margin(str, Enum):
    PARETO_T = "pareto_t"
    FRECHET_SHIFTED = "frechet_shifted"
    FRECHET_UNSHIFTED = "frechet_unshifted"


@dataclass(frozen=True)
class EstimatorSpec:
    """Resolved (a, b) pair plus the margin the estimator runs on.

    Build through one of the constructors; ``tag`` records which
    parametrisation produced the pair and ``q`` its distortion value
    (``None`` for raw pairs).
    """

    a: float
    b: float
    margin: Margin = Margin.PARETO_T
    tag: str = "raw"
    q: float | None = None

    @classmethod
    def from_ab(cls, a: float, b: float, margin=Margin.PARETO_T) -> "EstimatorSpec":
        return cls(a=float(a), b=float(b), margin=Margin(margin))

    @classmethod
    def conjugate(cls, q: float, margin=Margin.PARETO_T) -> "EstimatorSpec":
        """Primary parametrisation a = 1 - 1/q, b = 1/q - 1 (q > 0)."""
        q = float(q)
        if q <= 0.0:
            raise NumericDomainError(f"conjugate parametrisation needs q > 0, got {q}")
        if q == 1.0:
            return cls(a=0.0, b=0.0, margin=Margin(margin), tag="conjugate", q=q)
        a = 1.0 - 1.0 / q
        return cls(a=a, b=-a, margin=Margin(margin), tag="conjugate", q=q)

    @classmethod
    def mean_of_order_p(cls, q: float, margin=Margin.PARETO_T) -> "EstimatorSpec":
        """Alternative parametrisation a = 1 - q, b = q - 1 (q > 0)."""
        q = float(q)
        if q <= 0.0:
            raise NumericDomainError(f"mean-of-order-p parametrisation needs q > 0, got {q}")
        if q == 1.0:
            return cls(a=0.0, b=0.0, margin=Margin(margin), tag="mean_of_order_p", q=q)
        a = 1.0 - q
        return cls(a=a, b=-a, margin=Margin(margin), tag="mean_of_order_p", q=q)

    @property
    def is_hill(self) -> bool:
        return self.a == 0.0 and self.b == 0.0


def m_ab(tail: np.ndarray, k: int, a: float, b: float) -> float:
    """Evaluate M_{a,b} on an ascending tail slice z_(n-k) .. z_(n).

    Parameters
    ----------
    tail : 1d array, length k + 1
        The threshold order statistic followed by the top k order
        statistics, ascending; all entries must be positive.
    k : int
        Number of top order statistics above the threshold.
    a, b : float
        Functional parameters; 0 selects the respective log-limit branch.
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    tail = np.asarray(tail, dtype=float)
    if tail.shape != (k + 1,):
        raise ValueError(f"tail must hold k + 1 = {k + 1} values, got shape {tail.shape}")
    if tail[0] <= 0.0:
        raise NumericDomainError(f"threshold order statistic must be positive, got {tail[0]}")
    log_ratios = np.log(tail[1:]) - np.log(tail[0])
    if a == 0.0:
        log_a = float(np.mean(log_ratios))
    else:
        # log A_a = logsumexp(a * log_ratios)/a - log(k)/a, overflow-safe
        scaled = a * log_ratios
        peak = float(np.max(scaled))
        log_a = (peak + math.log(float(np.mean(np.exp(scaled - peak))))) / a
    if b == 0.0:
        return log_a
    return float(math.expm1(b * log_a) / b)


_MARGIN_ATTR = {
    Margin.PARETO_T: "t_sorted",
    Margin.FRECHET_SHIFTED: "vstar_sorted",
    Margin.FRECHET_UNSHIFTED: "v_sorted",
}


def tail_slice(pseudo: PseudoSample, k: int, margin) -> np.ndarray:
    """The ascending slice z_(n-k) .. z_(n) of the requested margin."""
    n = pseudo.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n - 1 = {n - 1}, got {k}")
    arr = getattr(pseudo, _MARGIN_ATTR[Margin(margin)])
    return arr[n - k - 1:]


def eta_hat(pseudo: PseudoSample, k: int, spec: EstimatorSpec) -> float:
    """Point estimate of eta at level k under the given estimator spec."""
    return m_ab(tail_slice(pseudo, k, spec.margin), k, spec.a, spec.b)


def asymptotic_variance(a: float, eta: float) -> float:
    """sigma_a^2(eta) = eta^2 (1 - a eta)^2 / (1 - 2 a eta), for a eta < 1/2."""
    ae = a * eta
    if ae >= 0.5:
        raise VarianceDomainError(
            f"a * eta = {ae:.6g} >= 1/2: asymptotic variance undefined for a={a}, eta={eta}"
        )
    return eta * eta * (1.0 - ae) ** 2 / (1.0 - 2.0 * ae)


def asymptotic_bias(a: float, eta: float, tau: float) -> float:
    """Dominant bias factor b_a(eta, tau) = (1 - a eta) / (1 - a eta + tau)."""
    denom = 1.0 - a * eta + tau
    if denom <= 0.0:
        raise NumericDomainError(
            f"1 - a*eta + tau = {denom:.6g} <= 0: bias factor undefined"
        )
    return (1.0 - a * eta) / denom


def confidence_interval(estimate: float, k: int, a: float, level: float = 0.95):
    """Plug-in normal CI: estimate +/- z_(1+level)/2 * sigma_a(estimate)/sqrt(k).

    Raises ``VarianceDomainError`` when a * estimate >= 1/2, in which case
    no interval exists for this (a, eta) combination.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    sigma = math.sqrt(asymptotic_variance(a, estimate))
    half_width = ndtri((1.0 + level) / 2.0) * sigma / math.sqrt(k)
    return estimate - half_width, estimate + half_width


@dataclass(frozen=True)
class EtaEstimate:
    """A point estimate with its asymptotic uncertainty report.

    ``variance`` is on the sigma_a^2 / k scale (the plug-in variance of the
    estimate itself); ``bias_term`` is the dominant bias factor b_a, reported
    but never subtracted, and NaN when tau is unknown.  CI bounds are NaN
    when a * eta >= 1/2 makes the variance formula inapplicable.
    """

    eta: float
    k: int
    a_used: float
    variance: float
    bias_term: float
    ci_low: float
    ci_high: float
    margin: Margin


def point_estimate(pseudo: PseudoSample, k: int, spec: EstimatorSpec,
                   level: float = 0.95, tau: float | None = None) -> EtaEstimate:
    """eta_hat plus variance, bias factor and confidence bounds in one record."""
    eta = eta_hat(pseudo, k, spec)
    try:
        variance = asymptotic_variance(spec.a, eta) / k
        low, high = confidence_interval(eta, k, spec.a, level)
    except VarianceDomainError:
        variance = math.nan
        low = high = math.nan
    bias = asymptotic_bias(spec.a, eta, tau) if tau is not None else math.nan
    return EtaEstimate(
        eta=eta, k=k, a_used=spec.a, variance=variance, bias_term=bias,
        ci_low=low, ci_high=high, margin=spec.margin,
    )
