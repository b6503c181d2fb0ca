"""Reduced-bias estimation of the residual dependence index.

The corrected estimator multiplies the shifted-Frechet estimate
eta_s = M_{a,-a} on the V* order statistics by

    1 - ( beta (n/k)^(-tau) + 1/(1 + 2 V_(n, n-k*)) ) * (1 - a eta_s) / (1 - a eta_s + tau)

with k* an auxiliary top-order-statistic count constrained by
k* <= sqrt(k).  The (tau, beta) pair can be estimated from the data
(statistics-ratio tau estimator plus its companion beta estimator,
both on the T order statistics), supplied by the caller, or taken
from a model's ground truth through ``effective_tau``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConstraintError, EstimationError, NumericDomainError
from .estimators import EstimatorSpec, EtaEstimate, Margin, asymptotic_variance, \
    confidence_interval, eta_hat
from .pseudo import PseudoSample

__all__ = [
    "SecondOrderSource",
    "SecondOrderParams",
    "effective_tau",
    "default_k0",
    "estimate_second_order",
    "corrected_eta",
    "reduced_bias_eta",
]


class SecondOrderSource(str, Enum):
    ESTIMATED = "estimated"
    USER_SUPPLIED = "user_supplied"


@dataclass(frozen=True)
class SecondOrderParams:
    tau_hat: float
    beta_hat: float
    k0: int
    source: SecondOrderSource = SecondOrderSource.USER_SUPPLIED

    def __post_init__(self):
        if not self.tau_hat > 0.0:
            raise NumericDomainError(f"tau_hat must be positive, got {self.tau_hat}")


def effective_tau(eta: float, tau: float) -> float:
    """Second-order parameter governing the shifted sequence: tau if
    tau < eta, else eta."""
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    return tau if tau < eta else eta


def default_k0(n: int) -> int:
    """Customary near-full-sample threshold [n^0.999] for second-order estimation."""
    return min(int(n ** 0.999), n - 1)


def estimate_second_order(pseudo, k0: int | None = None) -> SecondOrderParams:
    """Estimate (tau, beta) from the top k0 standard-Pareto pseudo-observations.

    tau comes from the three-moment statistics-ratio estimator (log tuning),
    negated into this package's positive-tau convention; beta from the
    companion scaled-log-spacings estimator evaluated at the same threshold.

    Parameters
    ----------
    pseudo : PseudoSample or 1d array
        Either a pseudo-observation bundle (its T sequence is used) or an
        already-sorted positive sample.
    k0 : int, optional
        Number of top order statistics to use; defaults to [n^0.999].

    Raises
    ------
    EstimationError
        On degenerate tails (constant top order statistics) or when the
        statistics ratio degenerates so that no positive tau results.
    """
    t_sorted = pseudo.t_sorted if isinstance(pseudo, PseudoSample) else np.asarray(pseudo)
    n = len(t_sorted)
    if n < 50:
        raise ValueError(f"second-order estimation needs n >= 50, got {n}")
    if k0 is None:
        k0 = default_k0(n)
    if not 2 <= k0 <= n - 1:
        raise ValueError(f"need 2 <= k0 <= n - 1 = {n - 1}, got {k0}")

    log_t = np.log(t_sorted)
    excess = log_t[n - k0:] - log_t[n - k0 - 1]
    if not excess.any():
        raise EstimationError(f"degenerate tail: top {k0} pseudo-observations are constant")
    m1 = float(np.mean(excess))
    m2 = float(np.mean(excess ** 2))
    m3 = float(np.mean(excess ** 3))
    if m2 <= 0.0 or m3 <= 0.0:
        raise EstimationError("degenerate tail moments; cannot form the statistics ratio")
    num = math.log(m1) - 0.5 * math.log(m2 / 2.0)
    den = 0.5 * math.log(m2 / 2.0) - math.log(m3 / 6.0) / 3.0
    if den == 0.0:
        raise EstimationError("statistics ratio degenerate (zero denominator)")
    t_stat = num / den
    if t_stat == 3.0 or not math.isfinite(t_stat):
        raise EstimationError(f"statistics ratio {t_stat} admits no finite tau")
    tau = abs(3.0 * (t_stat - 1.0) / (t_stat - 3.0))
    if not (math.isfinite(tau) and tau > 0.0):
        raise EstimationError(
            f"adapted tau = {tau} is not a positive real "
            f"(statistics ratio {t_stat:.6g} on k0={k0} of n={n})"
        )

    beta = _beta_companion(log_t, n, k0, tau)
    if not math.isfinite(beta):
        raise EstimationError(f"beta estimate diverged at k0={k0}")
    return SecondOrderParams(tau_hat=tau, beta_hat=beta, k0=k0,
                             source=SecondOrderSource.ESTIMATED)


def _beta_companion(log_t: np.ndarray, n: int, k0: int, tau: float) -> float:
    # scaled log-spacings U_i = i (log z_(n-i+1) - log z_(n-i)), i = 1..k0
    rho = -tau
    i = np.arange(1, k0 + 1)
    desc = log_t[::-1]
    spacings = i * (desc[:k0] - desc[1:k0 + 1])
    x = i / k0
    d_rho = float(np.mean(x ** (-rho)))
    big_d0 = float(np.mean(spacings))
    big_dr = float(np.mean(x ** (-rho) * spacings))
    big_d2r = float(np.mean(x ** (-2.0 * rho) * spacings))
    denom = d_rho * big_dr - big_d2r
    if denom == 0.0:
        raise EstimationError("beta estimator denominator vanished")
    return (k0 / n) ** rho * (d_rho * big_d0 - big_dr) / denom


def corrected_eta(eta_s: float, a: float, tau: float, beta_term: float,
                  v_kstar: float) -> float:
    """Plug-in arithmetic of the reduced-bias correction.

    ``beta_term`` is beta * (n/k)^(-tau); ``v_kstar`` is the V order
    statistic V_(n, n-k*).  Raises when the denominator 1 - a*eta + tau
    is not positive.
    """
    denom = 1.0 - a * eta_s + tau
    if denom <= 0.0:
        raise NumericDomainError(f"1 - a*eta + tau = {denom:.6g} <= 0 in bias correction")
    correction = (beta_term + 1.0 / (1.0 + 2.0 * v_kstar)) * (1.0 - a * eta_s) / denom
    return eta_s * (1.0 - correction)


def reduced_bias_eta(pseudo: PseudoSample, k: int, k_star: int, a: float,
                     so: SecondOrderParams, level: float = 0.95) -> EtaEstimate:
    """Reduced-bias estimate of eta on the shifted-Frechet margin.

    Parameters
    ----------
    pseudo : PseudoSample
    k : int
        Number of top order statistics for the base estimate.
    k_star : int
        Auxiliary count selecting V_(n, n-k*); must satisfy k_star <= sqrt(k).
    a : float
        Distortion parameter of the M_{a,-a} subclass.
    so : SecondOrderParams
        The (tau, beta) pair driving the correction.
    """
    n = pseudo.n
    if not 1 <= k_star <= n - 1:
        raise ValueError(f"need 1 <= k_star <= n - 1, got {k_star}")
    if k_star > math.isqrt(k):
        raise ConstraintError(
            f"k_star = {k_star} exceeds sqrt(k) = sqrt({k}); the correction is "
            "only valid for k_star <= sqrt(k)"
        )
    spec = EstimatorSpec.from_ab(a, -a, margin=Margin.FRECHET_SHIFTED)
    eta_s = eta_hat(pseudo, k, spec)
    beta_term = so.beta_hat * (n / k) ** (-so.tau_hat)
    v_kstar = float(pseudo.v_sorted[n - 1 - k_star])
    eta_rb = corrected_eta(eta_s, a, so.tau_hat, beta_term, v_kstar)
    try:
        variance = asymptotic_variance(a, eta_rb) / k
        low, high = confidence_interval(eta_rb, k, a, level)
    except NumericDomainError:
        variance = math.nan
        low = high = math.nan
    return EtaEstimate(
        eta=eta_rb, k=k, a_used=a, variance=variance, bias_term=math.nan,
        ci_low=low, ci_high=high, margin=Margin.FRECHET_SHIFTED,
    )
