"""Shift-immune autocovariance / autocorrelation and jump-energy estimators.

All estimators are linear functions of the circular lag-difference sums
T_1..T_{m+2}, so they ignore piecewise-constant mean structure with
segments of length >= m+2 and are exactly invariant under a global
level shift.  For an order-m fit:

    gamma_hat_h = (2n)^-1 [ -T_h + (m+2-h) T_{m+1} - (m+1-h) T_{m+2} ]
    gamma_hat_0 = (2n)^-1 [ (m+2) T_{m+1} - (m+1) T_{m+2} ]
    rho_hat_h   = gamma_hat_h / gamma_hat_0

The normalised jump energy w = W(theta)/(n gamma_0), where W(theta) sums
squared consecutive mean jumps (circular), inflates the variance of
these estimators and has two estimators:

    w1 = (n gamma_hat_0)^-1 (T_{m+2} - T_{m+1})
    w2 = 2 beta / alpha from the least-squares fit of T_h/(2n) on (1, h)

The raw estimates can be negative in finite samples; downstream
covariance construction uses the value clamped at zero, which keeps the
covariance matrix positive definite.  A nonpositive variance estimate is
reported as DegenerateVarianceError rather than a silent NaN.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVarianceError
from .quadform import LagDiffStats, as_time_series, compute_lag_diffs


@dataclass(frozen=True)
class AcovEstimates:
    """Order-m autocovariance/autocorrelation estimates for one series."""

    gamma0_hat: float
    gamma_hat: np.ndarray
    rho_hat: np.ndarray
    m: int
    n: int


@dataclass(frozen=True)
class JumpEnergyEstimate:
    """A raw jump-energy estimate and its clamped-at-zero companion.

    ``method`` is "difference" for the T-difference estimator and "eve"
    for the least-squares fit, in which case the intercept and slope are
    carried along (w_raw = 2 * beta_hat / alpha_hat).
    """

    w_raw: float
    w_clamped: float
    method: str
    alpha_hat: float | None = None
    beta_hat: float | None = None


def _stats_for_order(x, m: int, stats: LagDiffStats | None) -> tuple[LagDiffStats, int]:
    """Validate the order and return lag-diff sums covering T_1..T_{m+2}."""
    if m < 1:
        raise ValueError("lag order m must be >= 1")
    if stats is None:
        x = as_time_series(x)
        n = x.size
        if not m + 2 < n / 2:
            raise ValueError(f"need m+2 < n/2, got m={m}, n={n}")
        stats = compute_lag_diffs(x, m + 2)
    else:
        n = stats.n
        if not m + 2 < n / 2:
            raise ValueError(f"need m+2 < n/2, got m={m}, n={n}")
        stats.require(m + 2)
    return stats, n


def contrast_autocovariances(stats: LagDiffStats, m: int) -> tuple[float, np.ndarray]:
    """Raw (gamma0, gamma_1..gamma_m) contrasts of the lag sums, ungated.

    gamma0 can come out nonpositive in finite samples (or under heavily
    misspecified alternatives); callers that divide by it must check the
    sign themselves.
    """
    stats.require(m + 2)
    n = stats.n
    t = stats.t
    t_m1 = t[m]      # T_{m+1}
    t_m2 = t[m + 1]  # T_{m+2}
    h = np.arange(1, m + 1)
    gamma = (-t[:m] + (m + 2 - h) * t_m1 - (m + 1 - h) * t_m2) / (2.0 * n)
    gamma0 = ((m + 2) * t_m1 - (m + 1) * t_m2) / (2.0 * n)
    return float(gamma0), gamma


def estimate_gamma(x, m: int, stats: LagDiffStats | None = None) -> AcovEstimates:
    """Estimate autocovariances gamma_0..gamma_m, shift-immune.

    Parameters
    ----------
    x : array-like
        Observed series; ignored when precomputed ``stats`` are passed.
    m : int
        Lag order; requires m+2 < n/2.
    stats : LagDiffStats, optional
        Shared lag-diff sums covering at least T_1..T_{m+2}, so long
        traces are scanned once per series rather than once per order.

    Raises
    ------
    DegenerateVarianceError
        If gamma_hat_0 <= 0; the autocovariances computed so far are
        attached to the exception.
    """
    stats, n = _stats_for_order(x, m, stats)
    gamma0, gamma = contrast_autocovariances(stats, m)
    if gamma0 <= 0.0:
        raise DegenerateVarianceError(
            f"variance estimate is nonpositive ({gamma0!r}); correlations undefined",
            gamma0=gamma0,
            gamma=gamma,
        )
    return AcovEstimates(
        gamma0_hat=gamma0, gamma_hat=gamma, rho_hat=gamma / gamma0, m=m, n=n
    )


def estimate_w_diff(
    x, m: int, gamma0_hat: float, stats: LagDiffStats | None = None
) -> JumpEnergyEstimate:
    """Jump-energy estimate from the difference of the top two lag sums.

    w1 = (T_{m+2} - T_{m+1}) / (n * gamma0_hat).  The raw value may be
    negative; the clamped value is max(raw, 0).
    """
    if gamma0_hat <= 0.0:
        raise ValueError("gamma0_hat must be positive")
    stats, n = _stats_for_order(x, m, stats)
    w_raw = (stats.t[m + 1] - stats.t[m]) / (n * gamma0_hat)
    return JumpEnergyEstimate(
        w_raw=float(w_raw), w_clamped=max(float(w_raw), 0.0), method="difference"
    )


def eve_fit(x, m: int, stats: LagDiffStats | None = None) -> JumpEnergyEstimate:
    """Least-squares fit of T_h/(2n) on (1, h) for h = 1..m+2.

    The intercept estimates the noise variance and the slope estimates
    half the jump energy times the variance, so w2 = 2*beta/alpha.

    Raises
    ------
    DegenerateVarianceError
        If the fitted intercept is nonpositive.
    """
    stats, n = _stats_for_order(x, m, stats)
    k = m + 2
    y = stats.t[:k] / (2.0 * n)
    h = np.arange(1.0, k + 1.0)
    h_bar = h.mean()
    y_bar = y.mean()
    beta = ((h - h_bar) @ (y - y_bar)) / ((h - h_bar) @ (h - h_bar))
    alpha = y_bar - beta * h_bar
    if alpha <= 0.0:
        raise DegenerateVarianceError(
            f"regression intercept is nonpositive ({alpha!r})", gamma0=float(alpha)
        )
    w_raw = 2.0 * beta / alpha
    return JumpEnergyEstimate(
        w_raw=float(w_raw),
        w_clamped=max(float(w_raw), 0.0),
        method="eve",
        alpha_hat=float(alpha),
        beta_hat=float(beta),
    )
