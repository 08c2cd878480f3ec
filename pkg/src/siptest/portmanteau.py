"""Shift-immune portmanteau tests and the classical baselines.

Two variants share the statistic n * rho' Sigma^-1 rho with df = m and a
chi-square reference distribution; they differ only in which estimator
pair feeds (gamma_0, w):

* "sip1" uses the lag-sum contrast for gamma_0 and the T-difference
  estimator for w;
* "sip2" uses the least-squares intercept for gamma_0 and the slope
  ratio for w.

``conservative=True`` doubles the clamped jump-energy estimate before
building the covariance, which is valid under a weaker segment-length
condition and never rejects more often than the standard mode on the
same data.

Baselines for simulation studies: the classical Box-Pierce test (linear,
non-circular autocorrelations with 1/n normalisation, mimicking standard
practice), the oracle (Box-Pierce applied to the true noise) and the
pseudo-oracle (Box-Pierce applied to segment-wise demeaned residuals
given the true changepoints).
"""

from dataclasses import dataclass

import numpy as np

from .covariance import build_sigma_rho, chi_square_sf, quadratic_statistic
from .errors import DegenerateVarianceError
from .estimators import contrast_autocovariances, estimate_w_diff, eve_fit
from .quadform import LagDiffStats, as_time_series, compute_lag_diffs

SIP_VARIANTS = ("sip1", "sip2")
DEFAULT_M = 4
DEFAULT_VARIANT = "sip2"


@dataclass(frozen=True)
class SipTestResult:
    variant: str
    conservative: bool
    m: int
    statistic: float
    df: int
    p_value: float
    gamma0_used: float
    w_raw: float
    w_used: float
    rho_hat: np.ndarray
    n: int


@dataclass(frozen=True)
class BaselineResult:
    method: str
    m: int
    statistic: float
    p_value: float
    n: int


def sip_test(
    x,
    m: int = DEFAULT_M,
    variant: str = DEFAULT_VARIANT,
    conservative: bool = False,
    stats: LagDiffStats | None = None,
) -> SipTestResult:
    """Run the shift-immune portmanteau test at lag order m.

    Parameters
    ----------
    x : array-like
        Observed series (ignored when ``stats`` is supplied).
    m : int
        Lag order; requires m+2 < n/2.
    variant : {"sip1", "sip2"}
        Estimator pair for (gamma_0, w); see module docstring.
    conservative : bool
        Double the clamped w before building the covariance.
    stats : LagDiffStats, optional
        Precomputed lag-diff sums covering T_1..T_{m+2}; lets replicate
        loops scan each series once for several orders/variants.

    Raises
    ------
    DegenerateVarianceError
        If the variance estimate of the chosen variant is nonpositive.
    ValueError
        If m is infeasible for the series length.
    """
    if variant not in SIP_VARIANTS:
        raise ValueError(f"variant must be one of {SIP_VARIANTS}, got {variant!r}")
    if stats is None:
        x = as_time_series(x)
        if not m + 2 < x.size / 2:
            raise ValueError(f"need m+2 < n/2, got m={m}, n={x.size}")
        stats = compute_lag_diffs(x, m + 2)
    gamma0_contrast, gamma = contrast_autocovariances(stats, m)
    if variant == "sip1":
        if gamma0_contrast <= 0.0:
            raise DegenerateVarianceError(
                f"variance estimate is nonpositive ({gamma0_contrast!r})",
                gamma0=gamma0_contrast,
                gamma=gamma,
            )
        gamma0 = gamma0_contrast
        energy = estimate_w_diff(None, m, gamma0, stats=stats)
    else:
        energy = eve_fit(None, m, stats=stats)
        gamma0 = energy.alpha_hat
    rho = gamma / gamma0
    w_used = 2.0 * energy.w_clamped if conservative else energy.w_clamped
    sigma = build_sigma_rho(m, w_used)
    statistic = quadratic_statistic(rho, sigma, stats.n)
    return SipTestResult(
        variant=variant,
        conservative=conservative,
        m=m,
        statistic=statistic,
        df=m,
        p_value=chi_square_sf(statistic, m),
        gamma0_used=float(gamma0),
        w_raw=energy.w_raw,
        w_used=w_used,
        rho_hat=rho,
        n=stats.n,
    )


def sample_autocorrelations(x, m: int, demean: bool = True) -> np.ndarray:
    """Conventional linear sample autocorrelations r_1..r_m (1/n normalisation)."""
    x = as_time_series(x)
    n = x.size
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    centered = x - x.mean() if demean else x
    denom = centered @ centered
    # demeaning a constant series can leave rounding dust of order
    # eps*|x|, so compare against that scale rather than exact zero
    dust = (16.0 * np.finfo(np.float64).eps * max(np.max(np.abs(x)), 1e-300)) ** 2 * n
    if denom <= dust:
        raise DegenerateVarianceError("series has zero sample variance")
    r = np.empty(m)
    for h in range(1, m + 1):
        r[h - 1] = (centered[:-h] @ centered[h:]) / denom
    return r


def box_pierce(x, m: int, demean: bool = True) -> BaselineResult:
    """Classical Box-Pierce statistic Q = n * sum_h r_h^2 with df = m."""
    x = as_time_series(x)
    r = sample_autocorrelations(x, m, demean=demean)
    q = float(x.size * (r @ r))
    return BaselineResult(
        method="box", m=m, statistic=q, p_value=chi_square_sf(q, m), n=x.size
    )


def pseudo_oracle_test(x, changepoints, m: int) -> BaselineResult:
    """Box-Pierce on segment-wise demeaned residuals given true changepoints.

    ``changepoints`` are the strictly increasing split positions in
    [1, n): segment j covers indices [tau_j, tau_{j+1}).
    """
    x = as_time_series(x)
    n = x.size
    taus = np.asarray(changepoints, dtype=np.int64).reshape(-1)
    if taus.size:
        if np.any(taus < 1) or np.any(taus >= n) or np.any(np.diff(taus) <= 0):
            raise ValueError("changepoints must be strictly increasing in [1, n)")
    bounds = np.concatenate([[0], taus, [n]])
    if np.all(np.diff(bounds) == 1):
        raise ValueError("every segment has length 1; residuals are identically zero")
    residuals = np.empty_like(x)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        residuals[lo:hi] = x[lo:hi] - x[lo:hi].mean()
    result = box_pierce(residuals, m, demean=False)
    return BaselineResult(
        method="p_oracle", m=m, statistic=result.statistic, p_value=result.p_value, n=n
    )


def oracle_test(noise, m: int) -> BaselineResult:
    """Box-Pierce applied to the true noise (simulation-only path)."""
    result = box_pierce(noise, m, demean=True)
    return BaselineResult(
        method="oracle", m=m, statistic=result.statistic, p_value=result.p_value,
        n=result.n,
    )
