"""Shared independent oracles for the test suite.

These deliberately avoid the production code paths: lag sums by an
explicit double loop, quadratic forms through dense matrices, and the
chi-square tail by composite Gauss-Legendre quadrature of the density.
"""

import math

import numpy as np


def oracle_lag_diffs(x, k_max):
    """Brute-force circular lag-difference sums via an explicit double loop."""
    x = list(map(float, x))
    n = len(x)
    out = []
    for h in range(1, k_max + 1):
        total = 0.0
        for i in range(n):
            d = x[i] - x[(i + h) % n]
            total += d * d
        out.append(total)
    return np.array(out)


def dense_quadratic_form(row, x):
    """x' A x with A the circulant matrix whose first row is ``row``."""
    row = np.asarray(row, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    n = row.size
    idx = np.arange(n)
    matrix = row[(idx[None, :] - idx[:, None]) % n]
    return float(x @ matrix @ x)


def chi2_pdf(t, df):
    a = 0.5 * df
    return math.exp((a - 1.0) * math.log(t) - 0.5 * t - a * math.log(2.0) - math.lgamma(a))


def chi2_sf_quadrature(x, df, panels=3000):
    """Upper-tail chi-square probability by composite Gauss-Legendre quadrature.

    Integrates the density from x out to a cutoff far enough into the
    tail that the remainder is below 1e-16.
    """
    if x <= 0.0:
        return 1.0
    hi = x + 200.0 + 20.0 * df
    nodes, weights = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(x, hi, panels + 1)
    total = 0.0
    for lo, up in zip(edges[:-1], edges[1:]):
        half = 0.5 * (up - lo)
        mid = 0.5 * (up + lo)
        total += half * sum(
            w * chi2_pdf(mid + half * t, df) for t, w in zip(nodes, weights)
        )
    return total


def random_shift_immune(rng, length):
    """Random coefficient vector satisfying both membership constraints.

    Projects twice: the second pass scrubs the rounding dust left when
    the first projection cancels most of the draw, keeping the residual
    small relative to the returned vector itself.
    """
    from siptest import project_onto_shift_immune

    while True:
        v = project_onto_shift_immune(rng.standard_normal(length))
        if np.linalg.norm(v) > 1e-3:
            return project_onto_shift_immune(v)


def random_piecewise_theta(rng, n, min_segment, mean_scale=3.0):
    """Random piecewise-constant vector with all segments >= min_segment."""
    bounds = [0]
    while True:
        step = int(rng.integers(min_segment, 2 * min_segment + 1))
        if bounds[-1] + step > n - min_segment:
            break
        bounds.append(bounds[-1] + step)
    bounds.append(n)
    theta = np.empty(n)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        theta[lo:hi] = rng.uniform(-mean_scale, mean_scale)
    return theta
