"""Circular lag-difference statistics and mean-shift-immune quadratic forms.

Everything in this module treats the input series as circular: the
element after ``x[n-1]`` is ``x[0]``.  The central primitive is the
vector of lag-h squared-difference sums

    T_h = sum_i (x[i] - x[i+h])^2,   indices mod n,

from which all downstream estimators are assembled.  A coefficient
vector ``(a_1, ..., a_L)`` with

    a_1 + a_2 + ... + a_L = 0   and   a_1 + 2 a_2 + ... + L a_L = 0

induces a circulant quadratic form ``-sum_h a_h T_h`` whose expectation
is free of any piecewise-constant mean structure with segments of
length >= L, free of the noise variance, and invariant under a global
level shift.  Such coefficient vectors are the building blocks of the
shift-immune tests.

All functions are pure and thread-safe.
"""

from dataclasses import dataclass, field

import numpy as np

# Relative tolerance for the two linear constraints defining shift-immune
# coefficient vectors.
MEMBERSHIP_RTOL = 1e-12

# Absolute tolerance on the annihilation equations checked by
# check_theta_annihilating.
ANNIHILATION_ATOL = 1e-10

# The dense circulant construction is an O(n^2) brute-force oracle for
# tests; production paths use the O(n*k) T-representation instead.
DENSE_ORACLE_MAX_N = 1024


def as_time_series(values) -> np.ndarray:
    """Validate and coerce a series to a 1-D float64 array.

    Requires n >= 1 and all entries finite.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        x = x.reshape(-1)
    if x.size < 1:
        raise ValueError("series must contain at least one value")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


@dataclass(frozen=True)
class LagDiffStats:
    """Circular lag-h squared-difference sums T_1..T_k of one series.

    ``t[h-1]`` holds T_h.  Each entry is a sum of squares, hence
    nonnegative, and the whole vector is invariant under a global shift
    of the source series.
    """

    t: np.ndarray
    n: int
    k_max: int

    def require(self, k: int) -> None:
        if k > self.k_max:
            raise ValueError(f"need lag sums up to {k}, have only {self.k_max}")


def compute_lag_diffs(x, k_max: int) -> LagDiffStats:
    """Compute T_h = sum_i (x[i] - x[i+h])^2 for h = 1..k_max, circular indices.

    O(n * k_max); each T_h is accumulated with pairwise summation so the
    relative error stays negligible even for very long traces.
    """
    x = as_time_series(x)
    n = x.size
    if not 1 <= k_max < n:
        raise ValueError(f"k_max must satisfy 1 <= k_max < n, got k_max={k_max}, n={n}")
    t = np.empty(k_max, dtype=np.float64)
    for h in range(1, k_max + 1):
        d = x - np.roll(x, -h)
        t[h - 1] = np.sum(d * d)  # np.sum is pairwise for float arrays
    return LagDiffStats(t=t, n=n, k_max=k_max)


@dataclass(frozen=True)
class ShiftImmuneCoefficients:
    """A coefficient vector (a_1..a_L) satisfying both membership constraints.

    Construction rejects vectors that violate either constraint beyond a
    1e-12 relative tolerance.  Padding with trailing zeros preserves
    membership, so these vectors form a nested family in L.
    """

    a: np.ndarray
    a0: float = field(init=False, default=0.0)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("coefficients must be a nonempty 1-D vector")
        if not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be finite")
        scale = np.sum(np.abs(a))
        h = np.arange(1, a.size + 1)
        if scale > 0.0:
            if abs(np.sum(a)) > MEMBERSHIP_RTOL * scale:
                raise ValueError("coefficients do not sum to zero")
            if abs(h @ a) > MEMBERSHIP_RTOL * (h @ np.abs(a)):
                raise ValueError("lag-weighted coefficient sum is not zero")
        object.__setattr__(self, "a", a)

    @property
    def order(self) -> int:
        return self.a.size

    def padded(self, length: int) -> "ShiftImmuneCoefficients":
        """Natural embedding: extend with trailing zeros."""
        if length < self.order:
            raise ValueError("cannot pad to a shorter length")
        out = np.zeros(length)
        out[: self.order] = self.a
        return ShiftImmuneCoefficients(out)


def quadratic_form_from_t(coeffs: ShiftImmuneCoefficients, stats: LagDiffStats) -> float:
    """Evaluate the quadratic form induced by ``coeffs`` as -sum_h a_h T_h.

    Equals x' A x for the circulant matrix A built from the same
    coefficients (see build_dense_circulant), but costs O(L).
    """
    stats.require(coeffs.order)
    return float(-(coeffs.a @ stats.t[: coeffs.order]))


@dataclass(frozen=True)
class ToeplitzRow:
    """First row (a_0..a_{n-1}) of a symmetric Toeplitz/circulant matrix."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.ndim != 1 or c.size < 1 or not np.all(np.isfinite(c)):
            raise ValueError("row must be a nonempty finite 1-D vector")
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return self.coeffs.size

    def dense(self) -> np.ndarray:
        """Materialise the full circulant matrix (test oracle only)."""
        idx = np.arange(self.n)
        return self.coeffs[(idx[None, :] - idx[:, None]) % self.n]


def build_dense_circulant(coeffs: ShiftImmuneCoefficients, n: int) -> ToeplitzRow:
    """First row (0, a_1..a_L, 0..0, a_L..a_1) of the induced circulant matrix.

    Brute-force oracle; capped at n <= 1024 and requires 2L < n so the
    mirrored tail does not overlap the head.
    """
    length = coeffs.order
    if 2 * length >= n:
        raise ValueError(f"need 2L < n, got L={length}, n={n}")
    if n > DENSE_ORACLE_MAX_N:
        raise ValueError(f"dense circulant oracle is capped at n={DENSE_ORACLE_MAX_N}")
    row = np.zeros(n)
    row[1 : length + 1] = coeffs.a
    row[n - length :] = coeffs.a[::-1]
    return ToeplitzRow(row)


def check_theta_annihilating(row: ToeplitzRow, l_min: int) -> bool:
    """Check whether the Toeplitz form vanishes on every piecewise-constant
    mean vector whose segments all have length >= l_min.

    The characterisation is four linear conditions on the first row:

        a_0 + 2(a_1 + ... + a_L)          = 0
        a_1 + 2 a_2 + ... + L a_L          = 0
        a_{L+1} = ... = a_{n-L-1}          = 0
        L a_{n-L} + (L-1) a_{n-L+1} + ... + a_{n-1} = 0

    with L = l_min, each verified within 1e-10 absolute.
    """
    n = row.n
    if not 1 <= l_min < n / 2:
        raise ValueError(f"need 1 <= l_min < n/2, got l_min={l_min}, n={n}")
    a = row.coeffs
    ell = l_min

    eq1 = a[0] + 2.0 * np.sum(a[1 : ell + 1])
    eq2 = np.arange(1, ell + 1) @ a[1 : ell + 1]
    middle = a[ell + 1 : n - ell]
    eq4 = np.arange(ell, 0, -1) @ a[n - ell :]

    return bool(
        abs(eq1) <= ANNIHILATION_ATOL
        and abs(eq2) <= ANNIHILATION_ATOL
        and (middle.size == 0 or np.max(np.abs(middle)) <= ANNIHILATION_ATOL)
        and abs(eq4) <= ANNIHILATION_ATOL
    )


def project_onto_shift_immune(v) -> np.ndarray:
    """Orthogonally project a vector onto the shift-immune coefficient subspace.

    The subspace of R^k (k >= 3) is {a : 1'a = 0, (1,2,..,k)'a = 0}; the
    projection is idempotent and its output satisfies both constraints
    to within 1e-12.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size < 3:
        raise ValueError("projection needs a vector of length >= 3")
    k = v.size
    z = np.column_stack([np.ones(k), np.arange(1.0, k + 1.0)])
    coef = np.linalg.solve(z.T @ z, z.T @ v)
    return v - z @ coef
