"""Data generation and the replicate engine for rejection-rate studies.

A study fixes one piecewise-constant mean profile (generated once from
the master seed and reused across replicates), then for every replicate
draws fresh noise, forms ``x = theta + noise`` and runs each requested
(method, lag-order) pair, counting p-values below the significance
level.  Replicates own independent, deterministically keyed RNG streams
(master seed + replicate index), so parallel execution over replicates
produces reports identical to serial execution, bit for bit.

Degenerate test outcomes (nonpositive variance estimates) count as
non-rejections and are tallied separately.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter, lfiltic

from .errors import DegenerateVarianceError, InfeasibleDesignError
from .portmanteau import box_pierce, oracle_test, pseudo_oracle_test, sip_test
from .quadform import compute_lag_diffs

SIM_SCHEMA = "sip-sim/1"

NOISE_FAMILIES = ("iid_gaussian", "iid_t6_scaled", "iid_exp_centered", "ma", "ar1")
METHODS = ("sip1", "sip2", "box", "oracle", "p_oracle")

AR_BURN_IN = 1000


@dataclass(frozen=True)
class NoiseSpec:
    """One of five unit-innovation noise families.

    The three IID families all have mean 0 and variance 1 (the t6 draw
    is scaled by sqrt(2/3), the exponential is centered by -1); the MA
    and AR families use standard-normal innovations.
    """

    family: str
    ma_coeffs: tuple = ()
    ar_phi: float = 0.0

    def __post_init__(self):
        if self.family not in NOISE_FAMILIES:
            raise ValueError(f"unknown noise family {self.family!r}")
        object.__setattr__(self, "ma_coeffs", tuple(float(c) for c in self.ma_coeffs))
        if not np.all(np.isfinite(self.ma_coeffs)):
            raise ValueError("ma_coeffs must be finite")
        if self.family == "ar1" and not abs(self.ar_phi) < 1.0:
            raise ValueError(f"ar_phi must satisfy |phi| < 1, got {self.ar_phi}")

    def variance(self) -> float:
        """Stationary variance of the family (innovations have variance 1)."""
        if self.family == "ma":
            return 1.0 + float(np.sum(np.square(self.ma_coeffs)))
        if self.family == "ar1":
            return 1.0 / (1.0 - self.ar_phi**2)
        return 1.0


@dataclass(frozen=True)
class MeanProfile:
    """A piecewise-constant mean vector and its changepoint bookkeeping."""

    theta: np.ndarray
    changepoints: np.ndarray
    segment_means: np.ndarray

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def n_changepoints(self) -> int:
        return self.changepoints.size

    @property
    def min_segment_length(self) -> int:
        bounds = np.concatenate([[0], self.changepoints, [self.n]])
        return int(np.min(np.diff(bounds)))

    def jump_energy(self) -> float:
        """Sum of squared consecutive mean jumps, including the circular wrap."""
        mu = self.segment_means
        return float(np.sum((mu - np.roll(mu, -1)) ** 2))

    def true_w(self, noise: NoiseSpec) -> float:
        """Population jump energy normalised by n times the noise variance."""
        return self.jump_energy() / (self.n * noise.variance())


def generate_mean_profile(n, n_changepoints, min_segment_length, mean_range, rng) -> MeanProfile:
    """Draw a profile with the requested number of changepoints.

    Changepoint positions are uniform over all placements whose J+1
    segments each have length >= min_segment_length (sampled directly
    through the excess-gap bijection, which realises exactly the law of
    uniform placement conditioned on the length constraint).  Segment
    means are IID uniform over ``mean_range``; an adjacent exact
    collision is redrawn locally so every changepoint is a strict jump.
    """
    j = int(n_changepoints)
    l_min = int(min_segment_length)
    if j < 0 or l_min < 1:
        raise ValueError("need n_changepoints >= 0 and min_segment_length >= 1")
    if (j + 1) * l_min > n:
        raise InfeasibleDesignError(
            f"{j + 1} segments of length >= {l_min} do not fit in n={n}"
        )
    lo, hi = float(mean_range[0]), float(mean_range[1])
    if j >= 1 and not lo < hi:
        raise ValueError("mean_range must have positive width when changepoints exist")

    free = n - (j + 1) * l_min
    if j == 0:
        changepoints = np.empty(0, dtype=np.int64)
    else:
        picks = np.sort(rng.choice(free + j, size=j, replace=False))
        excess = picks - np.arange(j)  # sorted sample with repetition from 0..free
        changepoints = excess + np.arange(1, j + 1) * l_min

    means = rng.uniform(lo, hi, size=j + 1)
    for i in range(1, j + 1):
        while means[i] == means[i - 1]:
            means[i] = rng.uniform(lo, hi)

    lengths = np.diff(np.concatenate([[0], changepoints, [n]]))
    theta = np.repeat(means, lengths)
    return MeanProfile(
        theta=theta, changepoints=changepoints.astype(np.int64), segment_means=means
    )


def generate_noise(spec: NoiseSpec, n: int, rng) -> np.ndarray:
    """Draw n stationary observations of the given noise family.

    The MA(q) path pre-samples q innovations so every output is
    stationary; the AR(1) path starts from a stationary-marginal draw
    and runs a 1000-step burn-in before collecting output.
    """
    if spec.family == "iid_gaussian":
        return rng.standard_normal(n)
    if spec.family == "iid_t6_scaled":
        return rng.standard_t(6, size=n) * np.sqrt(2.0 / 3.0)
    if spec.family == "iid_exp_centered":
        return rng.exponential(1.0, size=n) - 1.0
    if spec.family == "ma":
        q = len(spec.ma_coeffs)
        z = rng.standard_normal(n + q)
        if q == 0:
            return z
        kernel = np.concatenate([[1.0], spec.ma_coeffs])
        return np.convolve(z, kernel)[q : q + n]
    # ar1
    phi = spec.ar_phi
    x0 = rng.normal(0.0, np.sqrt(spec.variance()))
    z = rng.standard_normal(AR_BURN_IN + n)
    zi = lfiltic([1.0], [1.0, -phi], [x0])
    y, _ = lfilter([1.0], [1.0, -phi], z, zi=zi)
    return y[AR_BURN_IN:]


def ma_autocorrelations(omega) -> np.ndarray:
    """Exact autocorrelations rho_1..rho_q of an MA(q) with coefficients omega."""
    omega = np.asarray(omega, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(omega)):
        raise ValueError("coefficients must be finite")
    q = omega.size
    if q == 0:
        return np.empty(0)
    full = np.concatenate([[1.0], omega])
    denom = full @ full
    return np.array([full[: q + 1 - h] @ full[h:] for h in range(1, q + 1)]) / denom


@dataclass(frozen=True)
class SimConfig:
    """Full description of one rejection-rate study."""

    n: int
    reps: int
    seed: int
    n_changepoints: int = 0
    min_segment_length: int = 1
    mean_range: tuple = (-5.0, 5.0)
    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec("iid_gaussian"))
    m_list: tuple = (4,)
    alpha: float = 0.05
    methods: tuple = ("sip2",)

    def __post_init__(self):
        for name in ("n", "reps", "seed", "n_changepoints", "min_segment_length"):
            value = getattr(self, name)
            if int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        object.__setattr__(self, "mean_range", tuple(float(v) for v in self.mean_range))
        object.__setattr__(self, "m_list", tuple(int(m) for m in self.m_list))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if len(self.mean_range) != 2:
            raise ValueError("mean_range must be [lo, hi]")
        if not self.m_list:
            raise ValueError("m_list must be nonempty")
        for m in self.m_list:
            needs_gap = any(meth in ("sip1", "sip2") for meth in self.methods)
            if needs_gap and not m + 2 < self.n / 2:
                raise ValueError(f"need m+2 < n/2 for SIP methods, got m={m}, n={self.n}")
            if not 1 <= m < self.n:
                raise ValueError(f"need 1 <= m < n, got m={m}, n={self.n}")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        for meth in self.methods:
            if meth not in METHODS:
                raise ValueError(f"unknown method {meth!r}; choose from {METHODS}")


@dataclass(frozen=True)
class CellRates:
    """Rejection tally for one (method, m) cell of the study grid."""

    method: str
    m: int
    reps: int
    rejections: int
    degenerate: int

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.reps

    @property
    def mc_standard_error(self) -> float:
        p = self.rejection_rate
        return float(np.sqrt(p * (1.0 - p) / self.reps))


@dataclass(frozen=True)
class SimReport:
    """Outcome of a study: per-cell rates plus profile bookkeeping.

    ``wall_time_s`` is informational only and deliberately excluded from
    the serialised forms, which must be identical across thread counts.
    """

    config: SimConfig
    cells: tuple
    true_w: float
    profile_min_segment_length: int
    profile_jump_energy: float
    wall_time_s: float
    details: dict | None = None


def profile_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0,)))


def replicate_rng(seed: int, rep: int) -> np.random.Generator:
    """Independent stream keyed by (master seed, replicate index)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1, rep)))


def run_rejection_study(config: SimConfig, threads: int = 1, keep_details: bool = False) -> SimReport:
    """Run the full study described by ``config``.

    ``threads`` changes wall time only: replicate r's outcome depends
    only on (config.seed, r), and outcomes are merged in replicate
    order, so any thread count yields the same report.  With
    ``keep_details`` the report carries per-replicate statistics and
    p-values for each cell (never serialised).
    """
    start = time.perf_counter()
    profile = generate_mean_profile(
        config.n,
        config.n_changepoints,
        config.min_segment_length,
        config.mean_range,
        rng=profile_rng(config.seed),
    )
    grid = [(meth, m) for meth in config.methods for m in config.m_list]
    max_sip_m = max(
        (m for meth, m in grid if meth in ("sip1", "sip2")), default=0
    )
    theta = profile.theta
    changepoints = profile.changepoints

    def one_replicate(rep: int):
        rng = replicate_rng(config.seed, rep)
        eps = generate_noise(config.noise, config.n, rng)
        x = theta + eps
        stats = compute_lag_diffs(x, max_sip_m + 2) if max_sip_m else None
        out = np.empty((len(grid), 2))  # columns: statistic, p-value; NaN = degenerate
        for i, (meth, m) in enumerate(grid):
            try:
                if meth in ("sip1", "sip2"):
                    res = sip_test(None, m, variant=meth, stats=stats)
                elif meth == "box":
                    res = box_pierce(x, m)
                elif meth == "oracle":
                    res = oracle_test(eps, m)
                else:
                    res = pseudo_oracle_test(x, changepoints, m)
                out[i] = (res.statistic, res.p_value)
            except DegenerateVarianceError:
                out[i] = (np.nan, np.nan)
        return out

    if threads <= 1:
        outcomes = [one_replicate(r) for r in range(config.reps)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one_replicate, range(config.reps)))

    stacked = np.stack(outcomes)  # reps x cells x 2, ordered by replicate index
    cells = []
    details = {} if keep_details else None
    for i, (meth, m) in enumerate(grid):
        pvals = stacked[:, i, 1]
        degenerate = int(np.count_nonzero(np.isnan(pvals)))
        rejections = int(np.count_nonzero(pvals < config.alpha))
        cells.append(
            CellRates(
                method=meth, m=m, reps=config.reps,
                rejections=rejections, degenerate=degenerate,
            )
        )
        if keep_details:
            details[(meth, m)] = {
                "statistic": stacked[:, i, 0].copy(),
                "p_value": pvals.copy(),
            }
    return SimReport(
        config=config,
        cells=tuple(cells),
        true_w=profile.true_w(config.noise),
        profile_min_segment_length=profile.min_segment_length,
        profile_jump_energy=profile.jump_energy(),
        wall_time_s=time.perf_counter() - start,
        details=details,
    )


# --- configuration and report serialisation ---------------------------------

_CONFIG_KEYS = {
    "n", "reps", "seed", "n_changepoints", "min_segment_length", "mean_range",
    "noise", "m_list", "alpha", "methods",
}


def config_from_dict(payload: dict) -> SimConfig:
    """Build a SimConfig from the documented key-value schema."""
    unknown = set(payload) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in ("n", "reps", "seed"):
        if key not in payload:
            raise ValueError(f"config is missing required key {key!r}")
    kwargs = dict(payload)
    if "noise" in kwargs:
        noise = kwargs["noise"]
        if not isinstance(noise, dict) or "family" not in noise:
            raise ValueError("noise must be an object with a 'family' key")
        extra = set(noise) - {"family", "ma_coeffs", "ar_phi"}
        if extra:
            raise ValueError(f"unknown noise keys: {sorted(extra)}")
        kwargs["noise"] = NoiseSpec(
            family=noise["family"],
            ma_coeffs=tuple(noise.get("ma_coeffs", ())),
            ar_phi=float(noise.get("ar_phi", 0.0)),
        )
    for key in ("mean_range", "m_list", "methods"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    return SimConfig(**kwargs)


def config_to_dict(config: SimConfig) -> dict:
    noise = {"family": config.noise.family}
    if config.noise.family == "ma":
        noise["ma_coeffs"] = list(config.noise.ma_coeffs)
    if config.noise.family == "ar1":
        noise["ar_phi"] = config.noise.ar_phi
    return {
        "n": config.n,
        "reps": config.reps,
        "seed": config.seed,
        "n_changepoints": config.n_changepoints,
        "min_segment_length": config.min_segment_length,
        "mean_range": list(config.mean_range),
        "noise": noise,
        "m_list": list(config.m_list),
        "alpha": config.alpha,
        "methods": list(config.methods),
    }


def report_to_dict(report: SimReport) -> dict:
    """JSON form of a report: deterministic for a given config and seed."""
    return {
        "schema": SIM_SCHEMA,
        "config": config_to_dict(report.config),
        "true_w": report.true_w,
        "profile": {
            "n_changepoints": report.config.n_changepoints,
            "min_segment_length": report.profile_min_segment_length,
            "jump_energy": report.profile_jump_energy,
        },
        "results": [
            {
                "method": cell.method,
                "m": cell.m,
                "reps": cell.reps,
                "rejections": cell.rejections,
                "degenerate": cell.degenerate,
                "rejection_rate": cell.rejection_rate,
                "mc_standard_error": cell.mc_standard_error,
            }
            for cell in report.cells
        ],
    }


def report_json_bytes(report: SimReport) -> bytes:
    return (json.dumps(report_to_dict(report), sort_keys=True, indent=2) + "\n").encode()


def report_csv_bytes(report: SimReport) -> bytes:
    lines = ["method,m,reps,rejections,degenerate,rejection_rate,mc_standard_error"]
    for cell in report.cells:
        lines.append(
            f"{cell.method},{cell.m},{cell.reps},{cell.rejections},"
            f"{cell.degenerate},{cell.rejection_rate!r},{cell.mc_standard_error!r}"
        )
    return ("\n".join(lines) + "\n").encode()
