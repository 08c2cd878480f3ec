"""Shift-immune portmanteau (SIP) testing for time series whose mean is
piecewise constant with frequent shifts.

The package provides white-noise tests that ignore mean shifts entirely
(`sip_test`), the matching shift-immune ACF visualisation data
(`shift_immune_acf`), classical baselines for comparison, and a
deterministic Monte Carlo harness for calibration and power studies
(`run_rejection_study`).
"""

__version__ = "0.1.0"

from .acf import AcfData, classical_acf, emit_acf, shift_immune_acf
from .covariance import SigmaRho, build_sigma_rho, chi_square_sf, quadratic_statistic
from .errors import (
    DegenerateVarianceError,
    InfeasibleDesignError,
    NotPositiveDefiniteError,
    SipError,
)
from .estimators import (
    AcovEstimates,
    JumpEnergyEstimate,
    estimate_gamma,
    estimate_w_diff,
    eve_fit,
)
from .portmanteau import (
    BaselineResult,
    SipTestResult,
    box_pierce,
    oracle_test,
    pseudo_oracle_test,
    sip_test,
)
from .quadform import (
    LagDiffStats,
    ShiftImmuneCoefficients,
    ToeplitzRow,
    build_dense_circulant,
    check_theta_annihilating,
    compute_lag_diffs,
    project_onto_shift_immune,
    quadratic_form_from_t,
)
from .simulate import (
    MeanProfile,
    NoiseSpec,
    SimConfig,
    SimReport,
    config_from_dict,
    generate_mean_profile,
    generate_noise,
    ma_autocorrelations,
    run_rejection_study,
)

__all__ = [
    "AcfData",
    "AcovEstimates",
    "BaselineResult",
    "DegenerateVarianceError",
    "InfeasibleDesignError",
    "JumpEnergyEstimate",
    "LagDiffStats",
    "MeanProfile",
    "NoiseSpec",
    "NotPositiveDefiniteError",
    "ShiftImmuneCoefficients",
    "SigmaRho",
    "SimConfig",
    "SimReport",
    "SipError",
    "SipTestResult",
    "ToeplitzRow",
    "box_pierce",
    "build_dense_circulant",
    "build_sigma_rho",
    "check_theta_annihilating",
    "chi_square_sf",
    "classical_acf",
    "compute_lag_diffs",
    "config_from_dict",
    "emit_acf",
    "estimate_gamma",
    "estimate_w_diff",
    "eve_fit",
    "generate_mean_profile",
    "generate_noise",
    "ma_autocorrelations",
    "oracle_test",
    "project_onto_shift_immune",
    "pseudo_oracle_test",
    "quadratic_form_from_t",
    "quadratic_statistic",
    "run_rejection_study",
    "shift_immune_acf",
    "sip_test",
]
