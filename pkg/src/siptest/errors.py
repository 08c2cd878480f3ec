"""Exception types shared across the package.

Plain ``ValueError`` is used for malformed arguments (bad lags, bad
changepoint vectors, out-of-range parameters).  The classes below mark
outcomes that callers are expected to handle as first-class results
rather than programming errors.
"""


class SipError(Exception):
    """Base class for package-specific failures."""


class DegenerateVarianceError(SipError):
    """The variance estimate came out nonpositive, so correlations are undefined.

    Raised e.g. for constant input series.  Carries whatever diagnostics
    were computed before the failure.
    """

    def __init__(self, message, gamma0=None, gamma=None, lag=None):
        super().__init__(message)
        self.gamma0 = gamma0
        self.gamma = gamma
        self.lag = lag


class InfeasibleDesignError(SipError):
    """A simulation design cannot be realised (e.g. segments do not fit)."""


class NotPositiveDefiniteError(SipError):
    """A matrix that is positive definite by construction failed to factor.

    This signals an upstream bug (such as a negative jump-energy value
    leaking past clamping), never a data problem, so it is deliberately
    not recoverable.
    """
