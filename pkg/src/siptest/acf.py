"""Shift-immune and classical ACF data plus CSV/JSON/SVG emitters.

The shift-immune variant evaluates, for each lag h up to the requested
maximum, the order-h estimators

    value_h = gamma_hat_h / gamma_hat_0,
    gamma_hat_h = (2n)^-1 [ -T_h + 2 T_{h+1} - T_{h+2} ],
    gamma_hat_0 = (2n)^-1 [ (h+2) T_{h+1} - (h+1) T_{h+2} ],

so value_h targets the contrast gamma_h - 2 gamma_{h+1} + gamma_{h+2}
rather than gamma_h itself; it is exact about serial dependence only
when the two following autocovariances vanish, but unlike the classical
ACF it is untouched by mean shifts.  All lags share one significance
band +-1.96 sqrt((6+4w)/n) where w is the clamped T-difference estimate
at the maximum lag; the classical band is the usual +-1.96/sqrt(n).

JSON output carries the stable schema tag "sip-acf/1"; CSV rows are
``lag,value,bound_lo,bound_hi``.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVarianceError
from .estimators import estimate_w_diff
from .portmanteau import sample_autocorrelations
from .quadform import as_time_series, compute_lag_diffs

ACF_SCHEMA = "sip-acf/1"
_Z95 = 1.96

KIND_SHIFT_IMMUNE = "shift_immune"
KIND_CLASSICAL = "classical"


@dataclass(frozen=True)
class AcfData:
    """Lag-by-lag ACF values with a symmetric 95% band half-width."""

    kind: str
    max_lag: int
    values: np.ndarray
    bound: float
    w_hat_used: float | None
    n: int


def shift_immune_acf(x, s: int) -> AcfData:
    """Shift-immune ACF values and band for lags 1..s (requires s+2 < n/2)."""
    x = as_time_series(x)
    n = x.size
    if s < 1:
        raise ValueError("max lag must be >= 1")
    if not s + 2 < n / 2:
        raise ValueError(f"need s+2 < n/2, got s={s}, n={n}")
    stats = compute_lag_diffs(x, s + 2)
    t = stats.t
    values = np.empty(s)
    gamma0 = 0.0
    for h in range(1, s + 1):
        gamma_h = (-t[h - 1] + 2.0 * t[h] - t[h + 1]) / (2.0 * n)
        gamma0 = ((h + 2) * t[h] - (h + 1) * t[h + 1]) / (2.0 * n)
        if gamma0 <= 0.0:
            raise DegenerateVarianceError(
                f"variance estimate at lag {h} is nonpositive ({gamma0!r})",
                gamma0=float(gamma0),
                lag=h,
            )
        values[h - 1] = gamma_h / gamma0
    # gamma0 now holds the order-s variance estimate, which feeds the band.
    w_hat = estimate_w_diff(None, s, gamma0, stats=stats).w_clamped
    bound = _Z95 * np.sqrt((6.0 + 4.0 * w_hat) / n)
    return AcfData(
        kind=KIND_SHIFT_IMMUNE, max_lag=s, values=values, bound=float(bound),
        w_hat_used=w_hat, n=n,
    )


def classical_acf(x, s: int) -> AcfData:
    """Conventional demeaned ACF for lags 1..s with band +-1.96/sqrt(n)."""
    x = as_time_series(x)
    values = sample_autocorrelations(x, s, demean=True)
    return AcfData(
        kind=KIND_CLASSICAL, max_lag=s, values=values,
        bound=float(_Z95 / np.sqrt(x.size)), w_hat_used=None, n=x.size,
    )


def emit_acf(data: AcfData, format: str) -> bytes:
    """Serialise AcfData as one of {"csv", "json", "svg"}."""
    if format == "csv":
        return _emit_csv(data)
    if format == "json":
        return _emit_json(data)
    if format == "svg":
        return _emit_svg(data)
    raise ValueError(f"unknown format {format!r}")


def acf_to_dict(data: AcfData) -> dict:
    return {
        "schema": ACF_SCHEMA,
        "kind": data.kind,
        "max_lag": data.max_lag,
        "values": [float(v) for v in data.values],
        "bound": data.bound,
        "w_hat_used": data.w_hat_used,
        "n": data.n,
    }


def acf_from_dict(payload: dict) -> AcfData:
    """Inverse of acf_to_dict; emit/parse round-trips field-wise."""
    if payload.get("schema") != ACF_SCHEMA:
        raise ValueError(f"unsupported ACF schema {payload.get('schema')!r}")
    return AcfData(
        kind=payload["kind"],
        max_lag=int(payload["max_lag"]),
        values=np.asarray(payload["values"], dtype=np.float64),
        bound=float(payload["bound"]),
        w_hat_used=None if payload["w_hat_used"] is None else float(payload["w_hat_used"]),
        n=int(payload["n"]),
    )


def _emit_csv(data: AcfData) -> bytes:
    lines = ["lag,value,bound_lo,bound_hi"]
    for lag, value in enumerate(data.values, start=1):
        lines.append(f"{lag},{float(value)!r},{-data.bound!r},{data.bound!r}")
    return ("\n".join(lines) + "\n").encode()


def _emit_json(data: AcfData) -> bytes:
    return (json.dumps(acf_to_dict(data), sort_keys=True) + "\n").encode()


def _emit_svg(data: AcfData, width: int = 640, height: int = 320) -> bytes:
    """Minimal self-contained stick plot with dashed band lines."""
    pad = 40
    plot_w = width - 2 * pad
    plot_h = height - 2 * pad
    top = max(float(np.max(np.abs(data.values))), data.bound, 1e-12) * 1.15

    def x_px(lag: float) -> float:
        return pad + plot_w * lag / (data.max_lag + 1)

    def y_px(value: float) -> float:
        return pad + plot_h * (top - value) / (2 * top)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{y_px(0):.2f}" x2="{width - pad}" y2="{y_px(0):.2f}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for sign in (1.0, -1.0):
        y = y_px(sign * data.bound)
        parts.append(
            f'<line x1="{pad}" y1="{y:.2f}" x2="{width - pad}" y2="{y:.2f}" '
            'stroke="steelblue" stroke-width="1" stroke-dasharray="6 4"/>'
        )
    for lag, value in enumerate(data.values, start=1):
        parts.append(
            f'<line x1="{x_px(lag):.2f}" y1="{y_px(0):.2f}" '
            f'x2="{x_px(lag):.2f}" y2="{y_px(float(value)):.2f}" '
            'stroke="black" stroke-width="2" class="stick"/>'
        )
    parts.append(
        f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" '
        f'font-size="12">{data.kind} acf (n={data.n}, lags 1..{data.max_lag})</text>'
    )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode()
