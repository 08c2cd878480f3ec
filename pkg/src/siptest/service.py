"""HTTP service wrapping the library.

Endpoints mirror the CLI subcommands: POST /test, POST /acf and
POST /simulate, plus GET /health.  Domain failures map to HTTP 400 with
a code matching the CLI exit-code vocabulary ("infeasible-lag",
"degenerate-variance", "infeasible-design"); schema violations are
FastAPI's usual 422.

Run with ``sip serve`` or ``uvicorn siptest.service:app``.
"""

from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .acf import classical_acf, shift_immune_acf
from .errors import DegenerateVarianceError, InfeasibleDesignError
from .portmanteau import box_pierce, sip_test
from .simulate import config_from_dict, report_to_dict, run_rejection_study

app = FastAPI(
    title="siptest",
    description="Shift-immune autocorrelation testing for series with frequent mean shifts.",
    version=__version__,
)


class TestRequest(BaseModel):
    values: list[float] = Field(min_length=1)
    m: int = 4
    method: Literal["sip1", "sip2", "box"] = "sip2"
    conservative: bool = False


class TestResponse(BaseModel):
    method: str
    conservative: bool
    m: int
    df: int
    n: int
    statistic: float
    p_value: float
    gamma0: Optional[float] = None
    w_raw: Optional[float] = None
    w_used: Optional[float] = None
    rho_hat: Optional[list[float]] = None


class AcfRequest(BaseModel):
    values: list[float] = Field(min_length=1)
    max_lag: int = 20
    kind: Literal["sip", "classical", "both"] = "both"


class AcfSeries(BaseModel):
    kind: str
    max_lag: int
    values: list[float]
    bound: float
    w_hat_used: Optional[float] = None
    n: int


class AcfResponse(BaseModel):
    series: list[AcfSeries]


class NoiseModel(BaseModel):
    family: Literal["iid_gaussian", "iid_t6_scaled", "iid_exp_centered", "ma", "ar1"]
    ma_coeffs: list[float] = []
    ar_phi: float = 0.0


class SimulateRequest(BaseModel):
    n: int
    reps: int
    seed: int
    n_changepoints: int = 0
    min_segment_length: int = 1
    mean_range: tuple[float, float] = (-5.0, 5.0)
    noise: NoiseModel = NoiseModel(family="iid_gaussian")
    m_list: list[int] = [4]
    alpha: float = 0.05
    methods: list[Literal["sip1", "sip2", "box", "oracle", "p_oracle"]] = ["sip2"]
    threads: int = 1


def _bad_request(code: str, message: str) -> HTTPException:
    return HTTPException(status_code=400, detail={"code": code, "message": message})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/test", response_model=TestResponse, response_model_exclude_none=True)
def run_test(req: TestRequest) -> TestResponse:
    n = len(req.values)
    feasible = 1 <= req.m < n if req.method == "box" else req.m >= 1 and req.m + 2 < n / 2
    if not feasible:
        raise _bad_request(
            "infeasible-lag", f"lag order {req.m} is infeasible for a series of length {n}"
        )
    try:
        if req.method == "box":
            res = box_pierce(req.values, req.m)
            return TestResponse(
                method="box", conservative=False, m=res.m, df=res.m, n=res.n,
                statistic=res.statistic, p_value=res.p_value,
            )
        res = sip_test(req.values, req.m, variant=req.method, conservative=req.conservative)
    except DegenerateVarianceError as exc:
        raise _bad_request("degenerate-variance", str(exc)) from None
    return TestResponse(
        method=res.variant, conservative=res.conservative, m=res.m, df=res.df, n=res.n,
        statistic=res.statistic, p_value=res.p_value, gamma0=res.gamma0_used,
        w_raw=res.w_raw, w_used=res.w_used, rho_hat=[float(r) for r in res.rho_hat],
    )


@app.post("/acf", response_model=AcfResponse)
def run_acf(req: AcfRequest) -> AcfResponse:
    n = len(req.values)
    kinds = ["sip", "classical"] if req.kind == "both" else [req.kind]
    if req.max_lag < 1:
        raise _bad_request("infeasible-lag", "max_lag must be >= 1")
    if "sip" in kinds and not req.max_lag + 2 < n / 2:
        raise _bad_request(
            "infeasible-lag", f"max lag {req.max_lag} is infeasible for a series of length {n}"
        )
    if "classical" in kinds and not req.max_lag < n:
        raise _bad_request(
            "infeasible-lag", f"max lag {req.max_lag} is infeasible for a series of length {n}"
        )
    series = []
    try:
        for kind in kinds:
            data = (
                shift_immune_acf(req.values, req.max_lag)
                if kind == "sip"
                else classical_acf(req.values, req.max_lag)
            )
            series.append(
                AcfSeries(
                    kind=data.kind, max_lag=data.max_lag,
                    values=[float(v) for v in data.values], bound=data.bound,
                    w_hat_used=data.w_hat_used, n=data.n,
                )
            )
    except DegenerateVarianceError as exc:
        raise _bad_request("degenerate-variance", str(exc)) from None
    return AcfResponse(series=series)


@app.post("/simulate")
def run_simulate(req: SimulateRequest) -> dict:
    payload = req.model_dump()
    threads = max(1, payload.pop("threads"))
    try:
        config = config_from_dict(payload)
        report = run_rejection_study(config, threads=threads)
    except InfeasibleDesignError as exc:
        raise _bad_request("infeasible-design", str(exc)) from None
    except ValueError as exc:
        raise _bad_request("bad-config", str(exc)) from None
    return report_to_dict(report)
