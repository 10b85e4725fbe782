from typing import Any

from fastapi import APIRouter, HTTPException, status

from gossip_age.core.exceptions import AnalyticUnavailable, ParameterDomainError, SearchCapExceeded
from gossip_age.core.logging import log_run_event, logger
from gossip_age.schemas.api import (
    FcAgesRequest,
    FcAgesResponse,
    FcEquilibriumRequest,
    LineAgesRequest,
    LineAgesResponse,
    LineEquilibriumRequest,
    StabilityRequest,
)
from gossip_age.schemas.results import EquilibriumResult, StabilityReport
from gossip_age.services import equilibrium
from gossip_age.services.core_model import ac_threshold, server_age, subscriber_age
from gossip_age.services.fc_analytics import solve_fc_set_ages
from gossip_age.services.line_analytics import line_node_ages
from gossip_age.services.reporting import finite_or_none

router = APIRouter()


def _bad_request(exc: Exception) -> HTTPException:
    logger.warning(f"rejected request: {exc}")
    return HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(exc))


@router.post("/ages/line", response_model=LineAgesResponse)
def line_ages(body: LineAgesRequest) -> Any:
    """
    Expected age of every user in one period of the line
    """
    try:
        ages = line_node_ages(body.m, body.params)
    except ParameterDomainError as e:
        raise _bad_request(e)
    return LineAgesResponse(
        m=body.m,
        node_ages=ages.tolist(),
        server_age=server_age(body.params),
        subscriber_age=subscriber_age(body.params),
        threshold=ac_threshold(body.params),
    )


@router.post("/ages/fc", response_model=FcAgesResponse)
def fc_ages(body: FcAgesRequest) -> Any:
    """
    Expected minimum age of k-sets of non-subscribers, k = 1..n - m_sub
    """
    try:
        table = solve_fc_set_ages(body.n, body.m_sub, body.params)
    except ParameterDomainError as e:
        raise _bad_request(e)
    size = body.n - body.m_sub
    set_ages = [finite_or_none(table.x(k)) for k in range(1, size + 1)]
    return FcAgesResponse(
        n=body.n,
        m_sub=body.m_sub,
        set_ages=set_ages,
        nonsubscriber_age=set_ages[0] if set_ages else None,
        server_age=server_age(body.params),
        subscriber_age=subscriber_age(body.params),
        threshold=ac_threshold(body.params),
    )


@router.post("/equilibrium/line", response_model=EquilibriumResult)
def line_equilibrium(body: LineEquilibriumRequest) -> Any:
    try:
        result = equilibrium.line_stackelberg(body.p, body.L, body.p_e, body.cost, body.mode)
    except (ParameterDomainError, SearchCapExceeded) as e:
        raise _bad_request(e)
    log_run_event("api.equilibrium", {"topology": "line", "m": result.m, "utility": result.utility})
    return result


@router.post("/equilibrium/fc", response_model=EquilibriumResult)
def fc_equilibrium(body: FcEquilibriumRequest) -> Any:
    try:
        result = equilibrium.fc_stackelberg(body.n, body.p, body.L, body.p_e, body.cost, body.mode)
    except ParameterDomainError as e:
        raise _bad_request(e)
    log_run_event("api.equilibrium", {"topology": "fc", "n": body.n, "m": result.m, "utility": result.utility})
    return result


@router.post("/stability", response_model=StabilityReport)
def stability(body: StabilityRequest) -> Any:
    """
    Analytical AC-stability verdict per user
    """
    try:
        return equilibrium.ac_stability_report(body.profile, body.params)
    except AnalyticUnavailable as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))
    except ParameterDomainError as e:
        raise _bad_request(e)
