"""
AC-stability verdicts, subscription bounds and Stackelberg sampling rates.

Users subscribe when their unsubscribed age would reach L * x_S; writing every
age as x_S + p_e * g turns each condition into g >= (L - 1)(1/beta + 1), so the
solver only ever compares beta-free geometry factors against that level.
"""
from typing import List, Optional

import numpy as np

from gossip_age.core.config import settings
from gossip_age.core.exceptions import (
    AnalyticUnavailable,
    ParameterDomainError,
    SearchCapExceeded,
)
from gossip_age.core.logging import logger
from gossip_age.schemas.params import CostModel, GameParams
from gossip_age.schemas.results import (
    AuditEntry,
    BetaKind,
    BetaStar,
    EquilibriumMode,
    EquilibriumResult,
    StabilityReport,
    UserVerdict,
    Verdict,
)
from gossip_age.schemas.topology import FullyConnected, LinePeriodic, SubscriptionProfile
from gossip_age.services.core_model import ac_threshold
from gossip_age.services.fc_analytics import fc_nonsub_age, solve_fc_geometry
from gossip_age.services.line_analytics import (
    alt_unsubscribe_age,
    line_node_ages,
    midpoint_geometry,
)

# beta*(m) may overshoot 1 by rounding when g sits exactly on 2(L - 1)
BETA_ROUNDING = 1e-12
_MIN_SPAN = 128


def _cap(cap: Optional[int]) -> int:
    return settings.LINE_PERIOD_CAP if cap is None else cap


def _mid(p: float, upto: int) -> np.ndarray:
    """Midpoint geometry covering periods 0..upto, sized to a power of two for cache reuse."""
    span = _MIN_SPAN
    while span < upto:
        span *= 2
    return midpoint_geometry(p, span)


def _beta_from_level(level: float, L: float) -> BetaStar:
    """Invert level = (L - 1)(1/beta + 1)."""
    if np.isinf(level):
        return BetaStar.limit_zero()
    ratio = level / (L - 1.0)
    if ratio <= 1.0:
        return BetaStar.infeasible()
    beta = 1.0 / (ratio - 1.0)
    if beta > 1.0 + BETA_ROUNDING:
        return BetaStar.infeasible()
    return BetaStar.rate(min(beta, 1.0))


# ---------------------------------------------------------------------------
# Line
# ---------------------------------------------------------------------------


def line_m_star(params: GameParams, cap: Optional[int] = None) -> int:
    """Smallest period whose subscribers would break the AC constraint by unsubscribing."""
    cap = _cap(cap)
    level = params.threshold_factor
    top = min(64, cap)
    while True:
        mid = _mid(params.p, 2 * top)
        # g1(p, m, 2m) for m = 1..top
        hits = np.nonzero(mid[2 : 2 * top + 1 : 2] >= level)[0]
        if hits.size:
            return int(hits[0]) + 1
        if top >= cap:
            raise SearchCapExceeded(f"no feasible period below cap {cap}")
        top = min(top * 4, cap)


def line_m_star_star(params: GameParams, cap: Optional[int] = None) -> int:
    """Largest period whose central non-subscriber still meets the AC constraint."""
    cap = _cap(cap)
    level = params.threshold_factor
    top = min(128, cap)
    while True:
        mid = _mid(params.p, top + 1)
        violations = np.nonzero(mid[1 : top + 2] >= level)[0]
        if violations.size:
            # first violating period is violations[0] + 1
            return int(violations[0])
        if top >= cap:
            raise SearchCapExceeded(f"no feasible period below cap {cap}")
        top = min(top * 4, cap)


def line_beta_star(
    m: int,
    p: float,
    L: float,
    mode: EquilibriumMode = EquilibriumMode.SERVER_PREFERRED,
) -> BetaStar:
    """
    Minimum beta sustaining period m. Server-preferred users settle on m*(beta),
    worst-case users on m**(beta); the latter is reached at the equality point
    of the central non-subscriber of period m + 1.
    """
    if m < 1:
        raise ParameterDomainError("m must be ≥ 1")
    if L <= 1.0:
        raise ParameterDomainError("L must exceed 1")
    if mode is EquilibriumMode.WORST_CASE:
        level = _mid(p, m + 1)[m + 1]
    else:
        level = _mid(p, 2 * m)[2 * m]
    return _beta_from_level(float(level), L)


def line_subscription_fraction(
    params: GameParams,
    mode: EquilibriumMode = EquilibriumMode.SERVER_PREFERRED,
    cap: Optional[int] = None,
) -> float:
    """F_S of the line when the server commits to params.beta."""
    if mode is EquilibriumMode.WORST_CASE:
        return 1.0 / line_m_star_star(params, cap)
    return 1.0 / line_m_star(params, cap)


def _no_subscription(kind: str, mode: EquilibriumMode, n: Optional[int], audit) -> EquilibriumResult:
    return EquilibriumResult(
        topology=kind,
        mode=mode,
        m=None,
        n=n,
        beta_star=0.0,
        beta_limit_zero=False,
        subscriber_fraction=0.0,
        cost=0.0,
        utility=0.0,
        feasible=False,
        audit=audit,
    )


def _audited(m: int, beta: BetaStar, fraction: float, cost: CostModel) -> AuditEntry:
    if not beta.feasible:
        return AuditEntry(m=m, beta_star=beta, subscriber_fraction=fraction)
    charge = cost(beta.cost_argument)
    return AuditEntry(
        m=m,
        beta_star=beta,
        subscriber_fraction=fraction,
        cost=charge,
        utility=fraction - charge,
    )


def _result_from(kind: str, mode: EquilibriumMode, n: Optional[int], best: AuditEntry, audit) -> EquilibriumResult:
    return EquilibriumResult(
        topology=kind,
        mode=mode,
        m=best.m,
        n=n,
        beta_star=best.beta_star.cost_argument,
        beta_limit_zero=best.beta_star.kind is BetaKind.LIMIT_ZERO,
        subscriber_fraction=best.subscriber_fraction,
        cost=best.cost,
        utility=best.utility,
        feasible=True,
        audit=audit,
    )


def line_stackelberg(
    p: float,
    L: float,
    p_e: float,
    cost: CostModel,
    mode: EquilibriumMode = EquilibriumMode.SERVER_PREFERRED,
    cap: Optional[int] = None,
) -> EquilibriumResult:
    # validates the probabilities; beta plays no role in the argmax
    GameParams(p_e=p_e, p=p, beta=1.0, L=L)
    cap = _cap(cap)
    audit: List[AuditEntry] = []
    best: Optional[AuditEntry] = None
    for m in range(1, cap + 1):
        fraction = 1.0 / m
        # c >= 0, so no longer period can beat the incumbent
        if best is not None and fraction < best.utility:
            break
        entry = _audited(m, line_beta_star(m, p, L, mode), fraction, cost)
        audit.append(entry)
        if entry.utility is not None and (best is None or entry.utility > best.utility):
            best = entry
    if best is None:
        logger.warning(f"no feasible line period below cap {cap} for p={p} L={L}")
        return _no_subscription("line", mode, None, audit)
    return _result_from("line", mode, None, best, audit)


# ---------------------------------------------------------------------------
# Fully connected
# ---------------------------------------------------------------------------


def fc_m_star(n: int, params: GameParams) -> int:
    """The unique AC-stable subscriber count: max{m : g(p, m-1, 1) >= level}."""
    geometry = solve_fc_geometry(n, params.p)
    level = params.threshold_factor
    for m in range(n, 0, -1):
        if geometry.g(m - 1, 1) >= level:
            return m
    # unreachable: g(p, 0, 1) is infinite
    raise AssertionError("m = 1 is always admissible")


def fc_subscription_fraction(n: int, params: GameParams) -> float:
    return fc_m_star(n, params) / n


def fc_beta_star(m: int, n: int, p: float, L: float) -> BetaStar:
    if not 1 <= m <= n:
        raise ParameterDomainError(f"m must lie in 1..{n}, got {m}")
    if L <= 1.0:
        raise ParameterDomainError("L must exceed 1")
    if m == 1:
        return BetaStar.limit_zero()
    return _beta_from_level(solve_fc_geometry(n, p).g(m - 1, 1), L)


def fc_stackelberg(
    n: int,
    p: float,
    L: float,
    p_e: float,
    cost: CostModel,
    mode: EquilibriumMode = EquilibriumMode.SERVER_PREFERRED,
) -> EquilibriumResult:
    """The AC-stable count is unique, so both modes coincide."""
    GameParams(p_e=p_e, p=p, beta=1.0, L=L)
    audit: List[AuditEntry] = []
    best: Optional[AuditEntry] = None
    for m in range(1, n + 1):
        entry = _audited(m, fc_beta_star(m, n, p, L), m / n, cost)
        audit.append(entry)
        if entry.utility is not None and (best is None or entry.utility > best.utility):
            best = entry
    if best is None:
        return _no_subscription("fc", mode, n, audit)
    return _result_from("fc", mode, n, best, audit)


# ---------------------------------------------------------------------------
# Utility at a committed beta
# ---------------------------------------------------------------------------


def server_utility(
    params: GameParams,
    cost: CostModel,
    topology: str,
    n: Optional[int] = None,
    mode: EquilibriumMode = EquilibriumMode.SERVER_PREFERRED,
) -> float:
    """L_R(beta, a) = F_S(beta) - c(beta) with users answering beta through the AC rule."""
    if topology == "line":
        fraction = line_subscription_fraction(params, mode)
    elif topology == "fc":
        if n is None:
            raise ParameterDomainError("fully-connected utility needs n")
        fraction = fc_subscription_fraction(n, params)
    else:
        raise ParameterDomainError(f"unknown topology {topology!r}")
    return fraction - cost(params.beta)


# ---------------------------------------------------------------------------
# Stability
# ---------------------------------------------------------------------------


def _subscriber_verdict(node: int, alternate: float, threshold: float) -> UserVerdict:
    # subscribing is kept on the boundary itself (indicator uses >=)
    verdict = Verdict.STABLE_SUBSCRIBER if alternate >= threshold else Verdict.UNSTABLE
    return UserVerdict(node=node, subscriber=True, verdict=verdict, age=alternate)


def _nonsubscriber_verdict(node: int, age: float, threshold: float) -> UserVerdict:
    verdict = Verdict.STABLE_NONSUBSCRIBER if age < threshold else Verdict.UNSTABLE
    return UserVerdict(node=node, subscriber=False, verdict=verdict, age=age)


def ac_stability_report(profile: SubscriptionProfile, params: GameParams) -> StabilityReport:
    threshold = ac_threshold(params)
    topology = profile.topology
    users: List[UserVerdict] = []
    if isinstance(topology, LinePeriodic):
        m = topology.m
        users.append(_subscriber_verdict(0, alt_unsubscribe_age(m, params), threshold))
        ages = line_node_ages(m, params)
        users.extend(_nonsubscriber_verdict(i, float(ages[i]), threshold) for i in range(1, m))
    elif isinstance(topology, FullyConnected):
        n, m = topology.n, topology.m_sub
        if m < n:
            own = fc_nonsub_age(n, m, params)
            users.extend(_nonsubscriber_verdict(i, own, threshold) for i in range(n - m))
        if m > 0:
            alternate = fc_nonsub_age(n, m - 1, params)
            users.extend(_subscriber_verdict(i, alternate, threshold) for i in range(n - m, n))
    else:
        raise AnalyticUnavailable("analytical verdict unavailable; use simulation")
    return StabilityReport(threshold=threshold, users=users, source="analytic")
