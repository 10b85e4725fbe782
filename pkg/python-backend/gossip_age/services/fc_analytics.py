"""
Exact expected ages in the fully-connected network with m subscribers.

By symmetry every set of k non-subscribers has the same expected min-age
x_[1,k]. In one slot the set either hears a subscriber (prob. 1-(1-p)^{km}),
or hears exactly i of the other n-m-k non-subscribers and nobody else, or
hears nothing. That gives

    x_[1,k] = [p_e + sum_i C(n-m-k, i) x_[1,k+i] (1-(1-p)^k)^i (1-p)^{k(n-k-i)}
               + (1-(1-p)^{km}) x_S] / (1 - (1-p)^{k(n-k)})

solved for k = n-m, ..., 1. Powers of (1-p) go through log1p/expm1 so that
small p keeps its precision; underflow to 0 only removes vanishing terms.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict

import numpy as np

from gossip_age.core.config import settings
from gossip_age.core.exceptions import EmptyDomainError, ParameterDomainError
from gossip_age.core.logging import logger
from gossip_age.schemas.params import GameParams
from gossip_age.services.core_model import subscriber_age

BOOKKEEPING_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FcAgeTable:
    """x_[1,k] for k = 1..n-m_sub at values[k]; values[0] is unused."""

    n: int
    m_sub: int
    params: GameParams
    values: np.ndarray

    @property
    def no_subscribers(self) -> bool:
        return self.m_sub == 0

    @property
    def empty(self) -> bool:
        return self.m_sub == self.n

    def x(self, k: int) -> float:
        if not 1 <= k <= self.n - self.m_sub:
            raise ParameterDomainError(f"set size k={k} outside 1..{self.n - self.m_sub}")
        return float(self.values[k])

    @property
    def nonsubscriber_age(self) -> float:
        if self.empty:
            raise EmptyDomainError("every user subscribes; there is no non-subscriber")
        return self.x(1)


@dataclass(frozen=True)
class FcGeometryTable:
    """g(p, m, k) at values[m, k]; row m = 0 is +inf, invalid cells NaN."""

    n: int
    p: float
    values: np.ndarray

    def g(self, m: int, k: int) -> float:
        if m == 0:
            return float("inf")
        if not (1 <= m <= self.n - 1 and 1 <= k <= self.n - m):
            raise ParameterDomainError(f"g(p, {m}, {k}) undefined for n={self.n}")
        return float(self.values[m, k])


def _check_counts(n: int, m_sub: int) -> None:
    if n < 1:
        raise ParameterDomainError("n must be ≥ 1")
    if n > settings.FC_MAX_USERS:
        raise ParameterDomainError(f"n={n} exceeds the supported maximum {settings.FC_MAX_USERS}")
    if not 0 <= m_sub <= n:
        raise ParameterDomainError(f"m must lie in 0..{n}, got {m_sub}")


@lru_cache(maxsize=1024)
def _binomial_row(size: int) -> np.ndarray:
    """C(size, i) for i = 0..size, built iteratively in floating point."""
    i = np.arange(1, size + 1, dtype=float)
    row = np.concatenate(([1.0], np.cumprod((size - i + 1.0) / i)))
    row.setflags(write=False)
    return row


def transition_weights(n: int, m: int, k: int, p: float) -> Dict[str, object]:
    """
    One-slot transition probabilities of a k-set of non-subscribers:
    subscriber hit, exactly i = 1..n-m-k gossip arrivals (array), and self-loop.
    """
    with np.errstate(divide="ignore"):
        log_q = np.log1p(-p)
    outside = n - m - k
    i = np.arange(1, outside + 1)
    reach = -np.expm1(k * log_q)
    gossip = _binomial_row(outside)[1:] * reach**i * np.exp(k * (n - k - i) * log_q)
    return {
        "subscriber": float(-np.expm1(k * m * log_q)),
        "gossip": gossip,
        "self_loop": float(np.exp(k * (n - k) * log_q)),
    }


def _prefix_recursion(n: int, m: int, p: float, constant: float, base: float) -> np.ndarray:
    size = n - m
    values = np.full(size + 1, np.nan)
    for k in range(size, 0, -1):
        weights = transition_weights(n, m, k, p)
        gossip = weights["gossip"]
        total = weights["subscriber"] + gossip.sum() + weights["self_loop"]
        if abs(total - 1.0) > BOOKKEEPING_TOLERANCE:
            logger.warning(f"transition weights sum to {total!r} for n={n} m={m} k={k} p={p}")
        inflow = float(gossip @ values[k + 1 :]) if gossip.size else 0.0
        values[k] = (constant + inflow + weights["subscriber"] * base) / (1.0 - weights["self_loop"])
    values.setflags(write=False)
    return values


@lru_cache(maxsize=512)
def solve_fc_set_ages(n: int, m_sub: int, params: GameParams) -> FcAgeTable:
    _check_counts(n, m_sub)
    if m_sub == 0:
        # no subscribers: the min-age of every set grows without bound
        values = np.full(n + 1, np.inf)
        values[0] = np.nan
        values.setflags(write=False)
        return FcAgeTable(n=n, m_sub=0, params=params, values=values)
    if m_sub == n:
        values = np.full(1, np.nan)
        values.setflags(write=False)
        return FcAgeTable(n=n, m_sub=n, params=params, values=values)
    values = _prefix_recursion(n, m_sub, params.p, params.p_e, subscriber_age(params))
    return FcAgeTable(n=n, m_sub=m_sub, params=params, values=values)


def fc_nonsub_age(n: int, m_sub: int, params: GameParams) -> float:
    """x_NS = x_[1,1]; +inf without subscribers."""
    table = solve_fc_set_ages(n, m_sub, params)
    if table.no_subscribers:
        return float("inf")
    return table.nonsubscriber_age


@lru_cache(maxsize=64)
def solve_fc_geometry(n: int, p: float) -> FcGeometryTable:
    _check_counts(n, 0)
    if not 0.0 < p <= 1.0:
        raise ParameterDomainError(f"gossip probability must lie in (0, 1], got {p}")
    values = np.full((n + 1, n + 1), np.nan)
    values[0, :] = np.inf
    for m in range(1, n):
        values[m, : n - m + 1] = _prefix_recursion(n, m, p, 1.0, 0.0)
    values.setflags(write=False)
    logger.debug(f"fc geometry table built for n={n} p={p}")
    return FcGeometryTable(n=n, p=p, values=values)
