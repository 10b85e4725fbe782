"""
Exact expected ages on the symmetric two-way line with subscribers every m nodes.

The state of a contiguous set S_[j,h] inside one cell (subscribers at 0 and m)
only ever moves to a strictly larger set, so the expectations satisfy a
recursion that is solved by back-substitution in decreasing set size:

    x_[j,h] = (p_e + p^2 x_[j-1,h+1] + p(1-p) (x_[j-1,h] + x_[j,h+1])) / (1 - (1-p)^2)

with x_[j,h] = x_S as soon as the set touches a subscriber. A set is
identified by its distances (a, b) = (j, m - h) to the two subscribers; all
sets of one size share the diagonal s = a + b, which is what gets vectorised.
The geometry factor g2 runs the same recursion with constant 1 and base 0.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Tuple

import numpy as np

from gossip_age.core.config import settings
from gossip_age.core.exceptions import ParameterDomainError
from gossip_age.core.logging import logger
from gossip_age.schemas.params import GameParams
from gossip_age.services.core_model import subscriber_age


@dataclass(frozen=True)
class IntervalSet:
    """Users {j, ..., h} of one cell."""

    j: int
    h: int

    def __post_init__(self):
        if self.j < 0 or self.j > self.h:
            raise ParameterDomainError(f"invalid interval [{self.j}, {self.h}]")

    @property
    def size(self) -> int:
        return self.h - self.j + 1


@dataclass(frozen=True)
class LineAgeTable:
    """x_[j,h] stored densely as values[j, h - j]; cells with j + (h - j) > m are NaN."""

    m: int
    params: GameParams
    values: np.ndarray

    def at(self, j: int, h: int) -> float:
        _check_interval(self.m, j, h)
        return float(self.values[j, h - j])

    def __getitem__(self, interval: IntervalSet) -> float:
        return self.at(interval.j, interval.h)

    def node_ages(self) -> np.ndarray:
        return self.values[:, 0].copy()


@dataclass(frozen=True)
class LineGeometryTable:
    """g2(p, j, h, m) in the same layout as LineAgeTable."""

    m: int
    p: float
    values: np.ndarray

    def g2(self, j: int, h: int) -> float:
        _check_interval(self.m, j, h)
        return float(self.values[j, h - j])

    def g1(self, i: int) -> float:
        return self.g2(i, i)


def _check_period(m: int, cap: int = None) -> None:
    cap = settings.LINE_PERIOD_CAP if cap is None else cap
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ParameterDomainError("m must be ≥ 1")
    if m > cap:
        raise ParameterDomainError(f"m={m} exceeds the period cap {cap}")


def _check_interval(m: int, j: int, h: int) -> None:
    if not 0 <= j <= h <= m:
        raise ParameterDomainError(f"interval [{j}, {h}] outside 0..{m}")


def _check_probability(p: float) -> None:
    if not 0.0 < p <= 1.0:
        raise ParameterDomainError(f"gossip probability must lie in (0, 1], got {p}")


def _diagonals(p: float, size: int, constant: float, base: float) -> Iterator[Tuple[int, np.ndarray]]:
    """
    Yield (s, diag) for s = 0..size where diag[a] is the value of the set at
    distances (a, s - a). Diagonal s holds the sets of size m + 1 - s, so the
    sweep runs in decreasing set size, left to right within a size.
    """
    stay = 1.0 - (1.0 - p) ** 2
    both = p * p
    one_side = p * (1.0 - p)
    older = newer = None
    for s in range(size + 1):
        diag = np.empty(s + 1)
        diag[0] = base
        diag[s] = base
        if s >= 2:
            diag[1:s] = (
                constant
                + both * older[: s - 1]
                + one_side * (newer[: s - 1] + newer[1:s])
            ) / stay
        yield s, diag
        older, newer = newer, diag


def _interval_table(m: int, p: float, constant: float, base: float) -> np.ndarray:
    values = np.full((m + 1, m + 1), np.nan)
    for s, diag in _diagonals(p, m, constant, base):
        # every set on diagonal s has h - j = m - s and j = a
        values[: s + 1, m - s] = diag
    values.setflags(write=False)
    return values


@lru_cache(maxsize=256)
def solve_line_set_ages(m: int, params: GameParams) -> LineAgeTable:
    _check_period(m)
    values = _interval_table(m, params.p, params.p_e, subscriber_age(params))
    logger.debug(f"line age table built for m={m}")
    return LineAgeTable(m=m, params=params, values=values)


def line_node_ages(m: int, params: GameParams) -> np.ndarray:
    """x_i for i = 0..m; both ends are subscribers."""
    return solve_line_set_ages(m, params).node_ages()


@lru_cache(maxsize=256)
def solve_line_geometry(m: int, p: float) -> LineGeometryTable:
    _check_period(m)
    _check_probability(p)
    return LineGeometryTable(m=m, p=p, values=_interval_table(m, p, 1.0, 0.0))


def alt_unsubscribe_age(m: int, params: GameParams, cap: int = None) -> float:
    """Age subscriber 0 would see after unsubscribing: the midpoint of a 2m cell."""
    cap = settings.LINE_PERIOD_CAP if cap is None else cap
    _check_period(m, cap)
    if 2 * m > cap:
        raise ParameterDomainError(f"doubled period 2m={2 * m} exceeds the period cap {cap}")
    if 2 * m <= settings.LINE_PERIOD_CAP:
        return float(line_node_ages(2 * m, params)[m])
    # custom caps above the configured one bypass the cached tables
    table = _interval_table(2 * m, params.p, params.p_e, subscriber_age(params))
    return float(table[m, 0])


@lru_cache(maxsize=64)
def midpoint_geometry(p: float, size: int) -> np.ndarray:
    """
    mid[s] = g1(p, floor(s/2), s) for s = 0..size, i.e. the geometry factor of
    the central non-subscriber of a cell of period s. Only two diagonals are
    kept in memory, so long period searches stay O(size) in space.
    """
    _check_probability(p)
    mid = np.empty(size + 1)
    for s, diag in _diagonals(p, size, 1.0, 0.0):
        mid[s] = diag[s // 2]
    mid.setflags(write=False)
    logger.debug(f"midpoint geometry built for p={p} up to period {size}")
    return mid
