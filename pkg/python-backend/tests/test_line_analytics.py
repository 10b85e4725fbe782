import itertools

import numpy as np
import pytest

from gossip_age.core.exceptions import ParameterDomainError
from gossip_age.schemas.params import GameParams
from gossip_age.services.core_model import ac_threshold, subscriber_age
from gossip_age.services.line_analytics import (
    IntervalSet,
    alt_unsubscribe_age,
    line_node_ages,
    midpoint_geometry,
    solve_line_geometry,
    solve_line_set_ages,
)

GRID = [
    GameParams(p_e=pe, p=p, beta=beta, L=L)
    for p, beta, pe, L in itertools.product([0.1, 0.2, 0.5, 1.0], [0.3, 0.6, 1.0], [0.1, 0.3], [1.6, 3.0, 10.0])
]
PERIODS = [1, 2, 3, 7, 14, 30]


def test_period_seven_keeps_every_nonsubscriber_compatible(line_params):
    ages = line_node_ages(7, line_params)
    assert ages.shape == (8,)
    assert ages[0] == pytest.approx(0.8)
    assert ages[7] == pytest.approx(0.8)
    assert ages[1:7].max() < 8.0


def test_unsubscribing_at_period_seven_breaks_compatibility(line_params):
    assert alt_unsubscribe_age(7, line_params) >= 8.0
    assert alt_unsubscribe_age(7, line_params) == pytest.approx(line_node_ages(14, line_params)[7])


def test_single_user_cell(line_params):
    ages = line_node_ages(1, line_params)
    np.testing.assert_allclose(ages, [0.8, 0.8])


def test_full_gossip_profile_is_linear():
    params = GameParams(p_e=0.3, p=1.0, beta=0.6, L=10.0)
    m = 9
    expected = [subscriber_age(params) + min(i, m - i) * params.p_e for i in range(m + 1)]
    np.testing.assert_allclose(line_node_ages(m, params), expected, rtol=1e-12)


def test_interval_lookup(line_params):
    table = solve_line_set_ages(6, line_params)
    assert table[IntervalSet(2, 4)] == table.at(2, 4)
    # any set touching a subscriber is fed directly
    assert table.at(0, 3) == pytest.approx(0.8)
    assert table.at(3, 6) == pytest.approx(0.8)
    # larger sets are never older than the sets they contain
    assert table.at(2, 4) <= table.at(3, 3)
    with pytest.raises(ParameterDomainError):
        table.at(4, 2)
    with pytest.raises(ParameterDomainError):
        IntervalSet(3, 1)


@pytest.mark.parametrize("m", [0, -3])
def test_period_must_be_positive(m, line_params):
    with pytest.raises(ParameterDomainError, match="m must be ≥ 1"):
        solve_line_set_ages(m, line_params)


def test_period_cap(line_params):
    with pytest.raises(ParameterDomainError, match="cap"):
        solve_line_set_ages(10_001, line_params)


def test_geometry_boundary_is_zero():
    geometry = solve_line_geometry(8, 0.3)
    for i in range(9):
        assert geometry.g2(0, i) == 0.0
        assert geometry.g2(i, 8) == 0.0


def test_geometry_rejects_bad_probability():
    with pytest.raises(ParameterDomainError):
        solve_line_geometry(5, 0.0)
    with pytest.raises(ParameterDomainError):
        midpoint_geometry(1.5, 10)


@pytest.mark.parametrize("p", [0.1, 0.2, 0.5, 1.0])
def test_midpoint_geometry_matches_full_table(p):
    mid = midpoint_geometry(p, 40)
    for s in range(1, 41):
        assert mid[s] == pytest.approx(solve_line_geometry(s, p).g1(s // 2), rel=1e-12)


# ---------------------------------------------------------------------------
# Structural properties over the parameter grid
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("params", GRID)
def test_midpoint_is_oldest(params):
    for m in PERIODS:
        ages = line_node_ages(m, params)
        centre = ages[m // 2]
        assert centre == pytest.approx(ages.max(), rel=1e-12)
        np.testing.assert_allclose(ages, ages[::-1], rtol=1e-12)


@pytest.mark.parametrize("p", [0.1, 0.2, 0.5, 1.0])
def test_geometry_depends_only_on_distances(p):
    small = solve_line_geometry(10, p)
    for shift in (1, 5, 20):
        large = solve_line_geometry(10 + shift, p)
        for j in range(11):
            for h in range(j, 11):
                assert large.g2(j, h + shift) == pytest.approx(small.g2(j, h), rel=1e-9)


@pytest.mark.parametrize("params", GRID)
def test_ages_grow_with_period(params):
    previous = line_node_ages(1, params)
    for m in range(2, 31):
        ages = line_node_ages(m, params)
        # node i keeps its left distance and moves further from the right subscriber
        assert np.all(ages[:m] >= previous[:m] - 1e-12)
        previous = ages


@pytest.mark.parametrize("params", GRID)
def test_ages_are_affine_in_geometry(params):
    x_s = subscriber_age(params)
    for m in (4, 11, 30):
        table = solve_line_set_ages(m, params)
        geometry = solve_line_geometry(m, params.p)
        for j in range(m + 1):
            for h in range(j, m + 1):
                assert table.at(j, h) == pytest.approx(x_s + params.p_e * geometry.g2(j, h), rel=1e-9)


def test_threshold_crossing_is_equivalent_to_geometry_level(line_params):
    level = line_params.threshold_factor
    mid = midpoint_geometry(line_params.p, 30)
    for m in range(1, 31):
        crosses = line_node_ages(m, line_params).max() >= ac_threshold(line_params)
        assert crosses == (mid[m] >= level)


def test_hand_solved_period_two(line_params):
    np.testing.assert_allclose(line_node_ages(2, line_params), [0.8, 0.8 + 0.3 / 0.36, 0.8])
    assert line_node_ages(2, line_params)[1] == pytest.approx(1.633333333333)
    assert solve_line_geometry(2, 0.2).g2(1, 1) == pytest.approx(1 / 0.36)


def test_midpoint_age_grows_without_bound(line_params):
    midpoints = [line_node_ages(m, line_params)[m // 2] for m in range(1, 201)]
    assert midpoints[0] == pytest.approx(subscriber_age(line_params))
    assert max(midpoints) > 10 * subscriber_age(line_params)


@pytest.mark.parametrize("params", GRID[::5])
def test_unsubscribe_age_grows_with_period(params):
    ages = [alt_unsubscribe_age(m, params) for m in range(1, 31)]
    assert all(later >= earlier for earlier, later in zip(ages, ages[1:]))


def test_unsubscribe_age_respects_the_doubled_cap(line_params):
    with pytest.raises(ParameterDomainError, match="doubled period 2m=12 exceeds the period cap 10"):
        alt_unsubscribe_age(6, line_params, cap=10)
    assert alt_unsubscribe_age(5, line_params, cap=10) == pytest.approx(line_node_ages(10, line_params)[5])
