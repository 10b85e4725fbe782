import itertools
import math

import numpy as np
import pytest

from gossip_age.core.exceptions import EmptyDomainError, ParameterDomainError
from gossip_age.schemas.params import GameParams
from gossip_age.services.core_model import subscriber_age
from gossip_age.services.fc_analytics import (
    fc_nonsub_age,
    solve_fc_geometry,
    solve_fc_set_ages,
    transition_weights,
)

GRID = [
    GameParams(p_e=pe, p=p, beta=beta, L=L)
    for p, beta, pe, L in itertools.product([0.1, 0.2, 0.5, 1.0], [0.3, 0.6, 1.0], [0.1, 0.3], [1.6, 3.0, 10.0])
]
SIZES = [2, 5, 10, 20]


def test_four_subscribers_meet_the_threshold(fc_params):
    assert fc_nonsub_age(10, 4, fc_params) < 1.28
    assert fc_nonsub_age(10, 3, fc_params) >= 1.28


def test_nonsubscriber_age_falls_with_subscribers(fc_params):
    ages = [fc_nonsub_age(10, m, fc_params) for m in range(1, 10)]
    assert all(later < earlier for earlier, later in zip(ages, ages[1:]))
    assert fc_nonsub_age(10, 5, fc_params) <= fc_nonsub_age(10, 4, fc_params)


def test_no_subscribers_is_unbounded(fc_params):
    assert math.isinf(fc_nonsub_age(10, 0, fc_params))
    table = solve_fc_set_ages(10, 0, fc_params)
    assert table.no_subscribers
    assert math.isinf(table.x(3))


def test_everyone_subscribing_has_no_nonsubscriber(fc_params):
    table = solve_fc_set_ages(10, 10, fc_params)
    assert table.empty
    with pytest.raises(EmptyDomainError):
        fc_nonsub_age(10, 10, fc_params)


def test_counts_are_validated(fc_params):
    with pytest.raises(ParameterDomainError):
        solve_fc_set_ages(10, 11, fc_params)
    with pytest.raises(ParameterDomainError):
        solve_fc_set_ages(0, 0, fc_params)
    with pytest.raises(ParameterDomainError, match="supported maximum"):
        solve_fc_set_ages(1001, 1, fc_params)
    with pytest.raises(ParameterDomainError):
        solve_fc_set_ages(10, 4, fc_params).x(7)


def test_transition_weights_small_network():
    weights = transition_weights(3, 1, 1, 0.5)
    assert weights["subscriber"] == pytest.approx(0.5)
    np.testing.assert_allclose(weights["gossip"], [0.25])
    assert weights["self_loop"] == pytest.approx(0.25)


def test_transition_weights_full_gossip():
    weights = transition_weights(6, 2, 1, 1.0)
    assert weights["subscriber"] == 1.0
    assert weights["self_loop"] == 0.0
    np.testing.assert_array_equal(weights["gossip"], np.zeros(3))


@pytest.mark.parametrize("p", [0.1, 0.2, 0.5, 1.0])
@pytest.mark.parametrize("n", SIZES)
def test_transition_weights_sum_to_one(p, n):
    for m in range(1, n):
        for k in range(1, n - m + 1):
            weights = transition_weights(n, m, k, p)
            total = weights["subscriber"] + weights["gossip"].sum() + weights["self_loop"]
            assert total == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("params", GRID)
def test_largest_set_closed_form(params):
    x_s = subscriber_age(params)
    for n in SIZES:
        for m in range(1, n):
            table = solve_fc_set_ages(n, m, params)
            expected = x_s + params.p_e / (1.0 - (1.0 - params.p) ** (m * (n - m)))
            assert table.x(n - m) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("params", GRID)
def test_ages_are_affine_in_geometry(params):
    x_s = subscriber_age(params)
    for n in SIZES:
        geometry = solve_fc_geometry(n, params.p)
        for m in range(1, n):
            table = solve_fc_set_ages(n, m, params)
            for k in range(1, n - m + 1):
                assert table.x(k) == pytest.approx(x_s + params.p_e * geometry.g(m, k), rel=1e-9)


@pytest.mark.parametrize("p", [0.1, 0.2, 0.5])
@pytest.mark.parametrize("n", SIZES)
def test_geometry_decreases_with_subscribers(p, n):
    geometry = solve_fc_geometry(n, p)
    assert math.isinf(geometry.g(0, 1))
    singles = [geometry.g(m, 1) for m in range(1, n)]
    assert all(later < earlier for earlier, later in zip(singles, singles[1:]))


@pytest.mark.parametrize("p", [0.1, 0.2, 0.5, 1.0])
def test_larger_sets_are_younger(p):
    geometry = solve_fc_geometry(12, p)
    for m in range(1, 12):
        column = [geometry.g(m, k) for k in range(1, 12 - m + 1)]
        assert all(later <= earlier + 1e-12 for earlier, later in zip(column, column[1:]))


def test_largest_set_hand_value(fc_params):
    table = solve_fc_set_ages(10, 4, fc_params)
    assert table.x(6) == pytest.approx(0.8 + 0.3 / (1 - 0.8**24))
    assert table.x(6) == pytest.approx(1.10142, abs=1e-5)
    assert solve_fc_geometry(10, 0.2).g(4, 6) == pytest.approx(1.00474, abs=1e-5)


@pytest.mark.parametrize("n", SIZES)
def test_full_gossip_collapses_to_one_hop(n):
    params = GameParams(p_e=0.3, p=1.0, beta=0.6, L=3.0)
    geometry = solve_fc_geometry(n, 1.0)
    for m in range(1, n):
        for k in range(1, n - m + 1):
            assert geometry.g(m, k) == pytest.approx(1.0, rel=1e-12)
            assert solve_fc_set_ages(n, m, params).x(k) == pytest.approx(subscriber_age(params) + 0.3)
