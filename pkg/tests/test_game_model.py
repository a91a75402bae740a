import numpy as np
import pytest

from replicator_lab.game_model import (
    GameParams,
    PopulationGame,
    congestion_game,
    equilibrium,
    mean_payoff,
    payoff_vector,
    ppi_switch_rate,
)


@pytest.mark.parametrize("ga,gb,expected", [(1.0, 1.0, 0.5), (0.45, 0.55, 0.45), (1.0, 3.0, 0.25)])
def test_equilibrium(ga, gb, expected):
    assert equilibrium(GameParams(ga, gb)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("ga,gb", [(0.0, 1.0), (1.0, 0.0), (-0.5, 1.0), (1.0, -2.0)])
def test_params_require_positive_gains(ga, gb):
    with pytest.raises(ValueError):
        GameParams(ga, gb)


def test_params_derived_quantities():
    p = GameParams(0.45, 0.55)
    assert 0.0 < p.q < 1.0
    assert p.s == pytest.approx(1.0)
    assert np.allclose(p.payoff_matrix(), [[0.0, 0.45], [0.55, 0.0]])


@pytest.mark.parametrize(
    "ga,gb,x,expected",
    [
        (1.0, 1.0, 0.0, (1.0, 0.0)),
        (0.45, 0.55, 0.45, (0.2475, 0.2475)),
        (2.0, 1.0, 1.0, (0.0, 1.0)),
    ],
)
def test_payoff_vector_examples(ga, gb, x, expected):
    u = payoff_vector(GameParams(ga, gb), x)
    assert u == pytest.approx(expected, abs=1e-15)


def test_payoff_vector_matches_matrix_product():
    # payoffs come from the matrix [[0, g_a], [g_b, 0]] acting on (x, 1-x)
    for ga, gb in [(1.0, 1.0), (2.0, 1.0), (0.45, 0.55)]:
        p = GameParams(ga, gb)
        a = p.payoff_matrix()
        for x in np.linspace(0.0, 1.0, 11):
            expected = a @ np.array([x, 1.0 - x])
            assert payoff_vector(p, x) == pytest.approx(tuple(expected), abs=1e-14)


def test_payoff_vector_domain_error():
    p = GameParams(1.0, 1.0)
    with pytest.raises(ValueError):
        payoff_vector(p, -0.01)
    with pytest.raises(ValueError):
        payoff_vector(p, 1.0001)
    # within tolerance of the endpoints is clamped, not raised
    assert payoff_vector(p, 1 + 1e-13) == pytest.approx((0.0, 1.0), abs=1e-12)


def test_mean_payoff_examples():
    assert mean_payoff(GameParams(2.0, 3.0), 0.0) == 0.0
    assert mean_payoff(GameParams(1.0, 1.0), 0.5) == pytest.approx(0.5, abs=1e-15)
    p = GameParams(0.45, 0.55)
    assert mean_payoff(p, 0.45) == pytest.approx(0.2475, abs=1e-15)
    assert mean_payoff(p, p.q) == pytest.approx(p.g_a * p.g_b / p.s, abs=1e-15)


def test_mean_payoff_identity_on_grid():
    grid = np.arange(0.0, 1.0 + 1e-9, 1e-3)
    for ga, gb in [(1.0, 1.0), (0.45, 0.55), (2.5, 0.3)]:
        p = GameParams(ga, gb)
        for x in grid:
            assert abs(mean_payoff(p, x) - p.s * x * (1 - x)) < 1e-12


def test_indifference_at_equilibrium():
    for ga in np.linspace(0.1, 3.0, 15):
        for gb in np.linspace(0.1, 3.0, 15):
            p = GameParams(ga, gb)
            u_a, u_b = payoff_vector(p, p.q)
            assert abs(u_a - u_b) < 1e-12


def test_ppi_switch_rate_examples():
    p = GameParams(1.0, 1.0)
    assert ppi_switch_rate(p, "A", "B", 1.0) == 0.0  # nobody plays B: no one to imitate
    assert ppi_switch_rate(p, "A", "B", 0.75) == pytest.approx(0.125, abs=1e-15)
    assert ppi_switch_rate(p, "B", "A", 0.75) == 0.0  # payoff difference is negative


def test_ppi_switch_rate_validation():
    p = GameParams(1.0, 1.0)
    with pytest.raises(ValueError):
        ppi_switch_rate(p, "A", "A", 0.5)
    with pytest.raises(ValueError):
        ppi_switch_rate(p, "C", "B", 0.5)


def test_ppi_one_sidedness():
    # at every state at most one direction has a positive switch rate
    for ga, gb in [(1.0, 1.0), (0.45, 0.55), (3.0, 1.0)]:
        p = GameParams(ga, gb)
        for x in np.linspace(0.0, 1.0, 101):
            ab = ppi_switch_rate(p, "A", "B", x)
            ba = ppi_switch_rate(p, "B", "A", x)
            assert min(ab, ba) == 0.0


def test_population_game_from_matrix():
    game = PopulationGame.from_matrix([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [0.5, 0.5, 0.0]])
    assert game.n == 3
    x = np.array([0.2, 0.3, 0.5])
    assert game.payoff_eval(x) == pytest.approx([1.3, 0.7, 0.25])
    with pytest.raises(ValueError):
        PopulationGame.from_matrix([[0.0, 1.0]])
    with pytest.raises(ValueError):
        PopulationGame.from_matrix([[0.0, -1.0], [1.0, 0.0]])


def test_congestion_game_payoffs():
    p = GameParams(0.45, 0.55)
    game = congestion_game(p)
    assert game.n == 2
    u = game.payoff_eval(np.array([0.45, 0.55]))
    assert u == pytest.approx([0.2475, 0.2475], abs=1e-15)
