import math

import numpy as np
import pytest

from replicator_lab.game_model import GameParams, PopulationGame, congestion_game
from replicator_lab.interval_maps import IntervalMapSpec, Model, evaluate
from replicator_lab.simplex_dynamics import (
    ScoreState,
    SimplexEscape,
    SimplexState,
    ew_score_update,
    model_ii_max_step,
    rd_integrate,
    rd_vector_field,
    step_model_i,
    step_model_ii,
    step_model_iii,
)


def pair(x):
    return SimplexState.from_pair(x)


def test_simplex_state_construction():
    s = SimplexState(np.array([0.2, 0.3, 0.5]))
    assert s.shares.sum() == pytest.approx(1.0, abs=1e-15)
    assert len(s) == 3
    # tiny negatives are clamped, larger ones rejected
    s = SimplexState(np.array([-1e-13, 0.5, 0.5]))
    assert s.shares[0] == 0.0
    with pytest.raises(ValueError):
        SimplexState(np.array([-1e-6, 0.5, 0.5]))
    with pytest.raises(ValueError):
        SimplexState(np.array([0.5, 0.6]))  # sum too far from 1
    s = SimplexState(np.array([0.5, 0.5 + 1e-10]))
    assert s.shares.sum() == pytest.approx(1.0, abs=1e-15)


def test_simplex_state_immutable():
    s = SimplexState.uniform(3)
    with pytest.raises(ValueError):
        s.shares[0] = 0.7


def test_step_model_i_fixed_points():
    game = congestion_game(GameParams(1.0, 1.0))
    for delta in (0.1, 2.0, 50.0):
        out = step_model_i(game, pair(0.5), delta)
        assert out.shares[0] == pytest.approx(0.5, abs=1e-15)
        out = step_model_i(game, pair(1.0), delta)
        assert out.shares[0] == pytest.approx(1.0, abs=1e-15)


def test_step_model_i_value():
    game = congestion_game(GameParams(1.0, 1.0))
    out = step_model_i(game, pair(0.25), 2.0)
    # 0.25 * (1 + 2*0.75) / (1 + 2*0.375) = 5/14
    assert out.shares[0] == pytest.approx(0.25 * 2.5 / 1.75, abs=1e-15)


def test_step_model_i_rejects_negative_growth():
    game = PopulationGame(n=2, payoff_eval=lambda x: np.array([-1.0, 0.0]))
    with pytest.raises(ValueError):
        step_model_i(game, pair(0.5), 2.0)


def test_step_model_ii_vertices_fixed():
    game = congestion_game(GameParams(1.3, 0.7))
    for x in (0.0, 1.0):
        out = step_model_ii(game, pair(x), 1.5)
        assert out.shares[0] == pytest.approx(x, abs=1e-15)


def test_step_model_ii_boundary_case():
    game = congestion_game(GameParams(0.5, 0.5))
    out = step_model_ii(game, pair(0.25), 16.0)
    assert out.shares[0] == 1.0
    with pytest.raises(SimplexEscape):
        step_model_ii(game, pair(0.25), 17.0)


def test_step_model_iii_equilibrium_fixed():
    p = GameParams(0.45, 0.55)
    game = congestion_game(p)
    out = step_model_iii(game, pair(p.q), 12.0)
    assert out.shares[0] == pytest.approx(p.q, abs=1e-14)


def test_step_model_iii_value():
    game = congestion_game(GameParams(0.5, 0.5))
    out = step_model_iii(game, pair(0.25), 8.0)
    expected = 0.25 * math.exp(3.0) / (0.25 * math.exp(3.0) + 0.75 * math.exp(1.0))
    assert out.shares[0] == pytest.approx(expected, abs=1e-14)


def test_step_model_iii_small_step_continuity():
    game = congestion_game(GameParams(1.0, 1.0))
    for delta in (1e-3, 1e-5):
        out = step_model_iii(game, pair(0.3), delta)
        assert abs(out.shares[0] - 0.3) <= 2.0 * delta


def test_step_model_iii_large_step_no_overflow():
    game = congestion_game(GameParams(1.0, 1.0))
    out = step_model_iii(game, pair(0.9), 1000.0)
    assert np.all(np.isfinite(out.shares))


def test_ew_zero_scores_induce_uniform():
    s = ScoreState(np.zeros(4))
    assert s.induced_state().shares == pytest.approx(np.full(4, 0.25))


def test_ew_one_step_at_equilibrium():
    game = congestion_game(GameParams(0.5, 0.5))
    out = ew_score_update(game, ScoreState(np.zeros(2)), 8.0)
    assert out.scores == pytest.approx([2.0, 2.0], abs=1e-15)
    assert out.induced_state().shares == pytest.approx([0.5, 0.5], abs=1e-15)


def test_ew_consistency_with_model_iii():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(2, 5))
        game = PopulationGame.from_matrix(rng.uniform(0.0, 2.0, size=(n, n)))
        y = ScoreState(rng.normal(0.0, 2.0, size=n))
        delta = float(rng.uniform(0.01, 10.0))
        via_scores = ew_score_update(game, y, delta).induced_state().shares
        direct = step_model_iii(game, y.induced_state(), delta).shares
        assert np.max(np.abs(via_scores - direct)) < 1e-12


def test_rd_vector_field_zeros():
    p = GameParams(0.45, 0.55)
    game = congestion_game(p)
    assert rd_vector_field(game, pair(1.0)) == pytest.approx([0.0, 0.0], abs=1e-15)
    assert rd_vector_field(game, pair(p.q)) == pytest.approx([0.0, 0.0], abs=1e-12)


def test_rd_vector_field_reduction_and_zero_sum():
    for ga, gb in [(1.0, 1.0), (0.45, 0.55), (2.0, 0.5)]:
        p = GameParams(ga, gb)
        game = congestion_game(p)
        for x in np.linspace(0.0, 1.0, 21):
            v = rd_vector_field(game, pair(x))
            assert abs(v.sum()) < 1e-14
            assert abs(v[0] - x * (1 - x) * (ga * (1 - x) - gb * x)) < 1e-12


def test_rd_integrate_converges_to_equilibrium():
    game = congestion_game(GameParams(1.0, 1.0))
    traj = rd_integrate(game, pair(0.1), horizon=50.0, dt=0.01)
    assert abs(traj[-1].shares[0] - 0.5) < 1e-6
    game = congestion_game(GameParams(1.0, 3.0))
    traj = rd_integrate(game, pair(0.9), horizon=50.0, dt=0.01)
    assert abs(traj[-1].shares[0] - 0.25) < 1e-6


def test_rd_integrate_vertex_constant():
    game = congestion_game(GameParams(1.0, 2.0))
    traj = rd_integrate(game, pair(1.0), horizon=5.0, dt=0.01)
    assert all(s.shares[0] == pytest.approx(1.0, abs=1e-15) for s in traj)


def test_rd_integrate_validation():
    game = congestion_game(GameParams(1.0, 1.0))
    with pytest.raises(ValueError):
        rd_integrate(game, pair(0.5), horizon=1.0, dt=0.0)
    with pytest.raises(ValueError):
        rd_integrate(game, pair(0.5), horizon=0.001, dt=0.01)


def test_model_ii_max_step_examples():
    assert model_ii_max_step(GameParams(0.5, 0.5)) == pytest.approx(16.0, abs=1e-12)
    assert model_ii_max_step(GameParams(0.45, 0.55)) == pytest.approx(4.0 / 0.3025, abs=1e-12)
    assert model_ii_max_step(GameParams(1.0, 1.0)) == pytest.approx(8.0, abs=1e-12)


def test_simplex_preservation_random_triples():
    """All three steps keep 10^4 random valid (game, state, step) triples on the simplex."""
    rng = np.random.default_rng(7)
    steppers = (step_model_i, step_model_ii, step_model_iii)
    for k in range(10_000):
        n = int(rng.integers(2, 5))
        game = PopulationGame.from_matrix(rng.uniform(0.0, 2.0, size=(n, n)))
        raw = rng.uniform(0.0, 1.0, size=n) + 1e-9
        state = SimplexState(raw / raw.sum())
        stepper = steppers[k % 3]
        if stepper is step_model_ii:
            u = game.payoff_eval(state.shares)
            spread = np.max(np.abs(u - state.shares @ u))
            delta = float(rng.uniform(0.0, 1.0)) * 0.99 / max(spread, 1e-9)
        else:
            delta = float(rng.uniform(1e-3, 50.0))
        out = stepper(game, state, delta)
        assert np.all(out.shares >= 0.0)
        assert abs(out.shares.sum() - 1.0) < 1e-9


def test_fixed_point_agreement_two_by_two():
    """All three maps fix exactly the vertices and the interior equilibrium."""
    for ga, gb in [(1.0, 1.0), (0.45, 0.55), (2.0, 0.5)]:
        p = GameParams(ga, gb)
        game = congestion_game(p)
        for stepper in (step_model_i, step_model_ii, step_model_iii):
            for x in (0.0, p.q, 1.0):
                out = stepper(game, pair(x), 1.0)
                assert abs(out.shares[0] - x) < 1e-12
            # a generic interior point moves
            assert abs(stepper(game, pair(0.123), 1.0).shares[0] - 0.123) > 1e-6


def test_euler_consistency():
    """Models I and III are Euler steps up to O(dt^2); model II is exact."""
    p = GameParams(1.0, 1.0)
    game = congestion_game(p)
    state = pair(0.3)
    v = rd_vector_field(game, state)
    for delta in (1e-2, 1e-3, 1e-4):
        euler = state.shares + delta * v
        for stepper in (step_model_i, step_model_iii):
            out = stepper(game, state, delta).shares
            assert np.max(np.abs(out - euler)) <= 5.0 * p.s**2 * delta**2
        out = step_model_ii(game, state, delta).shares
        assert np.max(np.abs(out - euler)) <= 1e-15


def test_interval_map_reduction():
    rng = np.random.default_rng(11)
    steppers = {Model.I: step_model_i, Model.II: step_model_ii, Model.III: step_model_iii}
    for _ in range(300):
        model = Model(("I", "II", "III")[int(rng.integers(3))])
        p = GameParams(float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.2, 2.0)))
        delta_eff = float(rng.uniform(0.05, 20.0))
        if model is Model.II:
            delta_eff = min(delta_eff, 0.999 * model_ii_max_step(p) * p.s)
        delta = delta_eff / p.s
        x = float(rng.uniform(0.0, 1.0))
        spec = IntervalMapSpec.from_game(model, p, delta)
        stepped = steppers[model](congestion_game(p), pair(x), delta).shares[0]
        assert abs(stepped - evaluate(spec, x)) < 1e-12
