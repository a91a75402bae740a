"""Discrete-time population updates on the simplex and the replicator flow.

Three one-step maps share the replicator equation as a small-step limit:
a growth-renormalization step (model I), the plain Euler step induced by
proportional imitation (model II), and the exponential-weights step
(model III).  A fixed-step fourth-order integrator of the continuous flow
serves as the reference.
"""

from dataclasses import dataclass

import numpy as np

from .game_model import GameParams, PopulationGame

SHARE_FLOOR = -1e-12
SUM_TOL = 1e-9


class SimplexEscape(RuntimeError):
    """A one-step image left the simplex beyond tolerance."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SimplexState:
    """Nonnegative shares summing to one; renormalized on construction."""

    shares: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.shares, dtype=float)
        if a.ndim != 1 or a.size < 2:
            raise ValueError(f"state must be a vector of >= 2 shares, got shape {a.shape}")
        if np.any(a < SHARE_FLOOR):
            raise ValueError(f"share below {SHARE_FLOOR}: {a.min()}")
        a = np.clip(a, 0.0, None)
        total = a.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"shares sum to {total}, expected 1 within {SUM_TOL}")
        object.__setattr__(self, "shares", _frozen(a / total))

    @classmethod
    def uniform(cls, n: int) -> "SimplexState":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def from_pair(cls, x: float) -> "SimplexState":
        """Two-strategy state (x, 1-x)."""
        return cls(np.array([x, 1.0 - x]))

    def __len__(self) -> int:
        return self.shares.size


@dataclass(frozen=True)
class ScoreState:
    """Cumulative payoff scores; shares are proportional to exp(scores)."""

    scores: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.scores, dtype=float)
        if a.ndim != 1 or a.size < 2:
            raise ValueError(f"scores must be a vector of >= 2 entries, got shape {a.shape}")
        object.__setattr__(self, "scores", _frozen(a))

    def induced_state(self) -> SimplexState:
        w = np.exp(self.scores - self.scores.max())
        return SimplexState(w / w.sum())


def _check_delta(delta: float) -> float:
    if not delta > 0:
        raise ValueError(f"step size must be positive, got {delta}")
    return float(delta)


def step_model_i(game: PopulationGame, state: SimplexState, delta: float) -> SimplexState:
    """Growth step x_a (1 + d u_a) / (1 + d mean); needs nonnegative payoffs."""
    delta = _check_delta(delta)
    x = state.shares
    u = np.asarray(game.payoff_eval(x), dtype=float)
    growth = 1.0 + delta * u
    if np.any(growth < 0):
        raise ValueError("negative payoff makes a growth factor negative; model I requires payoffs >= 0")
    return SimplexState(x * growth / (1.0 + delta * float(x @ u)))


def step_model_ii(game: PopulationGame, state: SimplexState, delta: float) -> SimplexState:
    """Euler step x_a + d x_a (u_a - mean); raises SimplexEscape if it leaves the simplex."""
    delta = _check_delta(delta)
    x = state.shares
    u = np.asarray(game.payoff_eval(x), dtype=float)
    image = x + delta * x * (u - float(x @ u))
    if np.any(image < SHARE_FLOOR) or np.any(image > 1.0 - SHARE_FLOOR):
        raise SimplexEscape(f"step {delta} maps {x} to {image}, outside the simplex")
    return SimplexState(np.clip(image, 0.0, 1.0))


def step_model_iii(game: PopulationGame, state: SimplexState, delta: float) -> SimplexState:
    """Exponential-weights step x_a exp(d u_a) / sum_b x_b exp(d u_b)."""
    delta = _check_delta(delta)
    x = state.shares
    u = np.asarray(game.payoff_eval(x), dtype=float)
    w = delta * u
    w -= w.max()  # overflow guard; cancels in the ratio
    e = x * np.exp(w)
    return SimplexState(e / e.sum())


def ew_score_update(game: PopulationGame, scores: ScoreState, delta: float) -> ScoreState:
    """Score recursion y_a + d u_a(x(y)); induces exactly one model-III step."""
    delta = _check_delta(delta)
    x = scores.induced_state().shares
    u = np.asarray(game.payoff_eval(x), dtype=float)
    return ScoreState(scores.scores + delta * u)


def rd_vector_field(game: PopulationGame, state: SimplexState) -> np.ndarray:
    """Replicator field x_a (u_a - mean); components sum to zero."""
    x = state.shares
    u = np.asarray(game.payoff_eval(x), dtype=float)
    return x * (u - float(x @ u))


def rd_integrate(game: PopulationGame, state: SimplexState, horizon: float, dt: float = 0.01) -> list[SimplexState]:
    """Classical fixed-step RK4 trajectory of the replicator field.

    Returns the states at t = 0, dt, ..., horizon (each renormalized); the
    last entry is the terminal state.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if horizon < dt:
        raise ValueError(f"horizon {horizon} shorter than one step {dt}")

    def field(x):
        u = np.asarray(game.payoff_eval(x), dtype=float)
        return x * (u - float(x @ u))

    steps = int(round(horizon / dt))
    out = [state]
    x = state.shares
    for _ in range(steps):
        k1 = field(x)
        k2 = field(x + 0.5 * dt * k1)
        k3 = field(x + 0.5 * dt * k2)
        k4 = field(x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        x = np.clip(x, 0.0, None)
        x = x / x.sum()
        out.append(SimplexState(x))
    return out


def model_ii_max_step(params: GameParams) -> float:
    """Largest raw step for which the Euler update cannot leave the simplex."""
    q = params.q
    return min(4.0 / q**2, 4.0 / (1.0 - q) ** 2) / params.s
