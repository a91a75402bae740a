"""2x2 anti-coordination game: payoffs, equilibrium, imitation switch rates.

The two gain parameters measure the benefit of deviating away from the
congested action.  Payoffs are stored as a payoff matrix and evaluated by a
matrix-vector product, so the population-game abstraction also accepts
arbitrary nonnegative n x n matrices.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

MEMBERSHIP_TOL = 1e-12

STRATEGIES = ("A", "B")


@dataclass(frozen=True)
class GameParams:
    """Gains (g_a, g_b) of the 2x2 anti-coordination game, both positive."""

    g_a: float
    g_b: float

    def __post_init__(self):
        if not (self.g_a > 0 and self.g_b > 0):
            raise ValueError(f"gains must be positive, got ({self.g_a}, {self.g_b})")

    @property
    def s(self) -> float:
        """Total gain g_a + g_b (the payoff scale)."""
        return self.g_a + self.g_b

    @property
    def q(self) -> float:
        """Interior equilibrium share of A-strategists, strictly in (0, 1)."""
        return self.g_a / (self.g_a + self.g_b)

    def payoff_matrix(self) -> np.ndarray:
        return np.array([[0.0, self.g_a], [self.g_b, 0.0]])


@dataclass(frozen=True)
class PopulationGame:
    """An n-strategy population game given by a payoff-vector function.

    ``payoff_eval`` maps a share vector (length n, on the simplex) to the
    payoff vector of the same length.  It must be deterministic.
    """

    n: int
    payoff_eval: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def from_matrix(cls, matrix) -> "PopulationGame":
        """Random-matching game with payoff vector ``matrix @ x``.

        Entries must be nonnegative so that payoffs stay nonnegative on the
        whole simplex.
        """
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"payoff matrix must be square, got shape {a.shape}")
        if np.any(a < 0):
            raise ValueError("payoff matrix entries must be nonnegative")
        a = a.copy()
        a.flags.writeable = False
        return cls(n=a.shape[0], payoff_eval=lambda x: a @ x)


def congestion_game(params: GameParams) -> PopulationGame:
    """The 2-strategy random-matching game induced by ``params``."""
    return PopulationGame.from_matrix(params.payoff_matrix())


def _check_share(x: float) -> float:
    if not -MEMBERSHIP_TOL <= x <= 1 + MEMBERSHIP_TOL:
        raise ValueError(f"share {x} outside [0, 1]")
    return min(max(x, 0.0), 1.0)


def equilibrium(params: GameParams) -> float:
    """Interior equilibrium q = g_a / (g_a + g_b)."""
    return params.q


def payoff_vector(params: GameParams, x: float) -> tuple[float, float]:
    """Payoffs (u_a, u_b) when a share x of the population plays A."""
    x = _check_share(x)
    return params.g_a * (1 - x), params.g_b * x


def mean_payoff(params: GameParams, x: float) -> float:
    """Population mean payoff x*u_a + (1-x)*u_b = (g_a+g_b) x (1-x)."""
    x = _check_share(x)
    u_a, u_b = payoff_vector(params, x)
    return x * u_a + (1 - x) * u_b


def ppi_switch_rate(params: GameParams, src: str, dst: str, x: float) -> float:
    """Proportional-imitation switch rate from ``src`` to ``dst`` at state x.

    The rate is the observed share of the target strategy times the positive
    part of the payoff difference; it vanishes unless the target earns more.
    """
    if src not in STRATEGIES or dst not in STRATEGIES:
        raise ValueError(f"strategies must be in {STRATEGIES}, got {src!r}, {dst!r}")
    if src == dst:
        raise ValueError("switch rate requires two distinct strategies")
    x = _check_share(x)
    u_a, u_b = payoff_vector(params, x)
    payoff = {"A": u_a, "B": u_b}
    share = {"A": x, "B": 1 - x}
    return share[dst] * max(0.0, payoff[dst] - payoff[src])
