"""One-dimensional reductions of the three population updates.

For the 2x2 game everything reduces to a map of [0, 1] in normalized
coordinates: the equilibrium share q and the effective step d = (g_a+g_b)*delta.
The three maps, with fixed points 0, q, 1, are

    model I    x (1 + d q (1-x)) / (1 + d x (1-x))          increasing for all d
    model II   x (1 - d (1-x) (x-q))                        valid for d <= min(4/q^2, 4/(1-q)^2)
    model III  x / (x + (1-x) exp(d (x-q)))                 bimodal for d > 4

Derivatives are closed-form; the Schwarzian derivative is exact for the
polynomial map (model II) and uses five-point stencils on the closed-form
first derivative otherwise.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .game_model import GameParams

INTERVAL_TOL = 1e-12
NEUTRAL_BAND = 1e-12
CRITICAL_DERIV_TOL = 1e-9
SCHWARZIAN_STENCIL_H = 1e-4

ATTRACTING = "attracting"
REPELLING = "repelling"
NEUTRAL = "neutral"


class Model(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"


class CriticalPointSingularity(ValueError):
    """Schwarzian derivative requested where the first derivative vanishes."""


def model_ii_max_effective_step(q: float) -> float:
    """Largest effective step keeping the model-II image inside [0, 1]."""
    return min(4.0 / q**2, 4.0 / (1.0 - q) ** 2)


@dataclass(frozen=True)
class IntervalMapSpec:
    """One analyzable interval map: model, equilibrium q, effective step."""

    model: Model
    q: float
    delta_eff: float

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie strictly in (0, 1), got {self.q}")
        if not self.delta_eff > 0:
            raise ValueError(f"delta_eff must be positive, got {self.delta_eff}")
        if self.model is Model.II:
            cap = model_ii_max_effective_step(self.q)
            if self.delta_eff > cap * (1 + 1e-12):
                raise ValueError(
                    f"model II with q={self.q} is only defined for delta_eff <= {cap}, got {self.delta_eff}"
                )

    @classmethod
    def from_game(cls, model, params: GameParams, delta: float) -> "IntervalMapSpec":
        """Normalize raw game units: q = g_a/s and effective step s*delta."""
        return cls(model=Model(model), q=params.q, delta_eff=params.s * delta)


@dataclass(frozen=True)
class FixedPointReport:
    location: float
    multiplier: float
    classification: str


def classify_multiplier(multiplier: float) -> str:
    """attracting / repelling / neutral, with a 1e-12 band around |m| = 1."""
    m = abs(multiplier)
    if abs(m - 1.0) <= NEUTRAL_BAND:
        return NEUTRAL
    return ATTRACTING if m < 1.0 else REPELLING


def map_values(model: Model, q, delta_eff, x):
    """Raw vectorized map evaluation; no domain checks, no clamping.

    ``q``, ``delta_eff`` and ``x`` broadcast against each other.
    """
    d = delta_eff
    if model is Model.I:
        return x * (1 + d * q * (1 - x)) / (1 + d * x * (1 - x))
    if model is Model.II:
        return x * (1 - d * (1 - x) * (x - q))
    z = d * (x - q)
    ez = np.exp(-np.abs(z))  # both branches stay in (0, 1]: no overflow
    return np.where(z > 0, x * ez / (x * ez + (1 - x)), x / (x + (1 - x) * ez))


def map_derivatives(model: Model, q, delta_eff, x):
    """Raw vectorized closed-form first derivative; no domain checks."""
    d = delta_eff
    if model is Model.I:
        return (d * x**2 - 2 * q * d * x + d * q + 1) / (1 + d * x * (1 - x)) ** 2
    if model is Model.II:
        return 3 * d * x**2 - 2 * d * (1 + q) * x + q * d + 1
    z = d * (x - q)
    ez = np.exp(-np.abs(z))
    den = np.where(z > 0, x * ez + (1 - x), x + (1 - x) * ez)
    return (d * x**2 - d * x + 1) * ez / den**2


def _check_domain(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -INTERVAL_TOL) or np.any(arr > 1 + INTERVAL_TOL):
        raise ValueError(f"argument outside [0, 1]: {x}")
    return np.clip(arr, 0.0, 1.0)


def evaluate(spec: IntervalMapSpec, x):
    """Map value at x in [0, 1] (scalar or array), clamped back into [0, 1]."""
    arr = _check_domain(x)
    out = np.clip(map_values(spec.model, spec.q, spec.delta_eff, arr), 0.0, 1.0)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def derivative(spec: IntervalMapSpec, x):
    """Closed-form first derivative at x in [0, 1] (scalar or array)."""
    arr = _check_domain(x)
    out = map_derivatives(spec.model, spec.q, spec.delta_eff, arr)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def fixed_points(spec: IntervalMapSpec) -> list[FixedPointReport]:
    """The three fixed points 0, q, 1 with closed-form multipliers."""
    q, d = spec.q, spec.delta_eff
    if spec.model is Model.I:
        mults = (1 + d * q, 1 / (1 + d * q * (1 - q)), 1 + d * (1 - q))
    elif spec.model is Model.II:
        mults = (1 + q * d, 1 - d * q * (1 - q), 1 + (1 - q) * d)
    else:
        with np.errstate(over="ignore"):
            mults = (float(np.exp(d * q)), d * q**2 - d * q + 1, float(np.exp(d * (1 - q))))
    return [
        FixedPointReport(loc, m, classify_multiplier(m))
        for loc, m in zip((0.0, q, 1.0), mults)
    ]


def critical_points(spec: IntervalMapSpec) -> list[float]:
    """Interior zeros of the derivative: none, or two once the map is bimodal."""
    q, d = spec.q, spec.delta_eff
    if spec.model is Model.I:
        return []
    if spec.model is Model.II:
        if d <= 3.0 / (1 - q + q**2):
            return []
        half_width = float(np.sqrt((d * (1 + q) ** 2 - 3 * q * d - 3) / d)) / 3.0
        center = (1 + q) / 3.0
        return [center - half_width, center + half_width]
    if d <= 4.0:
        return []
    half_width = float(np.sqrt(0.25 - 1.0 / d))
    return [0.5 - half_width, 0.5 + half_width]


def schwarzian(spec: IntervalMapSpec, x: float) -> float:
    """Schwarzian derivative f'''/f' - 1.5 (f''/f')^2 at a noncritical point.

    Exact polynomial derivatives for model II; five-point stencils
    (h = 1e-4) on the closed-form first derivative for models I and III.
    """
    x = float(_check_domain(x))
    fp = derivative(spec, x)
    if abs(fp) < CRITICAL_DERIV_TOL:
        raise CriticalPointSingularity(f"derivative {fp} at x={x} is below {CRITICAL_DERIV_TOL}")
    q, d = spec.q, spec.delta_eff
    if spec.model is Model.II:
        fpp = 6 * d * x - 2 * d * (1 + q)
        fppp = 6 * d
        return fppp / fp - 1.5 * (fpp / fp) ** 2
    h = SCHWARZIAN_STENCIL_H
    xc = min(max(x, 2 * h), 1 - 2 * h)  # keep the stencil inside [0, 1]
    g = [map_derivatives(spec.model, q, d, xc + k * h) for k in (-2, -1, 0, 1, 2)]
    fp = g[2]
    fpp = (-g[4] + 8 * g[3] - 8 * g[1] + g[0]) / (12 * h)
    fppp = (-g[4] + 16 * g[3] - 30 * g[2] + 16 * g[1] - g[0]) / (12 * h**2)
    return float(fppp / fp - 1.5 * (fpp / fp) ** 2)


def symmetry_conjugate(spec: IntervalMapSpec) -> IntervalMapSpec:
    """The mirrored map with q replaced by 1-q.

    Conjugacy under the reflection r(x) = 1-x: the mirrored map satisfies
    1 - f_{1-q}(1-x) = f_q(x) at every x, for each of the three models.
    """
    return IntervalMapSpec(model=spec.model, q=1.0 - spec.q, delta_eff=spec.delta_eff)
