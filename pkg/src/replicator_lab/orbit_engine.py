"""Orbit iteration, periodic-orbit detection, period-3 witnesses, Sharkovsky order.

Period detection follows a fixed recipe: discard a long transient, then
report the smallest n (up to a cap) with |f^n(x) - x| below tolerance.
A witness point x0 with f^3(x0) < x0 < f(x0) (or the mirror image)
certifies a period-3 orbit and hence Li-Yorke chaos.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .interval_maps import (
    IntervalMapSpec,
    Model,
    classify_multiplier,
    derivative,
    map_derivatives,
    map_values,
)

BURN_IN = 20000
PERIOD_TOL = 1e-10
MAX_PERIOD = 64
WITNESS_RESOLUTION = 1e-4
WITNESS_REFINE_RESOLUTION = 1e-6
WITNESS_MARGIN = 1e-12

NO_PERIOD = "none"

ORIENT_BELOW = "f3<x0<f"
ORIENT_ABOVE = "f3>x0>f"


@dataclass(frozen=True)
class OrbitSummary:
    initial: float
    burn_in: int
    period: Optional[int]
    cycle: tuple
    multiplier: Optional[float]
    classification: str


@dataclass(frozen=True)
class LYWitness:
    x0: float
    images: tuple  # (f(x0), f^2(x0), f^3(x0))
    orientation: str


def scalar_map(spec: IntervalMapSpec):
    """Fast scalar closure for one spec (plain floats, no numpy dispatch)."""
    q, d = spec.q, spec.delta_eff
    if spec.model is Model.I:
        return lambda x: x * (1 + d * q * (1 - x)) / (1 + d * x * (1 - x))
    if spec.model is Model.II:
        return lambda x: x * (1 - d * (1 - x) * (x - q))

    import math

    def f(x):
        z = d * (x - q)
        if z > 0:
            ez = math.exp(-z)
            return x * ez / (x * ez + (1 - x))
        ez = math.exp(z)
        return x / (x + (1 - x) * ez)

    return f


def iterate(spec: IntervalMapSpec, x0: float, n: int) -> np.ndarray:
    """The orbit segment [x0, f(x0), ..., f^n(x0)] (length n + 1)."""
    if n < 0:
        raise ValueError(f"orbit length must be >= 0, got {n}")
    if not 0.0 <= x0 <= 1.0:
        raise ValueError(f"x0 must lie in [0, 1], got {x0}")
    f = scalar_map(spec)
    out = np.empty(n + 1)
    out[0] = x = x0
    for i in range(1, n + 1):
        x = f(x)
        out[i] = x
    return out


def cycle_multiplier(spec: IntervalMapSpec, cycle) -> float:
    """Chain-rule multiplier: product of f' over the cycle points."""
    pts = np.asarray(cycle, dtype=float)
    if pts.size == 0:
        raise ValueError("cycle must be nonempty")
    return float(np.prod(derivative(spec, pts)))


def detect_period(
    spec: IntervalMapSpec,
    x0: float,
    burn_in: int = BURN_IN,
    tol: float = PERIOD_TOL,
    max_period: int = MAX_PERIOD,
) -> OrbitSummary:
    """Detect the minimal period of the orbit of x0 after a transient.

    After ``burn_in`` iterations, the smallest n <= max_period with
    |f^n(x) - x| < tol is reported together with the cycle, its chain-rule
    multiplier and the stability classification; absent any such n the
    summary carries period None.
    """
    f = scalar_map(spec)
    x = x0
    for _ in range(burn_in):
        x = f(x)
    seq = np.empty(max_period + 1)
    seq[0] = y = x
    for i in range(1, max_period + 1):
        y = f(y)
        seq[i] = y
    for n in range(1, max_period + 1):
        if abs(seq[n] - seq[0]) < tol:
            cycle = tuple(seq[:n])
            mult = cycle_multiplier(spec, cycle)
            return OrbitSummary(
                initial=x0,
                burn_in=burn_in,
                period=n,
                cycle=cycle,
                multiplier=mult,
                classification=classify_multiplier(mult),
            )
    return OrbitSummary(
        initial=x0,
        burn_in=burn_in,
        period=None,
        cycle=(),
        multiplier=None,
        classification=NO_PERIOD,
    )


def detect_period_grid(
    model: Model,
    q,
    delta_eff,
    x0=0.3,
    burn_in: int = BURN_IN,
    tol: float = PERIOD_TOL,
    max_period: int = MAX_PERIOD,
) -> np.ndarray:
    """Vectorized period detection over broadcast (q, delta_eff) arrays.

    Same algorithm as :func:`detect_period`; returns an integer array with
    0 standing for "no period <= max_period detected".
    """
    x, q, d = np.broadcast_arrays(
        np.asarray(x0, dtype=float), np.asarray(q, dtype=float), np.asarray(delta_eff, dtype=float)
    )
    x = x.copy()
    for _ in range(burn_in):
        x = map_values(model, q, d, x)
    ref = x.copy()
    periods = np.zeros(x.shape, dtype=np.int64)
    for n in range(1, max_period + 1):
        x = map_values(model, q, d, x)
        hit = (np.abs(x - ref) < tol) & (periods == 0)
        periods[hit] = n
    return periods


def _witness_at(spec: IntervalMapSpec, grid: np.ndarray) -> Optional[LYWitness]:
    model, q, d = spec.model, spec.q, spec.delta_eff
    f1 = map_values(model, q, d, grid)
    f2 = map_values(model, q, d, f1)
    f3 = map_values(model, q, d, f2)
    below = (f3 < grid - WITNESS_MARGIN) & (f1 > grid + WITNESS_MARGIN)
    above = (f3 > grid + WITNESS_MARGIN) & (f1 < grid - WITNESS_MARGIN)
    hits = below | above
    if not np.any(hits):
        return None
    i = int(np.argmax(hits))
    return LYWitness(
        x0=float(grid[i]),
        images=(float(f1[i]), float(f2[i]), float(f3[i])),
        orientation=ORIENT_BELOW if below[i] else ORIENT_ABOVE,
    )


def lmpy_witness(spec: IntervalMapSpec, grid_resolution: float = WITNESS_RESOLUTION) -> Optional[LYWitness]:
    """Deterministic grid scan for a period-3 witness.

    Scans x0 over a uniform grid of (0, 1) for the strict chain
    f^3(x0) < x0 < f(x0) or its mirror image (margin 1e-12); around sign
    changes of f^3(x) - x a finer pass at 1e-6 is attempted before giving up.
    The first grid hit is returned.
    """
    grid = np.arange(grid_resolution, 1.0, grid_resolution)
    found = _witness_at(spec, grid)
    if found is not None:
        return found
    # refine around sign changes of f^3(x) - x
    model, q, d = spec.model, spec.q, spec.delta_eff
    f1 = map_values(model, q, d, grid)
    f3 = map_values(model, q, d, map_values(model, q, d, f1))
    sign = np.sign(f3 - grid)
    for i in np.nonzero(sign[:-1] * sign[1:] <= 0)[0]:
        sub = np.arange(grid[i] + WITNESS_REFINE_RESOLUTION, grid[i + 1], WITNESS_REFINE_RESOLUTION)
        found = _witness_at(spec, sub)
        if found is not None:
            return found
    return None


def _sharkovsky_key(n: int) -> tuple:
    """Sort key realizing the Sharkovsky order: smaller key = earlier (stronger)."""
    if n < 1:
        raise ValueError(f"periods are positive integers, got {n}")
    a = 0
    while n % 2 == 0:
        n //= 2
        a += 1
    if n == 1:  # powers of two come last, in decreasing order of the exponent
        return (1, -a, 0)
    return (0, a, n)


def sharkovsky_implies(t: int, m: int) -> bool:
    """True iff a period-t orbit forces a period-m orbit (t = m included)."""
    return _sharkovsky_key(t) <= _sharkovsky_key(m)
