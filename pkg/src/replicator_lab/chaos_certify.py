"""Analytic regime classification for the three interval maps.

The interior equilibrium is attracting up to the effective step 2/(q(1-q)).
Past it, model II admits a certified period-3 (hence Li-Yorke chaotic)
window of equilibria around 1/2, with an explicit step threshold obtained
from two inequalities on the second and third iterates; model III reaches
period 3 past a numerically estimated step threshold whenever q != 1/2,
while q = 1/2 yields an attracting symmetric 2-cycle instead.
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .interval_maps import IntervalMapSpec, Model, map_values, model_ii_max_effective_step
from .orbit_engine import cycle_multiplier, lmpy_witness

F_ROOT_SCAN_STEP = 1e-3
F_ROOT_BISECT_TOL = 1e-10
PERIOD3_SCAN_STEP = 0.1
PERIOD3_BISECT_TOL = 1e-6
PERIOD3_SCAN_CAP = 2000.0
PERIOD3_GRID_POINTS = 2000
SYMMETRIC_MIN_STEP = 8.0


class WindowError(ValueError):
    """Equilibrium outside the model-II chaos window."""


class SymmetricCaseError(ValueError):
    """Operation undefined for the symmetric game q = 1/2."""


class ThresholdError(ValueError):
    """Step size below the threshold required for the requested object."""


class Regime(str, enum.Enum):
    GLOBAL_CONVERGENCE = "global_convergence"
    EQUILIBRIUM_REPELLING = "equilibrium_repelling"
    CERTIFIED_CHAOS = "certified_chaos"
    ATTRACTING_TWO_CYCLE = "attracting_two_cycle"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class RegimeReport:
    model: Model
    q: float
    delta_eff: float
    regime: Regime
    certificate: Optional[dict]


def stability_threshold(q: float) -> float:
    """Effective step at which the interior multiplier reaches -1."""
    return 2.0 / (q * (1.0 - q))


def model_ii_chaos_window() -> tuple[float, float]:
    """Open interval of equilibria with a certified model-II chaos threshold."""
    r = 12.0 * math.sqrt(3.0)
    return ((31.0 - r) / 23.0, (r - 8.0) / 23.0)


def f_of_delta(q: float, delta_eff: float) -> float:
    """Second-iterate gap indicator F; period-3 needs F < 1.

    F(0) = 3 and F vanishes at the maximal step 4/(1-q)^2; the certified
    threshold uses its last downward crossing of 1.
    """
    a2 = (1.0 - q) ** 2
    return (3.0 / 256.0) * (4.0 - delta_eff * a2) * (
        64.0 - 16.0 * delta_eff * a2 + delta_eff**3 * a2**2 * (1.0 + q) ** 2
    )


def f1b6_threshold(q: float) -> Optional[float]:
    """Step above which the first-iterate inequality holds; None for q <= 1/5."""
    if not 0.0 < q <= 0.5:
        raise ValueError(f"defined for q in (0, 1/2], got {q}")
    if q <= 0.2:
        return None
    return 72.0 / (-5.0 * q**2 + 26.0 * q - 5.0)


@lru_cache(maxsize=None)
def _delta_ii_details(q: float) -> dict:
    dstar = 4.0 / (1.0 - q) ** 2
    d = dstar
    while f_of_delta(q, d) < 1.0:
        d -= F_ROOT_SCAN_STEP
        if d <= 0:
            raise WindowError(f"no crossing of F = 1 found for q={q}")
    lo, hi = d, min(d + F_ROOT_SCAN_STEP, dstar)  # F(lo) >= 1 > F(hi)
    while hi - lo > F_ROOT_BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if f_of_delta(q, mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    f_root = 0.5 * (lo + hi)
    fb = f1b6_threshold(q)
    return {
        "f1b6_threshold": fb,
        "f_root": f_root,
        "delta_chaos": max(fb, f_root),
        "max_step": dstar,
    }


def delta_ii_threshold(q: float) -> float:
    """Smallest effective step past which model II is certified chaotic.

    Defined for q inside the chaos window (q > 1/2 is folded through the
    mirror conjugacy): the larger of the first-iterate threshold and the
    last root of F = 1 below the maximal step.
    """
    lo, hi = model_ii_chaos_window()
    if not lo < q < hi:
        raise WindowError(f"q={q} outside the chaos window ({lo}, {hi})")
    return _delta_ii_details(min(q, 1.0 - q))["delta_chaos"]


def model_iii_period3_condition(spec: IntervalMapSpec, x):
    """True iff x + f(x) + f^2(x) > 3q, i.e. the third iterate falls below x.

    For x < q (where f(x) > x) a true value yields f^3(x) < x < f(x),
    a period-3 certificate.
    """
    if spec.model is not Model.III:
        raise ValueError(f"condition applies to model III, got {spec.model}")
    fx = map_values(spec.model, spec.q, spec.delta_eff, x)
    f2x = map_values(spec.model, spec.q, spec.delta_eff, fx)
    out = x + fx + f2x > 3.0 * spec.q
    return bool(out) if np.ndim(out) == 0 else out


def _period3_indicator(q: float, delta_eff: float) -> bool:
    lo = max(0.0, 3.0 * q - 1.0)
    x = np.linspace(lo, q, PERIOD3_GRID_POINTS + 2)[1:-1]
    spec = IntervalMapSpec(Model.III, q, delta_eff)
    return bool(np.any(model_iii_period3_condition(spec, x)))


@lru_cache(maxsize=None)
def _delta_iii_cached(q: float) -> float:
    d = PERIOD3_SCAN_STEP
    while d <= PERIOD3_SCAN_CAP:
        if _period3_indicator(q, d):
            probe = np.arange(d, 2.0 * d + PERIOD3_SCAN_STEP / 2, PERIOD3_SCAN_STEP)
            if all(_period3_indicator(q, dd) for dd in probe):
                lo, hi = d - PERIOD3_SCAN_STEP, d
                while hi - lo > PERIOD3_BISECT_TOL:
                    mid = 0.5 * (lo + hi)
                    if _period3_indicator(q, mid):
                        hi = mid
                    else:
                        lo = mid
                return 0.5 * (lo + hi)
        d += PERIOD3_SCAN_STEP
    raise ThresholdError(f"no stable period-3 onset found below step {PERIOD3_SCAN_CAP} for q={q}")


def delta_iii_threshold(q: float) -> float:
    """Numeric estimate of the model-III chaos threshold for q != 1/2.

    Smallest effective step (scan step 0.1, onset refined by bisection to
    1e-6) at which some grid point of (max(0, 3q-1), q) satisfies the
    period-3 condition, required to keep holding up to twice that step.
    The value is an estimate, not a closed form.
    """
    if q == 0.5:
        raise SymmetricCaseError("q = 1/2 yields an attracting 2-cycle, not chaos")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly in (0, 1), got {q}")
    return _delta_iii_cached(min(q, 1.0 - q))


def symmetric_two_cycle(delta_eff: float, q: float = 0.5) -> tuple[float, float]:
    """The attracting 2-cycle {sigma, 1-sigma} of model III at q = 1/2.

    Exists for effective steps above 8; sigma < 1/2 is located by bisection
    on f(x) - (1-x) over (0, 1/2).
    """
    if q != 0.5:
        raise ValueError(f"symmetric 2-cycle requires q = 1/2, got {q}")
    if not delta_eff > SYMMETRIC_MIN_STEP:
        raise ThresholdError(f"2-cycle requires delta_eff > {SYMMETRIC_MIN_STEP}, got {delta_eff}")
    spec = IntervalMapSpec(Model.III, 0.5, delta_eff)

    def gap(x: float) -> float:
        return float(map_values(Model.III, 0.5, delta_eff, x)) - (1.0 - x)

    lo, hi = 1e-15, 0.5 - 1e-9  # gap(lo) < 0 < gap(hi) once the cycle exists
    if not (gap(lo) < 0 < gap(hi)):
        raise ThresholdError(f"no sign change for the 2-cycle at delta_eff={delta_eff}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    sigma = 0.5 * (lo + hi)
    if abs(cycle_multiplier(spec, (sigma, 1.0 - sigma))) >= 1.0:
        raise RuntimeError(f"located 2-cycle is not attracting at delta_eff={delta_eff}")
    return sigma, 1.0 - sigma


def classify_regime(model, q: float, delta_eff: float) -> RegimeReport:
    """Asymptotic regime of (model, q, effective step) with its certificate."""
    model = Model(model)
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly in (0, 1), got {q}")
    if not delta_eff > 0:
        raise ValueError(f"delta_eff must be positive, got {delta_eff}")

    if model is Model.I:
        m = 1.0 / (1.0 + delta_eff * q * (1.0 - q))
        return RegimeReport(model, q, delta_eff, Regime.GLOBAL_CONVERGENCE, {"interior_multiplier": m})

    threshold = stability_threshold(q)

    if model is Model.II:
        dstar = model_ii_max_effective_step(q)
        if delta_eff > dstar * (1 + 1e-12):
            raise ValueError(f"model II undefined past delta_eff={dstar}, got {delta_eff}")
        base = {"stability_threshold": threshold, "max_step": dstar}
        if delta_eff <= threshold:
            return RegimeReport(model, q, delta_eff, Regime.GLOBAL_CONVERGENCE, base)
        lo, hi = model_ii_chaos_window()
        if lo < q < hi:
            details = _delta_ii_details(min(q, 1.0 - q))
            if delta_eff > details["delta_chaos"]:
                cert = dict(base, chaos_window=(lo, hi), **details)
                return RegimeReport(model, q, delta_eff, Regime.CERTIFIED_CHAOS, cert)
        if 1.0 / 3.0 < q < 2.0 / 3.0:
            cert = dict(base, interior_multiplier=1.0 - delta_eff * q * (1.0 - q))
            return RegimeReport(model, q, delta_eff, Regime.EQUILIBRIUM_REPELLING, cert)
        # q on [1/3, 2/3] boundary with a repelling equilibrium: not covered
        return RegimeReport(model, q, delta_eff, Regime.UNDETERMINED, base)

    # model III
    base = {"stability_threshold": threshold}
    if delta_eff <= threshold:
        return RegimeReport(model, q, delta_eff, Regime.GLOBAL_CONVERGENCE, base)
    if q == 0.5:
        sigma, mirror = symmetric_two_cycle(delta_eff)
        return RegimeReport(
            model, q, delta_eff, Regime.ATTRACTING_TWO_CYCLE, dict(base, two_cycle=(sigma, mirror))
        )
    try:
        estimate = delta_iii_threshold(q)
    except ThresholdError:
        estimate = None
    witness = lmpy_witness(IntervalMapSpec(Model.III, q, delta_eff))
    cert = dict(base, delta_chaos=estimate, delta_chaos_kind="numeric", witness=witness)
    if (estimate is not None and delta_eff > estimate) or witness is not None:
        return RegimeReport(model, q, delta_eff, Regime.CERTIFIED_CHAOS, cert)
    return RegimeReport(model, q, delta_eff, Regime.UNDETERMINED, cert)
