"""Numerical laboratory for three discrete-time ancestors of the replicator dynamics."""

from .chaos_certify import (
    Regime,
    RegimeReport,
    SymmetricCaseError,
    ThresholdError,
    WindowError,
    classify_regime,
    delta_ii_threshold,
    delta_iii_threshold,
    f1b6_threshold,
    f_of_delta,
    model_ii_chaos_window,
    model_iii_period3_condition,
    stability_threshold,
    symmetric_two_cycle,
)
from .diagram import (
    BifurcationData,
    ColorMap,
    DiagramGrid,
    bifurcation_scan,
    export_csv,
    period_diagram,
    render_image,
)
from .game_model import (
    GameParams,
    PopulationGame,
    congestion_game,
    equilibrium,
    mean_payoff,
    payoff_vector,
    ppi_switch_rate,
)
from .interval_maps import (
    CriticalPointSingularity,
    FixedPointReport,
    IntervalMapSpec,
    Model,
    critical_points,
    derivative,
    evaluate,
    fixed_points,
    schwarzian,
    symmetry_conjugate,
)
from .orbit_engine import (
    LYWitness,
    OrbitSummary,
    cycle_multiplier,
    detect_period,
    detect_period_grid,
    iterate,
    lmpy_witness,
    sharkovsky_implies,
)
from .simplex_dynamics import (
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

__version__ = "0.1.0"
