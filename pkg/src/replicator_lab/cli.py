"""Command-line front end: iterate orbits, analyze maps, draw diagrams, certify chaos.

Exit codes: 0 success, 2 invalid configuration, 3 dynamics domain error
(an orbit left the simplex), 4 I/O failure.  All numeric output uses the
shortest exact decimal form.  A JSON file passed via --config supplies
defaults for any flag; explicit flags win.  REPLICATOR_LAB_THREADS caps
the diagram thread pool.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import chaos_certify, diagram, game_model, interval_maps, orbit_engine, simplex_dynamics
from .diagram import format_number as fmt
from .game_model import GameParams
from .interval_maps import IntervalMapSpec, Model
from .simplex_dynamics import SimplexEscape, SimplexState


class ConfigError(Exception):
    pass


_CONFIG_KEYS = {
    "model", "q", "g_a", "g_b", "delta", "x0", "steps",
    "res", "out", "bifurcation", "overlay_conditions",
    "samples", "burn_in",
}


def _threads_from_env() -> int:
    raw = os.environ.get("REPLICATOR_LAB_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"REPLICATOR_LAB_THREADS must be a positive integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"REPLICATOR_LAB_THREADS must be a positive integer, got {raw!r}")
    return value


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None) is None:
        return args
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key, value in data.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _parse_float(value, name: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}")


def _parse_range(value, name: str) -> tuple[float, float]:
    parts = str(value).split(":")
    if len(parts) != 2:
        raise ConfigError(f"{name} must be a range 'lo:hi', got {value!r}")
    lo, hi = (_parse_float(p, name) for p in parts)
    if not hi > lo:
        raise ConfigError(f"{name} range must increase, got {value!r}")
    return lo, hi


def _parse_resolution(value) -> tuple[int, int]:
    parts = str(value).lower().split("x")
    try:
        width, height = int(parts[0]), int(parts[1])
    except (IndexError, ValueError):
        raise ConfigError(f"--res must look like 400x300, got {value!r}")
    if width < 1 or height < 1 or len(parts) != 2:
        raise ConfigError(f"--res must name two positive sizes, got {value!r}")
    return width, height


def _game_params(args: argparse.Namespace) -> GameParams:
    """Exactly one of q or the (g_a, g_b) pair; q assumes unit total gain."""
    has_q = args.q is not None
    has_g = args.g_a is not None or args.g_b is not None
    if has_q and has_g:
        raise ConfigError("provide either --q or --ga/--gb, not both")
    if has_q:
        q = _parse_float(args.q, "--q")
        if not 0.0 < q < 1.0:
            raise ConfigError(f"--q must lie strictly in (0, 1), got {q}")
        return GameParams(g_a=q, g_b=1.0 - q)
    if args.g_a is None or args.g_b is None:
        raise ConfigError("provide --q, or both --ga and --gb")
    try:
        return GameParams(_parse_float(args.g_a, "--ga"), _parse_float(args.g_b, "--gb"))
    except ValueError as exc:
        raise ConfigError(str(exc))


def _model(args: argparse.Namespace) -> Model:
    if args.model is None:
        raise ConfigError("--model is required (I, II or III)")
    try:
        return Model(str(args.model).upper())
    except ValueError:
        raise ConfigError(f"--model must be I, II or III, got {args.model!r}")


def _spec(model: Model, params: GameParams, delta: float) -> IntervalMapSpec:
    try:
        return IntervalMapSpec.from_game(model, params, delta)
    except ValueError as exc:
        raise ConfigError(str(exc))


def _print_params(model: Model, params: GameParams, delta: float) -> None:
    print(f"model: {model.value}")
    print(f"g_A: {fmt(params.g_a)}")
    print(f"g_B: {fmt(params.g_b)}")
    print(f"delta: {fmt(delta)}")
    print(f"q: {fmt(params.q)}")
    print(f"delta_eff: {fmt(params.s * delta)}")


_CERTIFICATE_ORDER = (
    "stability_threshold", "max_step", "interior_multiplier", "chaos_window",
    "f1b6_threshold", "f_root", "delta_chaos", "delta_chaos_kind", "two_cycle",
)


def _print_certificate(certificate) -> None:
    if not certificate:
        return
    for key in _CERTIFICATE_ORDER:
        if key not in certificate or certificate[key] is None:
            continue
        value = certificate[key]
        if isinstance(value, tuple):
            text = " ".join(fmt(v) for v in value)
        elif isinstance(value, str):
            text = value
        else:
            text = fmt(value)
        print(f"certificate_{key}: {text}")


def _print_witness(witness) -> None:
    print(f"witness_x0: {fmt(witness.x0)}")
    print(f"witness_f1: {fmt(witness.images[0])}")
    print(f"witness_f2: {fmt(witness.images[1])}")
    print(f"witness_f3: {fmt(witness.images[2])}")
    print(f"witness_orientation: {witness.orientation}")


def cmd_iterate(args: argparse.Namespace) -> int:
    model = _model(args)
    params = _game_params(args)
    delta = _parse_float(args.delta, "--delta")
    if delta <= 0:
        raise ConfigError(f"--delta must be positive, got {delta}")
    x0 = _parse_float(args.x0 if args.x0 is not None else 0.3, "--x0")
    if not 0.0 <= x0 <= 1.0:
        raise ConfigError(f"--x0 must lie in [0, 1], got {x0}")
    if args.steps is None:
        raise ConfigError("--steps is required")
    try:
        steps = int(args.steps)
    except (TypeError, ValueError):
        raise ConfigError(f"--steps must be an integer, got {args.steps!r}")
    if steps < 0:
        raise ConfigError(f"--steps must be >= 0, got {steps}")

    step_fn = {
        Model.I: simplex_dynamics.step_model_i,
        Model.II: simplex_dynamics.step_model_ii,
        Model.III: simplex_dynamics.step_model_iii,
    }[model]
    game = game_model.congestion_game(params)
    state = SimplexState.from_pair(x0)
    print("n,x")
    print(f"0,{fmt(state.shares[0])}")
    for n in range(1, steps + 1):
        state = step_fn(game, state, delta)
        print(f"{n},{fmt(state.shares[0])}")
    return 0


def _schwarzian_sign(spec: IntervalMapSpec) -> str:
    probes = np.linspace(0.005, 0.995, 199)
    crit = interval_maps.critical_points(spec)
    neg = pos = 0
    for x in probes:
        if any(abs(x - c) <= 1e-3 for c in crit):
            continue
        try:
            s = interval_maps.schwarzian(spec, float(x))
        except interval_maps.CriticalPointSingularity:
            continue
        if s < 0:
            neg += 1
        elif s > 0:
            pos += 1
    if neg and pos:
        return "mixed"
    if neg:
        return "negative"
    if pos:
        return "positive"
    return "undefined"


def cmd_analyze(args: argparse.Namespace) -> int:
    model = _model(args)
    params = _game_params(args)
    delta = _parse_float(args.delta, "--delta")
    spec = _spec(model, params, delta)
    _print_params(model, params, delta)
    if model is Model.II:
        print(f"max_step: {fmt(simplex_dynamics.model_ii_max_step(params))}")

    labels = ("0", "q", "1")
    for label, report in zip(labels, interval_maps.fixed_points(spec)):
        print(f"fixed_point_{label}_location: {fmt(report.location)}")
        print(f"fixed_point_{label}_multiplier: {fmt(report.multiplier)}")
        print(f"fixed_point_{label}_classification: {report.classification}")
    crit = interval_maps.critical_points(spec)
    print(f"critical_points: {' '.join(fmt(c) for c in crit) if crit else 'none'}")
    print(f"schwarzian_sign: {_schwarzian_sign(spec)}")

    try:
        report = chaos_certify.classify_regime(model, spec.q, spec.delta_eff)
    except ValueError as exc:
        raise ConfigError(str(exc))
    print(f"regime: {report.regime.value}")
    cert = dict(report.certificate or {})
    cert.pop("witness", None)
    _print_certificate(cert)
    if report.regime is chaos_certify.Regime.ATTRACTING_TWO_CYCLE:
        print(f"two_cycle_sigma: {fmt(cert['two_cycle'][0])}")
    return 0


def cmd_certify(args: argparse.Namespace) -> int:
    model = _model(args)
    params = _game_params(args)
    delta = _parse_float(args.delta, "--delta")
    spec = _spec(model, params, delta)
    _print_params(model, params, delta)
    try:
        report = chaos_certify.classify_regime(model, spec.q, spec.delta_eff)
    except ValueError as exc:
        raise ConfigError(str(exc))
    print(f"regime: {report.regime.value}")
    cert = dict(report.certificate or {})
    witness = cert.pop("witness", None)
    _print_certificate(cert)
    if witness is None and model is not Model.I and report.regime is chaos_certify.Regime.CERTIFIED_CHAOS:
        witness = orbit_engine.lmpy_witness(spec)
    if witness is not None:
        _print_witness(witness)
    if report.regime is chaos_certify.Regime.ATTRACTING_TWO_CYCLE:
        print(f"two_cycle_sigma: {fmt(cert['two_cycle'][0])}")
    return 0


def cmd_diagram(args: argparse.Namespace) -> int:
    model = _model(args)
    threads = _threads_from_env()
    if args.delta is None:
        raise ConfigError("--delta lo:hi is required")
    delta_range = _parse_range(args.delta, "--delta")
    width, height = _parse_resolution(args.res if args.res is not None else "400x300")
    out = args.out if args.out is not None else "diagram"
    bifurcation = bool(args.bifurcation)
    overlay = bool(args.overlay_conditions)
    samples = int(args.samples) if args.samples is not None else diagram.DEFAULT_SAMPLES
    burn_in = int(args.burn_in) if args.burn_in is not None else orbit_engine.BURN_IN

    if overlay and (bifurcation or model is not Model.II):
        raise ConfigError("--overlay-conditions applies to model II period diagrams only")

    if bifurcation:
        params = _game_params(args)
        try:
            data = diagram.bifurcation_scan(
                model, params.q,
                (delta_range[0] * params.s, delta_range[1] * params.s),
                delta_steps=width, samples_per_delta=samples, burn_in=burn_in,
            )
        except ValueError as exc:
            raise ConfigError(str(exc))
        csv_text = diagram.export_csv(data)
        pixels = diagram.bifurcation_pixels(data, height=height)
        image = diagram.bifurcation_image(data, height=height)
    else:
        if args.q is None:
            raise ConfigError("period mode needs --q lo:hi (or --bifurcation with a single --q)")
        q_range = _parse_range(args.q, "--q")
        grid = diagram.period_diagram(
            model, delta_range, q_range, resolution=(width, height),
            burn_in=burn_in, threads=threads,
        )
        csv_text = diagram.export_csv(grid)
        pixels = diagram.grid_pixels(grid)
        image = diagram.render_image(grid)

    paths = [f"{out}.csv", f"{out}.ppm", f"{out}.png"]
    with open(paths[0], "w", newline="") as fh:
        fh.write(csv_text)
    with open(paths[1], "wb") as fh:
        fh.write(image)
    diagram.save_png(pixels, paths[2])
    if overlay:
        sidecar = f"{out}_conditions.csv"
        with open(sidecar, "w", newline="") as fh:
            fh.write(diagram.condition_curves_csv(np.linspace(*_parse_range(args.q, "--q"), height)))
        paths.append(sidecar)
    for path in paths:
        print(path)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="replicator-lab",
        description="Discrete-time replicator-origin dynamics: orbits, analysis, diagrams, chaos certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--model", help="I, II or III")
        p.add_argument("--q", help="equilibrium share (assumes unit total gain)")
        p.add_argument("--ga", dest="g_a", help="gain from deviating to A")
        p.add_argument("--gb", dest="g_b", help="gain from deviating to B")
        p.add_argument("--delta", help="raw step size (diagram: range lo:hi)")
        p.add_argument("--config", help="JSON file with defaults for any flag")

    p = sub.add_parser("iterate", help="print an orbit of the simplex dynamics as CSV")
    common(p)
    p.add_argument("--x0", help="initial share of A-strategists (default 0.3)")
    p.add_argument("--steps", help="number of steps")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("analyze", help="fixed points, critical points, Schwarzian sign, regime")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("certify", help="regime classification with chaos certificate")
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("diagram", help="period diagram or bifurcation scan (CSV + P6 + PNG)")
    common(p)
    p.add_argument("--res", help="raster resolution WxH (default 400x300)")
    p.add_argument("--out", help="output path prefix (default 'diagram')")
    p.add_argument("--bifurcation", action="store_const", const=True, help="bifurcation scan at fixed q")
    p.add_argument("--overlay-conditions", dest="overlay_conditions", action="store_const", const=True,
                   help="write the model-II period-3 condition curves as a CSV sidecar")
    p.add_argument("--samples", help="attractor samples per step value (default 200)")
    p.add_argument("--burn-in", dest="burn_in", help="discarded transient length (default 20000)")
    p.set_defaults(func=cmd_diagram)

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = _merge_config(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimplexEscape as exc:
        print(f"dynamics error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
