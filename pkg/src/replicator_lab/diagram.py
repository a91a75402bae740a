"""Bifurcation and period diagrams with CSV and raw-raster export.

The period diagram colors each (step, q) cell by the minimal detected
period of the orbit of a fixed interior start after a long transient;
cells where the map is undefined are marked invalid.  Images are binary
portable pixmaps (P6) with q decreasing downward and the step increasing
rightward; a PNG copy of the same pixels can be written via matplotlib.
"""

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from .chaos_certify import f1b6_threshold, f_of_delta
from .interval_maps import Model, map_values, model_ii_max_effective_step
from .orbit_engine import BURN_IN, PERIOD_TOL, detect_period_grid

INVALID = -1
NONE_PERIOD = 0

DIAGRAM_MAX_PERIOD = 8
DEFAULT_X0 = 0.3
DEFAULT_SAMPLES = 200


@dataclass(frozen=True)
class ColorMap:
    """Period -> RGB legend with an overflow color and a background."""

    period_colors: dict
    overflow: tuple = (255, 255, 255)
    background: tuple = (0, 0, 0)

    def color_for(self, period) -> tuple:
        if period is None or period <= 0:
            return self.background
        return self.period_colors.get(period, self.overflow)


DEFAULT_COLORMAP = ColorMap(
    period_colors={
        1: (255, 255, 0),  # yellow: convergence to the equilibrium
        2: (255, 0, 0),  # red
        3: (0, 0, 255),  # blue
        4: (0, 128, 0),  # green
        5: (150, 75, 0),  # brown
        6: (0, 255, 255),  # cyan
        7: (64, 64, 64),  # darkgray
        8: (255, 0, 255),  # magenta
    }
)


@dataclass(frozen=True)
class DiagramGrid:
    """Detected periods over a (step, q) raster.

    ``periods[i, j]`` belongs to ``(delta_axis[i], q_axis[j])``; entries are
    the detected period, 0 for none, -1 for invalid cells.
    """

    model: Model
    delta_axis: np.ndarray
    q_axis: np.ndarray
    periods: np.ndarray


@dataclass(frozen=True)
class BifurcationData:
    """Post-transient attractor samples per step value (one row per step)."""

    model: Model
    q: float
    delta_axis: np.ndarray
    samples: np.ndarray


def _parse_range(rng) -> tuple[float, float]:
    lo, hi = float(rng[0]), float(rng[1])
    if not hi > lo:
        raise ValueError(f"range must increase, got ({lo}, {hi})")
    return lo, hi


def bifurcation_scan(
    model,
    q: float,
    delta_range,
    delta_steps: int,
    samples_per_delta: int = DEFAULT_SAMPLES,
    burn_in: int = BURN_IN,
    x0: float = DEFAULT_X0,
) -> BifurcationData:
    """Attractor samples along a step scan at fixed q.

    For each of ``delta_steps`` step values (inclusive endpoints), iterate
    from x0, discard ``burn_in`` iterates and record the next
    ``samples_per_delta`` as attractor samples.
    """
    model = Model(model)
    lo, hi = _parse_range(delta_range)
    if model is Model.II and hi > model_ii_max_effective_step(q) * (1 + 1e-12):
        raise ValueError(
            f"model II with q={q} is undefined past delta_eff={model_ii_max_effective_step(q)}; "
            f"requested scan up to {hi}"
        )
    deltas = np.linspace(lo, hi, delta_steps)
    x = np.full(delta_steps, float(x0))
    for _ in range(burn_in):
        x = map_values(model, q, deltas, x)
    samples = np.empty((delta_steps, samples_per_delta))
    for k in range(samples_per_delta):
        x = map_values(model, q, deltas, x)
        samples[:, k] = x
    return BifurcationData(model=model, q=q, delta_axis=deltas, samples=samples)


def period_diagram(
    model,
    delta_range,
    q_range,
    resolution: tuple[int, int] = (400, 300),
    burn_in: int = BURN_IN,
    tol: float = PERIOD_TOL,
    max_period: int = DIAGRAM_MAX_PERIOD,
    x0: float = DEFAULT_X0,
    threads: int = 1,
) -> DiagramGrid:
    """Detected-period raster over the (step, q) plane.

    ``resolution`` is (width, height) = (#step values, #q values), endpoints
    inclusive.  Cells with q outside (0, 1), or past the model-II maximal
    step, are marked invalid rather than raised.  Cells are independent;
    ``threads`` > 1 splits them across a thread pool with a deterministic
    assembly order.
    """
    model = Model(model)
    width, height = resolution
    dlo, dhi = _parse_range(delta_range)
    qlo, qhi = _parse_range(q_range)
    delta_axis = np.linspace(dlo, dhi, width)
    q_axis = np.linspace(qlo, qhi, height)

    dd, qq = np.meshgrid(delta_axis, q_axis, indexing="ij")
    valid = (qq > 0.0) & (qq < 1.0)
    if model is Model.II:
        with np.errstate(divide="ignore"):
            caps = np.where(valid, np.minimum(4.0 / qq**2, 4.0 / (1.0 - qq) ** 2), np.inf)
        valid &= dd <= caps * (1 + 1e-12)

    periods = np.full(dd.shape, INVALID, dtype=np.int64)
    flat_idx = np.nonzero(valid.ravel())[0]
    qs = qq.ravel()[flat_idx]
    ds = dd.ravel()[flat_idx]

    def run_chunk(sl):
        return detect_period_grid(
            model, qs[sl], ds[sl], x0=x0, burn_in=burn_in, tol=tol, max_period=max_period
        )

    if threads > 1 and flat_idx.size > 1:
        bounds = np.linspace(0, flat_idx.size, threads + 1).astype(int)
        slices = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_chunk, slices))
        detected = np.concatenate(results)
    else:
        detected = run_chunk(slice(None))

    periods.ravel()[flat_idx] = detected
    return DiagramGrid(model=model, delta_axis=delta_axis, q_axis=q_axis, periods=periods)


def format_number(value) -> str:
    """Shortest exact decimal form; integral values drop the trailing .0."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def export_csv(data) -> str:
    """CSV text: "delta,x" rows for scans, "delta,q,period" for grids.

    Rows follow row-major grid order; cells without a detected period (or
    invalid) leave the period field empty.  LF line endings.
    """
    lines = []
    if isinstance(data, BifurcationData):
        lines.append("delta,x")
        for i, d in enumerate(data.delta_axis):
            ds = format_number(d)
            for x in data.samples[i]:
                lines.append(f"{ds},{format_number(x)}")
    elif isinstance(data, DiagramGrid):
        lines.append("delta,q,period")
        for i, d in enumerate(data.delta_axis):
            ds = format_number(d)
            for j, q in enumerate(data.q_axis):
                p = data.periods[i, j]
                lines.append(f"{ds},{format_number(q)},{p if p >= 1 else ''}")
    else:
        raise TypeError(f"cannot export {type(data).__name__}")
    return "\n".join(lines) + "\n"


def _ppm_bytes(pixels: np.ndarray) -> bytes:
    height, width = pixels.shape[:2]
    return b"P6\n%d %d\n255\n" % (width, height) + pixels.astype(np.uint8).tobytes()


def grid_pixels(grid: DiagramGrid, colormap: ColorMap = DEFAULT_COLORMAP) -> np.ndarray:
    """RGB pixel array (height, width, 3) with q decreasing downward."""
    max_p = int(grid.periods.max()) if grid.periods.size else 0
    lut = np.empty((max(max_p, 0) + 2, 3), dtype=np.uint8)
    lut[0] = colormap.background  # invalid
    lut[1] = colormap.background  # no period detected
    for p in range(1, max_p + 1):
        lut[p + 1] = colormap.color_for(p)
    idx = grid.periods.T[::-1, :] + 1  # rows: q max at top
    return lut[idx]


def render_image(grid: DiagramGrid, colormap: ColorMap = DEFAULT_COLORMAP) -> bytes:
    """Binary P6 pixmap of the period raster."""
    return _ppm_bytes(grid_pixels(grid, colormap))


def bifurcation_pixels(
    data: BifurcationData, height: int = 300, foreground=(0, 0, 0), background=(255, 255, 255)
) -> np.ndarray:
    """RGB pixel array of the scan: attractor samples as dots, x decreasing downward."""
    width = data.delta_axis.size
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    pixels[:] = background
    rows = np.rint((1.0 - data.samples) * (height - 1)).astype(int)
    rows = np.clip(rows, 0, height - 1)
    cols = np.broadcast_to(np.arange(width)[:, None], rows.shape)
    pixels[rows.ravel(), cols.ravel()] = foreground
    return pixels


def bifurcation_image(data: BifurcationData, height: int = 300) -> bytes:
    """Binary P6 pixmap of the bifurcation scan."""
    return _ppm_bytes(bifurcation_pixels(data, height))


def save_png(pixels: np.ndarray, path) -> None:
    """Write an RGB pixel array as PNG (raw raster, no axes) via matplotlib."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.image

    matplotlib.image.imsave(path, pixels)


def condition_curves_csv(q_values) -> str:
    """Sidecar CSV of the two model-II period-3 condition curves per q.

    Columns: q, the first-iterate threshold step (empty when none exists),
    and the last root of F = 1 below the maximal step.
    """
    lines = ["q,f1b6_delta,f_root_delta"]
    for q in q_values:
        qf = min(float(q), 1.0 - float(q))
        if not 0.0 < qf < 1.0:
            lines.append(f"{format_number(q)},,")
            continue
        try:
            fb = f1b6_threshold(qf)
        except ValueError:
            fb = None
        dstar = 4.0 / (1.0 - qf) ** 2
        d = dstar
        while d > 0 and f_of_delta(qf, d) < 1.0:
            d -= 1e-3
        root = ""
        if d > 0:
            lo, hi = d, min(d + 1e-3, dstar)
            while hi - lo > 1e-10:
                mid = 0.5 * (lo + hi)
                if f_of_delta(qf, mid) >= 1.0:
                    lo = mid
                else:
                    hi = mid
            root = format_number(0.5 * (lo + hi))
        fb_s = format_number(fb) if fb is not None else ""
        lines.append(f"{format_number(q)},{fb_s},{root}")
    return "\n".join(lines) + "\n"
