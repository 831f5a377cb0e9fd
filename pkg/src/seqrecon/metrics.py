"""Error metrics, evaluation regions, and the study drivers.

Reconstructions are scored by the log10 mean squared error restricted to
a region: the whole image, the smooth region (away from true edges and
any obstruction), the obstructed region, or a 5x5 neighborhood of a named
evaluation point.  The study drivers sweep grid size or noise level, run
all three solvers through the shared pipeline, and emit a CSV plus plots.
"""

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
from skimage.morphology import binary_dilation, disk

from seqrecon.grid import GridSpec, ImageGrid
from seqrecon.phantoms import SceneSpec, default_scene, simulate_scene
from seqrecon.pipeline import METHODS, run_pipeline
from seqrecon.solvers import ADMMParams, solver_health, xi_from_reference

_EPS = float(np.finfo(float).eps)
MSE_LOG_FLOOR = float(np.log10(_EPS ** 2))
LOG_ERROR_FLOOR = float(np.log10(_EPS))

EDGE_DILATION = 3
CSV_COLUMNS = ("method", "frame", "region", "N", "snr_db", "mse_log",
               "wall_time_s")


def _values(x) -> np.ndarray:
    return x.values if isinstance(x, ImageGrid) else np.asarray(x)


def edge_set(truth) -> np.ndarray:
    """Pixels whose value differs from a 4-neighbor (periodic)."""
    t = _values(truth)
    e = np.zeros(t.shape, dtype=bool)
    for axis in (0, 1):
        for shift in (1, -1):
            e |= t != np.roll(t, shift, axis=axis)
    return e


def _occlusion_support(spec: GridSpec, occlusions) -> np.ndarray:
    sup = np.zeros((spec.side, spec.side), dtype=bool)
    for occ in occlusions:
        sup |= occ.support(spec)
    return sup


def region_whole(spec: GridSpec) -> np.ndarray:
    return np.ones((spec.side, spec.side), dtype=bool)


def region_smooth(truth, spec: GridSpec, occlusions=()) -> np.ndarray:
    """Away from the truth's edges (dilated) and any obstruction."""
    near_edge = binary_dilation(edge_set(truth), disk(EDGE_DILATION))
    return ~near_edge & ~_occlusion_support(spec, occlusions)


def region_occluded(spec: GridSpec, occlusions) -> np.ndarray:
    return _occlusion_support(spec, occlusions)


def region_point(spec: GridSpec, xy) -> np.ndarray:
    """5x5 neighborhood of the grid node nearest (x, y)."""
    side = spec.side
    i = int(round(xy[0] * side)) % side
    j = int(round(xy[1] * side)) % side
    mask = np.zeros((side, side), dtype=bool)
    mask[max(0, i - 2):i + 3, max(0, j - 2):j + 3] = True
    return mask


@dataclass(frozen=True)
class RegionSelector:
    """Named evaluation region; ``point`` kinds carry their center."""

    kind: str
    center: tuple | None = None

    _KINDS = ("whole", "smooth", "occluded", "point")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}")
        if self.kind == "point" and self.center is None:
            raise ValueError("point regions need a center")

    def select(self, truth, spec: GridSpec, occlusions=()) -> np.ndarray:
        if self.kind == "whole":
            return region_whole(spec)
        if self.kind == "smooth":
            return region_smooth(truth, spec, occlusions)
        if self.kind == "occluded":
            return region_occluded(spec, occlusions)
        return region_point(spec, self.center)


def mse_log(f, f_tilde, region: np.ndarray | None = None) -> float:
    """log10 of the mean squared error over ``region`` (default: all).

    An exact-zero error is clamped to the machine floor with a warning
    rather than returning -inf, so noiseless sanity sweeps keep running.
    """
    a = _values(f)
    b = _values(f_tilde)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = a - b
    if region is not None:
        region = np.asarray(region, dtype=bool)
        if region.shape != a.shape:
            raise ValueError("region shape mismatch")
        if not region.any():
            raise ValueError("empty evaluation region")
        diff = diff[region]
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        warnings.warn("exact-zero error clamped to the machine floor",
                      RuntimeWarning)
    return float(np.log10(max(mse, _EPS ** 2)))


def pointwise_log_error(f, f_tilde) -> np.ndarray:
    """Entrywise log10 absolute error, zeros clamped to the machine floor."""
    a = _values(f)
    b = _values(f_tilde)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    err = np.abs(a - b)
    if (err == 0.0).any():
        warnings.warn("exact-zero entries clamped to the machine floor",
                      RuntimeWarning)
    return np.log10(np.maximum(err, _EPS))


def evaluate_images(method: str, images, truths, scene: SceneSpec,
                    spec: GridSpec, snr_db: float,
                    wall_times=None, include_points: bool = False) -> list:
    """CSV rows scoring one method's reconstruction of a sequence.

    Emits whole/smooth rows for every frame, an occluded row for frames
    with an obstruction, and optionally one row per named evaluation
    point.
    """
    rows = []
    for j, (img, truth) in enumerate(zip(images, truths), start=1):
        occ = scene.occlusions_for(j)
        wt = float(wall_times[j - 1]) if wall_times is not None else float("nan")

        def _row(region_name, mask):
            return {"method": method, "frame": j, "region": region_name,
                    "N": spec.N, "snr_db": snr_db,
                    "mse_log": mse_log(truth, img, mask),
                    "wall_time_s": wt}

        rows.append(_row("whole", None))
        rows.append(_row("smooth", region_smooth(truth, spec, occ)))
        if occ:
            rows.append(_row("occluded", region_occluded(spec, occ)))
        if include_points:
            for name, xy in scene.eval_points:
                rows.append(_row(f"point:{name}", region_point(spec, xy)))
    return rows


def write_report_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        wr.writeheader()
        for row in rows:
            wr.writerow(row)


@dataclass
class StudyConfig:
    """Desk-scale defaults for the two sweeps."""

    scene: SceneSpec = field(default_factory=default_scene)
    methods: tuple = METHODS
    resolutions: tuple = (16, 32, 64)
    resolution_snr_db: float = 2.0
    snrs: tuple = (1.2, 2.0, 6.0, 10.0, 20.0)
    snr_N: int = 64
    beta: float = 0.5
    seed: int = 0
    oversample: int = 4
    k_max: int = 10
    params: ADMMParams | None = None


@dataclass
class StudyReport:
    kind: str
    rows: list
    csv_path: str | None = None
    plot_paths: list = field(default_factory=list)
    health: list = field(default_factory=list)


def _study_cell(scene, N, snr_db, config, health) -> list:
    spec = GridSpec(N=N, J=scene.frames)
    frames, truths = simulate_scene(scene, spec, snr_db=snr_db,
                                    seed=config.seed,
                                    oversample=config.oversample)
    xi = [xi_from_reference(t) for t in truths]
    result = run_pipeline(frames, methods=config.methods, beta=config.beta,
                          params=config.params, xi=xi, seed=config.seed,
                          k_max=config.k_max)
    rows = []
    for method in config.methods:
        rows.extend(evaluate_images(
            method, result.images[method], truths, scene, spec,
            snr_db=snr_db, wall_times=result.timings[method],
            include_points=True))
        solves = result.solves[method]
        for i, res in enumerate(solves if isinstance(solves, list)
                                else [solves]):
            label = f"N={N} snr={snr_db} {method}[{i}]"
            health.append((label, solver_health(res)))
    return rows


def run_study(kind: str, config: StudyConfig | None = None,
              out_dir=None) -> StudyReport:
    """Sweep grid size (``resolution``) or noise level (``snr``).

    Every cell simulates the scene, reconstructs it with all requested
    methods, and scores each region.  With ``out_dir`` the report lands
    there as ``study_<kind>.csv`` along with one plot per region.
    """
    config = config or StudyConfig()
    rows = []
    health = []
    if kind == "resolution":
        for N in config.resolutions:
            rows.extend(_study_cell(config.scene, N,
                                    config.resolution_snr_db, config,
                                    health))
        x_field = "N"
    elif kind == "snr":
        for snr in config.snrs:
            rows.extend(_study_cell(config.scene, config.snr_N, snr, config,
                                    health))
        x_field = "snr_db"
    else:
        raise ValueError(f"unknown study kind {kind!r}")

    report = StudyReport(kind=kind, rows=rows, health=health)
    if out_dir is not None:
        import os

        os.makedirs(out_dir, exist_ok=True)
        report.csv_path = os.path.join(out_dir, f"study_{kind}.csv")
        write_report_csv(report.csv_path, rows)
        report.plot_paths = _plot_study(rows, kind, x_field, out_dir,
                                        config.methods)
    return report


def mean_curve(rows, method: str, region: str, x_field: str):
    """Per-method curve: x value -> mse_log averaged over frames."""
    pts = {}
    for row in rows:
        if row["method"] == method and row["region"] == region:
            pts.setdefault(row[x_field], []).append(row["mse_log"])
    xs = sorted(pts)
    return xs, [float(np.mean(pts[x])) for x in xs]


def _plot_study(rows, kind, x_field, out_dir, methods) -> list:
    import os

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    regions = sorted({row["region"] for row in rows})
    for region in regions:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for method in methods:
            xs, ys = mean_curve(rows, method, region, x_field)
            if xs:
                ax.plot(xs, ys, marker="o", label=method)
        ax.set_xlabel("N" if x_field == "N" else "SNR (dB)")
        ax.set_ylabel("MSE (log10)")
        ax.set_title(f"{kind} study, {region}")
        ax.legend()
        fig.tight_layout()
        slug = region.replace(":", "_")
        path = os.path.join(out_dir, f"study_{kind}_{slug}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
