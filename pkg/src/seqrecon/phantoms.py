"""Piecewise-constant test scenes: a zero background, an enclosing ring and
static structures of low magnitude, and brighter objects that translate or
rotate between frames.  Scenes rasterize on the coarse grid or on an
oversampled grid (used to emulate continuous Fourier data), and provide the
analytic change ground truth between adjacent frames.
"""

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from seqrecon.grid import GridSpec, ImageGrid, NoiseModel, Occlusion, \
    add_noise, sigma_for_snr, simulate_sequence


@dataclass(frozen=True)
class Motion:
    """Per-frame-step motion: translation in [0,1] units and rotation in
    degrees about the shape's own center."""

    translate: tuple[float, float] = (0.0, 0.0)
    rotate_deg: float = 0.0

    @property
    def is_static(self) -> bool:
        return self.translate == (0.0, 0.0) and self.rotate_deg == 0.0


def _rotated_frame(dx, dy, angle_deg):
    th = math.radians(angle_deg)
    u = dx * math.cos(th) + dy * math.sin(th)
    v = -dx * math.sin(th) + dy * math.cos(th)
    return u, v


@dataclass(frozen=True)
class Ellipse:
    center: tuple[float, float]
    axes: tuple[float, float]
    magnitude: float
    angle_deg: float = 0.0
    ring_width: float | None = None
    motion: Motion = field(default_factory=Motion)
    appears: tuple[int, int] | None = None

    def at_frame(self, t: int) -> "Ellipse":
        steps = t - 1
        cx = self.center[0] + steps * self.motion.translate[0]
        cy = self.center[1] + steps * self.motion.translate[1]
        ang = self.angle_deg + steps * self.motion.rotate_deg
        return dataclasses.replace(self, center=(cx, cy), angle_deg=ang)

    def indicator(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        u, v = _rotated_frame(X - self.center[0], Y - self.center[1],
                              self.angle_deg)
        a, b = self.axes
        inside = (u / a) ** 2 + (v / b) ** 2 <= 1.0
        if self.ring_width is not None:
            ai, bi = a - self.ring_width, b - self.ring_width
            inside &= (u / ai) ** 2 + (v / bi) ** 2 > 1.0
        return inside


@dataclass(frozen=True)
class Rectangle:
    center: tuple[float, float]
    size: tuple[float, float]
    magnitude: float
    angle_deg: float = 0.0
    motion: Motion = field(default_factory=Motion)
    appears: tuple[int, int] | None = None

    def at_frame(self, t: int) -> "Rectangle":
        steps = t - 1
        cx = self.center[0] + steps * self.motion.translate[0]
        cy = self.center[1] + steps * self.motion.translate[1]
        ang = self.angle_deg + steps * self.motion.rotate_deg
        return dataclasses.replace(self, center=(cx, cy), angle_deg=ang)

    def indicator(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        u, v = _rotated_frame(X - self.center[0], Y - self.center[1],
                              self.angle_deg)
        w, h = self.size
        return (np.abs(u) <= w / 2) & (np.abs(v) <= h / 2)


Shape = Ellipse | Rectangle


@dataclass(frozen=True)
class SceneSpec:
    """Shapes, the per-frame occlusion schedule, and named evaluation
    points used by the error studies."""

    shapes: tuple
    frames: int = 6
    occlusions: tuple = ()  # pairs (frame_index, Occlusion)
    eval_points: tuple = ()  # pairs (name, (x, y))

    def occlusions_for(self, t: int) -> list[Occlusion]:
        return [occ for j, occ in self.occlusions if j == t]

    def occlusion_map(self) -> dict[int, list[Occlusion]]:
        out: dict[int, list[Occlusion]] = {}
        for j, occ in self.occlusions:
            out.setdefault(j, []).append(occ)
        return out

    def present(self, shape: Shape, t: int) -> bool:
        if shape.appears is None:
            return True
        first, last = shape.appears
        return first <= t <= last

    def shapes_at(self, t: int) -> list[Shape]:
        return [s.at_frame(t) for s in self.shapes if self.present(s, t)]

    def point(self, name: str) -> tuple[float, float]:
        for label, xy in self.eval_points:
            if label == name:
                return xy
        raise KeyError(f"no evaluation point named {name!r}")


def _grid_xy(spec: GridSpec, oversample: int):
    n = spec.side * oversample
    x = np.arange(n) / n
    return np.meshgrid(x, x, indexing="ij")


def rasterize(scene: SceneSpec, t: int, spec: GridSpec,
              oversample: int = 1) -> np.ndarray:
    """Pixel values of frame ``t`` (1-based), without occlusions.

    Shapes are additive; magnitudes are chosen so supports never overlap.
    With ``oversample > 1`` the array has ``side * oversample`` points per
    axis on the same periodic convention.
    """
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    X, Y = _grid_xy(spec, oversample)
    values = np.zeros_like(X)
    for shape in scene.shapes_at(t):
        values += shape.magnitude * shape.indicator(X, Y)
    return values


def render_sequence(scene: SceneSpec, spec: GridSpec) -> list[ImageGrid]:
    """Coarse-grid ground-truth images for every frame (no occlusions)."""
    return [ImageGrid(rasterize(scene, t, spec), spec)
            for t in range(1, scene.frames + 1)]


def ground_truth_change(scene: SceneSpec, t: int, spec: GridSpec
                        ) -> np.ndarray:
    """True changed region between frames t and t+1.

    A shape contributes the union of its two supports whenever its
    rasterization differs across the pair (it moved, appeared, or
    disappeared).
    """
    if not 1 <= t < scene.frames:
        raise ValueError(f"pair index {t} outside 1..{scene.frames - 1}")
    X, Y = _grid_xy(spec, 1)
    changed = np.zeros((spec.side, spec.side), dtype=bool)
    for shape in scene.shapes:
        sup_a = (shape.at_frame(t).indicator(X, Y)
                 if scene.present(shape, t) else np.zeros_like(changed))
        sup_b = (shape.at_frame(t + 1).indicator(X, Y)
                 if scene.present(shape, t + 1) else np.zeros_like(changed))
        if not np.array_equal(sup_a, sup_b):
            changed |= sup_a | sup_b
    return changed


def default_scene(frames: int = 6) -> SceneSpec:
    """Enclosing ring and two low-magnitude static structures at 0.3, one
    translating ellipse at 0.8, one rotating ellipse at 0.9, and one
    zero-filled rectangular obstruction per frame."""
    shapes = (
        Ellipse(center=(0.5, 0.5), axes=(0.44, 0.40), magnitude=0.3,
                ring_width=0.03),
        Rectangle(center=(0.28, 0.28), size=(0.16, 0.10), magnitude=0.3),
        Ellipse(center=(0.72, 0.70), axes=(0.045, 0.065), magnitude=0.3),
        Ellipse(center=(0.26, 0.62), axes=(0.09, 0.055), magnitude=0.8,
                motion=Motion(translate=(0.0575, 0.0))),
        Ellipse(center=(0.62, 0.33), axes=(0.055, 0.095), magnitude=0.9,
                angle_deg=15.0, motion=Motion(rotate_deg=10.0)),
    )
    occl = (
        (1, Occlusion(region=(0.22, 0.20, 0.34, 0.36))),
        (2, Occlusion(region=(0.64, 0.62, 0.80, 0.78))),
        (3, Occlusion(region=(0.38, 0.22, 0.50, 0.34))),
        (4, Occlusion(region=(0.24, 0.42, 0.36, 0.54))),
        (5, Occlusion(region=(0.16, 0.62, 0.28, 0.74))),
        (6, Occlusion(region=(0.30, 0.40, 0.42, 0.52))),
    )
    points = (
        ("inside_obstacle", (0.28, 0.28)),
        ("smooth_nonzero", (0.72, 0.70)),
        ("near_edge", (0.78, 0.70)),
        ("zero_background", (0.50, 0.18)),
    )
    return SceneSpec(shapes=shapes, frames=frames,
                     occlusions=occl[:frames], eval_points=points)


def pair_scene() -> SceneSpec:
    """Two frames, a single translating ellipse among static structures."""
    shapes = (
        Ellipse(center=(0.5, 0.5), axes=(0.44, 0.40), magnitude=0.3,
                ring_width=0.03),
        Rectangle(center=(0.28, 0.28), size=(0.16, 0.10), magnitude=0.3),
        Ellipse(center=(0.72, 0.70), axes=(0.045, 0.065), magnitude=0.3),
        Ellipse(center=(0.30, 0.62), axes=(0.09, 0.055), magnitude=0.8,
                motion=Motion(translate=(0.0625, 0.0))),
    )
    return SceneSpec(shapes=shapes, frames=2)


def obscured_scene(frames: int = 6) -> SceneSpec:
    """Default scene, but the frame-2 obstruction covers the translating
    ellipse instead of a static structure."""
    base = default_scene(frames)
    occl = list(base.occlusions)
    occl[1] = (2, Occlusion(region=(0.21, 0.55, 0.42, 0.69)))
    return dataclasses.replace(base, occlusions=tuple(occl))


def simulate_scene(scene: SceneSpec, spec: GridSpec,
                   snr_db: float | None = None,
                   sigma: float | tuple | None = None,
                   seed: int = 0, oversample: int = 4,
                   band_rule: str = "cross", stat: str = "mean_abs"
                   ) -> tuple[list, list[ImageGrid]]:
    """Render, occlude, transform, and corrupt a scene.

    Exactly one of ``snr_db`` (noise calibrated per frame to the target)
    and ``sigma`` may be given; with neither, the data is noiseless.
    Returns (frames, truths): the observed Fourier frames and the coarse
    unoccluded ground-truth images.
    """
    if snr_db is not None and sigma is not None:
        raise ValueError("give either snr_db or sigma, not both")
    fine = [rasterize(scene, t, spec, oversample)
            for t in range(1, scene.frames + 1)]
    occl = scene.occlusion_map()
    clean = simulate_sequence(fine, occl, NoiseModel(0.0, seed), spec,
                              band_rule=band_rule)
    if snr_db is not None:
        sigma = tuple(sigma_for_snr(f, snr_db, stat=stat) for f in clean)
    elif sigma is None:
        sigma = 0.0
    noise = NoiseModel(sigma, seed)
    frames = [add_noise(f, noise) for f in clean]
    truths = render_sequence(scene, spec)
    return frames, truths
