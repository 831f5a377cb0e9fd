"""Run configuration: JSON round-trip for scenes, grids, noise, and solver
settings, plus a content hash recorded in every artifact directory.

The schema is documented in docs/scene-format.md.  Unknown keys are
rejected so a typo fails loudly instead of silently running defaults.
"""

import hashlib
import json
from dataclasses import dataclass, field, fields as dc_fields

from seqrecon.grid import GridSpec, Occlusion
from seqrecon.phantoms import (Ellipse, Motion, Rectangle, SceneSpec,
                               default_scene, obscured_scene, pair_scene)
from seqrecon.pipeline import METHODS
from seqrecon.solvers import ADMMParams, params_for_method

NAMED_SCENES = {"default": default_scene, "pair": pair_scene,
                "obscured": obscured_scene}


def _check_keys(d: dict, allowed, where: str) -> None:
    extra = set(d) - set(allowed)
    if extra:
        raise ValueError(f"unknown keys in {where}: {sorted(extra)}")


def shape_to_dict(shape) -> dict:
    d = {"kind": "ellipse" if isinstance(shape, Ellipse) else "rectangle",
         "center": list(shape.center), "magnitude": shape.magnitude,
         "angle_deg": shape.angle_deg,
         "motion": {"translate": list(shape.motion.translate),
                    "rotate_deg": shape.motion.rotate_deg},
         "appears": list(shape.appears) if shape.appears else None}
    if isinstance(shape, Ellipse):
        d["axes"] = list(shape.axes)
        d["ring_width"] = shape.ring_width
    else:
        d["size"] = list(shape.size)
    return d


def shape_from_dict(d: dict):
    _check_keys(d, {"kind", "center", "magnitude", "angle_deg", "motion",
                    "appears", "axes", "ring_width", "size"}, "shape")
    md = d.get("motion") or {}
    _check_keys(md, {"translate", "rotate_deg"}, "motion")
    motion = Motion(translate=tuple(md.get("translate", (0.0, 0.0))),
                    rotate_deg=md.get("rotate_deg", 0.0))
    common = dict(center=tuple(d["center"]), magnitude=d["magnitude"],
                  angle_deg=d.get("angle_deg", 0.0), motion=motion,
                  appears=tuple(d["appears"]) if d.get("appears") else None)
    if d["kind"] == "ellipse":
        return Ellipse(axes=tuple(d["axes"]),
                       ring_width=d.get("ring_width"), **common)
    if d["kind"] == "rectangle":
        return Rectangle(size=tuple(d["size"]), **common)
    raise ValueError(f"unknown shape kind {d['kind']!r}")


def occlusion_to_dict(frame: int, occ: Occlusion) -> dict:
    return {"frame": frame, "region": list(occ.region), "fill": occ.fill,
            "value": occ.value, "std": occ.std, "seed": occ.seed}


def occlusion_from_dict(d: dict):
    _check_keys(d, {"frame", "region", "fill", "value", "std", "seed"},
                "occlusion")
    occ = Occlusion(region=tuple(d["region"]),
                    fill=d.get("fill", "constant"),
                    value=d.get("value", 0.0), std=d.get("std", 3.0),
                    seed=d.get("seed", 0))
    return int(d["frame"]), occ


def scene_to_dict(scene: SceneSpec) -> dict:
    return {"frames": scene.frames,
            "shapes": [shape_to_dict(s) for s in scene.shapes],
            "occlusions": [occlusion_to_dict(j, o)
                           for j, o in scene.occlusions],
            "eval_points": [{"name": n, "xy": list(xy)}
                            for n, xy in scene.eval_points]}


def scene_from_dict(d: dict) -> SceneSpec:
    if isinstance(d, str):
        try:
            return NAMED_SCENES[d]()
        except KeyError:
            raise ValueError(f"unknown named scene {d!r}; "
                             f"choices: {sorted(NAMED_SCENES)}")
    _check_keys(d, {"frames", "shapes", "occlusions", "eval_points"},
                "scene")
    return SceneSpec(
        shapes=tuple(shape_from_dict(s) for s in d["shapes"]),
        frames=int(d.get("frames", 6)),
        occlusions=tuple(occlusion_from_dict(o)
                         for o in d.get("occlusions", ())),
        eval_points=tuple((p["name"], tuple(p["xy"]))
                          for p in d.get("eval_points", ())))


@dataclass
class RunConfig:
    """Everything a pipeline run needs, serializable to one JSON file."""

    grid: GridSpec = field(default_factory=lambda: GridSpec(N=32, J=6))
    scene: SceneSpec = field(default_factory=default_scene)
    snr_db: float | None = 2.0
    sigma: float | None = None
    seed: int = 0
    stat: str = "mean_abs"
    band_rule: str = "cross"
    oversample: int = 4
    solver: dict = field(default_factory=dict)
    methods: tuple = METHODS
    beta: float = 0.5
    rotations: int = 10
    closing_radius: int = 3
    tau_diff: float = 1e-3
    k_max: int = 10
    xi: float | None = None
    mu: float | None = None
    extract_enclosing: bool = False
    stages: tuple = ("simulate", "edges", "weights", "changemask",
                     "solve", "evaluate")

    def __post_init__(self):
        if self.snr_db is not None and self.sigma is not None:
            raise ValueError("give either snr_db or sigma, not both")
        if self.grid.J < self.scene.frames:
            raise ValueError("grid J must cover the scene's frame count")
        _check_keys(self.solver, {f.name for f in dc_fields(ADMMParams)},
                    "solver")
        for method in self.methods:
            params_for_method(method, self.solver)  # validates the values

    def to_dict(self) -> dict:
        return {"grid": {"N": self.grid.N, "J": self.grid.J},
                "scene": scene_to_dict(self.scene),
                "noise": {"snr_db": self.snr_db, "sigma": self.sigma,
                          "seed": self.seed, "stat": self.stat},
                "sampling": {"band_rule": self.band_rule,
                             "oversample": self.oversample},
                "solver": dict(self.solver),
                "pipeline": {"methods": list(self.methods),
                             "beta": self.beta,
                             "rotations": self.rotations,
                             "closing_radius": self.closing_radius,
                             "tau_diff": self.tau_diff,
                             "k_max": self.k_max, "xi": self.xi,
                             "mu": self.mu,
                             "extract_enclosing": self.extract_enclosing},
                "stages": list(self.stages)}

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        _check_keys(d, {"grid", "scene", "noise", "sampling", "solver",
                        "pipeline", "stages"}, "config")
        grid_d = d.get("grid", {})
        _check_keys(grid_d, {"N", "J"}, "grid")
        noise = d.get("noise", {})
        _check_keys(noise, {"snr_db", "sigma", "seed", "stat"}, "noise")
        sampling = d.get("sampling", {})
        _check_keys(sampling, {"band_rule", "oversample"}, "sampling")
        pipe = d.get("pipeline", {})
        _check_keys(pipe, {"methods", "beta", "rotations", "closing_radius",
                           "tau_diff", "k_max", "xi", "mu",
                           "extract_enclosing"}, "pipeline")
        scene = (scene_from_dict(d["scene"]) if "scene" in d
                 else default_scene())
        grid = GridSpec(N=int(grid_d.get("N", 32)),
                        J=int(grid_d.get("J", scene.frames)))
        kwargs = dict(
            grid=grid, scene=scene,
            snr_db=noise.get("snr_db", 2.0 if "sigma" not in noise else None),
            sigma=noise.get("sigma"), seed=noise.get("seed", 0),
            stat=noise.get("stat", "mean_abs"),
            band_rule=sampling.get("band_rule", "cross"),
            oversample=sampling.get("oversample", 4),
            solver=dict(d.get("solver", {})))
        defaults = cls(grid=grid, scene=scene)
        for key in ("methods", "beta", "rotations", "closing_radius",
                    "tau_diff", "k_max", "xi", "mu", "extract_enclosing"):
            kwargs[key] = pipe.get(key, getattr(defaults, key))
        kwargs["methods"] = tuple(kwargs["methods"])
        kwargs["stages"] = tuple(d.get("stages", defaults.stages))
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True,
                           separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]
