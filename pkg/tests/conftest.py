"""Shared fixtures: expensive simulation cells are built once per session
and reused across acceptance tests; every solver result they produce is
recorded so the solver-health test can audit the full set."""

import numpy as np
import pytest

from seqrecon.grid import GridSpec
from seqrecon.phantoms import (default_scene, obscured_scene, pair_scene,
                               simulate_scene)
from seqrecon.pipeline import run_pipeline
from seqrecon.solvers import xi_from_reference

SCENES = {"default": default_scene, "pair": pair_scene,
          "obscured": obscured_scene}

_HEALTH: list = []


def record_health(label: str, result) -> None:
    _HEALTH.append((label, result))


def health_records() -> list:
    return list(_HEALTH)


@pytest.fixture(scope="session")
def cells():
    """Lazy cache of full pipeline runs keyed by (N, snr, scene, beta)."""
    cache = {}

    def get(N=64, snr_db=2.0, scene_kind="default", beta=0.5, seed=0,
            methods=("l1", "vbjs", "joint")):
        key = (N, snr_db, scene_kind, beta, seed, tuple(methods))
        if key in cache:
            return cache[key]
        scene = SCENES[scene_kind]()
        spec = GridSpec(N, scene.frames)
        frames, truths = simulate_scene(scene, spec, snr_db=snr_db,
                                        seed=seed, oversample=4)
        xi = [xi_from_reference(t) for t in truths]
        res = run_pipeline(frames, methods=methods, beta=beta, seed=seed,
                           xi=xi)
        label = f"N={N} snr={snr_db} scene={scene_kind}"
        for m, sv in res.solves.items():
            for i, r in enumerate(sv if isinstance(sv, list) else [sv]):
                record_health(f"{label} {m}[{i}]", r)
        cell = {"scene": scene, "spec": spec, "frames": frames,
                "truths": truths, "res": res}
        cache[key] = cell
        return cell

    return get
