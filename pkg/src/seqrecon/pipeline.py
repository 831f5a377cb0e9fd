"""End-to-end sequence recovery.

One call runs the full chain on observed Fourier frames: concentration
edge maps, variance weights, change masks and the coupling operator, then
any of the three solvers.  Edge products are computed once and shared;
frames are processed through a bounded thread pool (see
:mod:`seqrecon.util`).
"""

import time
from dataclasses import dataclass, field

from seqrecon.changemask import (DEFAULT_CLOSING_RADIUS, DEFAULT_TAU_DIFF,
                                 build_phi, change_masks_for_frames)
from seqrecon.edges import edge_map
from seqrecon.solvers import (ADMMParams, JointProblem, select_mu_and_solve,
                              solve_joint, solve_l1, solve_vbjs)
from seqrecon.util import pmap
from seqrecon.weights import weights_for_frame

METHODS = ("l1", "vbjs", "joint")


@dataclass
class PipelineResult:
    """Intermediate products and reconstructions keyed by method."""

    edge_maps: list | None = None
    weights: list | None = None
    masks: list | None = None
    phi: object | None = None
    images: dict = field(default_factory=dict)
    solves: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    mus: list | None = None


def _per_frame(value, j, count, name):
    if value is None:
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if len(value) != count:
        raise ValueError(f"{name} must be scalar or one per frame")
    return float(value[j])


def run_pipeline(frames, methods=METHODS, beta: float = 0.5,
                 params: ADMMParams | None = None,
                 mu: float | None = None, xi=None, sigma=None,
                 k_max: int = 10, seed: int = 0, rotations: int = 10,
                 tau: float | None = None,
                 closing_radius: int = DEFAULT_CLOSING_RADIUS,
                 tau_diff: float = DEFAULT_TAU_DIFF,
                 extract_enclosing: bool = False) -> PipelineResult:
    """Reconstruct a frame sequence with the requested methods.

    The standard solver picks mu by sampling when ``mu`` is not given,
    which requires ``xi`` (scalar or per frame) and positive noise.  Edge
    maps, weights, and change masks are computed only when a method needs
    them.  ``params`` overrides the per-method solver profiles for every
    method at once; leave it unset to keep them.
    """
    frames = list(frames)
    J = len(frames)
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods: {sorted(unknown)}")
    out = PipelineResult()

    if "vbjs" in methods or "joint" in methods:
        out.edge_maps = pmap(lambda f: edge_map(f, rotations=rotations),
                             frames)
        out.weights = [weights_for_frame(em, tau=tau)
                       for em in out.edge_maps]

    if "joint" in methods and J > 1:
        gbars = [em.averaged for em in out.edge_maps]
        out.masks = change_masks_for_frames(
            gbars, d=closing_radius, tau_diff=tau_diff,
            extract_enclosing=extract_enclosing)
        out.phi = build_phi(out.masks)

    if "l1" in methods:
        def _solve_one(j):
            t0 = time.perf_counter()
            if mu is not None:
                res = solve_l1(frames[j], _per_frame(mu, j, J, "mu"),
                               params=params)
            else:
                xi_j = _per_frame(xi, j, J, "xi")
                if xi_j is None:
                    raise ValueError("xi is required when mu is not given")
                res = select_mu_and_solve(
                    frames[j], xi_j, sigma=_per_frame(sigma, j, J, "sigma"),
                    k_max=k_max, seed=[seed, j], params=params)
            return res, time.perf_counter() - t0

        pairs = pmap(_solve_one, range(J))
        out.solves["l1"] = [p[0] for p in pairs]
        out.timings["l1"] = [p[1] for p in pairs]
        out.images["l1"] = [r.image for r in out.solves["l1"]]
        out.mus = [r.mu for r in out.solves["l1"]]

    if "vbjs" in methods:
        def _solve_one(j):
            t0 = time.perf_counter()
            res = solve_vbjs(frames[j], out.weights[j], params=params)
            return res, time.perf_counter() - t0

        pairs = pmap(_solve_one, range(J))
        out.solves["vbjs"] = [p[0] for p in pairs]
        out.timings["vbjs"] = [p[1] for p in pairs]
        out.images["vbjs"] = [r.image for r in out.solves["vbjs"]]

    if "joint" in methods:
        problem = JointProblem(frames=frames, weights=out.weights,
                               phi=out.phi if beta > 0 else None,
                               beta=beta if J > 1 else 0.0)
        t0 = time.perf_counter()
        res = solve_joint(problem, params=params)
        total = time.perf_counter() - t0
        out.solves["joint"] = res
        out.timings["joint"] = [total / J] * J
        out.images["joint"] = res.images

    return out
