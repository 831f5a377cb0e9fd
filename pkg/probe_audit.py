"""Full-ensemble convergence audit with the per-method profiles.

Covers every solve the acceptance suite will perform: pipeline cells for
the ordering/study criteria (including every mu trial), plus the tight
reduction-identity solves.  Checks per solve: both residuals below 1e-4
within 500 iterations, objective non-increasing after iteration 10 up to
1e-8 slack.
"""

import dataclasses
import math
import sys
import time

import numpy as np

from seqrecon.edges import edge_map
from seqrecon.grid import GridSpec
from seqrecon.phantoms import (default_scene, obscured_scene, pair_scene,
                               simulate_scene)
from seqrecon.pipeline import run_pipeline
from seqrecon.solvers import (ADMMParams, JointProblem, L1_PARAMS,
                              VBJS_PARAMS, solve_joint, solve_l1, solve_vbjs,
                              solver_health, xi_from_reference)
from seqrecon.util import pmap
from seqrecon.weights import weights_for_frame

BAD = []


def check(label, res):
    h = solver_health(res)
    ok = (h["tol_hit_iteration"] is not None
          and h["tol_hit_iteration"] <= 500 and h["max_rise"] <= 1e-8)
    tag = "OK " if ok else "BAD"
    print(f"{tag} {label}: it={h['iterations']} hit={h['tol_hit_iteration']}"
          f" rise={h['max_rise']:.2e} pr={h['final_primal']:.2e}"
          f" du={h['final_dual']:.2e}", flush=True)
    if not ok:
        BAD.append(label)
    return h


def trial_mus(frame, xi, seed, k_max=10):
    sigma_u = frame.noise_sigma / math.sqrt(frame.coeffs.size)
    rng = np.random.default_rng(seed)
    mus = []
    for _ in range(k_max):
        mu = rng.normal(sigma_u / xi, sigma_u)
        while mu <= 0:
            mu = rng.normal(sigma_u / xi, sigma_u)
        mus.append(float(mu))
    return mus


def audit_cell(scene_kind, scene, N, snr, seed=0):
    t0 = time.perf_counter()
    spec = GridSpec(N, scene.frames)
    frames, truths = simulate_scene(scene, spec, snr_db=snr, seed=seed,
                                    oversample=4)
    xi = [xi_from_reference(t) for t in truths]
    label = f"{scene_kind} N={N} snr={snr}"
    res = run_pipeline(frames, beta=0.5, seed=seed, xi=xi)
    for m, sv in res.solves.items():
        for i, r in enumerate(sv if isinstance(sv, list) else [sv]):
            check(f"{label} {m}[{i}]", r)
    # every mu trial, replicated from the selection stream
    jobs = []
    for j, frame in enumerate(frames):
        for k, mu in enumerate(trial_mus(frame, xi[j], [seed, j])):
            jobs.append((j, k, frame, mu))
    trials = pmap(lambda t: solve_l1(t[2], t[3]), jobs)
    worst = (0, None)
    for (j, k, _, mu), r in zip(jobs, trials):
        h = solver_health(r)
        ok = (h["tol_hit_iteration"] is not None
              and h["tol_hit_iteration"] <= 500 and h["max_rise"] <= 1e-8)
        if not ok:
            BAD.append(f"{label} trial f{j} mu={mu:.3f}")
            print(f"BAD {label} trial f{j}[{k}] mu={mu:.3f}: {h}", flush=True)
        if h["iterations"] > worst[0]:
            worst = (h["iterations"], (j, k, mu, h))
    print(f"    trials: {len(jobs)} solves, worst {worst[1]}", flush=True)
    print(f"    cell wall {time.perf_counter() - t0:.1f}s", flush=True)
    return res, frames, truths


def audit_c5(seed=0):
    scene = default_scene()
    spec = GridSpec(32, scene.frames)
    frames, truths = simulate_scene(scene, spec, snr_db=20.0, seed=seed,
                                    oversample=4)
    emaps = pmap(lambda f: edge_map(f), frames)
    weights = [weights_for_frame(em) for em in emaps]
    tight_v = dataclasses.replace(VBJS_PARAMS, tol_primal=1e-6,
                                  tol_dual=1e-6, max_iter=4000)
    tight_l = dataclasses.replace(L1_PARAMS, tol_primal=1e-6,
                                  tol_dual=1e-6, max_iter=4000)
    tight_j = dataclasses.replace(ADMMParams(), tol_primal=1e-6,
                                  tol_dual=1e-6, max_iter=4000)
    vb = [solve_vbjs(f, w, params=tight_v) for f, w in zip(frames, weights)]
    for j, r in enumerate(vb):
        check(f"c5 vbjs tight f{j}", r)
    problem = JointProblem(frames=frames, weights=weights, phi=None,
                           beta=0.0)
    jt = solve_joint(problem, params=tight_j)
    check("c5 joint beta=0 tight", jt)
    vb_sum = sum(r.objective for r in vb)
    rel = abs(jt.objective - vb_sum) / abs(vb_sum)
    print(f"    c5 identity beta0: joint={jt.objective:.10f}"
          f" sum_vbjs={vb_sum:.10f} rel={rel:.2e}", flush=True)
    ones = np.ones(spec.side * spec.side)
    for j in (0, 3):
        a = solve_vbjs(frames[j], ones, params=tight_v)
        b = solve_l1(frames[j], 1.0, params=tight_l)
        check(f"c5 vbjs W=1 f{j}", a)
        check(f"c5 l1 mu=1 f{j}", b)
        rel = abs(a.objective - b.objective) / abs(b.objective)
        print(f"    c5 identity W1 f{j}: vbjs={a.objective:.10f}"
              f" l1={b.objective:.10f} rel={rel:.2e}", flush=True)


def main():
    t0 = time.perf_counter()
    sc = default_scene()
    for N, snr in ((16, 2.0), (32, 2.0), (64, 2.0), (64, 1.2), (64, 6.0),
                   (64, 10.0), (64, 20.0)):
        audit_cell("default", sc, N, snr)
    audit_cell("obscured", obscured_scene(), 64, 2.0)
    audit_cell("pair", pair_scene(), 64, 20.0)
    audit_c5()
    print(f"TOTAL wall {time.perf_counter() - t0:.1f}s", flush=True)
    if BAD:
        print(f"FAILURES ({len(BAD)}):")
        for b in BAD:
            print(f"  {b}")
        sys.exit(1)
    print("ALL SOLVES HEALTHY")


if __name__ == "__main__":
    main()
