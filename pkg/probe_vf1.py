import warnings
import numpy as np
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.solvers import ADMMParams, solve_l1, solve_vbjs

scene = default_scene()
spec = GridSpec(N=32, J=scene.frames)
frames, truths = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
em = edge_map(frames[0], rotations=10)
wm = weights_for_frame(em)
print("f1 weight stats: min", wm.w.min(), "mean", wm.w.mean(),
      "edges", wm.edge_count)

def audit(tag, sr):
    obj = np.asarray(sr.objectives)
    rise = float(np.max(obj[11:] - obj[10:-1], initial=0.0)) if obj.size > 11 else 0.0
    print(f"  {tag}: iters={sr.iterations} conv={sr.converged} "
          f"pr={sr.primal_residuals[-1]:.2e} du={sr.dual_residuals[-1]:.2e} "
          f"rise={rise:.2e}")

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    base = solve_l1(frames[0], mu=2.53, params=ADMMParams(rho=0.25, relax=0.8))
    audit("l1 f1 (for warm start)", base)
    s0 = base.image.values
    for rho in (0.05, 0.0625, 0.09, 0.125):
        for relax in (0.8, 1.0):
            p = ADMMParams(rho=rho, relax=relax)
            sr = solve_vbjs(frames[0], wm, params=p)
            audit(f"cold rho={rho} relax={relax}", sr)
            sr = solve_vbjs(frames[0], wm, params=p, s0=s0)
            audit(f"warm rho={rho} relax={relax}", sr)
    p = ADMMParams(rho=0.25, relax=0.8)
    sr = solve_vbjs(frames[0], wm, params=p, s0=s0)
    audit("warm rho=0.25 relax=0.8", sr)
