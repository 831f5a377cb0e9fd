import warnings
import numpy as np
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.solvers import ADMMParams, solve_vbjs, solve_l1

scene = default_scene()
spec = GridSpec(N=32, J=scene.frames)
frames, _ = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
em = edge_map(frames[0], rotations=10)
wm = weights_for_frame(em)

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    l1 = solve_l1(frames[0], mu=1.0)
print(f"l1 ref: it={l1.iterations} conv={l1.converged}")

for rho in (0.05, 0.0625, 0.075, 0.09):
    for relax in (0.7, 0.8, 0.9, 1.0):
        for warm in (False, True):
            p = ADMMParams(rho=rho, relax=relax, adapt_rho=False, max_iter=700)
            s0 = l1.image.values if warm else None
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                sr = solve_vbjs(frames[0], wm, params=p, s0=s0)
            objs = np.asarray(sr.objectives)
            rise = float(np.max(objs[11:] - objs[10:-1], initial=0.0)) if objs.size > 11 else 0.0
            flag = " <<<" if sr.converged and sr.iterations <= 500 and rise <= 1e-8 else ""
            print(f"rho={rho} relax={relax} warm={warm}: it={sr.iterations} "
                  f"conv={sr.converged} pr={sr.primal_residuals[-1]:.1e} "
                  f"du={sr.dual_residuals[-1]:.1e} rise={rise:.2e}{flag}")
