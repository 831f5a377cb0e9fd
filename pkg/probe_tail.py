import warnings
import numpy as np
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.solvers import ADMMParams, solve_vbjs

scene = default_scene()
spec = GridSpec(N=32, J=scene.frames)
frames, truths = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
em = edge_map(frames[0], rotations=10)
wm = weights_for_frame(em)

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    for rho, relax in ((0.125, 1.0), (0.125, 0.8), (0.25, 0.8), (0.05, 1.0)):
        p = ADMMParams(rho=rho, relax=relax, max_iter=2000)
        sr = solve_vbjs(frames[0], wm, params=p)
        du = np.asarray(sr.dual_residuals)
        pr = np.asarray(sr.primal_residuals)
        marks = [int(np.argmax(du < t)) if (du < t).any() else -1
                 for t in (3e-4, 2e-4, 1.5e-4, 1e-4, 7e-5)]
        print(f"rho={rho} relax={relax}: iters={sr.iterations} "
              f"conv={sr.converged} du-crossings(3e-4,2e-4,1.5e-4,1e-4,7e-5)="
              f"{marks} final pr={pr[-1]:.1e} du={du[-1]:.1e}")
