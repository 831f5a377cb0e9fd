import numpy as np
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.solvers import ADMMParams, solve_vbjs

scene = default_scene()
spec = GridSpec(N=32, J=scene.frames)
frames, _ = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
em = edge_map(frames[0], rotations=10)
wm = weights_for_frame(em)

for rho in (0.0625, 0.125, 0.25, 0.5):
    for relax in (1.0, 1.2, 1.4, 1.6, 1.8):
        p = ADMMParams(rho=rho, relax=relax, max_iter=1200)
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sr = solve_vbjs(frames[0], wm, params=p)
        objs = np.asarray(sr.objectives)
        rise = float(np.max(objs[11:] - objs[10:-1], initial=0.0)) if objs.size > 11 else 0.0
        print(f"rho={rho} relax={relax}: it={sr.iterations} conv={sr.converged} "
              f"pr={sr.primal_residuals[-1]:.1e} du={sr.dual_residuals[-1]:.1e} "
              f"rise={rise:.2e}")
