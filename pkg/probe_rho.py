import numpy as np
import time
import warnings

from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.solvers import ADMMParams, solve_vbjs

spec = GridSpec(64, 6)
scene = default_scene()
frames, truths = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
f2 = frames[1]
w2 = weights_for_frame(edge_map(f2))

warnings.simplefilter("ignore")
for adapt in (False, True):
    for rho in (0.0625, 0.125, 0.25, 0.5, 1.0, 2.0):
        p = ADMMParams(rho=rho, adapt_rho=adapt, max_iter=500)
        t0 = time.time()
        r = solve_vbjs(f2, w2, params=p)
        hit = next((i + 1 for i, (a, b) in enumerate(
            zip(r.primal_residuals, r.dual_residuals))
            if a < 1e-4 and b < 1e-4), None)
        print(f"adapt={adapt} rho0={rho:<7} iters={r.iterations:<4} "
              f"hit={hit} final=({r.primal_residuals[-1]:.1e},"
              f"{r.dual_residuals[-1]:.1e}) rho_end={r.rhos[-1]:.3g} "
              f"{time.time()-t0:.1f}s")
