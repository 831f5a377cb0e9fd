import numpy as np
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.solvers import (ADMMParams, solve_l1, solve_vbjs,
                              xi_from_reference, select_mu_and_solve)

scene = default_scene()
spec = GridSpec(N=32, J=scene.frames)
frames, truths = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
xi = [xi_from_reference(t) for t in truths]

# mu values match the pipeline's selection for l1
mus = [2.53, 1.17, 0.82, 0.66, 0.52, 0.43]


def audit(tag, sr):
    obj = np.asarray(sr.objectives)
    rise, where = 0.0, -1
    if obj.size > 10:
        tail = obj[10:]
        d = tail[1:] - tail[:-1]
        if d.size:
            rise = float(d.max())
            where = int(d.argmax()) + 11
    print(f"  {tag}: iters={sr.iterations} conv={sr.converged} "
          f"pr={sr.primal_residuals[-1]:.2e} du={sr.dual_residuals[-1]:.2e} "
          f"rise={rise:.2e}@{where} rho_final={sr.rhos[-1]}")


for rho in ():
    for adapt in (True, False):
        print(f"rho={rho} adapt={adapt}")
        p = ADMMParams(rho=rho, adapt_rho=adapt)
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sr = solve_l1(frames[0], mu=mus[0], params=p)
            audit("l1 f1", sr)
            for j in (0, 1):
                em = edge_map(frames[j], rotations=10)
                wm = weights_for_frame(em)
                sr = solve_vbjs(frames[j], wm, params=p)
                audit(f"vbjs f{j+1}", sr)

print("=== relaxation sweep on stragglers")
import warnings
for relax in (0.6, 0.7, 0.8, 1.0):
    for rho in (0.125, 0.25):
        p = ADMMParams(rho=rho, relax=relax)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sr = solve_l1(frames[0], mu=mus[0], params=p)
            audit(f"relax={relax} rho={rho} l1 f1", sr)
            for j in (0, 1):
                em = edge_map(frames[j], rotations=10)
                wm = weights_for_frame(em)
                sr = solve_vbjs(frames[j], wm, params=p)
                audit(f"relax={relax} rho={rho} vbjs f{j+1}", sr)
