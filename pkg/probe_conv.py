import sys
import numpy as np
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.pipeline import run_pipeline
from seqrecon.solvers import xi_from_reference

N = int(sys.argv[1]) if len(sys.argv) > 1 else 32
scene = default_scene()
spec = GridSpec(N=N, J=scene.frames)
frames, truths = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
xi = [xi_from_reference(t) for t in truths]
res = run_pipeline(frames, methods=("l1", "vbjs", "joint"), beta=0.5, seed=0,
                   xi=xi)


def audit(tag, sr):
    obj = np.asarray(sr.objectives)
    pr = np.asarray(sr.primal_residuals)
    du = np.asarray(sr.dual_residuals)
    it = sr.iterations
    rise = 0.0
    if obj.size > 10:
        tail = obj[10:]
        rise = float(np.max(tail[1:] - tail[:-1], initial=0.0))
    print(f"{tag}: iters={it} conv={sr.converged} pr={pr[-1]:.2e} "
          f"du={du[-1]:.2e} max_rise_after10={rise:.3e}")


for m in ("l1", "vbjs"):
    for j, sr in enumerate(res.solves[m]):
        audit(f"{m} f{j+1}", sr)
audit("joint", res.solves["joint"])
for j in range(spec.J):
    tru = truths[j].values
    for m in ("l1", "vbjs", "joint"):
        err = res.images[m][j].values - tru
        pass
print("done")
