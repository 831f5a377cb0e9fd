import numpy as np

from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene, ground_truth_change
from seqrecon.pipeline import run_pipeline
from seqrecon.solvers import xi_from_reference

spec = GridSpec(64, 6)
scene = default_scene()
frames, truths = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
xi = [xi_from_reference(t) for t in truths]
res = run_pipeline(frames, methods=("l1", "vbjs", "joint"), beta=0.5, seed=0, xi=xi)

save = {
    "truth": np.stack([t.values for t in truths]),
    "gate": np.stack([m.unchanged for m in res.masks]),
    "gt_change": np.stack([ground_truth_change(scene, t, spec)
                           for t in range(1, spec.J)]),
    "weights": np.stack([w.as_grid(spec.side) for w in res.weights]),
    "avail": np.stack([f.available for f in frames]),
    "sigma": np.array([f.noise_sigma for f in frames]),
    "mus": np.array(res.mus),
}
for m in ("l1", "vbjs", "joint"):
    save[f"recon_{m}"] = np.stack([im.values for im in res.images[m]])
for m in ("l1", "vbjs", "joint"):
    sv = res.solves[m]
    if isinstance(sv, list):
        save[f"pr_{m}"] = np.array([s.primal_residuals[-1] for s in sv])
        save[f"du_{m}"] = np.array([s.dual_residuals[-1] for s in sv])
        save[f"iters_{m}"] = np.array([s.iterations for s in sv])
    else:
        save[f"pr_{m}"] = np.array([sv.primal_residuals[-1]])
        save[f"du_{m}"] = np.array([sv.dual_residuals[-1]])
        save[f"iters_{m}"] = np.array([sv.iterations])
np.savez_compressed("/root/pkg/probe64.npz", **save)
print("saved")
