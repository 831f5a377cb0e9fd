import numpy as np
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene, rasterize
from seqrecon.edges import edge_map
from seqrecon.changemask import (binarize, bridge_and_cluster, objects_for_map,
                                 change_index_sets, assemble_change_mask,
                                 change_masks_for_frames, diff_measure)

N = 64
scene = default_scene()
spec = GridSpec(N=N, J=scene.frames)
side = spec.side
frames, truths = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)

# true boundary pixels of the moving objects per frame (mover idx? identify by
# comparing adjacent truths)
tv = [t.values for t in truths]

gbars = []
for j, fr in enumerate(frames):
    em = edge_map(fr, rotations=10)
    gbars.append(em.averaged)

# mover/rotator boundary pixels: pixels where truth_j differs from a 1-px
# erosion/dilation of itself AND the pixel participates in change j vs j+1
from scipy.ndimage import binary_dilation, binary_erosion


def boundary(mask):
    return mask & ~binary_erosion(mask)

for j in (0, 1, 2):
    g = np.abs(gbars[j])
    tau = 0.5 * g.max()
    U = g > tau
    # moving-object supports: pixels whose truth differs between j and j+1
    diff = np.abs(tv[j] - tv[j + 1]) > 1e-9
    # boundary pixels of the changed supports in frame j's truth
    changed_in_j = diff & (np.abs(tv[j]) > 1e-9)
    bnd = boundary(binary_dilation(changed_in_j))
    cov = (U & binary_dilation(bnd, iterations=1)).sum()
    print(f"frame {j+1}: tau={tau:.3f} |U|={U.sum()} "
          f"changed-support bnd px={bnd.sum()} U-hits near bnd={cov} ")

    clusters = bridge_and_cluster(binarize(gbars[j]))
    sizes = sorted((c.points.shape[0] for c in clusters), reverse=True)
    print(f"  clusters: {len(clusters)} sizes {sizes[:8]}")
    objs = objects_for_map(gbars[j])
    print(f"  filled areas: {sorted((o.area for o in objs), reverse=True)[:8]}")

# full pair (1,2) analysis
objs1 = objects_for_map(gbars[0])
objs2 = objects_for_map(gbars[1])
i1, i2 = change_index_sets(objs1, objs2)
print("pair(1,2) unmatched:", i1, i2, "of", len(objs1), len(objs2))
D = np.array([[diff_measure(a, b) for b in objs2] for a in objs1])
print("diff matrix:\n", np.array2string(D, precision=3, suppress_small=True))
cm = assemble_change_mask(objs1, i1, objs2, i2, side)
decoupled = ~cm.unchanged
gt_changed = np.abs(tv[0] - tv[1]) > 1e-9
inter = (decoupled & gt_changed).sum()
print(f"decoupled={decoupled.sum()} gt_changed={gt_changed.sum()} overlap={inter}")
# where are the misses?
miss = gt_changed & ~decoupled
ys, xs = np.nonzero(miss)
print("miss bbox rows", ys.min(), ys.max(), "cols", xs.min(), xs.max(),
      "count", miss.sum())
# component supports
mov_old = (np.abs(tv[0] - tv[1]) > 1e-9)
print("per-changed-object coverage:")
from scipy.ndimage import label as nd_label
lab, nlab = nd_label(gt_changed)
for i in range(1, nlab + 1):
    m = lab == i
    ys, xs = np.nonzero(m)
    print(f"  region {i}: px={m.sum()} rows {ys.min()}-{ys.max()} cols "
          f"{xs.min()}-{xs.max()} covered={(m & decoupled).sum()}")
