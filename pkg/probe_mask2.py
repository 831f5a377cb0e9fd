import numpy as np
from scipy.ndimage import binary_dilation, binary_erosion, label as nd_label
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, pair_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.changemask import (binarize, bridge_and_cluster, objects_for_map,
                                 change_index_sets, assemble_change_mask,
                                 diff_measure)


def boundary(mask):
    return mask & ~binary_erosion(mask)


def report(scene, snr, tag, extract=True):
    spec = GridSpec(N=64, J=scene.frames)
    side = spec.side
    frames, truths = simulate_scene(scene, spec, snr_db=snr, seed=0,
                                    oversample=4)
    tv = [t.values for t in truths]
    gbars = [edge_map(fr, rotations=10).averaged for fr in frames]
    print(f"== {tag} snr={snr} extract={extract}")
    objs = []
    for j, g in enumerate(gbars):
        U = binarize(g)
        clusters = bridge_and_cluster(U)
        o = objects_for_map(g, extract_enclosing=extract)
        objs.append(o)
        if j < scene.frames - 1:
            moved = np.abs(tv[j] - tv[j + 1]) > 1e-9
            sup = moved & (np.abs(tv[j]) > 1e-9)
            bnd = boundary(binary_dilation(sup))
            hit = (U.mask & binary_dilation(bnd)).sum()
            print(f" f{j+1}: tau={U.tau:.3f} |U|={U.mask.sum()} "
                  f"clusters={[c.points.shape[0] for c in clusters]} "
                  f"areas={[x.area for x in o]} mover-bnd {hit}/{bnd.sum()}")
        else:
            print(f" f{j+1}: tau={U.tau:.3f} |U|={U.mask.sum()} "
                  f"clusters={[c.points.shape[0] for c in clusters]} "
                  f"areas={[x.area for x in o]}")
    for j in range(scene.frames - 1):
        i1, i2 = change_index_sets(objs[j], objs[j + 1])
        cm = assemble_change_mask(objs[j], i1, objs[j + 1], i2, side)
        dec = ~cm.unchanged
        gt = np.abs(tv[j] - tv[j + 1]) > 1e-9
        cov = (dec & gt).sum()
        print(f" pair {j+1}: unmatched {i1}/{i2} decoupled={dec.sum()} "
              f"gt={gt.sum()} covered={cov} miss={(gt & ~dec).sum()}")


report(default_scene(), 2.0, "default")
report(pair_scene(), 20.0, "pair")
