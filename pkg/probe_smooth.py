import numpy as np

from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene
from seqrecon.metrics import RegionSelector

d = np.load("/root/pkg/probe64.npz")
spec = GridSpec(64, 6)
scene = default_scene()
side = spec.side
truth = d["truth"]

smo = RegionSelector("smooth")
j = 0
t = truth[j]
occl = scene.occlusions_for(j + 1)

class T:  # RegionSelector wants .values-bearing or array; pass array
    values = t

reg = smo.select(t, spec, occl)
for m in ("l1", "vbjs", "joint"):
    err = (d[f"recon_{m}"][j] - t) ** 2
    e = err * reg
    # where are the top contributors?
    flat = np.argsort(e.ravel())[::-1][:40]
    xs, ys = np.unravel_index(flat, e.shape)
    print(f"{m}: smooth mse={e.sum()/reg.sum():.2e}")
    if m == "joint":
        for x, y, v in list(zip(xs, ys, e.ravel()[flat]))[:15]:
            print(f"   ({x/side:.2f},{y/side:.2f}) err2={v:.3f} truth={t[x,y]:.2f} "
                  f"recon={d['recon_joint'][j][x,y]:.2f} gate12={d['gate'][0][x,y]}")

# how much of joint's smooth error lies in specific zones?
ej = (d["recon_joint"][j] - t) ** 2 * reg
tot = ej.sum()
x = np.arange(side) / side
X, Y = np.meshgrid(x, x, indexing="ij")

def zone(x0, y0, x1, y1):
    return (X >= x0) & (X <= x1) & (Y >= y0) & (Y <= y1)

zones = {
    "occl2 (0.64,0.62,0.80,0.78)": zone(0.64, 0.62, 0.80, 0.78),
    "occl3 (0.38,0.22,0.50,0.34)": zone(0.38, 0.22, 0.50, 0.34),
    "mover vicinity": zone(0.16, 0.50, 0.46, 0.76),
    "rotator vicinity": zone(0.50, 0.20, 0.76, 0.48),
    "gate12==0": d["gate"][0] == 0,
}
for name, zn in zones.items():
    print(f"joint frame1 smooth err fraction in {name}: {ej[zn].sum()/tot:.2f}"
          f" (area frac {(reg & zn).sum()/reg.sum():.3f})")

# pair gate vs ground-truth change
for p in range(5):
    g = d["gate"][p] == 0
    gt = d["gt_change"][p] > 0
    inter = (g & gt).sum()
    print(f"pair {p+1}: gate-decoupled px={g.sum()} gt-changed px={gt.sum()} "
          f"overlap={inter} missed-changed={(gt & ~g).sum()}")
