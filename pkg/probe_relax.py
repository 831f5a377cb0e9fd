import numpy as np
import warnings

import scipy.fft as _fft
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.tv import TVOperator
from seqrecon.solvers import _frame_fft_inputs, _soft, _norm

spec = GridSpec(64, 6)
scene = default_scene()
frames, truths = simulate_scene(spec=spec, scene=scene, snr_db=2.0, seed=0, oversample=4)
f2 = frames[1]
w2 = weights_for_frame(edge_map(f2))
tv = TVOperator("periodic")

b_fft, avail = _frame_fft_inputs(f2)
side = b_fft.shape[0]
weights = np.broadcast_to(w2.as_grid(side), (2, side, side))
thr = weights * (1.0 / side)
m = avail.astype(float)
lam = tv.normal_eigs(side)
rhs_data = _fft.ifftn(b_fft).real

def run(rho, alpha, iters):
    s = rhs_data.copy()
    z = tv.apply(s)
    u = np.zeros_like(z)
    traj = []
    for it in range(1, iters + 1):
        rhs = rhs_data + rho * tv.adjoint(z - u)
        s = _fft.ifftn(_fft.fftn(rhs) / (m + rho * lam)).real
        Ls = tv.apply(s)
        Lr = alpha * Ls + (1 - alpha) * z
        v = Lr + u
        z_prev = z
        z = _soft(v, thr / rho)
        u = v - z
        pr = _norm(Ls - z) / max(_norm(Ls), _norm(z), 1e-12)
        du = _norm(rho * tv.adjoint(z - z_prev)) / max(rho * _norm(tv.adjoint(u)), 1e-12)
        traj.append((pr, du))
        if pr < 1e-4 and du < 1e-4:
            return it, traj
    return None, traj

for rho in (0.25, 1.0):
    for alpha in (1.0, 1.5, 1.8):
        hit, traj = run(rho, alpha, 1500)
        marks = {k: traj[k - 1] for k in (100, 300, 500, 1000, 1500) if k <= len(traj)}
        msg = " ".join(f"@{k}=({v[0]:.0e},{v[1]:.0e})" for k, v in marks.items())
        print(f"rho={rho} alpha={alpha}: hit={hit}  {msg}")
