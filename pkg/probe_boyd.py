import numpy as np
import math

import scipy.fft as _fft
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.tv import TVOperator
from seqrecon.solvers import _frame_fft_inputs, _soft, _norm

spec = GridSpec(64, 6)
scene = default_scene()
frames, truths = simulate_scene(spec=spec, scene=scene, snr_db=2.0, seed=0,
                                oversample=4)
tv = TVOperator("periodic")

def setup(frame):
    w = weights_for_frame(edge_map(frame))
    b_fft, avail = _frame_fft_inputs(frame)
    side = b_fft.shape[0]
    weights = np.broadcast_to(w.as_grid(side), (2, side, side))
    return b_fft, avail.astype(float), weights * (1.0 / side)

def run(frame, rho, iters, adapt=False):
    b_fft, m, thr = setup(frame)
    side = b_fft.shape[0]
    lam = tv.normal_eigs(side)
    rhs_data = _fft.ifftn(b_fft).real
    sqrt_p = math.sqrt(2.0 * side * side)
    sqrt_n = math.sqrt(float(side * side))
    s = rhs_data.copy()
    z = tv.apply(s)
    u = np.zeros_like(z)
    hit = None
    marks = {}
    for it in range(1, iters + 1):
        rhs = rhs_data + rho * tv.adjoint(z - u)
        s = _fft.ifftn(_fft.fftn(rhs) / (m + rho * lam)).real
        Ls = tv.apply(s)
        v = Ls + u
        z_prev = z
        z = _soft(v, thr / rho)
        u = v - z
        pr = _norm(Ls - z) / (sqrt_p + max(_norm(Ls), _norm(z)))
        du = _norm(rho * tv.adjoint(z - z_prev)) / (sqrt_n + rho * _norm(tv.adjoint(u)))
        if hit is None and pr < 1e-4 and du < 1e-4:
            hit = it
        if it in (100, 300, 500):
            marks[it] = (pr, du, rho * _norm(tv.adjoint(u)))
        if adapt and it <= 10:
            if pr > 10 * du:
                rho *= 2.0
                u = u / 2.0
            elif du > 10 * pr:
                rho /= 2.0
                u = u * 2.0
    return hit, marks, rho

for jf in (0, 1, 5):
    for rho in (0.25, 0.5, 1.0, 2.0):
        hit, marks, rho_end = run(frames[jf], rho, 500)
        msg = " ".join(f"@{k}=({v[0]:.0e},{v[1]:.0e},den={v[2]:.1f})"
                       for k, v in marks.items())
        print(f"frame {jf+1} rho={rho}: hit={hit} {msg}")
for jf in (0, 1, 5):
    hit, marks, rho_end = run(frames[jf], 1.0, 500, adapt=True)
    msg = " ".join(f"@{k}=({v[0]:.0e},{v[1]:.0e})" for k, v in marks.items())
    print(f"frame {jf+1} adapt rho_end={rho_end}: hit={hit} {msg}")
