import math
import numpy as np
import scipy.fft as _fft
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.tv import TVOperator
from seqrecon.solvers import _frame_fft_inputs, _fid_and_l1, _norm, _soft

tv = TVOperator("periodic")


def admm_theta(b_fft, avail, w_stack, side, rho=0.0625, theta=1.618,
               max_iter=800, label=""):
    n_total = b_fft.size
    m = avail.astype(float)
    lam = tv.normal_eigs(side)
    rhs_data = _fft.ifftn(b_fft).real
    thr = np.asarray(w_stack) * (1.0 / side)

    s = rhs_data.copy()
    z = tv.apply(s)
    u = np.zeros_like(z)
    sqrt_p = math.sqrt(float(z.size))
    sqrt_n = math.sqrt(float(s.size))
    objs = []
    conv = False
    for it in range(1, max_iter + 1):
        rhs = rhs_data + rho * tv.adjoint(z - u)
        s = _fft.ifftn(_fft.fftn(rhs) / (m + rho * lam)).real
        Ls = tv.apply(s)
        z_prev = z
        z = _soft(Ls + u, thr / rho)
        u = u + theta * (Ls - z)
        pr = _norm(Ls - z) / (sqrt_p + max(_norm(Ls), _norm(z)))
        du = _norm(rho * tv.adjoint(z - z_prev)) / (
            sqrt_n + rho * _norm(tv.adjoint(u)))
        objs.append(_fid_and_l1(_fft.fftn(s), b_fft, avail, n_total, thr, Ls))
        if pr < 1e-4 and du < 1e-4:
            conv = True
            break
    objs = np.asarray(objs)
    rise = float(np.max(objs[11:] - objs[10:-1], initial=0.0)) if objs.size > 11 else 0.0
    print(f"{label}: it={it} conv={conv} pr={pr:.2e} du={du:.2e} "
          f"rise={rise:.2e} obj={objs[-1]:.8e}")
    return it, conv, rise


scene = default_scene()
spec = GridSpec(N=32, J=scene.frames)
frames, _ = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
side = spec.side
b_fft, avail = _frame_fft_inputs(frames[0])
em = edge_map(frames[0], rotations=10)
wm = weights_for_frame(em)
wst = np.broadcast_to(wm.as_grid(side), (2, side, side)).copy()

for rho in (0.0625, 0.08, 0.1, 0.125):
    for theta in (1.0, 1.3, 1.5, 1.618):
        admm_theta(b_fft, avail, wst, side, rho=rho, theta=theta,
                   label=f"rho={rho} theta={theta}")
