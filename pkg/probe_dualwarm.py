import math
import warnings
import numpy as np
import scipy.fft as _fft
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.tv import TVOperator
from seqrecon.solvers import _frame_fft_inputs, _fid_and_l1, _norm, _soft

tv = TVOperator("periodic")


def admm(b_fft, avail, w_stack, side, rho, max_iter=800, s0=None, u0=None,
         label=""):
    n_total = b_fft.size
    m = avail.astype(float)
    lam = tv.normal_eigs(side)
    rhs_data = _fft.ifftn(b_fft).real
    thr = np.asarray(w_stack) * (1.0 / side)

    s = rhs_data.copy() if s0 is None else np.array(s0, dtype=float)
    z = tv.apply(s)
    u = np.zeros_like(z) if u0 is None else np.array(u0, dtype=float)
    sqrt_p = math.sqrt(float(z.size))
    sqrt_n = math.sqrt(float(s.size))
    objs = []
    conv = False
    flagged = thr < (1.0 / side) * 0.999  # weight<1 coords
    for it in range(1, max_iter + 1):
        rhs = rhs_data + rho * tv.adjoint(z - u)
        s = _fft.ifftn(_fft.fftn(rhs) / (m + rho * lam)).real
        Ls = tv.apply(s)
        v = Ls + u
        z_prev = z
        z = _soft(v, thr / rho)
        u = v - z
        pr = _norm(Ls - z) / (sqrt_p + max(_norm(Ls), _norm(z)))
        dz = z - z_prev
        du = _norm(rho * tv.adjoint(dz)) / (sqrt_n + rho * _norm(tv.adjoint(u)))
        objs.append(_fid_and_l1(_fft.fftn(s), b_fft, avail, n_total, thr, Ls))
        if it in (100, 300, 500) and label:
            dz_f = np.where(flagged, dz, 0.0)
            dz_s = np.where(~flagged, dz, 0.0)
            nf = _norm(rho * tv.adjoint(dz_f))
            ns = _norm(rho * tv.adjoint(dz_s))
            print(f"  [{label}] it={it}: pr={pr:.2e} du={du:.2e} "
                  f"du_from_flagged={nf:.2e} du_from_smooth={ns:.2e}")
        if pr < 1e-4 and du < 1e-4:
            conv = True
            break
    objs = np.asarray(objs)
    rise = float(np.max(objs[11:] - objs[10:-1], initial=0.0)) if objs.size > 11 else 0.0
    print(f"{label}: it={it} conv={conv} pr={pr:.1e} du={du:.1e} rise={rise:.2e}")
    return s, u, z


scene = default_scene()
spec = GridSpec(N=32, J=scene.frames)
frames, _ = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
side = spec.side
b_fft, avail = _frame_fft_inputs(frames[0])
em = edge_map(frames[0], rotations=10)
wm = weights_for_frame(em)
wst = np.broadcast_to(wm.as_grid(side), (2, side, side)).copy()
ones = np.ones((2, side, side))

rho = 0.0625
s_l1, u_l1, z_l1 = admm(b_fft, avail, ones, side, rho, label="l1-ref")
thr_w = wst * (1.0 / side)
u0 = np.clip(u_l1, -thr_w / rho, thr_w / rho)
admm(b_fft, avail, wst, side, rho, label="vbjs-cold")
admm(b_fft, avail, wst, side, rho, s0=s_l1, u0=u0, label="vbjs-dualwarm")
admm(b_fft, avail, wst, side, rho, s0=s_l1, u0=None, label="vbjs-primalwarm")
