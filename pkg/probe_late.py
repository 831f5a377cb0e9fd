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


def admm_late(b_fft, avail, w_stack, side, rho=0.0625, eta=0.999,
              act_thresh=1e-8, act_window=5, max_iter=800, label=""):
    n_total = b_fft.size
    m = avail.astype(float)
    lam = tv.normal_eigs(side)
    rhs_data = _fft.ifftn(b_fft).real
    thr = np.asarray(w_stack) * (1.0 / side)

    def step(zh, uh):
        rhs = rhs_data + rho * tv.adjoint(zh - uh)
        s = _fft.ifftn(_fft.fftn(rhs) / (m + rho * lam)).real
        Ls = tv.apply(s)
        v = Ls + uh
        z = _soft(v, thr / rho)
        u = v - z
        obj = _fid_and_l1(_fft.fftn(s), b_fft, avail, n_total, thr, Ls)
        return s, Ls, z, u, obj

    z = tv.apply(rhs_data)
    u = np.zeros_like(z)
    zh, uh = z.copy(), u.copy()
    alpha = 1.0
    c_prev = np.inf
    sqrt_p = math.sqrt(float(z.size))
    sqrt_n = math.sqrt(float(rhs_data.size))
    objs = []
    active = False
    act_iter = None
    conv = False
    for it in range(1, max_iter + 1):
        z_prev, u_prev = z, u
        s, Ls, z, u, obj = step(zh, uh)
        objs.append(obj)
        if not active and it > act_window:
            recent = np.abs(np.diff(objs[-(act_window + 1):]))
            if recent.max() < act_thresh:
                active = True
                act_iter = it
        if active:
            ck = (1.0 / rho) * _norm(u - uh) ** 2 + rho * _norm(z - zh) ** 2
            if ck < eta * c_prev:
                a_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * alpha * alpha))
                gain = (alpha - 1.0) / a_next
                zh = z + gain * (z - z_prev)
                uh = u + gain * (u - u_prev)
                alpha = a_next
                c_prev = ck
            else:
                alpha = 1.0
                zh, uh = z_prev, u_prev
                c_prev = c_prev / eta if np.isfinite(c_prev) else np.inf
        else:
            zh, uh = z, u
        pr = _norm(Ls - z) / (sqrt_p + max(_norm(Ls), _norm(z)))
        du = _norm(rho * tv.adjoint(z - z_prev)) / (
            sqrt_n + rho * _norm(tv.adjoint(u)))
        if pr < 1e-4 and du < 1e-4:
            conv = True
            break
    objs = np.asarray(objs)
    rise = float(np.max(objs[11:] - objs[10:-1], initial=0.0)) if objs.size > 11 else 0.0
    print(f"{label}: it={it} conv={conv} act_at={act_iter} pr={pr:.2e} "
          f"du={du:.2e} rise_after10={rise:.2e}")
    return it, conv, rise


scene = default_scene()
spec = GridSpec(N=32, J=scene.frames)
frames, _ = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
side = spec.side
b_fft, avail = _frame_fft_inputs(frames[0])
em = edge_map(frames[0], rotations=10)
wm = weights_for_frame(em)
wst = np.broadcast_to(wm.as_grid(side), (2, side, side)).copy()

for rho in (0.0625, 0.125, 0.25):
    for th in (1e-8, 5e-9, 1e-9):
        admm_late(b_fft, avail, wst, side, rho=rho, act_thresh=th,
                  label=f"rho={rho} act={th}")
