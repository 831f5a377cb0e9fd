import warnings
import math
import numpy as np
import scipy.fft as _fft
from seqrecon.grid import GridSpec
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.edges import edge_map
from seqrecon.weights import weights_for_frame
from seqrecon.tv import TVOperator
from seqrecon.solvers import _frame_fft_inputs, _fid_and_l1, _norm, _soft

scene = default_scene()
spec = GridSpec(N=32, J=scene.frames)
frames, truths = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
em = edge_map(frames[0], rotations=10)
wm = weights_for_frame(em)
side = spec.side
tv = TVOperator("periodic")
b_fft, avail = _frame_fft_inputs(frames[0])
w_stack = np.broadcast_to(wm.as_grid(side), (2, side, side))


def run(rho, eta=0.999, max_iter=500, accel=True):
    n_total = b_fft.size
    m = avail.astype(float)
    lam = tv.normal_eigs(side)
    rhs_data = _fft.ifftn(b_fft).real
    thr = np.asarray(w_stack) * (1.0 / side)

    s = rhs_data.copy()
    z = tv.apply(s)
    u = np.zeros_like(z)
    zh, uh = z.copy(), u.copy()
    alpha = 1.0
    c_prev = np.inf
    sqrt_p = math.sqrt(float(z.size))
    sqrt_n = math.sqrt(float(s.size))
    objs, prs, dus = [], [], []
    conv = False
    restarts = 0
    for it in range(1, max_iter + 1):
        rhs = rhs_data + rho * tv.adjoint(zh - uh)
        s = _fft.ifftn(_fft.fftn(rhs) / (m + rho * lam)).real
        Ls = tv.apply(s)
        v = Ls + uh
        z_prev, u_prev = z, u
        z = _soft(v, thr / rho)
        u = v - z

        r = Ls - z
        pr = _norm(r) / (sqrt_p + max(_norm(Ls), _norm(z)))
        du_vec = rho * tv.adjoint(z - z_prev)
        du = _norm(du_vec) / (sqrt_n + rho * _norm(tv.adjoint(u)))
        obj = _fid_and_l1(_fft.fftn(s), b_fft, avail, n_total, thr, Ls)
        objs.append(obj)
        prs.append(pr)
        dus.append(du)
        if pr < 1e-4 and du < 1e-4:
            conv = True
            break
        if not accel:
            zh, uh = z, u
            continue
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
            zh, uh = z_prev.copy(), u_prev.copy()
            c_prev = c_prev / eta
            restarts += 1
    objs = np.asarray(objs)
    rise = float(np.max(objs[11:] - objs[10:-1], initial=0.0)) if objs.size > 11 else 0.0
    print(f"rho={rho} accel={accel} eta={eta}: iters={it} conv={conv} "
          f"pr={prs[-1]:.2e} du={dus[-1]:.2e} restarts={restarts} "
          f"rise_after10={rise:.2e}")
    return it, conv


for rho in (0.125, 0.25, 0.5):
    run(rho, accel=True)
run(0.125, accel=False)
run(0.125, eta=0.995)
run(0.25, eta=0.995)
