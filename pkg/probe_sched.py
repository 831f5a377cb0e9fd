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


def admm_sched(b_fft, avail, w_stack, side, rho0=0.25, floor=0.0625,
               switch=300, gamma=0.97, max_iter=800, label=""):
    n_total = b_fft.size
    m = avail.astype(float)
    lam = tv.normal_eigs(side)
    rhs_data = _fft.ifftn(b_fft).real
    thr = np.asarray(w_stack) * (1.0 / side)

    rho = rho0
    s = rhs_data.copy()
    z = tv.apply(s)
    u = np.zeros_like(z)
    sqrt_p = math.sqrt(float(z.size))
    sqrt_n = math.sqrt(float(s.size))
    objs = []
    conv = False
    for it in range(1, max_iter + 1):
        if it > switch and rho > floor:
            rho_new = max(floor, rho * gamma)
            u = u * (rho / rho_new)
            rho = rho_new
        rhs = rhs_data + rho * tv.adjoint(z - u)
        s = _fft.ifftn(_fft.fftn(rhs) / (m + rho * lam)).real
        Ls = tv.apply(s)
        v = Ls + u
        z_prev = z
        z = _soft(v, thr / rho)
        u = v - z
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
          f"rise={rise:.2e} obj_end={objs[-1]:.10e}")
    return objs[-1]


scene = default_scene()
spec = GridSpec(N=32, J=scene.frames)
frames, _ = simulate_scene(scene, spec, snr_db=2.0, seed=0, oversample=4)
side = spec.side
b_fft, avail = _frame_fft_inputs(frames[0])
em = edge_map(frames[0], rotations=10)
wm = weights_for_frame(em)
wst = np.broadcast_to(wm.as_grid(side), (2, side, side)).copy()

ref = admm_sched(b_fft, avail, wst, side, rho0=0.0625, floor=0.0625,
                 switch=10**9, label="fixed 0.0625 (ref)")
for switch in (250, 300, 350):
    for gamma in (0.98, 0.95):
        for floor in (0.0625, 0.04):
            obj = admm_sched(b_fft, avail, wst, side, switch=switch,
                             gamma=gamma, floor=floor,
                             label=f"sched sw={switch} g={gamma} fl={floor}")
            print(f"   delta_obj_vs_ref={obj - ref:+.3e}")
