"""Command-line front end.

Stages communicate only through files in the artifact directory, so each
one can be run, inspected, and re-run on its own; ``pipeline`` chains
them all.  Array artifacts use the .sqr container (see seqrecon.sqrio),
reports are JSON/CSV, and a manifest.json records the configuration and
its hash for provenance.  Re-running a stage with identical inputs and
configuration writes byte-identical .sqr files.
"""

import argparse
import dataclasses
import json
import logging
import os
import sys

import numpy as np

from seqrecon.changemask import build_phi, change_masks_for_frames
from seqrecon.changemask import ChangeMask
from seqrecon.config import NAMED_SCENES, RunConfig, scene_from_dict
from seqrecon.edges import EdgeMap, edge_map, rotation_angles
from seqrecon.grid import FourierFrame, GridSpec
from seqrecon.metrics import (StudyConfig, evaluate_images,
                              pointwise_log_error, run_study,
                              write_report_csv)
from seqrecon.phantoms import simulate_scene
from seqrecon.solvers import (JointProblem, params_for_method,
                              select_mu_and_solve, solve_joint, solve_l1,
                              solve_vbjs, xi_from_reference)
from seqrecon.sqrio import read_sqr, write_sqr
from seqrecon.util import THREADS_ENV
from seqrecon.weights import WeightMask, weights_for_frame

log = logging.getLogger("seqrecon")

_EPILOG = (f"The environment variable {THREADS_ENV} caps the worker pool "
           "used for per-frame stages.")


class StageError(Exception):
    """Stage failure with a message already suitable for the user."""


class MissingInput(StageError):
    """Required input file or directory is absent."""


# ---------------------------------------------------------------- artifacts

def _frame_path(d, j, kind):
    names = {"coeffs": f"frame_f{j:02d}_coeffs.sqr",
             "avail": f"frame_f{j:02d}_avail.sqr",
             "truth": f"truth_f{j:02d}.sqr",
             "edge": f"edge_f{j:02d}.sqr",
             "edge_rot": f"edge_f{j:02d}_rotations.sqr",
             "weights": f"weights_f{j:02d}.sqr"}
    return os.path.join(d, names[kind])


def _mask_path(d, p):
    return os.path.join(d, f"mask_p{p:02d}.sqr")


def _recon_path(d, method, j):
    return os.path.join(d, f"recon_{method}_f{j:02d}.sqr")


def _require(path, what):
    if not os.path.exists(path):
        raise MissingInput(f"{what} not found: {path}")
    return path


def _read_manifest(d) -> dict:
    path = _require(os.path.join(d, "manifest.json"), "manifest")
    with open(path) as fh:
        return json.load(fh)


def _update_manifest(d, **entries) -> None:
    path = os.path.join(d, "manifest.json")
    data = {}
    if os.path.exists(path):
        with open(path) as fh:
            data = json.load(fh)
    data.update(entries)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_json(path, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _frame_count(d) -> int:
    j = 0
    while os.path.exists(_frame_path(d, j + 1, "coeffs")):
        j += 1
    if j == 0:
        raise MissingInput(f"no frame data (frame_f01_coeffs.sqr) in {d}")
    return j


def _read_frames(d) -> list:
    manifest = _read_manifest(d)
    sigmas = manifest.get("sigma_per_frame")
    frames = []
    for j in range(1, _frame_count(d) + 1):
        coeffs = read_sqr(_require(_frame_path(d, j, "coeffs"),
                                   f"frame {j} coefficients"))
        avail = read_sqr(_require(_frame_path(d, j, "avail"),
                                  f"frame {j} availability"))
        sigma = float(sigmas[j - 1]) if sigmas else 0.0
        frames.append(FourierFrame(coeffs=coeffs,
                                   available=avail.astype(bool),
                                   frame_index=j, noise_sigma=sigma))
    return frames


def _read_truths(d, count):
    if not os.path.exists(_frame_path(d, 1, "truth")):
        return None
    out = []
    for j in range(1, count + 1):
        arr = read_sqr(_require(_frame_path(d, j, "truth"), f"truth {j}"))
        out.append(arr)
    return out


def _read_edge_maps(d, count) -> list:
    manifest = _read_manifest(d)
    rotations = manifest.get("rotations")
    if rotations is None:
        raise MissingInput(f"edge stage has not run in {d}")
    maps = []
    for j in range(1, count + 1):
        stack = read_sqr(_require(_frame_path(d, j, "edge_rot"),
                                  f"frame {j} edge rotations"))
        side = stack.shape[1]
        per_rot = stack.reshape(rotations, side, side)
        maps.append(EdgeMap(per_rotation=per_rot,
                            angles=rotation_angles(rotations)))
    return maps


def _read_weights(d, count) -> list:
    report_path = _require(os.path.join(d, "weights_report.json"),
                           "weights report")
    with open(report_path) as fh:
        report = json.load(fh)
    out = []
    for j in range(1, count + 1):
        grid = read_sqr(_require(_frame_path(d, j, "weights"),
                                 f"frame {j} weights"))
        entry = report["frames"][j - 1]
        out.append(WeightMask(w=grid.ravel(), tau=entry["tau"],
                              edge_count=entry["edge_count"]))
    return out


def _read_masks(d, count) -> list:
    out = []
    for p in range(1, count):
        arr = read_sqr(_require(_mask_path(d, p), f"change mask {p}"))
        out.append(ChangeMask(unchanged=arr.astype(bool), pair_index=p))
    return out


# ------------------------------------------------------------------ stages

def stage_simulate(cfg: RunConfig, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    frames, truths = simulate_scene(
        cfg.scene, cfg.grid, snr_db=cfg.snr_db, sigma=cfg.sigma,
        seed=cfg.seed, oversample=cfg.oversample, band_rule=cfg.band_rule,
        stat=cfg.stat)
    for j, (frame, truth) in enumerate(zip(frames, truths), start=1):
        write_sqr(_frame_path(out_dir, j, "coeffs"), frame.coeffs)
        write_sqr(_frame_path(out_dir, j, "avail"),
                  frame.available.astype(np.uint8))
        write_sqr(_frame_path(out_dir, j, "truth"), truth.values)
    _update_manifest(out_dir, config=cfg.to_dict(),
                     config_hash=cfg.config_hash(),
                     frames=len(frames), side=cfg.grid.side,
                     sigma_per_frame=[f.noise_sigma for f in frames])
    log.info("simulate: %d frames at side %d -> %s",
             len(frames), cfg.grid.side, out_dir)


def stage_edges(in_dir, out_dir, rotations: int) -> None:
    frames = _read_frames(in_dir)
    os.makedirs(out_dir, exist_ok=True)
    for j, frame in enumerate(frames, start=1):
        em = edge_map(frame, rotations=rotations)
        write_sqr(_frame_path(out_dir, j, "edge"), em.averaged)
        side = frame.side
        write_sqr(_frame_path(out_dir, j, "edge_rot"),
                  em.per_rotation.reshape(rotations * side, side))
    _update_manifest(out_dir, rotations=rotations)
    log.info("edges: %d frames, %d rotations", len(frames), rotations)


def stage_weights(in_dir, out_dir, tau: float | None) -> None:
    count = _frame_count(in_dir)
    emaps = _read_edge_maps(in_dir, count)
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for j, em in enumerate(emaps, start=1):
        wm = weights_for_frame(em, tau=tau)
        side = em.per_rotation.shape[1]
        write_sqr(_frame_path(out_dir, j, "weights"), wm.as_grid(side))
        entries.append({"frame": j, "tau": wm.tau,
                        "edge_count": wm.edge_count})
    _write_json(os.path.join(out_dir, "weights_report.json"),
                {"frames": entries})
    log.info("weights: %d frames", count)


def stage_changemask(in_dir, out_dir, closing_radius: int, tau_diff: float,
                     extract_enclosing: bool) -> None:
    count = _frame_count(in_dir)
    if count < 2:
        raise StageError("change masks need at least two frames")
    gbars = []
    for j in range(1, count + 1):
        gbars.append(read_sqr(_require(_frame_path(in_dir, j, "edge"),
                                       f"frame {j} edge map")))
    masks = change_masks_for_frames(gbars, d=closing_radius,
                                    tau_diff=tau_diff,
                                    extract_enclosing=extract_enclosing)
    os.makedirs(out_dir, exist_ok=True)
    report = []
    for mask in masks:
        write_sqr(_mask_path(out_dir, mask.pair_index),
                  mask.unchanged.astype(np.uint8))
        changed = int((~mask.unchanged).sum())
        report.append({"pair": mask.pair_index,
                       "changed_pixels": changed,
                       "unchanged_fraction":
                           float(mask.unchanged.mean())})
    _write_json(os.path.join(out_dir, "changemask_report.json"),
                {"closing_radius": closing_radius, "tau_diff": tau_diff,
                 "pairs": report})
    log.info("changemask: %d pairs", len(masks))


def _resolve_xi(xi, in_dir, frames):
    if xi is not None:
        return xi
    truths = _read_truths(in_dir, len(frames))
    if truths is None:
        raise StageError("xi is required for the l1 solver when no ground "
                         "truth is present (pass --xi or --mu)")
    return [xi_from_reference(t) for t in truths]


def stage_solve(in_dir, out_dir, method: str, solver_overrides: dict,
                beta: float, mu, xi, k_max: int, seed: int) -> None:
    frames = _read_frames(in_dir)
    J = len(frames)
    params = params_for_method(method, solver_overrides)
    os.makedirs(out_dir, exist_ok=True)
    info = {"method": method, "beta": beta if method == "joint" else None}
    if method == "l1":
        results = []
        if mu is None:
            xi = _resolve_xi(xi, in_dir, frames)
        for j, frame in enumerate(frames, start=1):
            if mu is not None:
                res = solve_l1(frame, mu, params=params)
            else:
                xi_j = xi if np.isscalar(xi) else xi[j - 1]
                res = select_mu_and_solve(frame, xi_j, k_max=k_max,
                                          seed=[seed, j - 1], params=params)
            results.append(res)
        info["mu_per_frame"] = [r.mu for r in results]
    elif method == "vbjs":
        weights = _read_weights(in_dir, J)
        results = [solve_vbjs(frame, w, params=params)
                   for frame, w in zip(frames, weights)]
    elif method == "joint":
        weights = _read_weights(in_dir, J)
        phi = build_phi(_read_masks(in_dir, J)) if beta > 0 and J > 1 \
            else None
        problem = JointProblem(frames=frames, weights=weights, phi=phi,
                               beta=beta if J > 1 else 0.0)
        results = [solve_joint(problem, params=params)]
    else:
        raise StageError(f"unknown method {method!r}")

    if method == "joint":
        res = results[0]
        for j, img in enumerate(res.images, start=1):
            write_sqr(_recon_path(out_dir, method, j), img.values)
        res.write_history_csv(os.path.join(out_dir,
                                           f"residuals_{method}.csv"))
        info.update(converged=res.converged, iterations=res.iterations,
                    restarts=res.restarts)
    else:
        info["converged"] = []
        info["iterations"] = []
        for j, res in enumerate(results, start=1):
            write_sqr(_recon_path(out_dir, method, j), res.image.values)
            res.write_history_csv(
                os.path.join(out_dir, f"residuals_{method}_f{j:02d}.csv"))
            info["converged"].append(res.converged)
            info["iterations"].append(res.iterations)
    _write_json(os.path.join(out_dir, f"solve_{method}.json"), info)
    log.info("solve %s: %d frames", method, J)


def _heatmap_png(path, values, title) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    im = ax.imshow(values.T, origin="lower", cmap="viridis")
    fig.colorbar(im, ax=ax)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def stage_evaluate(in_dir, out_dir, report_path, write_maps: bool) -> None:
    manifest = _read_manifest(in_dir)
    if "config" not in manifest:
        raise MissingInput(f"manifest in {in_dir} has no config")
    cfg = RunConfig.from_dict(manifest["config"])
    count = _frame_count(in_dir)
    truths = _read_truths(in_dir, count)
    if truths is None:
        raise MissingInput(f"no ground truth images in {in_dir}")
    spec = cfg.grid
    snr_db = cfg.snr_db if cfg.snr_db is not None else float("nan")
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    found = []
    for method in ("l1", "vbjs", "joint"):
        if not os.path.exists(_recon_path(in_dir, method, 1)):
            continue
        found.append(method)
        images = [read_sqr(_recon_path(in_dir, method, j))
                  for j in range(1, count + 1)]
        rows.extend(evaluate_images(method, images, truths, cfg.scene,
                                    spec, snr_db=snr_db,
                                    include_points=True))
        if write_maps:
            for j, (img, truth) in enumerate(zip(images, truths), start=1):
                emap = pointwise_log_error(truth, img)
                base = os.path.join(out_dir, f"elog_{method}_f{j:02d}")
                write_sqr(base + ".sqr", emap)
                _heatmap_png(base + ".png", emap,
                             f"{method} frame {j} log10 error")
    if not found:
        raise MissingInput(f"no reconstructions (recon_*_f01.sqr) in {in_dir}")
    write_report_csv(report_path, rows)
    log.info("evaluate: methods %s -> %s", ",".join(found), report_path)


def run_full_pipeline(cfg: RunConfig, out_dir) -> None:
    stages = cfg.stages
    if "simulate" in stages:
        stage_simulate(cfg, out_dir)
    if "edges" in stages:
        stage_edges(out_dir, out_dir, cfg.rotations)
    if "weights" in stages:
        stage_weights(out_dir, out_dir, None)
    if "changemask" in stages and cfg.scene.frames > 1:
        stage_changemask(out_dir, out_dir, cfg.closing_radius, cfg.tau_diff,
                         cfg.extract_enclosing)
    if "solve" in stages:
        for method in cfg.methods:
            stage_solve(out_dir, out_dir, method, cfg.solver, cfg.beta,
                        cfg.mu, cfg.xi, cfg.k_max, cfg.seed)
    if "evaluate" in stages:
        stage_evaluate(out_dir, out_dir,
                       os.path.join(out_dir, "metrics.csv"), False)


# ------------------------------------------------------------------- flags

def _config_from_args(args) -> RunConfig:
    if getattr(args, "config", None):
        cfg = RunConfig.from_file(_require(args.config, "config file"))
    else:
        cfg = RunConfig()
    overrides = {}
    if getattr(args, "scene", None):
        overrides["scene"] = NAMED_SCENES[args.scene]()
    if getattr(args, "n_modes", None):
        scene = overrides.get("scene", cfg.scene)
        overrides["grid"] = GridSpec(N=args.n_modes, J=scene.frames)
    if getattr(args, "snr_db", None) is not None:
        overrides["snr_db"] = args.snr_db
        overrides["sigma"] = None
    if getattr(args, "sigma", None) is not None:
        overrides["sigma"] = args.sigma
        overrides["snr_db"] = None
    for name in ("seed", "band_rule", "oversample", "beta", "mu", "xi",
                 "k_max"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "methods", None):
        overrides["methods"] = tuple(args.methods.split(","))
    if getattr(args, "max_iter", None):
        overrides["solver"] = {**cfg.solver, "max_iter": args.max_iter}
    return dataclasses.replace(cfg, **overrides)


def _solver_overrides(args) -> dict:
    fields = {}
    for name in ("rho", "max_iter", "tol_primal", "tol_dual", "cg_tol",
                 "cg_max_iter", "relax", "theta"):
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value
    return fields


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqrecon",
        description="Joint recovery of image sequences from band-deficient "
                    "Fourier data.",
        epilog=_EPILOG)
    parser.add_argument("--verbose", "-v", action="store_true",
                        help="debug-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p, default=None):
        p.add_argument("--out", default=default,
                       help="artifact directory"
                            + ("" if default is None
                               else f" (default: {default})"))

    def add_in(p):
        p.add_argument("--in", dest="in_dir", required=True,
                       help="input artifact directory")

    p = sub.add_parser("simulate", help="render a scene and sample its "
                                        "band-deficient noisy Fourier data")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--scene", choices=sorted(NAMED_SCENES),
                   help="named scene (overrides config)")
    p.add_argument("--n-modes", "-N", type=int, help="freq. cutoff N")
    p.add_argument("--snr-db", type=float, help="per-frame target SNR")
    p.add_argument("--sigma", type=float, help="fixed noise level")
    p.add_argument("--seed", type=int, help="noise seed")
    p.add_argument("--band-rule", choices=("cross", "annulus"))
    p.add_argument("--oversample", type=int)
    add_out(p, "seqrecon-out")

    p = sub.add_parser("edges", help="concentration-factor edge maps")
    add_in(p)
    p.add_argument("--rotations", type=int, default=10)
    add_out(p)

    p = sub.add_parser("weights", help="variance-based weight masks")
    add_in(p)
    p.add_argument("--tau", type=float, help="edge threshold override")
    add_out(p)

    p = sub.add_parser("changemask", help="inter-frame change masks")
    add_in(p)
    p.add_argument("--closing-radius", type=int, default=3)
    p.add_argument("--tau-diff", type=float, default=1e-3)
    p.add_argument("--extract-enclosing", action="store_true",
                   help="drop the enclosing structure before tracking")
    add_out(p)

    p = sub.add_parser("solve", help="reconstruct the sequence")
    add_in(p)
    p.add_argument("--method", required=True,
                   choices=("l1", "vbjs", "joint"))
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--mu", type=float, help="fixed l1 parameter")
    p.add_argument("--xi", type=float,
                   help="reference spread for mu sampling")
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float,
                   help="override the method profile's penalty parameter")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--tol-primal", type=float)
    p.add_argument("--tol-dual", type=float)
    p.add_argument("--cg-tol", type=float)
    p.add_argument("--cg-max-iter", type=int)
    p.add_argument("--relax", type=float,
                   help="over/under-relaxation in (0, 2)")
    p.add_argument("--theta", type=float,
                   help="dual step size in (0, (1+sqrt(5))/2)")
    add_out(p)

    p = sub.add_parser("evaluate", help="score reconstructions against "
                                        "the ground truth")
    add_in(p)
    p.add_argument("--report", help="metrics CSV path "
                                    "(default: <in>/metrics.csv)")
    p.add_argument("--maps", action="store_true",
                   help="also write pointwise log-error maps")
    add_out(p)

    p = sub.add_parser("study", help="resolution or SNR sweep")
    p.add_argument("--kind", required=True, choices=("resolution", "snr"))
    p.add_argument("--methods", help="comma-separated subset of l1,vbjs,joint")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=0.5)
    add_out(p, "seqrecon-out")

    p = sub.add_parser("pipeline", help="run every stage end to end")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--scene", choices=sorted(NAMED_SCENES))
    p.add_argument("--n-modes", "-N", type=int)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--methods", help="comma-separated subset of l1,vbjs,joint")
    p.add_argument("--beta", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--xi", type=float)
    add_out(p, "seqrecon-out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "simulate":
            stage_simulate(_config_from_args(args), args.out)
        elif args.command == "edges":
            stage_edges(args.in_dir, args.out or args.in_dir,
                        args.rotations)
        elif args.command == "weights":
            stage_weights(args.in_dir, args.out or args.in_dir, args.tau)
        elif args.command == "changemask":
            stage_changemask(args.in_dir, args.out or args.in_dir,
                             args.closing_radius, args.tau_diff,
                             args.extract_enclosing)
        elif args.command == "solve":
            stage_solve(args.in_dir, args.out or args.in_dir, args.method,
                        _solver_overrides(args), args.beta, args.mu, args.xi,
                        args.k_max, args.seed)
        elif args.command == "evaluate":
            out = args.out or args.in_dir
            report = args.report or os.path.join(out, "metrics.csv")
            stage_evaluate(args.in_dir, out, report, args.maps)
        elif args.command == "study":
            config = StudyConfig(seed=args.seed, beta=args.beta)
            if args.methods:
                config.methods = tuple(args.methods.split(","))
            report = run_study(args.kind, config, out_dir=args.out)
            log.info("study: %d rows -> %s", len(report.rows),
                     report.csv_path)
        elif args.command == "pipeline":
            run_full_pipeline(_config_from_args(args), args.out)
    except MissingInput as exc:
        log.error("%s", exc)
        return 2
    except (StageError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
