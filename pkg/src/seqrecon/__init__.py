"""Joint recovery of image sequences from noisy, band-deficient Fourier data.

The package reconstructs a short temporal sequence of piecewise-constant
images, each observed through a partial set of noisy Fourier samples.  Edges
are estimated directly in the Fourier domain, converted into spatially
varying l1 weights, and inter-frame change masks gate an l2 coupling term so
that unchanged regions borrow strength across frames.
"""

from seqrecon.grid import (
    GridSpec,
    ImageGrid,
    FourierFrame,
    NoiseModel,
    Occlusion,
    forward,
    adjoint,
    inverse,
    band_mask,
    missing_band,
    add_noise,
    snr_db,
    sigma_for_snr,
    simulate_sequence,
)
from seqrecon.edges import (
    ConcentrationFactor,
    EdgeRegularizer,
    EdgeMap,
    concentration_sum_1d,
    edge_coefficients_2d,
    edge_map,
)
from seqrecon.weights import (
    WeightMask,
    pointwise_variance,
    normalized_indicator,
    build_weights,
    weights_for_frame,
)
from seqrecon.changemask import (
    BinaryEdgeMask,
    SingleObjectMask,
    FilledObjectMask,
    ChangeMask,
    CouplingOperator,
    binarize,
    bridge_and_cluster,
    order_edge_points,
    fill_polygon,
    diff_measure,
    change_index_sets,
    assemble_change_mask,
    change_masks_for_frames,
    build_phi,
)
from seqrecon.tv import TVOperator
from seqrecon.solvers import (
    ADMMParams,
    L1_PARAMS,
    VBJS_PARAMS,
    SolveResult,
    JointProblem,
    params_for_method,
    solve_l1,
    select_mu_and_solve,
    solve_vbjs,
    solve_joint,
    solver_health,
    xi_from_reference,
)
from seqrecon.phantoms import (
    Ellipse,
    Rectangle,
    Motion,
    SceneSpec,
    rasterize,
    render_sequence,
    ground_truth_change,
    default_scene,
    pair_scene,
    obscured_scene,
    simulate_scene,
)
from seqrecon.metrics import (
    RegionSelector,
    StudyConfig,
    mse_log,
    pointwise_log_error,
    region_smooth,
    region_occluded,
    region_point,
    run_study,
)
from seqrecon.pipeline import PipelineResult, run_pipeline
from seqrecon.config import RunConfig
from seqrecon.sqrio import read_sqr, write_sqr

__version__ = "0.1.0"

__all__ = [
    "GridSpec", "ImageGrid", "FourierFrame", "NoiseModel", "Occlusion",
    "forward", "adjoint", "inverse", "band_mask", "missing_band",
    "add_noise", "snr_db", "sigma_for_snr", "simulate_sequence",
    "ConcentrationFactor", "EdgeRegularizer", "EdgeMap",
    "concentration_sum_1d", "edge_coefficients_2d", "edge_map",
    "WeightMask", "pointwise_variance", "normalized_indicator",
    "build_weights", "weights_for_frame",
    "BinaryEdgeMask", "SingleObjectMask", "FilledObjectMask", "ChangeMask",
    "CouplingOperator", "binarize", "bridge_and_cluster", "order_edge_points",
    "fill_polygon", "diff_measure", "change_index_sets",
    "assemble_change_mask", "change_masks_for_frames", "build_phi",
    "TVOperator",
    "ADMMParams", "L1_PARAMS", "VBJS_PARAMS", "SolveResult", "JointProblem",
    "params_for_method",
    "solve_l1", "select_mu_and_solve", "solve_vbjs", "solve_joint",
    "solver_health", "xi_from_reference",
    "Ellipse", "Rectangle", "Motion", "SceneSpec", "rasterize",
    "render_sequence", "ground_truth_change", "default_scene",
    "pair_scene", "obscured_scene", "simulate_scene",
    "RegionSelector", "StudyConfig", "mse_log", "pointwise_log_error",
    "region_smooth", "region_occluded", "region_point", "run_study",
    "PipelineResult", "run_pipeline", "RunConfig",
    "read_sqr", "write_sqr",
]
