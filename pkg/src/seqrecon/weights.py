"""Spatially varying l1 weights from the spread of directional edge maps.

Across the fan of directions, pixels on a true edge respond consistently
while noise and ringing fluctuate.  The entrywise variance of the
directional responses, multiplied by the averaged map and normalized,
scores each pixel; high scores get small weights (edges are cheap to keep)
and everything else is weighted 1.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from seqrecon.edges import EdgeMap


@dataclass
class WeightMask:
    """Weights in [0, 1], flat over the pixel grid, with the threshold and
    the count of down-weighted pixels used to build them."""

    w: np.ndarray
    tau: float
    edge_count: int

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)

    def as_grid(self, side: int) -> np.ndarray:
        return self.w.reshape(side, side)


def pointwise_variance(P: np.ndarray) -> np.ndarray:
    """Population variance across the columns of an (n, M) sample matrix."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2:
        raise ValueError("expected an (n_pixels, n_rotations) matrix")
    v = np.mean(P * P, axis=1) - np.mean(P, axis=1) ** 2
    return np.maximum(v, 0.0)


def normalized_indicator(gbar: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Edge score r = |gbar * v| / max |gbar * v|, in [0, 1]."""
    gbar = np.asarray(gbar, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if gbar.shape != v.shape:
        raise ValueError("averaged map and variance must match in size")
    prod = np.abs(gbar * v)
    top = prod.max() if prod.size else 0.0
    if top == 0.0:
        warnings.warn("no edges detected: all edge/variance products vanish",
                      RuntimeWarning)
        return np.zeros_like(prod)
    return prod / top


def build_weights(r: np.ndarray, tau: float | None = None) -> WeightMask:
    """Weights from the edge score: pixels with r > tau share mass (1-r)/c,
    where c counts them; all others get weight 1.

    ``tau`` defaults to 1/side for a flattened side x side score vector.
    """
    r = np.asarray(r, dtype=float).ravel()
    if np.any((r < 0) | (r > 1)):
        raise ValueError("edge scores must lie in [0, 1]")
    if tau is None:
        side = math.isqrt(r.size)
        if side * side != r.size:
            raise ValueError("cannot infer tau: score vector is not square")
        tau = 1.0 / side
    above = r > tau
    c = int(np.count_nonzero(above))
    if c == 0:
        warnings.warn("no pixels above the weight threshold: weights are "
                      "uniformly 1", RuntimeWarning)
        return WeightMask(w=np.ones_like(r), tau=tau, edge_count=0)
    w = np.where(above, (1.0 - r) / c, 1.0)
    return WeightMask(w=w, tau=tau, edge_count=c)


def weights_for_frame(emap: EdgeMap, tau: float | None = None) -> WeightMask:
    """Weights straight from an edge map.

    The sample matrix stacks the directional response magnitudes, one
    column per rotation; the score multiplies their variance with the
    averaged map.
    """
    M = emap.rotations
    P = np.abs(emap.per_rotation).reshape(M, -1).T
    v = pointwise_variance(P)
    r = normalized_indicator(emap.averaged.ravel(), v)
    return build_weights(r, tau=tau)
