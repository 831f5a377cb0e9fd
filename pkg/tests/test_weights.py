import numpy as np
import pytest

from seqrecon.edges import edge_map
from seqrecon.grid import GridSpec
from seqrecon.metrics import edge_set
from seqrecon.phantoms import default_scene, simulate_scene
from seqrecon.weights import (build_weights, normalized_indicator,
                              pointwise_variance, weights_for_frame)


def test_pointwise_variance_known_values():
    P = np.array([[0.0, 2.0], [1.0, 2.0], [1.0, 1.0]])
    # population variance per row: {0,2} -> 1, {1,2} -> 1/4, {1,1} -> 0
    np.testing.assert_allclose(pointwise_variance(P), [1.0, 0.25, 0.0])
    v3 = pointwise_variance(np.array([[1.0, 2.0, 3.0]]))
    assert v3[0] == pytest.approx(2.0 / 3.0)


def test_pointwise_variance_validation_and_clamp():
    with pytest.raises(ValueError):
        pointwise_variance(np.zeros(5))
    # cancellation can push the two-moment formula slightly negative
    big = np.full((3, 4), 1e8) + np.random.default_rng(0).normal(size=(3, 4))
    assert np.all(pointwise_variance(big) >= 0)


def test_normalized_indicator():
    gbar = np.array([1.0, 2.0, 4.0])
    v = np.array([1.0, 1.0, 1.0])
    np.testing.assert_allclose(normalized_indicator(gbar, v),
                               [0.25, 0.5, 1.0])
    with pytest.raises(ValueError):
        normalized_indicator(np.zeros(3), np.zeros(4))


def test_normalized_indicator_all_zero_warns():
    with pytest.warns(RuntimeWarning):
        r = normalized_indicator(np.zeros(4), np.zeros(4))
    np.testing.assert_array_equal(r, np.zeros(4))


def test_build_weights_known_values():
    r = np.array([0.9, 0.5, 0.0, 0.0])
    wm = build_weights(r, tau=0.25)
    # two flagged pixels share (1 - r)/c with c = 2
    np.testing.assert_allclose(wm.w, [0.05, 0.25, 1.0, 1.0])
    assert wm.edge_count == 2
    assert wm.tau == 0.25
    assert wm.as_grid(2).shape == (2, 2)


def test_build_weights_default_tau_is_one_over_side():
    r = np.zeros(9)
    r[4] = 1.0
    wm = build_weights(r)
    assert wm.tau == pytest.approx(1.0 / 3.0)
    with pytest.raises(ValueError):
        build_weights(np.zeros(10))  # not a square grid, tau unknown


def test_build_weights_validation_and_empty_warning():
    with pytest.raises(ValueError):
        build_weights(np.array([0.2, 1.3]))
    with pytest.warns(RuntimeWarning):
        wm = build_weights(np.zeros(4), tau=0.5)
    np.testing.assert_array_equal(wm.w, np.ones(4))
    assert wm.edge_count == 0


def test_weights_scale_invariance():
    # multiplying the data by a constant must not change the weights
    scene = default_scene()
    spec = GridSpec(16, scene.frames)
    frames, _ = simulate_scene(scene, spec)
    em = edge_map(frames[3])
    scaled = type(frames[3])(coeffs=10.0 * frames[3].coeffs * 0 +
                             10.0 * np.array(frames[3].coeffs),
                             available=frames[3].available)
    em10 = edge_map(scaled)
    w_a = weights_for_frame(em).w
    w_b = weights_for_frame(em10).w
    np.testing.assert_allclose(w_a, w_b, atol=1e-12)


def test_weights_small_on_edges_one_elsewhere():
    # noiseless phantom: flagged pixels hug the true boundaries and carry
    # tiny weights; everything else is exactly 1
    scene = default_scene()
    spec = GridSpec(32, scene.frames)
    frames, truths = simulate_scene(scene, spec)
    wm = weights_for_frame(edge_map(frames[3]))
    w = wm.as_grid(spec.side)
    edges = edge_set(truths[3].values)
    assert w[edges].mean() < 0.1 * w[~edges].mean()
    flagged = w < 1.0
    assert np.all(w[flagged] <= (1.0 / spec.side))
    assert np.all(w[~flagged] == 1.0)
    # every flagged pixel lies within 2 px of a true edge
    from skimage.morphology import binary_dilation, disk

    near = binary_dilation(edges, disk(2))
    assert np.all(near[flagged])
