import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from seqrecon.edges import (SI_PI, ConcentrationFactor, EdgeMap,
                            EdgeRegularizer, concentration_sum_1d,
                            default_regularizer, edge_coefficients_2d,
                            edge_map, rotation_angles)
from seqrecon.grid import GridSpec
from seqrecon.metrics import edge_set
from seqrecon.phantoms import default_scene, simulate_scene


def step_fhat(N):
    """Analytic Fourier coefficients of the indicator of [1/4, 3/4)."""
    ks = np.arange(-N, N + 1)
    out = np.zeros(2 * N + 1, dtype=complex)
    nz = ks != 0
    k = ks[nz]
    out[nz] = (np.exp(-1j * np.pi * k / 2)
               - np.exp(-3j * np.pi * k / 2)) / (2j * np.pi * k)
    out[N] = 0.5
    return out


def direct_sum(fhat, factor, x):
    """Independent oracle: plain loop over modes, no shared code."""
    N = fhat.size // 2
    total = 0.0
    for idx, k in enumerate(range(-N, N + 1)):
        if k == 0:
            continue
        sigma = factor(abs(k) / N)
        term = 1j * math.copysign(1.0, k) * sigma * fhat[idx] \
            * np.exp(2j * np.pi * k * x)
        total += term.real
    return total


def test_si_pi_matches_quadrature():
    val, _ = quad(lambda t: math.sin(t) / t, 0.0, math.pi)
    assert SI_PI == pytest.approx(val, abs=1e-12)
    assert SI_PI == pytest.approx(1.8519370519824658, abs=1e-15)


def test_regularizer_transform_matches_quadrature():
    reg = EdgeRegularizer(epsilon=0.05)
    for w in (0.0, 0.7, 2.3, -1.6):
        re, _ = quad(lambda t, w=w: reg.h(t) * math.cos(2 * np.pi * w * t),
                     -10.0, 10.0)
        assert reg.hhat(w) == pytest.approx(re, abs=1e-8)


def test_regularizer_validation():
    with pytest.raises(ValueError):
        EdgeRegularizer(epsilon=0.0)
    assert default_regularizer(32).epsilon == pytest.approx(3.0 / 64.0)


@pytest.mark.parametrize("factor,target", [
    (ConcentrationFactor("trigonometric"), math.pi),
    (ConcentrationFactor("polynomial", order=1), 1.0),
    (ConcentrationFactor("polynomial", order=3), 1.0),
    (ConcentrationFactor("exponential"), 1.0),
])
def test_admissibility_integral(factor, target):
    # the normalization that sets what the sums concentrate to: the trig
    # factor integrates sigma/eta to pi (jump limit 1), the others to 1
    # (jump limit 1/pi)
    val, _ = quad(lambda t: float(factor(t)) / t, 0.0, 1.0, limit=200)
    assert val == pytest.approx(target, rel=1e-6)


def test_factor_validation():
    with pytest.raises(ValueError):
        ConcentrationFactor("boxcar")
    with pytest.raises(ValueError):
        ConcentrationFactor("polynomial", order=0)
    exp = ConcentrationFactor("exponential")
    assert exp(np.array([0.0, 1.0])) == pytest.approx([0.0, 0.0])
    assert exp(np.array([0.5]))[0] > 0.0


def test_concentration_sum_input_validation():
    trig = ConcentrationFactor()
    with pytest.raises(ValueError):
        concentration_sum_1d(np.zeros(6), trig, 0.5)
    with pytest.raises(ValueError):
        concentration_sum_1d(np.zeros((3, 3)), trig, 0.5)


def test_step_jump_convergence_trig():
    # acceptance-criterion core, frozen against the direct-summation
    # oracle: the trig sums approach the unit jump monotonically in N
    start = time.perf_counter()
    trig = ConcentrationFactor("trigonometric")
    xs = np.linspace(0.0, 1.0, 2001)[:-1]

    def circ(a, b):
        d = np.abs(a - b) % 1.0
        return np.minimum(d, 1.0 - d)

    smooth = (circ(xs, 0.25) > 0.1) & (circ(xs, 0.75) > 0.1)
    jump_errors = []
    smooth_maxes = []
    for N in (16, 32, 64):
        fh = step_fhat(N)
        s_jump = concentration_sum_1d(fh, trig, np.array([0.25]))[0]
        assert s_jump == pytest.approx(direct_sum(fh, trig, 0.25), abs=1e-12)
        jump_errors.append(abs(s_jump - 1.0))
        smooth_maxes.append(np.abs(concentration_sum_1d(
            fh, trig, xs[smooth])).max())
    assert jump_errors[0] > jump_errors[1] > jump_errors[2]
    assert jump_errors[2] < 0.05
    assert smooth_maxes[2] < 0.05
    np.testing.assert_allclose(jump_errors, [0.001106, 0.000276, 0.000069],
                               atol=5e-6)
    np.testing.assert_allclose(smooth_maxes, [0.015246, 0.003209, 0.000939],
                               atol=5e-6)
    # downward jump of size -1 at x = 3/4
    fh = step_fhat(64)
    s_down = concentration_sum_1d(fh, trig, np.array([0.75]))[0]
    assert s_down == pytest.approx(-1.0, abs=1e-3)
    assert time.perf_counter() - start < 1.0


def test_poly_and_exp_concentrate_to_jump_over_pi():
    xs = np.array([0.25])
    for factor in (ConcentrationFactor("polynomial", order=2),
                   ConcentrationFactor("exponential")):
        vals = [concentration_sum_1d(step_fhat(N), factor, xs)[0]
                for N in (32, 64, 128)]
        errs = [abs(v - 1.0 / math.pi) for v in vals]
        assert errs[-1] < 0.02
        assert errs[0] > errs[-1]


def test_rotation_angles_even_fan():
    angles = rotation_angles(10)
    assert angles.size == 10
    assert angles[0] == 0.0
    assert angles[-1] == pytest.approx(np.pi)
    # direction cosines cancel exactly over the fan, which is why the
    # averaged map uses magnitudes
    assert np.cos(angles).sum() == pytest.approx(0.0, abs=1e-13)
    with pytest.raises(ValueError):
        rotation_angles(1)


def test_edge_map_shapes_and_magnitude_average():
    rng = np.random.default_rng(0)
    maps = rng.normal(size=(4, 9, 9))
    em = EdgeMap(per_rotation=maps, angles=rotation_angles(4))
    assert em.rotations == 4
    np.testing.assert_allclose(em.averaged, np.abs(maps).mean(axis=0))
    assert np.all(em.averaged >= 0)
    with pytest.raises(ValueError):
        EdgeMap(per_rotation=maps, angles=rotation_angles(5))


@pytest.fixture(scope="module")
def noiseless_frame():
    scene = default_scene()
    spec = GridSpec(32, scene.frames)
    frames, truths = simulate_scene(scene, spec)
    return frames[0], truths[0], spec


def far_from_edges(truth_values):
    from skimage.morphology import binary_dilation, disk

    return ~binary_dilation(edge_set(truth_values), disk(3))


def test_edge_map_localizes_boundaries(noiseless_frame):
    # frame 1 carries the leanest band (ringing floor), frame 4 is nearly
    # fully sampled; localization should be clear in both regimes
    scene = default_scene()
    spec = GridSpec(32, scene.frames)
    frames, truths = simulate_scene(scene, spec)
    for j, floor in ((0, 5.0), (3, 50.0)):
        em = edge_map(frames[j])
        assert em.per_rotation.shape == (10, spec.side, spec.side)
        edges = edge_set(truths[j].values)
        on = em.averaged[edges].mean()
        off = em.averaged[far_from_edges(truths[j].values)].mean()
        assert on > floor * off


def test_edge_map_small_on_smooth_image():
    # a jump-free image draws a small response that shrinks with N (the
    # regularizer width, hence the mollified-derivative floor, is ~1/N)
    from seqrecon.grid import FourierFrame

    maxima = []
    for N in (32, 64):
        side = 2 * N + 1
        x = np.arange(side) / side
        img = 0.5 + 0.25 * np.outer(np.sin(2 * np.pi * x),
                                    np.sin(2 * np.pi * x))
        coeffs = np.fft.fftshift(np.fft.fft2(img))
        frame = FourierFrame(coeffs=coeffs,
                             available=np.ones((side, side), bool))
        maxima.append(edge_map(frame).averaged.max())
    assert maxima[0] < 0.05
    assert maxima[1] < 0.6 * maxima[0]


def test_factor_profile_matches_1d_convention(noiseless_frame):
    frame, _, spec = noiseless_frame
    trig = ConcentrationFactor("trigonometric")
    tilde = edge_coefficients_2d(frame, theta=0.0, factor=trig)
    N = frame.N
    ks = np.arange(-N, N + 1)
    profile = (1j * np.sign(ks) * trig(np.abs(ks) / N))[:, None]
    expected = profile * frame.coeffs / float(frame.side) ** 2
    np.testing.assert_allclose(tilde, expected, atol=1e-12)


def test_factor_path_also_localizes(noiseless_frame):
    frame, truth, _ = noiseless_frame
    em = edge_map(frame, factor=ConcentrationFactor("trigonometric"))
    edges = edge_set(truth.values)
    on = em.averaged[edges].mean()
    off = em.averaged[far_from_edges(truth.values)].mean()
    assert on > 5 * off
