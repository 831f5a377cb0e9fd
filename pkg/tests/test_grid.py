import math

import numpy as np
import pytest

from seqrecon.grid import (FourierFrame, GridSpec, ImageGrid, NoiseModel,
                           Occlusion, add_noise, adjoint, band_mask, forward,
                           inverse, missing_band, sigma_for_snr,
                           simulate_sequence, snr_db)


def test_gridspec_basics():
    spec = GridSpec(N=16)
    assert spec.side == 33
    assert spec.dx == 1.0 / 32
    assert spec.coords[0] == 0.0
    assert spec.coords[1] == pytest.approx(1.0 / 33)
    np.testing.assert_array_equal(spec.freqs, np.arange(-16, 17))


def test_gridspec_rejects_bad_sizes():
    with pytest.raises(ValueError):
        GridSpec(N=0)
    with pytest.raises(ValueError):
        GridSpec(N=4, J=0)


def test_imagegrid_shape_check():
    spec = GridSpec(N=2)
    with pytest.raises(ValueError):
        ImageGrid(np.zeros((4, 4)), spec)
    img = ImageGrid(np.zeros((5, 5)), spec)
    assert not img.values.flags.writeable


def test_frame_requires_symmetric_mask():
    coeffs = np.zeros((5, 5), dtype=complex)
    mask = np.ones((5, 5), dtype=bool)
    mask[0, 1] = False  # breaks (k, l) -> (-k, -l) symmetry
    with pytest.raises(ValueError, match="symmetric"):
        FourierFrame(coeffs, mask)


def test_frame_zeroes_unavailable():
    coeffs = np.full((5, 5), 1.0 + 0j)
    mask = np.ones((5, 5), dtype=bool)
    mask[0, :] = mask[-1, :] = False
    f = FourierFrame(coeffs, mask)
    assert np.all(f.coeffs[~mask] == 0)
    assert np.all(f.coeffs[mask] == 1.0)


def test_missing_band_slides_with_frame():
    assert missing_band(1, 6) == ((10, 35), (-35, -10))
    assert missing_band(3, 6) == ((22, 47), (-47, -22))
    assert missing_band(2, 2) == ((12, 37), (-37, -12))
    with pytest.raises(ValueError):
        missing_band(0, 6)
    with pytest.raises(ValueError):
        missing_band(7, 6)


def test_band_mask_cross_vs_annulus():
    spec = GridSpec(N=40, J=1)
    cross = band_mask(spec, 1, rule="cross")
    ann = band_mask(spec, 1, rule="annulus")
    k = np.abs(spec.freqs)
    in_band = (k >= 10) & (k <= 35)
    np.testing.assert_array_equal(
        ~cross, in_band[:, None] | in_band[None, :])
    maxkl = np.maximum(k[:, None], k[None, :])
    np.testing.assert_array_equal(~ann, (maxkl >= 10) & (maxkl <= 35))
    # cross removes at least everything the annulus removes
    assert np.all(~ann | cross | ~cross)
    assert (~cross).sum() > (~ann).sum()
    with pytest.raises(ValueError):
        band_mask(spec, 1, rule="ring")


def test_band_mask_symmetric():
    spec = GridSpec(N=20, J=3)
    for j in (1, 2, 3):
        m = band_mask(spec, j)
        np.testing.assert_array_equal(m, m[::-1, ::-1])


def test_forward_dc_and_parseval():
    spec = GridSpec(N=8)
    rng = np.random.default_rng(0)
    x = rng.normal(size=(spec.side, spec.side))
    f = forward(ImageGrid(x, spec))
    assert f.coeffs[spec.N, spec.N] == pytest.approx(x.sum())
    assert np.sum(np.abs(f.coeffs) ** 2) == pytest.approx(
        spec.side ** 2 * np.sum(x ** 2))


def test_forward_constant_image():
    spec = GridSpec(N=4)
    f = forward(ImageGrid(np.full((9, 9), 0.7), spec))
    assert f.coeffs[4, 4] == pytest.approx(0.7 * 81)
    off = np.abs(f.coeffs).copy()
    off[4, 4] = 0
    assert off.max() < 1e-9


def test_adjoint_identity():
    spec = GridSpec(N=6)
    rng = np.random.default_rng(1)
    x = rng.normal(size=(spec.side, spec.side))
    mask = band_mask(spec, 1, J=1)
    y = (rng.normal(size=mask.shape) + 1j * rng.normal(size=mask.shape))
    y = (y + np.conj(y[::-1, ::-1])) / 2  # keep the adjoint image real
    y[~mask] = 0
    fx = forward(ImageGrid(x, spec), available=mask)
    lhs = np.vdot(y, fx.coeffs).real
    frame_y = FourierFrame(y, mask)
    rhs = np.vdot(adjoint(frame_y), x).real
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_inverse_roundtrip_full_mask():
    spec = GridSpec(N=5)
    rng = np.random.default_rng(2)
    x = rng.normal(size=(spec.side, spec.side))
    np.testing.assert_allclose(inverse(forward(ImageGrid(x, spec))), x,
                               atol=1e-12)


def test_noise_deterministic_and_masked():
    coeffs = np.ones((9, 9), dtype=complex)
    mask = band_mask(GridSpec(N=4, J=1), 1)
    base = FourierFrame(coeffs, mask, frame_index=3)
    n1 = add_noise(base, NoiseModel(sigma=0.5, seed=11))
    n2 = add_noise(base, NoiseModel(sigma=0.5, seed=11))
    np.testing.assert_array_equal(n1.coeffs, n2.coeffs)
    assert np.all(n1.coeffs[~mask] == 0)
    other = add_noise(FourierFrame(coeffs, mask, frame_index=4),
                      NoiseModel(sigma=0.5, seed=11))
    assert not np.array_equal(n1.coeffs, other.coeffs)


def test_noise_variance_matches_sigma():
    side = 101
    mask = np.ones((side, side), dtype=bool)
    base = FourierFrame(np.zeros((side, side), dtype=complex), mask)
    sigma = 2.5
    noisy = add_noise(base, NoiseModel(sigma=sigma, seed=5))
    emp = np.mean(np.abs(noisy.coeffs) ** 2)
    assert emp == pytest.approx(sigma ** 2, rel=0.05)


def test_noise_per_frame_sigma_sequence():
    coeffs = np.ones((5, 5), dtype=complex)
    mask = np.ones((5, 5), dtype=bool)
    nm = NoiseModel(sigma=(0.0, 1.0), seed=0)
    f1 = add_noise(FourierFrame(coeffs, mask, frame_index=1), nm)
    assert f1.noise_sigma == 0.0
    np.testing.assert_array_equal(f1.coeffs, coeffs)
    f2 = add_noise(FourierFrame(coeffs, mask, frame_index=2), nm)
    assert f2.noise_sigma == 1.0


def test_snr_roundtrip():
    rng = np.random.default_rng(7)
    side = 33
    coeffs = rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side))
    coeffs = coeffs + np.conj(coeffs[::-1, ::-1])
    frame = FourierFrame(coeffs, np.ones((side, side), dtype=bool))
    sigma = sigma_for_snr(frame, 6.0)
    assert snr_db(frame, sigma=sigma) == pytest.approx(6.0, abs=1e-12)
    mean_abs = float(np.mean(np.abs(frame.coeffs)))
    assert sigma == pytest.approx(mean_abs * 10 ** (-6.0 / 20.0))


def test_snr_zero_sigma_warns():
    frame = FourierFrame(np.ones((3, 3), dtype=complex),
                         np.ones((3, 3), dtype=bool))
    with pytest.warns(RuntimeWarning):
        assert snr_db(frame, sigma=0.0) == math.inf


def test_occlusion_constant_and_gaussian():
    spec = GridSpec(N=8)
    occ = Occlusion(region=(0.2, 0.2, 0.5, 0.5), fill="constant", value=9.0)
    vals = np.zeros((spec.side, spec.side))
    out = occ.apply(vals, spec)
    sup = occ.support(spec)
    assert np.all(out[sup] == 9.0)
    assert np.all(out[~sup] == 0.0)
    g = Occlusion(region=(0.2, 0.2, 0.5, 0.5), fill="gaussian", std=1.0,
                  seed=3)
    o1 = g.apply(vals, spec)
    o2 = g.apply(vals, spec)
    np.testing.assert_array_equal(o1, o2)
    assert o1[sup].std() > 0


def test_occlusion_validation():
    with pytest.raises(ValueError):
        Occlusion(region=(0.5, 0.2, 0.4, 0.6))
    with pytest.raises(ValueError):
        Occlusion(region=(0.1, 0.1, 0.2, 0.2), fill="stripes")


def test_truncation_emulates_continuous_coefficients():
    # a pure cosine rasterized finely has known continuous coefficients
    spec = GridSpec(N=6)
    P = spec.side * 8
    x = np.arange(P) / P
    fine = np.cos(2 * np.pi * 3 * x)[:, None] * np.ones((1, P))
    frames = simulate_sequence([fine], spec=GridSpec(N=6, J=1))
    c = frames[0].coeffs
    expect = np.zeros_like(c)
    expect[spec.N + 3, spec.N] = spec.side ** 2 / 2
    expect[spec.N - 3, spec.N] = spec.side ** 2 / 2
    masked = expect * frames[0].available
    np.testing.assert_allclose(c, masked, atol=1e-9 * spec.side ** 2)


def test_simulate_sequence_oversample_one_matches_forward():
    spec = GridSpec(N=5, J=2)
    rng = np.random.default_rng(9)
    imgs = [rng.normal(size=(spec.side, spec.side)) for _ in range(2)]
    frames = simulate_sequence(imgs, spec=spec)
    for j, (img, fr) in enumerate(zip(imgs, frames), start=1):
        direct = forward(ImageGrid(img, GridSpec(N=5)),
                         available=band_mask(spec, j), frame_index=j)
        np.testing.assert_allclose(fr.coeffs, direct.coeffs, atol=1e-9)


def test_simulate_sequence_applies_occlusion_before_transform():
    spec = GridSpec(N=5, J=1)
    img = np.ones((spec.side, spec.side))
    occ = Occlusion(region=(0.0, 0.0, 0.3, 0.3), value=0.0)
    plain = simulate_sequence([img], spec=spec)[0]
    occluded = simulate_sequence([img], occlusions={1: [occ]}, spec=spec)[0]
    manual = occ.apply(img, spec)
    direct = forward(ImageGrid(manual, GridSpec(N=5)),
                     available=plain.available)
    np.testing.assert_allclose(occluded.coeffs, direct.coeffs, atol=1e-9)


def test_simulate_sequence_rejects_bad_fine_grid():
    spec = GridSpec(N=5, J=1)
    with pytest.raises(ValueError, match="multiple"):
        simulate_sequence([np.zeros((12, 12))], spec=spec)
