"""Sampling grid, Fourier observation model, and sequence simulation.

Images live on a uniform grid over [0, 1]^2 with ``side = 2N + 1`` points per
axis.  The forward model maps an image to its centered 2D DFT (unnormalized
sum convention, so a constant image c has DC coefficient c * side**2 and
``||coeffs||^2 == side**2 * ||image||^2``), zeroes the coefficients on a
frame-dependent missing band, and adds iid complex Gaussian noise on the
entries that remain.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

BAND_LOW = 10
BAND_HIGH = 35


@dataclass(frozen=True)
class GridSpec:
    """Square grid with ``2N + 1`` samples per axis on [0, 1]^2.

    N is the Fourier half-bandwidth: integer modes k, l run over [-N, N].
    J is the number of frames in the sequence the grid belongs to.
    """

    N: int
    J: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be positive, got {self.N}")
        if self.J < 1:
            raise ValueError(f"J must be positive, got {self.J}")

    @property
    def side(self) -> int:
        return 2 * self.N + 1

    @property
    def dx(self) -> float:
        return 1.0 / (2 * self.N)

    @property
    def coords(self) -> np.ndarray:
        """Sample positions along one axis (periodic convention)."""
        return np.arange(self.side) / self.side

    @property
    def freqs(self) -> np.ndarray:
        """Centered integer mode numbers -N..N."""
        return np.arange(-self.N, self.N + 1)


@dataclass
class ImageGrid:
    """Real image samples bound to a grid."""

    values: np.ndarray
    spec: GridSpec

    def __post_init__(self):
        self.values = np.array(self.values, dtype=float)
        if self.values.shape != (self.spec.side, self.spec.side):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"side {self.spec.side}"
            )
        self.values.setflags(write=False)


@dataclass
class FourierFrame:
    """Observed Fourier data for one frame.

    ``coeffs`` is indexed centered: entry [k + N, l + N] holds mode (k, l).
    Coefficients on unavailable modes are identically zero.  ``available``
    must be symmetric under (k, l) -> (-k, -l).
    """

    coeffs: np.ndarray
    available: np.ndarray
    frame_index: int = 1
    noise_sigma: float = 0.0

    def __post_init__(self):
        self.coeffs = np.array(self.coeffs, dtype=complex)
        self.available = np.array(self.available, dtype=bool)
        if self.coeffs.shape != self.available.shape:
            raise ValueError("coeffs and available must have the same shape")
        side = self.coeffs.shape[0]
        if self.coeffs.shape != (side, side) or side % 2 == 0:
            raise ValueError(f"expected an odd square array, got {self.coeffs.shape}")
        if not np.array_equal(self.available, self.available[::-1, ::-1]):
            raise ValueError("availability mask must be symmetric under negation")
        self.coeffs[~self.available] = 0.0
        self.coeffs.setflags(write=False)
        self.available.setflags(write=False)

    @property
    def side(self) -> int:
        return self.coeffs.shape[0]

    @property
    def N(self) -> int:
        return (self.side - 1) // 2


def missing_band(j: int, J: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Missing |mode| interval for frame ``j`` (1-based) out of ``J``.

    Frame j loses modes whose |k| or |l| falls in
    [10 + J*(j-1), 35 + J*(j-1)]; the interval is returned for both signs.
    """
    if not 1 <= j <= J:
        raise ValueError(f"frame index {j} outside 1..{J}")
    lo = BAND_LOW + J * (j - 1)
    hi = BAND_HIGH + J * (j - 1)
    return ((lo, hi), (-hi, -lo))


def band_mask(spec: GridSpec, j: int, J: int | None = None,
              rule: str = "cross") -> np.ndarray:
    """Availability mask for frame ``j``: True where data is observed.

    ``rule="cross"`` removes whole rows and columns: a mode (k, l) is
    dropped when |k| or |l| lies in the missing interval.  ``rule="annulus"``
    drops only the square ring max(|k|, |l|) in the interval.
    """
    J = spec.J if J is None else J
    (lo, hi), _ = missing_band(j, J)
    absk = np.abs(spec.freqs)
    in_band = (absk >= lo) & (absk <= hi)
    if rule == "cross":
        dropped = in_band[:, None] | in_band[None, :]
    elif rule == "annulus":
        maxkl = np.maximum(absk[:, None], absk[None, :])
        dropped = (maxkl >= lo) & (maxkl <= hi)
    else:
        raise ValueError(f"unknown band rule {rule!r}")
    return ~dropped


def forward(image: ImageGrid, available: np.ndarray | None = None,
            frame_index: int = 1) -> FourierFrame:
    """Centered unnormalized 2D DFT of an image, zeroed off the mask."""
    coeffs = _fft.fftshift(_fft.fft2(image.values))
    if available is None:
        available = np.ones_like(coeffs, dtype=bool)
    return FourierFrame(coeffs=coeffs, available=available,
                        frame_index=frame_index)


def adjoint(frame: FourierFrame) -> np.ndarray:
    """Adjoint of :func:`forward`: the unnormalized inverse sum.

    Satisfies <forward(x).coeffs, y> == <x, adjoint(y)> exactly for any
    coefficient array y supported on the availability mask.
    """
    side = frame.side
    return side * side * _fft.ifft2(_fft.ifftshift(frame.coeffs))


def inverse(frame: FourierFrame) -> np.ndarray:
    """Zero-filled inverse transform, returned as a real image."""
    return _fft.ifft2(_fft.ifftshift(frame.coeffs)).real


@dataclass(frozen=True)
class NoiseModel:
    """Per-frame complex Gaussian noise: real and imaginary parts each have
    variance sigma**2 / 2, so E|eta|^2 == sigma**2.

    ``sigma`` is a scalar applied to all frames or a sequence with one value
    per frame.  Draws are deterministic given (seed, frame index).
    """

    sigma: float | tuple = 0.0
    seed: int = 0

    def sigma_for(self, j: int) -> float:
        if np.isscalar(self.sigma):
            return float(self.sigma)
        return float(self.sigma[j - 1])


def add_noise(frame: FourierFrame, noise: NoiseModel) -> FourierFrame:
    """Add iid complex Gaussian noise on the available modes only."""
    sigma = noise.sigma_for(frame.frame_index)
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0.0:
        return FourierFrame(frame.coeffs, frame.available,
                            frame.frame_index, 0.0)
    rng = np.random.default_rng([noise.seed, frame.frame_index])
    shape = frame.coeffs.shape
    eta = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    eta *= sigma / math.sqrt(2.0)
    coeffs = frame.coeffs + eta * frame.available
    return FourierFrame(coeffs, frame.available, frame.frame_index, sigma)


def _data_mean(frame: FourierFrame, stat: str) -> float:
    vals = frame.coeffs[frame.available]
    if vals.size == 0:
        raise ValueError("frame has no available coefficients")
    if stat == "mean_abs":
        return float(np.mean(np.abs(vals)))
    if stat == "abs_mean":
        return float(abs(np.mean(vals)))
    raise ValueError(f"unknown SNR statistic {stat!r}")


def snr_db(frame: FourierFrame, sigma: float | None = None,
           stat: str = "mean_abs") -> float:
    """Signal-to-noise ratio 10*log10((mean(b)/sigma)**2) in dB.

    The mean is taken over available entries.  ``stat`` picks the reduction:
    ``mean_abs`` (default) averages coefficient magnitudes, ``abs_mean``
    takes the magnitude of the complex mean.  The default avoids the
    degeneracy of zero-background scenes, whose complex mean nearly cancels.
    """
    sigma = frame.noise_sigma if sigma is None else sigma
    if sigma == 0.0:
        warnings.warn("sigma is zero; SNR is infinite", RuntimeWarning)
        return math.inf
    return 20.0 * math.log10(_data_mean(frame, stat) / sigma)


def sigma_for_snr(frame: FourierFrame, target_db: float,
                  stat: str = "mean_abs") -> float:
    """Noise level that produces ``target_db`` on this (noiseless) frame."""
    return _data_mean(frame, stat) * 10.0 ** (-target_db / 20.0)


@dataclass(frozen=True)
class Occlusion:
    """Axis-aligned rectangular corruption applied in the pixel domain.

    ``region`` is (x0, y0, x1, y1) in [0, 1]^2 coordinates.  ``fill`` is
    either "constant" (pixels replaced by ``value``) or "gaussian" (pixels
    replaced by zero-mean Gaussian noise with standard deviation ``std``).
    Solvers are never told where occlusions sit.
    """

    region: tuple[float, float, float, float]
    fill: str = "constant"
    value: float = 0.0
    std: float = 3.0
    seed: int = 0

    def __post_init__(self):
        x0, y0, x1, y1 = self.region
        if not (0.0 <= x0 < x1 <= 1.0 and 0.0 <= y0 < y1 <= 1.0):
            raise ValueError(f"region {self.region} not a rectangle in [0,1]^2")
        if self.fill not in ("constant", "gaussian"):
            raise ValueError(f"unknown fill {self.fill!r}")

    def support(self, spec: GridSpec, oversample: int = 1) -> np.ndarray:
        """Boolean support of the region on a (possibly finer) grid."""
        n = spec.side * oversample
        x = np.arange(n) / n
        x0, y0, x1, y1 = self.region
        inx = (x >= x0) & (x <= x1)
        iny = (x >= y0) & (x <= y1)
        return inx[:, None] & iny[None, :]

    def apply(self, values: np.ndarray, spec: GridSpec,
              oversample: int = 1) -> np.ndarray:
        sup = self.support(spec, oversample)
        out = values.copy()
        if self.fill == "constant":
            out[sup] = self.value
        else:
            rng = np.random.default_rng([self.seed, 7919])
            noise = rng.normal(0.0, self.std, size=values.shape)
            out[sup] = noise[sup]
        return out


def _truncate_fine_spectrum(fine: np.ndarray, N: int) -> np.ndarray:
    """Centered block [-N..N]^2 of a fine-grid spectrum, rescaled so the
    result matches the coarse unnormalized DFT convention."""
    P = fine.shape[0]
    side = 2 * N + 1
    if P < side:
        raise ValueError(f"fine grid {P} smaller than target side {side}")
    centered = _fft.fftshift(fine)
    c = P // 2
    block = centered[c - N:c + N + 1, c - N:c + N + 1]
    return block * (side * side) / (P * P)


def simulate_sequence(images: list,
                      occlusions: dict[int, list[Occlusion]] | None = None,
                      noise: NoiseModel | None = None,
                      spec: GridSpec | None = None,
                      band_rule: str = "cross") -> list[FourierFrame]:
    """Observe a sequence of images through the banded noisy Fourier model.

    ``images`` holds :class:`ImageGrid` objects or plain square arrays,
    possibly rasterized on a finer grid than ``spec`` (any integer multiple
    of its side); a fine spectrum is truncated to [-N, N]^2, which emulates
    continuous-domain Fourier samples.  Occlusions (keyed by 1-based frame
    index) corrupt the pixel values before the transform.  Masking happens
    before noise, so noise never lands on missing modes.
    """
    J = len(images)
    if J == 0:
        raise ValueError("need at least one image")
    if spec is None:
        first = images[0]
        if not isinstance(first, ImageGrid):
            raise ValueError("spec is required for plain-array input")
        spec = GridSpec(N=first.spec.N, J=J)
    occlusions = occlusions or {}
    noise = noise or NoiseModel()
    frames = []
    for j, img in enumerate(images, start=1):
        values = img.values if isinstance(img, ImageGrid) else np.asarray(img)
        fine_side = values.shape[0]
        if fine_side % spec.side != 0:
            raise ValueError(
                f"fine side {fine_side} is not a multiple of {spec.side}")
        oversample = fine_side // spec.side
        for occ in occlusions.get(j, []):
            values = occ.apply(values, spec, oversample)
        fine_spectrum = _fft.fft2(values)
        coeffs = _truncate_fine_spectrum(fine_spectrum, spec.N)
        avail = band_mask(spec, j, J, rule=band_rule)
        frame = FourierFrame(coeffs * avail, avail, frame_index=j)
        frame = add_noise(frame, noise)
        frames.append(frame)
    return frames
