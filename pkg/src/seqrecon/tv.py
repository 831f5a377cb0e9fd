"""Anisotropic total-variation operator (first differences in two axes).

The operator maps an n x n image to a (2, n, n) stack: horizontal
differences first (along the last axis), vertical second (along the
second-to-last).  Leading axes are treated as a batch, so a (J, n, n)
frame stack maps to (J, 2, n, n).  With periodic boundaries both
difference operators are diagonalized by the 2D DFT, which the solvers
exploit for closed-form updates.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TVOperator:
    """First-difference stack with ``periodic`` or ``replicate`` boundary."""

    boundary: str = "periodic"

    def __post_init__(self):
        if self.boundary not in ("periodic", "replicate"):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.ndim < 2:
            raise ValueError("apply expects at least a 2D image")
        if self.boundary == "periodic":
            dh = np.roll(x, -1, axis=-1) - x
            dv = np.roll(x, -1, axis=-2) - x
        else:
            dh = np.zeros_like(x)
            dh[..., :, :-1] = x[..., :, 1:] - x[..., :, :-1]
            dv = np.zeros_like(x)
            dv[..., :-1, :] = x[..., 1:, :] - x[..., :-1, :]
        return np.stack([dh, dv], axis=-3)

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y)
        if y.ndim < 3 or y.shape[-3] != 2:
            raise ValueError("adjoint expects a (..., 2, n, n) stack")
        h = y[..., 0, :, :]
        v = y[..., 1, :, :]
        if self.boundary == "periodic":
            return ((np.roll(h, 1, axis=-1) - h)
                    + (np.roll(v, 1, axis=-2) - v))
        out = np.zeros_like(h)
        out[..., :, 1:] += h[..., :, :-1]
        out[..., :, :-1] -= h[..., :, :-1]
        out[..., 1:, :] += v[..., :-1, :]
        out[..., :-1, :] -= v[..., :-1, :]
        return out

    def normal_eigs(self, side: int) -> np.ndarray:
        """Eigenvalues of L^T L in the (unshifted) 2D DFT basis.

        Only valid for periodic boundaries, where both difference operators
        are circulant: lambda(k, l) = 4 sin^2(pi k / n) + 4 sin^2(pi l / n).
        """
        if self.boundary != "periodic":
            raise ValueError("DFT eigenvalues require periodic boundaries")
        k = np.arange(side)
        s = 4.0 * np.sin(np.pi * k / side) ** 2
        return s[None, :] + s[:, None]
