"""Minimal binary container for 2D arrays (images, Fourier frames, masks).

Layout: a 16-byte header followed by the row-major little-endian payload.

    bytes 0..3    magic ``SQRA``
    bytes 4..7    rows, unsigned 32-bit little-endian
    bytes 8..11   cols, unsigned 32-bit little-endian
    byte  12      dtype code: 0 = float64, 1 = complex128, 2 = uint8
    bytes 13..15  reserved, zero

Writes are deterministic: the same array always produces the same bytes.
"""

import struct

import numpy as np

MAGIC = b"SQRA"
_HEADER = struct.Struct("<4sIIB3x")

_CODE_FOR_KIND = {"f": 0, "c": 1, "u": 2}
_DTYPE_FOR_CODE = {0: np.dtype("<f8"), 1: np.dtype("<c16"), 2: np.dtype("u1")}


def _canonical(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D array, got shape {arr.shape}")
    if arr.dtype == np.bool_:
        arr = arr.astype(np.uint8)
    kind = arr.dtype.kind
    if kind not in _CODE_FOR_KIND:
        raise ValueError(f"unsupported dtype {arr.dtype}")
    code = _CODE_FOR_KIND[kind]
    return np.ascontiguousarray(arr, dtype=_DTYPE_FOR_CODE[code])


def write_sqr(path, arr: np.ndarray) -> None:
    """Write a 2D float64, complex128, uint8, or bool array to ``path``."""
    arr = _canonical(arr)
    code = _CODE_FOR_KIND[arr.dtype.kind]
    header = _HEADER.pack(MAGIC, arr.shape[0], arr.shape[1], code)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(arr.tobytes())


def read_sqr(path) -> np.ndarray:
    """Read an array written by :func:`write_sqr`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, rows, cols, code = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if code not in _DTYPE_FOR_CODE:
        raise ValueError(f"{path}: unknown dtype code {code}")
    dtype = _DTYPE_FOR_CODE[code]
    expected = _HEADER.size + rows * cols * dtype.itemsize
    if len(raw) != expected:
        raise ValueError(f"{path}: payload size {len(raw)} != expected {expected}")
    data = np.frombuffer(raw, dtype=dtype, offset=_HEADER.size)
    return data.reshape(rows, cols).copy()
