"""Orthonormal DCT transforms (full frame and 8x8 blocks) and subband masks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from .errors import ShapeError

PIXEL = "pixel"
DCT_FULL = "dct-full"
DCT_8X8 = "dct8x8"

_KINDS = (PIXEL, DCT_FULL, DCT_8X8)
BLOCK = 8


@dataclass(frozen=True)
class TransformMode:
    """Coefficient domain for direction sampling: kind plus retained fraction rho."""

    kind: str = DCT_8X8
    rho: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must be in (0, 1], got {self.rho}")
        if self.kind == PIXEL and self.rho != 1.0:
            object.__setattr__(self, "rho", 1.0)


def _check_shape(mode: TransformMode, shape: tuple) -> None:
    if mode.kind == PIXEL:
        return
    if len(shape) < 2:
        raise ShapeError(f"{mode.kind} needs at least 2 dimensions, got shape {shape}")
    h, w = shape[-2], shape[-1]
    if mode.kind == DCT_8X8 and (h % BLOCK or w % BLOCK):
        raise ShapeError(f"height and width must be multiples of {BLOCK}, got {h}x{w}")


def _blocked(x: np.ndarray) -> np.ndarray:
    # (..., H, W) -> (..., H/8, W/8, 8, 8)
    h, w = x.shape[-2], x.shape[-1]
    lead = x.shape[:-2]
    y = x.reshape(lead + (h // BLOCK, BLOCK, w // BLOCK, BLOCK))
    return np.moveaxis(y, -3, -2)


def _unblocked(x: np.ndarray) -> np.ndarray:
    y = np.moveaxis(x, -2, -3)
    lead = y.shape[:-4]
    h = y.shape[-4] * BLOCK
    w = y.shape[-2] * BLOCK
    return y.reshape(lead + (h, w))


def forward(mode: TransformMode, image: np.ndarray) -> np.ndarray:
    """Image to coefficient domain; channels (leading axes) are independent."""
    image = np.asarray(image, dtype=np.float64)
    _check_shape(mode, image.shape)
    if mode.kind == PIXEL:
        return image.copy()
    if mode.kind == DCT_FULL:
        return dctn(image, axes=(-2, -1), norm="ortho")
    return _unblocked(dctn(_blocked(image), axes=(-2, -1), norm="ortho"))


def inverse(mode: TransformMode, coeffs: np.ndarray) -> np.ndarray:
    """Coefficient domain back to the image; exact inverse of ``forward``."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    _check_shape(mode, coeffs.shape)
    if mode.kind == PIXEL:
        return coeffs.copy()
    if mode.kind == DCT_FULL:
        return idctn(coeffs, axes=(-2, -1), norm="ortho")
    return _unblocked(idctn(_blocked(coeffs), axes=(-2, -1), norm="ortho"))


def zigzag_order(n: int = BLOCK) -> list:
    """(row, col) positions of an n x n block in JPEG zig-zag scan order."""
    out = []
    for s in range(2 * n - 1):
        lo = max(0, s - n + 1)
        hi = min(s, n - 1)
        diag = [(i, s - i) for i in range(hi, lo - 1, -1)]  # bottom-left to top-right
        if s % 2:
            diag.reverse()
        out.extend(diag)
    return out


_ZIGZAG = zigzag_order()


def subband_mask(mode: TransformMode, shape: tuple) -> np.ndarray:
    """Boolean mask of retained low-frequency coefficients for the given shape.

    dct8x8 keeps the first ceil(64*rho) zig-zag positions of every block;
    dct-full keeps the round(rho*H*W) positions of smallest i+j per channel,
    ties broken towards smaller row index. Pixel mode retains everything.
    """
    _check_shape(mode, tuple(shape))
    if mode.kind == PIXEL or mode.rho == 1.0:
        return np.ones(shape, dtype=bool)
    h, w = shape[-2], shape[-1]
    if mode.kind == DCT_8X8:
        keep = int(np.ceil(BLOCK * BLOCK * mode.rho))
        block = np.zeros((BLOCK, BLOCK), dtype=bool)
        for (i, j) in _ZIGZAG[:keep]:
            block[i, j] = True
        tile = np.tile(block, (h // BLOCK, w // BLOCK))
    else:
        keep = int(round(mode.rho * h * w))
        order = sorted(((i + j, i, j) for i in range(h) for j in range(w)))
        tile = np.zeros((h, w), dtype=bool)
        for (_, i, j) in order[:keep]:
            tile[i, j] = True
    return np.broadcast_to(tile, shape).copy()
