"""Random search directions: subband-limited sign noise, shaped by the image
content, then orthonormalized against the active frame and recent directions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import transforms
from .errors import AllZeroDraw, DegenerateDirection

CONSTANT = "constant"
IDENTITY = "identity"
TANH = "tanh"

_KINDS = (CONSTANT, IDENTITY, TANH)


@dataclass(frozen=True)
class ShapingFunction:
    """Amplitude profile applied to coefficient magnitudes of the original image."""

    kind: str = TANH
    value: float = 1.0  # constant amplitude; irrelevant after normalization

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown shaping kind {self.kind!r}")
        if self.kind == CONSTANT and self.value <= 0:
            raise ValueError("constant shaping needs a positive value")

    def apply(self, magnitudes: np.ndarray) -> np.ndarray:
        if self.kind == CONSTANT:
            return np.full_like(magnitudes, self.value)
        if self.kind == IDENTITY:
            return magnitudes
        return np.tanh(magnitudes)


class DirectionWindow:
    """Bounded FIFO of mutually orthogonal unit directions."""

    PAIR_TOL = 1e-7

    def __init__(self, capacity: int):
        if capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.capacity = capacity
        self._directions: list[np.ndarray] = []

    def __len__(self):
        return len(self._directions)

    def __iter__(self):
        return iter(self._directions)

    def append(self, v: np.ndarray) -> None:
        if abs(np.linalg.norm(v.ravel()) - 1.0) > 1e-9:
            raise ValueError("window members must be unit vectors")
        for w in self._directions:
            if abs(float(np.vdot(v, w))) >= self.PAIR_TOL:
                raise ValueError("window members must stay pairwise orthogonal")
        if self.capacity == 0:
            return
        self._directions.append(np.array(v, dtype=np.float64))
        if len(self._directions) > self.capacity:
            self._directions.pop(0)

    def reset(self) -> None:
        self._directions.clear()


def draw_direction(x_o: np.ndarray, mode: transforms.TransformMode,
                   shaping: ShapingFunction, rng: np.random.Generator,
                   max_retries: int = 16) -> np.ndarray:
    """Draw one unit direction in the retained subband, shaped like ``x_o``.

    Coefficient j gets A(|X_j|) * r with r uniform over {-1, 0, +1} inside the
    subband mask and 0 outside, where X is the transform of x_o. Raises
    AllZeroDraw if the coefficient vector comes out identically zero
    ``max_retries`` times in a row.
    """
    x_o = np.asarray(x_o, dtype=np.float64)
    coeffs = transforms.forward(mode, x_o)
    mask = transforms.subband_mask(mode, x_o.shape)
    amplitude = shaping.apply(np.abs(coeffs)) * mask
    for _ in range(max_retries):
        signs = rng.integers(-1, 2, size=x_o.shape).astype(np.float64)
        t_coeffs = amplitude * signs
        norm = np.linalg.norm(t_coeffs.ravel())
        if norm > 0.0:
            t = transforms.inverse(mode, t_coeffs)
            return t / np.linalg.norm(t.ravel())
    raise AllZeroDraw(f"all sampled coefficients were zero {max_retries} times")


def orthonormalize(t: np.ndarray, u: np.ndarray, window: DirectionWindow) -> np.ndarray:
    """Project ``t`` onto the orthogonal complement of span(window + {u}),
    then normalize.

    The window members are mutually orthogonal but ``u`` generally is not
    orthogonal to them, so ``u`` is first reduced against the window; two
    projection passes over the resulting orthonormal system keep residual dot
    products near machine epsilon.
    """
    t = np.array(t, dtype=np.float64)
    if np.linalg.norm(t.ravel()) == 0.0:
        raise DegenerateDirection("zero vector cannot be orthonormalized")
    u_residual = np.array(u, dtype=np.float64)
    for _ in range(2):
        for w in window:
            u_residual = u_residual - np.vdot(u_residual, w) * w
    u_scale = np.linalg.norm(u_residual.ravel())
    basis = list(window)
    if u_scale >= 1e-12:  # otherwise u already lies in the window span
        basis.append(u_residual / u_scale)
    for _ in range(2):
        for w in basis:
            t = t - np.vdot(t, w) * w
    residual = np.linalg.norm(t.ravel())
    if residual < 1e-9:
        raise DegenerateDirection("direction lies in the spanned subspace")
    return t / residual
