"""Polar geometry of the 2-D search plane.

All functions are pure, work on flat or multi-dimensional float arrays of any
size >= 2, and use radians. Nothing here clips to the input box; callers do.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrame, DegenerateQuadratic, UndefinedAtThetaZero

UNIT_TOL = 1e-9
ORTHO_TOL = 1e-9


def _dot(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.vdot(a, b))


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a.ravel()))


@dataclass(frozen=True)
class PolarFrame:
    """Affine 2-D plane through ``origin`` spanned by unit vectors ``u`` and ``v``.

    ``u`` points at the known adversarial anchor, ``dist`` is the distance to it.
    """

    origin: np.ndarray
    u: np.ndarray
    v: np.ndarray
    dist: float

    def __post_init__(self):
        if self.dist <= 0:
            raise DegenerateFrame(f"anchor distance must be positive, got {self.dist}")
        if abs(_norm(self.u) - 1.0) > UNIT_TOL or abs(_norm(self.v) - 1.0) > UNIT_TOL:
            raise DegenerateFrame("u and v must be unit vectors")
        if abs(_dot(self.u, self.v)) > ORTHO_TOL:
            raise DegenerateFrame("u and v must be orthogonal")

    @property
    def anchor(self) -> np.ndarray:
        """The in-plane adversarial anchor point."""
        return self.origin + self.dist * self.u


@dataclass(frozen=True)
class PolarPoint:
    """In-plane polar coordinates: relative distance drop ``alpha``, angle ``theta``."""

    alpha: float
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if abs(self.theta) > math.pi:
            raise ValueError(f"theta must be in [-pi, pi], got {self.theta}")


def make_frame(x_o: np.ndarray, x_b: np.ndarray, v_raw: np.ndarray) -> PolarFrame:
    """Build the search frame from an original point, an adversarial anchor and
    a unit direction orthogonal to their difference."""
    diff = np.asarray(x_b, dtype=np.float64) - np.asarray(x_o, dtype=np.float64)
    dist = _norm(diff)
    if dist < 1e-12:
        raise DegenerateFrame("anchor coincides with the origin")
    u = diff / dist
    return PolarFrame(origin=np.asarray(x_o, dtype=np.float64), u=u,
                      v=np.asarray(v_raw, dtype=np.float64), dist=dist)


def plane_point(frame: PolarFrame, point: PolarPoint) -> np.ndarray:
    """Map polar coordinates to the ambient space.

    The result sits at distance dist*(1-alpha) from the origin, at angle theta
    from u. (alpha=0, theta=0) is the anchor; alpha=1 collapses to the origin.
    """
    r = frame.dist * (1.0 - point.alpha)
    return r * (math.cos(point.theta) * frame.u + math.sin(point.theta) * frame.v) \
        + frame.origin


def coupled_point(frame: PolarFrame, theta: float) -> np.ndarray:
    """Plane point with the distance drop coupled to the angle: alpha = 1 - cos(theta).

    The locus over theta is the circle of diameter [origin, anchor]; the point
    is at distance dist*cos(theta) from the origin.
    """
    c = math.cos(theta)
    return frame.dist * c * (c * frame.u + math.sin(theta) * frame.v) + frame.origin


def is_adversarial_halfspace(point: PolarPoint, psi: float) -> bool:
    """Whether the polar point falls on the adversarial side of an in-plane line.

    The line passes through the anchor with in-plane normal at angle ``psi``
    from u, psi in (-pi/2, pi/2). Exact boundary hits count as adversarial.
    """
    if not -math.pi / 2 < psi < math.pi / 2:
        raise ValueError(f"psi must be in (-pi/2, pi/2), got {psi}")
    if point.theta == 0.0:
        raise UndefinedAtThetaZero("the angle-zero ray never crosses the line")
    if point.alpha >= 1.0:
        raise ValueError("alpha must be below 1")
    r = 1.0 - point.alpha
    num = abs(1.0 - r * math.cos(point.theta))
    den = abs(r * math.sin(point.theta))
    with np.errstate(divide="ignore"):
        lhs = np.divide(num, den)
    return bool(lhs <= math.tan(psi) * math.copysign(1.0, point.theta))


def coupled_tangent(alpha: float) -> float:
    """Tangent of the coupled angle arccos(1-alpha); strictly increasing in alpha."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    r = 1.0 - alpha
    return math.sqrt(1.0 - r * r) / r


def quadratic_vertex_angle(dist: float, theta_star: float, delta: float) -> float:
    """Vertex angle of the parabola through three (angle, boundary distance) samples.

    The samples are (0, dist), (theta_star/2, delta) and
    (theta_star, dist*cos(theta_star)).
    """
    if dist <= 0:
        raise ValueError("dist must be positive")
    if theta_star == 0.0:
        raise ValueError("theta_star must be nonzero")
    if delta <= 0:
        raise ValueError("delta must be positive")
    c = math.cos(theta_star)
    den = 2.0 * delta - dist * (c + 1.0)
    if abs(den) < 1e-12:
        raise DegenerateQuadratic("distance samples are collinear in angle")
    return (theta_star / 4.0) * (4.0 * delta - dist * (c + 3.0)) / den
