"""Query-consuming search primitives: segment bisection onto the boundary,
ordered sign search over coupled angles, and angle bisection."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import NotAdversarialSeed
from .geometry import PolarFrame, coupled_point
from .oracles import OracleSession


def sign_schedule(steps: int) -> np.ndarray:
    """Angle multipliers (1, -1, (T-1)/T, -(T-1)/T, ..., 1/T, -1/T) for T=steps."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    mags = np.arange(steps, 0, -1, dtype=np.float64) / steps
    return np.stack([mags, -mags], axis=1).ravel()


class SignSearchHit(NamedTuple):
    index: int  # 1-based position in the schedule
    theta: float


def boundary_binary_search(session: OracleSession, x_o: np.ndarray,
                           y_adv: np.ndarray, steps: int = 10,
                           rel_tol: float = 0.01) -> np.ndarray:
    """Bisect the segment [x_o, y_adv] onto the boundary, keeping the
    adversarial endpoint.

    The first query re-checks y_adv (NotAdversarialSeed if it fails). Stops
    once the bracket shrinks below rel_tol of the segment length or after
    ``steps`` queries in total, whichever comes first.
    """
    x_o = np.asarray(x_o, dtype=np.float64)
    y_adv = np.asarray(y_adv, dtype=np.float64)
    used = 1
    if not session.query(y_adv):
        raise NotAdversarialSeed("starting point is not adversarial")
    lam_adv, lam_out = 0.0, 1.0  # blend towards x_o at lam=1
    while used < steps and (lam_out - lam_adv) > rel_tol:
        mid = 0.5 * (lam_adv + lam_out)
        if session.query(mid * x_o + (1.0 - mid) * y_adv):
            lam_adv = mid
        else:
            lam_out = mid
        used += 1
    return lam_adv * x_o + (1.0 - lam_adv) * y_adv


def sign_search(session: OracleSession, frame: PolarFrame, theta_max: float,
                schedule: np.ndarray):
    """Try coupled angles theta_max * schedule in order; stop at the first
    adversarial answer. Returns a SignSearchHit or None when all entries fail."""
    for j, tau in enumerate(schedule, start=1):
        theta = theta_max * float(tau)
        if session.query(coupled_point(frame, theta)):
            return SignSearchHit(index=j, theta=theta)
    return None


def angle_binary_search(session: OracleSession, frame: PolarFrame,
                        theta_adv: float, theta_out: float,
                        max_steps: int = 10, early_stop_frac: float = 0.01) -> float:
    """Bisect the angle between a known adversarial ``theta_adv`` and an
    outward ``theta_out``, keeping the adversarial endpoint.

    Stops after ``max_steps`` queries or once the chord between the bracket's
    coupled points drops below ``early_stop_frac`` of the frame distance. The
    chord equals dist*|sin(theta_adv - theta_out)|.
    """
    if theta_adv != 0.0 and math.copysign(1.0, theta_out) != math.copysign(1.0, theta_adv):
        raise ValueError("bracket endpoints must share a sign")
    used = 0
    while used < max_steps and abs(math.sin(theta_adv - theta_out)) >= early_stop_frac:
        mid = 0.5 * (theta_adv + theta_out)
        if session.query(coupled_point(frame, mid)):
            theta_adv = mid
        else:
            theta_out = mid
        used += 1
    return theta_adv
