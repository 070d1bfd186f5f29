"""The attack loop: initialization onto the boundary, per-iteration direction
trials with sign search and angle bisection, angular budget adaptation, and an
optional quadratic refinement of the accepted angle.

One run owns one oracle session and is strictly sequential; every queried
point is clipped to [0, 1] and accounted against the query budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BudgetExhausted, DegenerateDirection, DegenerateQuadratic,
                     InitializationFailed, NotAdversarialSeed, RunStuck)
from .geometry import PolarFrame, coupled_point, quadratic_vertex_angle
from .metrics import AttackTrace
from .oracles import DecisionOracle, OracleSession
from .sampler import DirectionWindow, ShapingFunction, draw_direction, orthonormalize
from .search import angle_binary_search, boundary_binary_search, sign_schedule, sign_search
from .transforms import TransformMode

THETA_MAX_CAP_DEG = 89.9
MAX_REDRAWS = 32


@dataclass(frozen=True)
class SurFreeConfig:
    """All attack hyperparameters.

    ``theta_max_init`` is in degrees. ``theta_adapt_rate`` shrinks the angular
    budget by that fraction on every failed sign search and grows it by the
    same factor on success. ``window_reset`` re-opens exhausted search
    directions instead of ending the run when sampling degenerates.
    """

    sign_search_steps: int = 3
    window_size: int = 100
    theta_max_init: float = 30.0
    theta_adapt_rate: float = 0.02
    bisection_steps: int = 10
    bisection_early_stop: float = 0.01
    mode: TransformMode = field(default_factory=lambda: TransformMode("dct8x8", rho=0.5))
    shaping: ShapingFunction = field(default_factory=ShapingFunction)
    with_interpolation: bool = False
    window_reset: bool = False
    seed: int = 0
    query_budget: int = 1000
    init_noise_budget: int = 100

    def __post_init__(self):
        if self.sign_search_steps < 1:
            raise ValueError("sign_search_steps must be at least 1")
        if self.window_size < 0:
            raise ValueError("window_size must be >= 0")
        if not 0.0 < self.theta_adapt_rate < 1.0:
            raise ValueError("theta_adapt_rate must be in (0, 1)")
        if not 0.0 < self.theta_max_init <= 90.0:
            raise ValueError("theta_max_init must be in (0, 90] degrees")
        if self.query_budget < 1:
            raise ValueError("query_budget must be at least 1")
        if self.bisection_steps < 0 or self.bisection_early_stop < 0:
            raise ValueError("bisection parameters must be non-negative")


@dataclass
class AttackState:
    """Mutable per-run state between iterations; theta_max is in degrees."""

    x_b: np.ndarray
    d: float
    theta_max: float
    window: DirectionWindow
    iteration: int = 1


@dataclass
class AttackResult:
    best_adversarial: np.ndarray | None
    best_distortion: float | None
    trace: AttackTrace
    queries_used: int
    converged: bool


def initialize(session: OracleSession, rng: np.random.Generator,
               config: SurFreeConfig,
               starting_adversarial: np.ndarray | None = None) -> AttackState:
    """Pin the original label, find a first adversarial point, and bisect it
    onto the boundary.

    Without a caller-supplied adversarial, blends of the original with uniform
    noise are tried at amplitudes 0.1, 0.2, ..., 1.0, ten draws each, capped by
    ``init_noise_budget`` queries.
    """
    session.observe_original()
    x_o = session.x_o
    if starting_adversarial is not None:
        y0 = np.clip(np.asarray(starting_adversarial, dtype=np.float64), 0.0, 1.0)
    else:
        y0 = None
        trials = 0
        for beta in np.arange(0.1, 1.001, 0.1):
            for _ in range(10):
                if trials >= config.init_noise_budget:
                    break
                noise = rng.uniform(0.0, 1.0, size=x_o.shape)
                candidate = (1.0 - beta) * x_o + beta * noise
                trials += 1
                if session.query(candidate):
                    y0 = np.clip(candidate, 0.0, 1.0)
                    break
            if y0 is not None or trials >= config.init_noise_budget:
                break
        if y0 is None:
            raise InitializationFailed(
                f"no adversarial found in {trials} noise trials")
    x_b = boundary_binary_search(session, x_o, y0,
                                 steps=config.bisection_steps,
                                 rel_tol=config.bisection_early_stop)
    d = float(np.linalg.norm((x_b - x_o).ravel()))
    return AttackState(x_b=x_b, d=d, theta_max=config.theta_max_init,
                       window=DirectionWindow(config.window_size))


def _next_direction(session: OracleSession, state: AttackState,
                    rng: np.random.Generator, config: SurFreeConfig,
                    u: np.ndarray) -> np.ndarray:
    attempts = 0
    did_reset = False
    while True:
        t = draw_direction(session.x_o, config.mode, config.shaping, rng)
        try:
            return orthonormalize(t, u, state.window)
        except DegenerateDirection:
            attempts += 1
            if attempts < MAX_REDRAWS:
                continue
            if config.window_reset and not did_reset:
                state.window.reset()
                attempts = 0
                did_reset = True
                continue
            raise RunStuck(f"direction sampling degenerated {attempts} times")


def interpolation_refine(session: OracleSession, frame: PolarFrame,
                         theta_star: float, config: SurFreeConfig) -> np.ndarray:
    """Refine the accepted angle through a quadratic fit of boundary distances.

    Finds a boundary point at half the angle, fits the parabola through the
    three known (angle, distance) samples, bisects towards the boundary at the
    vertex angle, and returns the closest adversarial point seen; the plain
    accepted point wins ties.
    """
    x_o = session.x_o
    base = np.clip(coupled_point(frame, theta_star), 0.0, 1.0)
    candidates = [base]
    half = np.clip(coupled_point(frame, theta_star / 2.0), 0.0, 1.0)
    try:
        p_half = boundary_binary_search(session, x_o, half,
                                        steps=config.bisection_steps,
                                        rel_tol=config.bisection_early_stop)
    except NotAdversarialSeed:
        return base
    candidates.append(p_half)
    delta = float(np.linalg.norm((p_half - x_o).ravel()))
    try:
        theta_hat = quadratic_vertex_angle(frame.dist, theta_star, delta)
    except DegenerateQuadratic:
        theta_hat = None
    # the vertex is only usable as an angle on the same side, short of pi/2
    if theta_hat is not None and 0.0 < abs(theta_hat) < math.pi / 2 \
            and math.copysign(1.0, theta_hat) == math.copysign(1.0, theta_star):
        z_hat = np.clip(coupled_point(frame, theta_hat), 0.0, 1.0)
        try:
            candidates.append(boundary_binary_search(
                session, x_o, z_hat, steps=config.bisection_steps,
                rel_tol=config.bisection_early_stop))
        except NotAdversarialSeed:
            pass
    distortions = [float(np.linalg.norm((c - x_o).ravel())) for c in candidates]
    return candidates[int(np.argmin(distortions))]


def iterate(session: OracleSession, state: AttackState,
            rng: np.random.Generator, config: SurFreeConfig) -> AttackState:
    """One direction trial: draw, orthonormalize, sign search, then either
    refine the angle and move the boundary point, or shrink the angular budget."""
    x_o = session.x_o
    u = (state.x_b - x_o) / state.d
    v = _next_direction(session, state, rng, config, u)
    state.window.append(v)
    frame = PolarFrame(origin=x_o, u=u, v=v, dist=state.d)
    theta_max_rad = math.radians(state.theta_max)
    schedule = sign_schedule(config.sign_search_steps)
    hit = sign_search(session, frame, theta_max_rad, schedule)
    state.iteration += 1
    rate = config.theta_adapt_rate
    if hit is None:
        state.theta_max *= (1.0 - rate)
        return state
    tau_hit = schedule[hit.index - 1]
    tau_out = tau_hit + math.copysign(1.0 / config.sign_search_steps, tau_hit)
    theta_out = theta_max_rad * tau_out
    theta_out = math.copysign(min(abs(theta_out), math.pi / 2.0), theta_out)
    theta_star = angle_binary_search(session, frame, hit.theta, theta_out,
                                     max_steps=config.bisection_steps,
                                     early_stop_frac=config.bisection_early_stop)
    if config.with_interpolation:
        new_point = interpolation_refine(session, frame, theta_star, config)
    else:
        new_point = np.clip(coupled_point(frame, theta_star), 0.0, 1.0)
    state.x_b = new_point
    state.d = float(np.linalg.norm((new_point - x_o).ravel()))
    state.theta_max = min(state.theta_max / (1.0 - rate), THETA_MAX_CAP_DEG)
    return state


def run(oracle: DecisionOracle, x_o: np.ndarray, config: SurFreeConfig,
        original_label: int | None = None,
        starting_adversarial: np.ndarray | None = None,
        init_seed=None) -> AttackResult:
    """Full attack: initialize, then iterate until the query budget runs out.

    Deterministic for a fixed config seed. ``init_seed``, when given, drives
    the initialization noise from its own stream so different configs can
    share the same starting adversarial point.
    """
    rng = np.random.default_rng(config.seed)
    init_rng = rng if init_seed is None else np.random.default_rng(init_seed)
    session = OracleSession(oracle, x_o, config.query_budget,
                            original_label=original_label)
    converged = False
    try:
        state = initialize(session, init_rng, config, starting_adversarial)
        converged = True
        while True:
            iterate(session, state, rng, config)
    except (BudgetExhausted, RunStuck):
        pass
    return AttackResult(best_adversarial=session.best_point,
                        best_distortion=session.best_distortion,
                        trace=session.trace,
                        queries_used=session.queries_used,
                        converged=converged)
