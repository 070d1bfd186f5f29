"""Self-contained property suites behind the ``verify`` CLI command.

Each check returns (ok, detail). Everything runs on fixed seeds so the
transcript is identical across runs.
"""
from __future__ import annotations

import math

import numpy as np

from . import attack, geometry, oracles, sampler, search, transforms

VERIFY_SEED = 20240917


def _random_frame(rng, dim=16):
    x_o = rng.uniform(0.2, 0.8, size=dim)
    direction = rng.normal(size=dim)
    direction /= np.linalg.norm(direction)
    x_b = x_o + rng.uniform(0.5, 2.0) * direction
    v = rng.normal(size=dim)
    v -= (v @ direction) * direction
    v /= np.linalg.norm(v)
    return geometry.make_frame(x_o, x_b, v)


def check_circle_locus():
    rng = np.random.default_rng(VERIFY_SEED)
    worst = 0.0
    frame = _random_frame(rng)
    center = (frame.origin + frame.anchor) / 2.0
    for theta in rng.uniform(-math.pi / 2, math.pi / 2, size=1000):
        z = geometry.coupled_point(frame, float(theta))
        err = abs(np.linalg.norm(z - center) - frame.dist / 2.0)
        worst = max(worst, err)
    return worst < 1e-9, f"max radius error {worst:.3e}"


def _membership_2d(alpha, theta, psi):
    z = np.array([(1 - alpha) * math.cos(theta), (1 - alpha) * math.sin(theta)])
    anchor = np.array([1.0, 0.0])
    normal = np.array([math.cos(psi), math.sin(psi)])
    return float((z - anchor) @ normal)


def check_halfspace_condition(n=10000, margin_tol=1e-9):
    rng = np.random.default_rng(VERIFY_SEED + 1)
    checked = disagreements = 0
    while checked < n:
        psi = rng.uniform(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)
        alpha = rng.uniform(0.0, 0.999)
        theta = rng.uniform(-math.pi, math.pi)
        if theta == 0.0:
            continue
        margin = _membership_2d(alpha, theta, psi)
        if abs(margin) <= margin_tol:
            continue
        checked += 1
        got = geometry.is_adversarial_halfspace(geometry.PolarPoint(alpha, theta), psi)
        if got != (margin >= 0.0):
            disagreements += 1
    return disagreements == 0, f"{disagreements} disagreements over {checked} samples"


def check_adversarial_interval():
    rng = np.random.default_rng(VERIFY_SEED + 2)
    grid = np.linspace(1e-4, math.pi / 2, 4000)
    for psi in rng.uniform(0.05, 1.4, size=8):
        flags = [geometry.is_adversarial_halfspace(
            geometry.PolarPoint(1 - math.cos(t), t), float(psi)) for t in grid]
        first_false = next((i for i, f in enumerate(flags) if not f), len(flags))
        if any(flags[first_false:]):
            return False, f"adversarial set not an interval for psi={psi:.3f}"
    return True, "adversarial coupled set is an interval from zero"


def check_coupled_optimality():
    rng = np.random.default_rng(VERIFY_SEED + 3)
    frame = _random_frame(rng)
    step = 1e-4
    grid = np.arange(step, math.pi / 2, step)
    for psi_deg in (5.0, 20.0, 40.0, -5.0, -20.0, -40.0):
        psi = math.radians(psi_deg)
        signed = grid * math.copysign(1.0, psi)
        flags = [geometry.is_adversarial_halfspace(
            geometry.PolarPoint(1 - math.cos(t), t), psi) for t in signed]
        best = None
        for t, f in zip(signed, flags):
            if f and (best is None or (1 - math.cos(t)) > (1 - math.cos(best))):
                best = t
        if best is None or abs(abs(best) - abs(psi)) > step:
            return False, f"best angle off optimum for psi={psi_deg} deg"
        achieved = np.linalg.norm(geometry.coupled_point(frame, psi) - frame.origin)
        if abs(achieved - frame.dist * math.cos(psi)) > 1e-9 * frame.dist:
            return False, f"coupled distance wrong for psi={psi_deg} deg"
    return True, "grid optimum within one step; distance matches dist*cos(psi)"


def check_coupled_tangent():
    alphas = np.linspace(0.0, 0.99, 500)
    values = [geometry.coupled_tangent(float(a)) for a in alphas]
    if any(b <= a for a, b in zip(values, values[1:])):
        return False, "not strictly increasing"
    worst = max(abs(v - math.tan(math.acos(1 - a)))
                for a, v in zip(alphas, values))
    return worst < 1e-12, f"max identity error {worst:.3e}"


def check_quadratic_vertex(n=1000):
    rng = np.random.default_rng(VERIFY_SEED + 4)
    worst = 0.0
    done = 0
    while done < n:
        d = rng.uniform(0.1, 5.0)
        theta = rng.uniform(0.05, 1.5) * (1 if rng.random() < 0.5 else -1)
        delta = rng.uniform(0.3, 1.2) * d
        if abs(2 * delta - d * (math.cos(theta) + 1)) < 1e-6:
            continue
        xs = np.array([0.0, theta / 2, theta])
        ys = np.array([d, delta, d * math.cos(theta)])
        a, b, _ = np.linalg.solve(np.vander(xs, 3), ys)
        expected = -b / (2 * a)
        got = geometry.quadratic_vertex_angle(d, theta, delta)
        worst = max(worst, abs(got - expected))
        done += 1
    return worst < 1e-9, f"max vertex error {worst:.3e} over {done} fits"


def check_dct_round_trip(n=100):
    rng = np.random.default_rng(VERIFY_SEED + 5)
    worst_rt = worst_energy = 0.0
    for mode in (transforms.TransformMode("dct-full"),
                 transforms.TransformMode("dct8x8")):
        for _ in range(n):
            x = rng.uniform(0, 1, size=(2, 16, 16))
            coeffs = transforms.forward(mode, x)
            back = transforms.inverse(mode, coeffs)
            worst_rt = max(worst_rt, float(np.max(np.abs(back - x))))
            worst_energy = max(worst_energy, abs(np.linalg.norm(coeffs.ravel())
                                                 - np.linalg.norm(x.ravel())))
    ok = worst_rt < 1e-6 and worst_energy < 1e-9
    return ok, f"max round-trip {worst_rt:.3e}, max energy drift {worst_energy:.3e}"


def check_subband_masks():
    shape = (3, 16, 16)
    total = int(np.prod(shape))
    previous = None
    for rho in (4 / 64, 16 / 64, 32 / 64, 1.0):
        mode = transforms.TransformMode("dct8x8", rho=rho)
        mask = transforms.subband_mask(mode, shape)
        if int(mask.sum()) != round(rho * total):
            return False, f"cardinality off at rho={rho}"
        if previous is not None and not np.all(mask[previous]):
            return False, f"mask not nested at rho={rho}"
        previous = mask
    return True, "cardinality exact and masks nested over rho"


def check_schedule():
    for steps in (1, 2, 3, 7):
        sched = search.sign_schedule(steps)
        if len(sched) != 2 * steps:
            return False, f"wrong length for T={steps}"
        if any(a * b >= 0 for a, b in zip(sched, sched[1:])):
            return False, "signs do not alternate"
        mags = np.abs(sched)
        if any(b > a + 1e-15 for a, b in zip(mags, mags[1:])):
            return False, "magnitudes increase"
    return True, "alternating signs, non-increasing magnitudes"


def check_gram_schmidt():
    rng = np.random.default_rng(VERIFY_SEED + 6)
    dim = 64
    u = rng.normal(size=dim)
    u /= np.linalg.norm(u)
    window = sampler.DirectionWindow(capacity=30)
    worst = 0.0
    for _ in range(25):
        v = sampler.orthonormalize(rng.normal(size=dim), u, window)
        worst = max(worst, abs(float(v @ u)))
        worst = max(worst, max((abs(float(v @ w)) for w in window), default=0.0))
        window.append(v)
    return worst < 1e-9, f"max residual dot {worst:.3e}"


def check_boundary_search():
    dim = 32
    normal = np.zeros(dim)
    normal[0] = 1.0
    oracle = oracles.HalfspaceOracle(normal, offset=0.5)
    x_o = np.zeros(dim)
    y = np.zeros(dim)
    y[0] = 1.0
    session = oracles.OracleSession(oracle, x_o, budget=64, original_label=None)
    session.observe_original()
    point = search.boundary_binary_search(session, x_o, y, steps=20, rel_tol=0.0)
    err = abs(point[0] - 0.5)
    return 0 <= point[0] - 0.5 <= 2 ** -18, f"boundary located within {err:.2e}"


def check_hyperplane_convergence():
    cases = (
        (10, 500, dict(sign_search_steps=3, window_size=5,
                       theta_adapt_rate=0.1), (0, 1, 2)),
        (100, 700, dict(sign_search_steps=1, window_size=90,
                        theta_adapt_rate=0.08, bisection_steps=1,
                        theta_max_init=35.0), (0, 1)),
    )
    worst = 0.0
    for dim, budget, settings, seeds in cases:
        for seed in seeds:
            rng = np.random.default_rng(seed)
            normal = rng.normal(size=dim)
            normal /= np.linalg.norm(normal)
            x_o = np.full(dim, 0.5)
            dist0 = 0.2
            oracle = oracles.HalfspaceOracle(normal, offset=float(x_o @ normal) + dist0)
            config = attack.SurFreeConfig(
                mode=transforms.TransformMode("pixel"),
                shaping=sampler.ShapingFunction("constant"),
                window_reset=True, seed=seed, query_budget=budget, **settings)
            result = attack.run(oracle, x_o, config)
            gap = result.best_distortion / dist0 - 1.0
            worst = max(worst, gap)
            if gap >= 0.02:
                return False, f"gap {gap:.4f} at dim={dim} seed={seed}"
    return True, f"worst relative gap {worst:.5f}"


ALL_CHECKS = [
    ("circle-locus", check_circle_locus),
    ("halfspace-condition-agreement", check_halfspace_condition),
    ("adversarial-interval", check_adversarial_interval),
    ("coupled-optimality", check_coupled_optimality),
    ("coupled-tangent", check_coupled_tangent),
    ("quadratic-vertex", check_quadratic_vertex),
    ("dct-round-trip", check_dct_round_trip),
    ("subband-masks", check_subband_masks),
    ("sign-schedule", check_schedule),
    ("gram-schmidt", check_gram_schmidt),
    ("boundary-search", check_boundary_search),
    ("hyperplane-convergence", check_hyperplane_convergence),
]


def run_all(stream=None) -> bool:
    """Run every check, print one PASS/FAIL line each; True iff all passed."""
    import sys
    stream = stream or sys.stdout
    all_ok = True
    for name, fn in ALL_CHECKS:
        ok, detail = fn()
        all_ok &= ok
        stream.write(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}\n")
    return all_ok
