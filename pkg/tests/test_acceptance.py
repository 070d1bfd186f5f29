"""Acceptance gate: one test per criterion, each printing its PASS/FAIL line.

Run `pytest tests/test_acceptance.py -s` to see the per-criterion lines.

The hyperplane-convergence criterion at dimension 100 with a 500-query budget
is expected to fail: recovering a 100-dimensional normal requires visiting all
~99 orthogonal directions, and at the measured minimum cost per visited
direction the budget covers only part of that sweep (best calibrated
configuration reaches a ~4.6 percent worst-seed gap at 500 queries). The
companion evidence test shows the identical fixture and configuration meeting
the 2 percent target on every seed at a 700-query budget.
"""
import math
import time

import numpy as np
import pytest

from surfree.attack import SurFreeConfig, run
from surfree.errors import BudgetExhausted
from surfree.geometry import (PolarPoint, coupled_point, is_adversarial_halfspace,
                              make_frame, quadratic_vertex_angle)
from surfree.metrics import best_distortion_curve, export_trace
from surfree.oracles import (BallOracle, HalfspaceOracle, LinearClassifierOracle,
                             min_adversarial_distance)
from surfree.remote import RemoteOracle, serve
from surfree.sampler import ShapingFunction
from surfree.transforms import TransformMode, forward, inverse, zigzag_order

PIXEL = dict(mode=TransformMode("pixel"), shaping=ShapingFunction("constant"))


def report(number, ok, detail):
    print(f"criterion {number:02d} {'PASS' if ok else 'FAIL'} - {detail}")


# ---------------------------------------------------------------- fixtures

def halfspace_case(dim, seed, dist=0.2):
    rng = np.random.default_rng(seed)
    normal = rng.normal(size=dim)
    normal /= np.linalg.norm(normal)
    x_o = np.full(dim, 0.5)
    oracle = HalfspaceOracle(normal, offset=float(x_o @ normal) + dist)
    return oracle, x_o, dist


HALFSPACE_CONFIGS = {
    10: dict(sign_search_steps=3, window_size=5, theta_adapt_rate=0.1),
    100: dict(sign_search_steps=1, window_size=90, theta_adapt_rate=0.08,
              bisection_steps=1, theta_max_init=35.0),
}


@pytest.fixture(scope="module")
def halfspace_runs():
    """20-seed hyperplane attacks at K=500 for dimensions 10 and 100."""
    runs = {}
    start = time.perf_counter()
    for dim in (10, 100):
        rows = []
        for seed in range(20):
            oracle, x_o, dist = halfspace_case(dim, seed)
            config = SurFreeConfig(window_reset=True, seed=seed,
                                   query_budget=500,
                                   **HALFSPACE_CONFIGS[dim], **PIXEL)
            result = run(oracle, x_o, config)
            rows.append((result.best_distortion / dist - 1.0, result))
        runs[dim] = rows
    runs["elapsed"] = time.perf_counter() - start
    return runs


def lowfreq_weight_rows(model_k, channels=3):
    """Spatial patterns of the first zig-zag DCT coefficients per channel."""
    rows = []
    for c in range(channels):
        for (i, j) in zigzag_order()[:model_k]:
            coeff = np.zeros((channels, 8, 8))
            coeff[c, i, j] = 1.0
            rows.append(inverse(TransformMode("dct8x8"), coeff).ravel())
    return np.array(rows)


def linear_fixture(seed, model_k=8, margin=0.35):
    """3-class linear model on 3x8x8 inputs with low-frequency weight maps
    and the original placed a controlled margin away from the boundaries."""
    rng = np.random.default_rng(seed)
    basis = lowfreq_weight_rows(model_k)
    weights = rng.normal(size=(3, basis.shape[0])) @ basis
    weights /= np.linalg.norm(weights, axis=1, keepdims=True)
    x_o = rng.uniform(0.3, 0.7, size=(3, 8, 8))
    eps = rng.uniform(0.5, 1.0, size=3) * margin
    eps[rng.integers(0, 3)] = 0.0
    bias = -(weights @ x_o.ravel()) - eps
    oracle = LinearClassifierOracle(weights, bias)
    return oracle, x_o, min_adversarial_distance(oracle, x_o)


@pytest.fixture(scope="module")
def linear_runs():
    rows = []
    for seed in range(20):
        oracle, x_o, exact = linear_fixture(seed)
        config = SurFreeConfig(mode=TransformMode("dct8x8", rho=0.25),
                               shaping=ShapingFunction("constant"),
                               sign_search_steps=1, window_size=24,
                               theta_adapt_rate=0.05, window_reset=True,
                               seed=seed + 1000, query_budget=500)
        result = run(oracle, x_o, config)
        rows.append((result.best_distortion / exact - 1.0, result))
    return rows


# ---------------------------------------------------------------- criteria

def test_criterion_01_condition_equivalence():
    rng = np.random.default_rng(100)
    start = time.perf_counter()
    checked = mismatches = 0
    while checked < 10000:
        psi = rng.uniform(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)
        alpha = rng.uniform(0.0, 0.999)
        theta = rng.uniform(-math.pi, math.pi)
        if theta == 0.0:
            continue
        z = np.array([(1 - alpha) * math.cos(theta),
                      (1 - alpha) * math.sin(theta)])
        margin = float((z - [1.0, 0.0]) @ [math.cos(psi), math.sin(psi)])
        if abs(margin) <= 1e-9:
            continue
        checked += 1
        got = is_adversarial_halfspace(PolarPoint(alpha, theta), psi)
        mismatches += got != (margin >= 0.0)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 1.0
    report(1, ok, f"{checked - mismatches}/{checked} agree in {elapsed:.2f}s")
    assert mismatches == 0
    assert elapsed < 1.0


def test_criterion_02_circle_locus():
    rng = np.random.default_rng(200)
    u = rng.normal(size=24)
    u /= np.linalg.norm(u)
    v = rng.normal(size=24)
    v -= (v @ u) * u
    v /= np.linalg.norm(v)
    origin = rng.uniform(0.2, 0.8, size=24)
    frame = make_frame(origin, origin + 1.3 * u, v)
    center = (frame.origin + frame.anchor) / 2
    worst = max(abs(np.linalg.norm(coupled_point(frame, float(t)) - center)
                    - frame.dist / 2)
                for t in rng.uniform(-math.pi / 2, math.pi / 2, size=1000))
    report(2, worst < 1e-9, f"max circle deviation {worst:.2e}")
    assert worst < 1e-9


def test_criterion_03_coupled_optimality():
    rng = np.random.default_rng(300)
    u = rng.normal(size=16)
    u /= np.linalg.norm(u)
    v = rng.normal(size=16)
    v -= (v @ u) * u
    v /= np.linalg.norm(v)
    origin = rng.uniform(0.3, 0.7, size=16)
    frame = make_frame(origin, origin + 0.9 * u, v)
    step = 1e-4
    grid = np.arange(step, math.pi / 2, step)
    worst_angle_steps = 0.0
    worst_rel = 0.0
    for psi_deg in (5.0, 20.0, 40.0, -5.0, -20.0, -40.0):
        psi = math.radians(psi_deg)
        best = None
        for t in grid * math.copysign(1.0, psi):
            if is_adversarial_halfspace(PolarPoint(1 - math.cos(t), float(t)), psi):
                if best is None or abs(t) > abs(best):
                    best = t
        assert best is not None
        worst_angle_steps = max(worst_angle_steps, abs(abs(best) - abs(psi)) / step)
        achieved = float(np.linalg.norm(coupled_point(frame, psi) - frame.origin))
        target = frame.dist * math.cos(psi)
        worst_rel = max(worst_rel, abs(achieved - target) / target)
    ok = worst_angle_steps <= 1.0 and worst_rel < 1e-6
    report(3, ok, f"grid offset {worst_angle_steps:.2f} steps, "
                  f"distance error {worst_rel:.2e} rel")
    assert worst_angle_steps <= 1.0
    assert worst_rel < 1e-6


def test_criterion_04_hyperplane_convergence_dim10(halfspace_runs):
    gaps = [g for g, _ in halfspace_runs[10]]
    ok = max(gaps) < 0.02
    report(4, ok, f"dim 10: worst seed gap {max(gaps):.5f} (20 seeds, K=500)")
    assert ok


def test_criterion_04_hyperplane_convergence_dim100(halfspace_runs):
    gaps = [g for g, _ in halfspace_runs[100]]
    elapsed = halfspace_runs["elapsed"]
    ok = max(gaps) < 0.02 and elapsed < 5.0
    report(4, ok, f"dim 100: worst seed gap {max(gaps):.5f} (20 seeds, K=500), "
                  f"all runs took {elapsed:.1f}s")
    assert elapsed < 5.0
    assert max(gaps) < 0.02


def test_hyperplane_convergence_dim100_evidence_at_larger_budget():
    # companion to the failing K=500 criterion: the same fixture and config
    # meet the 2 percent target on every seed once the budget covers the
    # ~99 direction visits the dimension demands
    worst = 0.0
    for seed in range(20):
        oracle, x_o, dist = halfspace_case(100, seed)
        config = SurFreeConfig(window_reset=True, seed=seed, query_budget=700,
                               **HALFSPACE_CONFIGS[100], **PIXEL)
        result = run(oracle, x_o, config)
        worst = max(worst, result.best_distortion / dist - 1.0)
    print(f"evidence    PASS - dim 100 reaches worst gap {worst:.5f} at K=700")
    assert worst < 0.02


def test_criterion_05_linear_ground_truth(linear_runs):
    ratios = [g for g, _ in linear_runs]
    mean_gap = float(np.mean(ratios))
    ok = mean_gap <= 0.10
    report(5, ok, f"mean distortion gap over ground truth {mean_gap:.4f} "
                  f"(20 models, K=500)")
    assert ok


def test_criterion_06_vertex_formula():
    rng = np.random.default_rng(600)
    worst = 0.0
    done = 0
    while done < 1000:
        d = rng.uniform(0.1, 5.0)
        theta = rng.uniform(0.05, 1.5) * (1 if rng.random() < 0.5 else -1)
        delta = rng.uniform(0.3, 1.2) * d
        if abs(2 * delta - d * (math.cos(theta) + 1)) < 1e-6:
            continue
        xs = np.array([0.0, theta / 2, theta])
        ys = np.array([d, delta, d * math.cos(theta)])
        a, b, _ = np.linalg.solve(np.vander(xs, 3), ys)
        worst = max(worst, abs(quadratic_vertex_angle(d, theta, delta) + b / (2 * a)))
        done += 1
    specific = abs(quadratic_vertex_angle(1.0, math.pi / 3, 0.9) - math.pi / 36)
    ok = worst < 1e-9 and specific < 1e-12
    report(6, ok, f"max fit deviation {worst:.2e}, pinned value off by {specific:.2e}")
    assert worst < 1e-9
    assert specific < 1e-12


def test_criterion_07_dct_round_trip():
    rng = np.random.default_rng(700)
    worst_rt = worst_energy = 0.0
    for kind in ("dct-full", "dct8x8"):
        mode = TransformMode(kind)
        for _ in range(100):
            x = rng.uniform(0, 1, size=(3, 16, 16))
            coeffs = forward(mode, x)
            worst_rt = max(worst_rt, float(np.max(np.abs(inverse(mode, coeffs) - x))))
            worst_energy = max(worst_energy,
                               abs(np.linalg.norm(coeffs.ravel())
                                   - np.linalg.norm(x.ravel())))
    ok = worst_rt < 1e-6 and worst_energy < 1e-9
    report(7, ok, f"reconstruction {worst_rt:.2e}, energy drift {worst_energy:.2e}")
    assert worst_rt < 1e-6
    assert worst_energy < 1e-9


def test_criterion_08_query_accounting():
    rng = np.random.default_rng(800)
    for case in range(50):
        dim = int(rng.integers(6, 20))
        oracle, x_o, _ = halfspace_case(dim, int(rng.integers(10000)),
                                        dist=float(rng.uniform(0.1, 0.3)))
        config = SurFreeConfig(
            sign_search_steps=int(rng.integers(1, 4)),
            window_size=int(rng.integers(0, dim - 2)),
            theta_adapt_rate=float(rng.uniform(0.02, 0.2)),
            with_interpolation=bool(rng.integers(0, 2)),
            window_reset=bool(rng.integers(0, 2)),
            seed=case, query_budget=int(rng.integers(30, 120)), **PIXEL)
        result = run(oracle, x_o, config)
        assert result.queries_used == len(result.trace) == oracle.query_count
        assert result.queries_used <= config.query_budget
    report(8, True, "counter == trace length == queries_used <= budget "
                    "over 50 randomized runs")


def test_criterion_09_curve_monotonicity(halfspace_runs, linear_runs):
    checked = 0
    for rows in (halfspace_runs[10], halfspace_runs[100], linear_runs):
        for _, result in rows:
            curve = best_distortion_curve(result.trace)
            defined = [c for c in curve if c is not None]
            assert all(b <= a for a, b in zip(defined, defined[1:]))
            checked += 1
    report(9, True, f"all {checked} best-distortion curves non-increasing")


def test_criterion_10_remote_transparency(tmp_path):
    for seed in range(5):
        oracle_local, x_o, _ = halfspace_case(12, seed)
        oracle_served, _, _ = halfspace_case(12, seed)
        config = SurFreeConfig(window_reset=True, window_size=6, seed=seed,
                               query_budget=150, **PIXEL)
        local = run(oracle_local, x_o, config)
        with serve(oracle_served) as handle:
            remote_result = run(RemoteOracle(handle.url), x_o, config)
        assert local.trace == remote_result.trace
        local_csv = tmp_path / f"local_{seed}.csv"
        remote_csv = tmp_path / f"remote_{seed}.csv"
        export_trace(local.trace, local_csv)
        export_trace(remote_result.trace, remote_csv)
        assert local_csv.read_bytes() == remote_csv.read_bytes()
    report(10, True, "loopback HTTP runs reproduce local traces bitwise "
                     "(5 seeds)")


def test_criterion_11_subband_no_worse_than_pixel():
    budget = 200
    finals = {}
    for label, mode in (("dct", TransformMode("dct8x8", rho=0.5)),
                        ("pixel", TransformMode("pixel"))):
        values = []
        for seed in range(20):
            oracle, x_o, _ = linear_fixture(seed, model_k=16)
            config = SurFreeConfig(mode=mode, shaping=ShapingFunction("tanh"),
                                   window_size=50, window_reset=True,
                                   seed=seed + 2000, query_budget=budget)
            result = run(oracle, x_o, config, init_seed=seed)
            values.append(best_distortion_curve(result.trace, up_to_k=budget)[-1])
        finals[label] = float(np.mean(values))
    ok = finals["dct"] <= finals["pixel"]
    report(11, ok, f"mean d(200): subband {finals['dct']:.4f} <= "
                   f"pixel {finals['pixel']:.4f}")
    assert ok


def test_ball_oracle_ground_truth_supports_criteria():
    # sanity tie-in for the spherical fixture used by the library
    oracle = BallOracle(np.full(8, 0.5), radius=0.3)
    assert min_adversarial_distance(oracle, np.full(8, 0.5)) == 0.3
    config = SurFreeConfig(window_reset=True, window_size=4, seed=0,
                           query_budget=300, **PIXEL)
    result = run(oracle, np.full(8, 0.5), config)
    assert result.best_distortion == pytest.approx(0.3, rel=0.05)
