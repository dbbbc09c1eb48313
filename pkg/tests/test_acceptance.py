"""End-to-end reproduction of the reference numerical results.

One test per criterion; each prints a single ``criterion N: PASS`` line on
success (run with ``-s`` or check the pytest -v status lines) and carries an
explicit wall-clock budget. Known deliberate deviations are flagged in the
assertion messages: where the reference endpoint is a coarse-grid value, the
optimizer finds a strictly better certified optimum and the two-sided
tolerance cannot be met honestly.
"""

import time

import numpy as np
import pytest

from isacrelay import (
    FACTORIES,
    JointDistribution,
    OptimizerConfig,
    SimConfig,
    example1_family,
    gaussian_dmin_example2,
    gaussian_dmin_example3,
    lower_bound_cd,
    lower_bound_cmg,
    make_appendixC_counterexample,
    make_example1,
    make_example4,
    make_example5,
    make_example6,
    optimal_estimator,
    region_inclusion_check,
    simulate_distortion,
    tradeoff_curve,
)
from isacrelay.channels import assemble_joint
from isacrelay.estimator import expected_distortion
from isacrelay.verify import verify_estimator_optimality, verify_identities

CFG = OptimizerConfig()

#: curves produced by the endpoint criteria, re-checked for monotonicity in
#: criterion 7(e).
_CURVES = {}


def _monotone(rates, tol=1e-12):
    return all(b >= a - tol for a, b in zip(rates, rates[1:]))


def _elapsed_ok(t0, budget_s, label):
    dt = time.time() - t0
    assert dt <= budget_s, f"{label} took {dt:.0f}s > {budget_s}s budget"
    return dt


def test_criterion_1_deterministic_relay_observation_curve():
    """C4 curve: C_max = 0.6, D_min = 0, strictly above time sharing."""
    t0 = time.time()
    spec = make_example5(0.5, 0.2)
    grid = [round(0.05 * i, 2) for i in range(11)]
    curve = tradeoff_curve(spec, "c4", grid, CFG)
    _CURVES["c4"] = curve
    rates = curve.rates()
    assert all(p.feasible for p in curve.points)
    assert _monotone(rates)
    assert max(rates) == pytest.approx(0.6, abs=1e-3)
    assert curve.points[0].D == 0.0 and curve.points[0].feasible  # D_min = 0
    time_share_at_quarter = 0.25 / 0.5 * 0.6
    assert rates[grid.index(0.25)] > time_share_at_quarter + 0.05, \
        "no substantial gain over time sharing at D = 0.25"
    dt = _elapsed_ok(t0, 60, "criterion 1")
    print(f"criterion 1: PASS (C_max={max(rates):.4f}, C(0.25)={rates[5]:.4f}, "
          f"{dt:.0f}s)")


def test_criterion_2_orthogonal_sender_curve():
    """C3 curve endpoints: sensing point (0, 0) and C_max = 0.3444 ± 1e-3."""
    t0 = time.time()
    spec = make_example4(0.4, 0.2, 0.6)
    grid = [0.0, 0.02, 0.05, 0.08, spec.d_max]
    curve = tradeoff_curve(spec, "c3", grid, CFG)
    _CURVES["c3"] = curve
    rates = curve.rates()
    assert all(p.feasible for p in curve.points)
    assert _monotone(rates)
    assert curve.points[0].rate == pytest.approx(0.0, abs=1e-9)  # (D,R)=(0,0)
    assert max(rates) >= 0.3444 - 1e-3
    _elapsed_ok(t0, 300, "criterion 2")
    assert max(rates) == pytest.approx(0.3444, abs=1e-3), (
        f"C_max={max(rates):.6f}: the certified optimum exceeds the reference "
        "endpoint 0.3444, which matches a coarse 0.1-step input grid; the "
        "two-sided tolerance is deliberately left failing rather than "
        "capping the search")
    print(f"criterion 2: PASS (C_max={max(rates):.4f})")


def test_criterion_3_three_link_curve():
    """C5 curve: sensing point (0, 0.3219 ± 1e-3), C_max = 0.9375 ± 1e-3."""
    t0 = time.time()
    spec = make_example6(0.9, 0.8, 0.5)
    grid = [0.0, 0.02, 0.05, spec.d_max]
    curve = tradeoff_curve(spec, "c5", grid, CFG)
    _CURVES["c5"] = curve
    rates = curve.rates()
    assert all(p.feasible for p in curve.points)
    assert _monotone(rates)
    assert curve.points[0].rate == pytest.approx(0.3219, abs=1e-3)
    assert max(rates) >= 0.9375 - 1e-3
    _elapsed_ok(t0, 300, "criterion 3")
    assert max(rates) == pytest.approx(0.9375, abs=1e-3), (
        f"C_max={max(rates):.6f}: the certified optimum exceeds the reference "
        "endpoint 0.9375, which matches a coarse 0.1-step input grid; the "
        "two-sided tolerance is deliberately left failing rather than "
        "capping the search")
    print(f"criterion 3: PASS (R(0)={rates[0]:.4f}, C_max={max(rates):.4f})")


def test_criterion_4_restricted_family_lower_bound():
    """Restricted 5-parameter family: certified D = 0 point and R_max."""
    t0 = time.time()
    spec = make_example1(0.9, 0.1, 0.9)
    family = example1_family()
    at_zero = lower_bound_cd(spec, 0.0, CFG, family=family)
    # Zero distortion forces the sensing-optimal input, which carries no
    # information rate: the certified point is (D, R) = (0, 0).
    assert at_zero.feasible
    assert at_zero.best_value >= -1e-12
    unconstrained = lower_bound_cd(spec, spec.d_max, CFG, family=family)
    assert unconstrained.feasible
    assert unconstrained.best_value == pytest.approx(0.7177, abs=2e-3)
    dt = _elapsed_ok(t0, 600, "criterion 4")
    print(f"criterion 4: PASS (R(0)={at_zero.best_value:.4f}, "
          f"R_max={unconstrained.best_value:.4f}, {dt:.0f}s)")


def test_criterion_5_gaussian_closed_forms():
    assert gaussian_dmin_example2(1.0, 1.0, 1.0) == 1.0 / 3.0
    rng = np.random.default_rng(20260825)
    for _ in range(100):
        p1, s1, s2 = rng.uniform(1e-3, 50.0, size=3)
        ref2 = s1 * s2 / (p1 + s1 + s2)
        ref3 = s1 * s2 / (p1 + s2)
        assert abs(gaussian_dmin_example2(p1, s1, s2) - ref2) <= 1e-12 * ref2
        assert abs(gaussian_dmin_example3(p1, s1, s2) - ref3) <= 1e-12 * ref3
    print("criterion 5: PASS (exact value and 100 random triples)")


def test_criterion_6_hybrid_vs_compress_forward_separation():
    """The hybrid bound certifies (R, D) = (0.5, 0) where the
    compress-forward-only bound collapses to zero rate."""
    t0 = time.time()
    spec = make_appendixC_counterexample()
    hybrid = lower_bound_cd(spec, 0.0, CFG)
    assert hybrid.feasible
    assert hybrid.best_value == pytest.approx(0.5, abs=1e-6)
    cmg = lower_bound_cmg(spec, 0.0, CFG)
    cmg_rate = cmg.best_value if cmg.feasible else 0.0
    assert cmg_rate <= 1e-3
    dt = _elapsed_ok(t0, 300, "criterion 6")
    print(f"criterion 6: PASS (hybrid={hybrid.best_value:.6f}, "
          f"cf-only={cmg_rate:.2e}, {dt:.0f}s)")


_FACTORY_PARAMS = {
    "example1": (0.9, 0.1, 0.9),
    "example4": (0.4, 0.2, 0.6),
    "example5": (0.5, 0.2),
    "example6": (0.9, 0.8, 0.5),
    "appendixC": (),
}


def _factory_specs():
    return {name: FACTORIES[name](*args) for name, args in _FACTORY_PARAMS.items()}


def test_criterion_7_property_suites():
    # (a) information identities on 1000 fuzzed joints
    ok, detail = verify_identities(1000, seed=20260825)
    assert ok, f"(a) identities: {detail}"

    # (b) estimator optimality vs deterministic-table enumeration
    ok, detail = verify_estimator_optimality(2000, seed=20260825)
    assert ok, f"(b) estimator: {detail}"

    # (c) rate-region inclusion fuzz, 1000 inputs per factory channel
    for name, spec in _factory_specs().items():
        report = region_inclusion_check(spec, 1000, CFG)
        assert report.ok, f"(c) inclusion violations on {name}: {report.violations[:3]}"

    # (d) Monte Carlo matches the exact expected distortion within CI
    for name, spec in _factory_specs().items():
        factors = [
            JointDistribution([spec.x], np.full(spec.x.size, 1 / spec.x.size)),
            JointDistribution([spec.x1], np.full(spec.x1.size, 1 / spec.x1.size)),
        ]
        joint = assemble_joint(spec, factors)
        est = optimal_estimator(joint, ("x", "x1", "y"), "sd", spec.distortion)
        exact = expected_distortion(joint, est, "sd", spec.distortion)
        mean, ci = simulate_distortion(
            spec, factors, est,
            SimConfig(samples=1_000_000, rng_seed=20260825, batches=20),
            joint=joint)
        assert abs(mean - exact) <= ci, f"(d) {name}: |{mean}-{exact}| > {ci}"

    # (e) monotonicity of every produced curve
    if "c4" not in _CURVES:
        _CURVES["c4"] = tradeoff_curve(make_example5(0.5, 0.2), "c4",
                                       [0.0, 0.25, 0.5], CFG)
    for kind, curve in _CURVES.items():
        assert _monotone(curve.rates()), f"(e) {kind} curve not monotone"

    print("criterion 7: PASS (identities, estimator, inclusion, simulation, "
          "monotonicity)")
