import math

import numpy as np
import pytest

from isacrelay import OptimizerConfig, maximize
from isacrelay.optimizer import (
    SimplexProduct,
    UnitBox,
    _project_simplex,
    sweep,
)


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def test_project_simplex():
    p = _project_simplex(np.array([0.2, 0.8]))
    np.testing.assert_allclose(p, [0.2, 0.8])
    p = _project_simplex(np.array([10.0, 0.0, 0.0]))
    np.testing.assert_allclose(p, [1.0, 0.0, 0.0])
    p = _project_simplex(np.array([-5.0, -5.0]))
    assert p.sum() == pytest.approx(1.0)
    assert (p >= 0).all()


def test_simplex_product_lattice_and_encode():
    sp = SimplexProduct([2, 3])
    assert sp.dim == 5
    assert sp.lattice_count(2) == 3 * 6
    pts = list(sp.lattice(2))
    assert len(pts) == 18
    for t in pts:
        assert t[:2].sum() == pytest.approx(1.0)
        assert t[2:].sum() == pytest.approx(1.0)
    theta = sp.encode([np.array([0.3, 0.7]), np.array([0.2, 0.2, 0.6])])
    np.testing.assert_allclose(theta, [0.3, 0.7, 0.2, 0.2, 0.6], atol=1e-12)
    with pytest.raises(ValueError):
        sp.encode([np.array([1.0])])


def test_unit_box():
    box = UnitBox(3)
    assert box.lattice_count(2) == 27
    np.testing.assert_allclose(box.project(np.array([-1.0, 0.5, 2.0])),
                               [0.0, 0.5, 1.0])


def test_unconstrained_entropy_peak():
    """max H(p) over the 3-simplex is log2(3) at the uniform point."""
    space = SimplexProduct([3])
    cfg = OptimizerConfig(grid_points_per_dim=7, refine_iterations=80, seeds=4)
    res = maximize(_entropy, [], space, cfg)
    assert res.feasible
    assert res.best_value == pytest.approx(math.log2(3), abs=1e-6)
    np.testing.assert_allclose(res.best_theta, [1 / 3] * 3, atol=1e-4)


def test_constrained_optimum_on_boundary():
    """max p0 subject to p0 <= 0.4 lands exactly on the constraint."""
    space = SimplexProduct([2])
    cfg = OptimizerConfig(grid_points_per_dim=9, refine_iterations=80, seeds=4)
    res = maximize(lambda t: t[0], [lambda t: 0.4 - t[0]], space, cfg)
    assert res.feasible
    assert res.best_value == pytest.approx(0.4, abs=1e-6)
    assert res.best_value <= 0.4 + 1e-9  # never reports an infeasible value


def test_infeasible_problem_reported_not_raised():
    space = SimplexProduct([2])
    cfg = OptimizerConfig(grid_points_per_dim=5, refine_iterations=20, seeds=2)
    res = maximize(lambda t: t[0], [lambda t: -1.0], space, cfg)
    assert not res.feasible
    assert res.best_theta is None


def test_deterministic_given_seed():
    space = SimplexProduct([4, 4])

    def objective(t):
        return float(-(np.asarray(t) ** 2).sum())

    cfg = OptimizerConfig(grid_points_per_dim=3, refine_iterations=40, seeds=3)
    r1 = maximize(objective, [], space, cfg)
    r2 = maximize(objective, [], space, cfg)
    assert r1.best_value == r2.best_value
    np.testing.assert_array_equal(r1.best_theta, r2.best_theta)


def test_candidates_are_honored():
    """An exact candidate start point is kept when it beats the search."""
    target = np.array([0.123, 0.877])
    space = SimplexProduct([2])
    cfg = OptimizerConfig(grid_points_per_dim=2, refine_iterations=1, seeds=1)
    res = maximize(lambda t: -abs(t[0] - target[0]), [], space, cfg,
                   candidates=[target])
    assert res.best_value == pytest.approx(0.0, abs=1e-12)


def test_reported_value_attained_at_theta():
    """best_value is always a strict re-evaluation of best_theta."""
    space = SimplexProduct([3])
    cfg = OptimizerConfig(grid_points_per_dim=5, refine_iterations=40, seeds=2)
    res = maximize(_entropy, [lambda t: 0.9 - t[0]], space, cfg)
    assert res.feasible
    assert _entropy(np.asarray(res.best_theta)) == pytest.approx(res.best_value,
                                                                 abs=1e-12)
    assert 0.9 - res.best_theta[0] >= -cfg.feasibility_slack


def test_sweep_warm_start_monotone():
    """Relaxing the constraint level can only improve the swept optimum."""
    space = SimplexProduct([2])
    cfg = OptimizerConfig(grid_points_per_dim=5, refine_iterations=30, seeds=2)
    levels = [0.2, 0.4, 0.6, 0.8]
    results = sweep(lambda t: t[0],
                    lambda level: [lambda t, lv=level: lv - t[0]],
                    space, levels, cfg)
    values = [r.best_value for _, r in results]
    assert values == sorted(values)
    assert values[-1] == pytest.approx(0.8, abs=1e-4)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(seeds=0)
    with pytest.raises(ValueError):
        OptimizerConfig(refine_step_init=-1.0)
