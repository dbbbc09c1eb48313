"""Constrained maximization over products of probability simplices.

The objectives here (min-of-mutual-informations) are continuous but not
concave, so the search is multistart: an adaptive coarse lattice (falling back
to random sampling when full enumeration exceeds the budget), caller-supplied
candidate starts, and Nelder-Mead refinement of the best seeds on a
quadratic-penalty objective, followed by a vertex-snapping polish.  Every
reported value is re-certified by strict evaluation at the returned point, so
results are always sound lower bounds of the true maximum.  Runs are
deterministic given the configuration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, prod
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .probability import ConditionalKernel, Factor, JointDistribution


@dataclass(frozen=True)
class OptimizerConfig:
    grid_points_per_dim: int = 9
    refine_iterations: int = 300
    refine_step_init: float = 0.15
    seeds: int = 8
    rng_seed: int = 20260825
    feasibility_slack: float = 1e-9
    penalty_weight: float = 1e4
    max_grid_evals: int = 60_000
    random_samples: int = 2_000

    def __post_init__(self):
        for name in ("grid_points_per_dim", "refine_iterations", "seeds",
                     "max_grid_evals", "random_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("refine_step_init", "feasibility_slack", "penalty_weight"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


# ---------------------------------------------------------------------------
# parameter spaces
# ---------------------------------------------------------------------------

def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[rho - 1] / rho
    return np.clip(v - theta, 0.0, None)


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


class SimplexProduct:
    """Parameter space: one probability simplex per kernel row."""

    def __init__(self, block_sizes: Sequence[int]):
        self.block_sizes = tuple(int(b) for b in block_sizes)
        if any(b < 1 for b in self.block_sizes):
            raise ValueError("simplex blocks must have size >= 1")
        offs = np.cumsum((0,) + self.block_sizes)
        self.slices = [slice(int(offs[i]), int(offs[i + 1]))
                       for i in range(len(self.block_sizes))]
        self.dim = int(offs[-1])

    def project(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=np.float64)
        out = np.empty(self.dim)
        for sl in self.slices:
            out[sl] = _project_simplex(theta[sl])
        return out

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        out = np.empty(self.dim)
        for sl, b in zip(self.slices, self.block_sizes):
            out[sl] = rng.dirichlet(np.ones(b))
        return out

    def lattice_count(self, subdivisions: int) -> int:
        return prod(comb(subdivisions + b - 1, b - 1) for b in self.block_sizes)

    def lattice(self, subdivisions: int):
        per_block = [
            [np.asarray(c, dtype=np.float64) / subdivisions
             for c in _compositions(subdivisions, b)]
            for b in self.block_sizes
        ]
        for combo in itertools.product(*per_block):
            yield np.concatenate(combo)

    def encode(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        """Flatten one pmf per block into a theta vector."""
        if len(blocks) != len(self.block_sizes):
            raise ValueError("wrong number of blocks")
        parts = []
        for b, size in zip(blocks, self.block_sizes):
            arr = np.asarray(b, dtype=np.float64).ravel()
            if arr.size != size:
                raise ValueError(f"block size {arr.size} != {size}")
            parts.append(arr)
        return self.project(np.concatenate(parts))


class UnitBox:
    """Parameter space: a hypercube of free probabilities in [0, 1]^n."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)

    def project(self, theta: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(theta, dtype=np.float64), 0.0, 1.0)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(0.0, 1.0, self.dim)

    def lattice_count(self, subdivisions: int) -> int:
        return (subdivisions + 1) ** self.dim

    def lattice(self, subdivisions: int):
        axis = np.linspace(0.0, 1.0, subdivisions + 1)
        for combo in itertools.product(axis, repeat=self.dim):
            yield np.asarray(combo)


# ---------------------------------------------------------------------------
# factored inputs (the optimization variable of the bound problems)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorTemplate:
    """Shape of one factor: a pmf over `output` for each `given` tuple."""

    given: tuple
    output: tuple

    @property
    def rows(self) -> int:
        return prod(v.size for v in self.given) if self.given else 1

    @property
    def cols(self) -> int:
        return prod(v.size for v in self.output)


@dataclass(frozen=True)
class FactoredInput:
    """A point of a factored-pmf family: templates plus a flat theta vector."""

    templates: tuple
    theta: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.theta, dtype=np.float64)
        t.flags.writeable = False
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "templates", tuple(self.templates))

    def factors(self) -> list[Factor]:
        out: list[Factor] = []
        pos = 0
        for tpl in self.templates:
            n = tpl.rows * tpl.cols
            block = self.theta[pos:pos + n]
            pos += n
            if tpl.given:
                shape = tuple(v.size for v in tpl.given) + tuple(v.size for v in tpl.output)
                out.append(ConditionalKernel(tpl.given, tpl.output, block.reshape(shape)))
            else:
                shape = tuple(v.size for v in tpl.output)
                out.append(JointDistribution(tpl.output, block.reshape(shape)))
        if pos != self.theta.size:
            raise ValueError("theta length does not match templates")
        return out


def space_for(templates: Sequence[FactorTemplate]) -> SimplexProduct:
    blocks = []
    for tpl in templates:
        blocks.extend([tpl.cols] * tpl.rows)
    return SimplexProduct(blocks)


def encode_factors(templates: Sequence[FactorTemplate],
                   space: SimplexProduct, tables: Sequence[np.ndarray]) -> np.ndarray:
    """Theta for explicit row-stochastic tables, one per template."""
    blocks = []
    for tpl, table in zip(templates, tables):
        arr = np.asarray(table, dtype=np.float64).reshape(tpl.rows, tpl.cols)
        blocks.extend(list(arr))
    return space.encode(blocks)


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptResult:
    best_value: float
    best_theta: Optional[np.ndarray]
    feasible: bool
    evaluations: int
    best_input: Optional[FactoredInput] = None

    def __post_init__(self):
        if self.best_theta is not None:
            t = np.asarray(self.best_theta, dtype=np.float64)
            t.flags.writeable = False
            object.__setattr__(self, "best_theta", t)


class _Tracker:
    """Keeps the best strictly feasible point seen so far."""

    def __init__(self, objective, constraints, slack):
        self.objective = objective
        self.constraints = constraints
        self.slack = slack
        self.best_value = -np.inf
        self.best_theta = None
        self.evaluations = 0

    def evaluate(self, theta: np.ndarray) -> tuple[float, float]:
        """Returns (objective value, constraint violation >= 0)."""
        self.evaluations += 1
        violation = 0.0
        for c in self.constraints:
            violation = max(violation, -float(c(theta)))
        value = float(self.objective(theta))
        if violation <= self.slack and value > self.best_value:
            self.best_value = value
            self.best_theta = theta.copy()
        return value, violation


def _snap_candidates(theta: np.ndarray, space) -> list[np.ndarray]:
    out = []
    for thresh in (1e-6, 1e-3):
        snapped = theta.copy()
        snapped[snapped < thresh] = 0.0
        snapped[snapped > 1.0 - thresh] = 1.0
        out.append(space.project(snapped))
    return out


def maximize(objective: Callable[[np.ndarray], float],
             constraints: Sequence[Callable[[np.ndarray], float]],
             space, cfg: OptimizerConfig,
             candidates: Sequence[np.ndarray] = ()) -> OptResult:
    """Maximize `objective` subject to every constraint being >= 0.

    `candidates` are extra start points (already in the space's coordinates);
    they are projected and evaluated exactly like lattice points.  The
    returned value is always attained at `best_theta` under strict
    re-evaluation; infeasibility is reported, not raised.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    tracker = _Tracker(objective, constraints, cfg.feasibility_slack)

    scored: list[tuple[float, float, np.ndarray]] = []   # (penalized, value, theta)

    def probe(theta: np.ndarray):
        theta = space.project(theta)
        value, violation = tracker.evaluate(theta)
        scored.append((value - cfg.penalty_weight * violation ** 2, value, theta))

    for cand in candidates:
        probe(np.asarray(cand, dtype=np.float64))

    subdivisions = None
    for g in range(max(cfg.grid_points_per_dim - 1, 1), 0, -1):
        if space.lattice_count(g) <= cfg.max_grid_evals:
            subdivisions = g
            break
    if subdivisions is not None:
        for theta in space.lattice(subdivisions):
            probe(theta)
    else:
        for _ in range(min(cfg.max_grid_evals, cfg.random_samples * 4)):
            probe(space.sample(rng))
    for _ in range(cfg.random_samples):
        probe(space.sample(rng))

    # refinement seeds: best penalized scores, deduplicated coarsely.
    # Simplex refinement degrades in very high dimension, so spend less there.
    n_seeds = cfg.seeds if space.dim <= 64 else max(2, cfg.seeds // 2)
    fev_cap = (min(space.dim, 24) if space.dim <= 64 else 12) + 1
    scored.sort(key=lambda t: -t[0])
    seeds: list[np.ndarray] = []
    for _, _, theta in scored:
        if len(seeds) >= n_seeds:
            break
        if all(np.abs(theta - s).max() > 1e-6 for s in seeds):
            seeds.append(theta)

    def penalized(theta: np.ndarray) -> float:
        theta = space.project(theta)
        value, violation = tracker.evaluate(theta)
        return -(value - cfg.penalty_weight * violation ** 2)

    for start in seeds:
        n = space.dim
        init = np.tile(start, (n + 1, 1))
        for i in range(n):
            init[i + 1, i] += cfg.refine_step_init
        res = minimize(penalized, start, method="Nelder-Mead",
                       options={"maxfev": cfg.refine_iterations * fev_cap,
                                "xatol": 1e-8, "fatol": 1e-11,
                                "initial_simplex": init})
        polished = space.project(res.x)
        tracker.evaluate(polished)
        for cand in _snap_candidates(polished, space):
            tracker.evaluate(cand)

    if tracker.best_theta is not None:
        for cand in _snap_candidates(tracker.best_theta, space):
            tracker.evaluate(cand)

    if tracker.best_theta is None:
        return OptResult(-np.inf, None, False, tracker.evaluations)

    # strict re-certification from scratch
    theta = tracker.best_theta
    value = float(objective(theta))
    ok = all(float(c(theta)) >= -cfg.feasibility_slack for c in constraints)
    return OptResult(value, theta, bool(ok), tracker.evaluations)


def sweep(objective: Callable[[np.ndarray], float],
          constraints_at: Callable[[float], Sequence[Callable[[np.ndarray], float]]],
          space, d_grid: Sequence[float], cfg: OptimizerConfig,
          candidates: Sequence[np.ndarray] = ()) -> list[tuple[float, OptResult]]:
    """One constrained maximization per distortion level, ascending.

    Warm-starts each level with all previous optima and enforces curve
    monotonicity soundly: a point feasible at D stays feasible at D' > D, so
    carrying the best prior point forward only ever re-certifies real values.
    """
    if list(d_grid) != sorted(d_grid):
        raise ValueError("d_grid must be ascending")
    results: list[tuple[float, OptResult]] = []
    carried: list[np.ndarray] = list(candidates)
    for d in d_grid:
        res = maximize(objective, constraints_at(d), space, cfg, candidates=carried)
        if res.best_theta is not None:
            carried = [res.best_theta] + carried
        results.append((float(d), res))
    return results
