"""Reusable verification harnesses (shared by the CLI and the test suite)."""

from __future__ import annotations

import itertools
from math import prod

import numpy as np

from .channels import FACTORIES, RelayChannelSpec, assemble_joint
from .estimator import expected_distortion, optimal_estimator
from .probability import (
    Alphabet,
    ConditionalKernel,
    JointDistribution,
    compose,
    entropy,
    mutual_information,
)

IDENTITY_TOL = 1e-10


def random_joint(rng: np.random.Generator, sizes) -> JointDistribution:
    variables = [Alphabet(f"z{i}", s) for i, s in enumerate(sizes)]
    probs = rng.dirichlet(np.ones(prod(sizes))).reshape(tuple(sizes))
    return JointDistribution(variables, probs)


def verify_identities(fuzz: int, seed: int) -> tuple[bool, str]:
    """Nonnegativity, chain rule, data processing and entropy bounds on
    random joints with alphabet sizes <= 4."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(fuzz):
        sizes = rng.integers(2, 5, size=4)
        j = random_joint(rng, sizes)
        a, b, c, d = j.names
        # nonnegativity
        worst = max(worst, -mutual_information(j, a, b, (c, d)))
        # chain rule I(A;BC|D) = I(A;B|D) + I(A;C|BD)
        lhs = mutual_information(j, a, (b, c), d)
        rhs = mutual_information(j, a, b, d) + mutual_information(j, a, c, (b, d))
        worst = max(worst, abs(lhs - rhs))
        # entropy upper bound
        worst = max(worst, entropy(j, a) - np.log2(j.alphabet(a).size))
        # data processing on a composed chain A -> B -> C
        na, nb, nc = (int(s) for s in rng.integers(2, 5, size=3))
        av, bv, cv = Alphabet("a", na), Alphabet("b", nb), Alphabet("c", nc)
        pa = JointDistribution([av], rng.dirichlet(np.ones(na)))
        kb = ConditionalKernel([av], [bv], rng.dirichlet(np.ones(nb), size=na))
        kc = ConditionalKernel([bv], [cv], rng.dirichlet(np.ones(nc), size=nb))
        chain = compose([pa, kb, kc])
        worst = max(worst, mutual_information(chain, "a", "c")
                    - mutual_information(chain, "a", "b"))
        if worst > IDENTITY_TOL:
            return False, f"identity violated by {worst:.3e} > {IDENTITY_TOL}"
    return True, f"{fuzz} joints, worst residual {worst:.3e} <= {IDENTITY_TOL}"


def _default_specs() -> list[RelayChannelSpec]:
    return [
        FACTORIES["example1"](0.9, 0.1, 0.9),
        FACTORIES["example4"](0.4, 0.2, 0.6),
        FACTORIES["example5"](0.5, 0.2),
        FACTORIES["example6"](0.9, 0.8, 0.5),
        FACTORIES["appendixC"](),
    ]


def estimator_optimality_gap(spec: RelayChannelSpec, conditioning,
                             rng: np.random.Generator,
                             random_tables: int = 10_000) -> float:
    """Worst margin by which any competing deterministic estimator beats the
    optimal one (positive would indicate a bug).

    Enumerates all deterministic tables when there are at most 10^6 of them,
    otherwise samples random tables.
    """
    joint = assemble_joint(spec, [
        JointDistribution([spec.x], rng.dirichlet(np.ones(spec.x.size))),
        JointDistribution([spec.x1], rng.dirichlet(np.ones(spec.x1.size))),
    ])
    best = optimal_estimator(joint, conditioning, "sd", spec.distortion)
    best_risk = expected_distortion(joint, best, "sd", spec.distortion)
    n_cells = int(np.prod(best.shape))
    n_rec = spec.reconstruction.size
    worst_gap = -np.inf

    def risk_of(flat_table: np.ndarray) -> float:
        from .estimator import EstimatorTable
        est = EstimatorTable(best.conditioning, best.shape,
                             flat_table.reshape(best.shape), n_rec)
        return expected_distortion(joint, est, "sd", spec.distortion)

    if n_rec ** n_cells <= 10 ** 6:
        for combo in itertools.product(range(n_rec), repeat=n_cells):
            worst_gap = max(worst_gap, best_risk - risk_of(np.asarray(combo)))
    else:
        for _ in range(random_tables):
            table = rng.integers(0, n_rec, size=n_cells)
            worst_gap = max(worst_gap, best_risk - risk_of(table))
    return worst_gap


def verify_estimator_optimality(random_tables: int, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for spec in _default_specs():
        gap = estimator_optimality_gap(spec, ("x", "x1", "y"), rng,
                                       random_tables=random_tables)
        worst = max(worst, gap)
        if worst > 1e-12:
            return False, f"competing estimator wins by {worst:.3e}"
    return True, f"all factory channels, worst margin {worst:.3e} <= 1e-12"
