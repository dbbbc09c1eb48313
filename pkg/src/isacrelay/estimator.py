"""Optimal symbol-by-symbol state estimation and exact expected distortion."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .probability import Alphabet, ConditionalKernel, JointDistribution


@dataclass(frozen=True)
class EstimatorTable:
    """Deterministic map from conditioning tuples to reconstruction symbols."""

    conditioning: tuple          # ordered variable names
    shape: tuple                 # alphabet sizes, same order
    table: np.ndarray            # int array over `shape`, values in [0, n_recon)
    n_reconstruction: int

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.intp)
        if t.shape != tuple(self.shape):
            raise ValueError(f"table shape {t.shape} != {self.shape}")
        if t.size and ((t < 0).any() or (t >= self.n_reconstruction).any()):
            raise ValueError("reconstruction symbol out of range")
        t.flags.writeable = False
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "conditioning", tuple(self.conditioning))
        object.__setattr__(self, "shape", tuple(self.shape))

    def __call__(self, *symbols: int) -> int:
        return int(self.table[symbols])

    def as_kernel(self, given: Sequence[Alphabet], output: Alphabet) -> ConditionalKernel:
        """The estimator as a deterministic conditional kernel (for composition)."""
        if tuple(v.name for v in given) != self.conditioning:
            raise ValueError("kernel variables must match the conditioning order")
        probs = np.zeros(self.shape + (output.size,))
        flat = probs.reshape(-1, output.size)
        flat[np.arange(flat.shape[0]), self.table.ravel()] = 1.0
        return ConditionalKernel(given, [output], probs)

    def to_json(self) -> str:
        return json.dumps({
            "conditioning": list(self.conditioning),
            "shape": list(self.shape),
            "n_reconstruction": self.n_reconstruction,
            "table": self.table.ravel().tolist(),
        }, indent=2)

    @staticmethod
    def from_json(text: str) -> "EstimatorTable":
        doc = json.loads(text)
        shape = tuple(doc["shape"])
        return EstimatorTable(tuple(doc["conditioning"]), shape,
                              np.asarray(doc["table"], dtype=np.intp).reshape(shape),
                              int(doc["n_reconstruction"]))


def _posterior_tensor(joint: JointDistribution, conditioning: Sequence[str],
                      target: str) -> tuple[np.ndarray, tuple]:
    """Unnormalized P(conditioning tuple, target), one row per tuple."""
    conditioning = tuple(conditioning)
    sub = joint.marginalize(conditioning + (target,))
    t = sub.tensor(conditioning + (target,))
    shape = tuple(sub.alphabet(n).size for n in conditioning)
    return t.reshape(-1, sub.alphabet(target).size), shape


def optimal_estimator(joint: JointDistribution, conditioning: Sequence[str],
                      target: str, distortion: np.ndarray) -> EstimatorTable:
    """Bayes-optimal deterministic estimator of ``target`` given the tuple.

    For every positive-mass conditioning tuple the output minimizes
    sum_sd P(sd | tuple) d(sd, ŝd); ties break to the lowest symbol, and
    zero-mass tuples map to symbol 0.
    """
    d = np.asarray(distortion, dtype=np.float64)
    post, shape = _posterior_tensor(joint, conditioning, target)
    risk = post @ d                       # rows: tuples, cols: reconstructions
    table = np.argmin(risk, axis=1)       # argmin takes the first minimizer
    table[post.sum(axis=1) <= 0.0] = 0
    return EstimatorTable(tuple(conditioning), shape, table.reshape(shape), d.shape[1])


def expected_distortion(joint: JointDistribution, est: EstimatorTable,
                        target: str, distortion: np.ndarray) -> float:
    """Exact E[d(target, est(conditioning))] under the joint."""
    d = np.asarray(distortion, dtype=np.float64)
    post, shape = _posterior_tensor(joint, est.conditioning, target)
    if shape != est.shape:
        raise ValueError(f"joint alphabet sizes {shape} != estimator table {est.shape}")
    picked = d[:, est.table.ravel()].T     # (tuples, sd)
    return float((post * picked).sum())


def optimal_expected_distortion(joint: JointDistribution, conditioning: Sequence[str],
                                target: str, distortion: np.ndarray) -> float:
    """Bayes risk of the optimal estimator, computed in one pass."""
    d = np.asarray(distortion, dtype=np.float64)
    post, _ = _posterior_tensor(joint, conditioning, target)
    return float((post @ d).min(axis=1).sum())
