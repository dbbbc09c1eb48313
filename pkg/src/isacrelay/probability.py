"""Exact probability algebra on finite alphabets.

Everything is a dense float64 tensor indexed by symbol tuples. All
distributions are immutable after construction and safe to share across
workers. Logs are base 2 throughout, with the 0 log 0 = 0 convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .backend import cond_mi_bits, entropy_bits
from .errors import ConditioningError, DomainError, FactorizationError

#: normalization drift tolerated silently (renormalized); beyond this it is
#: treated as a construction error.
NORM_TOL = 1e-9


# ---------------------------------------------------------------------------
# scalar helpers
# ---------------------------------------------------------------------------

def h2(t: float) -> float:
    """Binary entropy in bits; h2(0) = h2(1) = 0."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"h2 argument {t} outside [0, 1]")
    if t in (0.0, 1.0):
        return 0.0
    return -t * math.log2(t) - (1.0 - t) * math.log2(1.0 - t)


def h3(t1: float, t2: float) -> float:
    """Ternary entropy -t1 log t1 - t2 log t2 - (1-t1-t2) log(1-t1-t2)."""
    if t1 < 0.0 or t2 < 0.0 or t1 + t2 > 1.0 + 1e-15:
        raise DomainError(f"h3 arguments ({t1}, {t2}) outside the simplex")
    t3 = max(0.0, 1.0 - t1 - t2)
    acc = 0.0
    for t in (t1, t2, t3):
        if t > 0.0:
            acc -= t * math.log2(t)
    return acc


def conv(p1: float, p2: float) -> float:
    """Binary convolution p1(1-p2) + (1-p1)p2."""
    for p in (p1, p2):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"conv argument {p} outside [0, 1]")
    return p1 * (1.0 - p2) + (1.0 - p1) * p2


def h2_inverse(value: float, tol: float = 1e-12) -> float:
    """Lower branch of the inverse binary entropy: t in [0, 1/2] with h2(t)=value."""
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"h2_inverse argument {value} outside [0, 1]")
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h2(mid) < value:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# labeled tensors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Alphabet:
    """A named finite alphabet with symbols 0..size-1."""

    name: str
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise DomainError(f"alphabet {self.name!r} must have size >= 1")


VarNames = Union[str, Iterable[str]]


def _as_names(spec: VarNames) -> tuple[str, ...]:
    if isinstance(spec, str):
        return (spec,)
    return tuple(spec)


class JointDistribution:
    """A pmf over an ordered tuple of alphabets, stored densely."""

    __slots__ = ("variables", "probs")

    def __init__(self, variables: Sequence[Alphabet], probs, *, _trusted=False):
        variables = tuple(variables)
        probs = np.asarray(probs, dtype=np.float64)
        if not _trusted:
            names = [v.name for v in variables]
            if len(set(names)) != len(names):
                raise FactorizationError(f"duplicate variable names in {names}")
            shape = tuple(v.size for v in variables)
            if probs.shape != shape:
                raise ValueError(f"tensor shape {probs.shape} != alphabet sizes {shape}")
            if (probs < -1e-12).any():
                raise ValueError("negative probability cell")
            probs = np.clip(probs, 0.0, None)
            total = probs.sum()
            if abs(total - 1.0) > NORM_TOL:
                raise ValueError(f"probabilities sum to {total}, not 1")
            probs = probs / total
        probs.flags.writeable = False
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "probs", probs)

    def __setattr__(self, name, value):
        raise AttributeError("JointDistribution is immutable")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def axis(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise NameError(f"unknown variable {name!r}; have {self.names}")

    def alphabet(self, name: str) -> Alphabet:
        return self.variables[self.axis(name)]

    def marginalize(self, keep: VarNames) -> "JointDistribution":
        """Sum out all variables not in ``keep``; kept order follows self."""
        keep_set = set(_as_names(keep))
        for name in keep_set:
            self.axis(name)  # NameError on unknown
        kept = [v for v in self.variables if v.name in keep_set]
        drop = tuple(i for i, v in enumerate(self.variables) if v.name not in keep_set)
        probs = self.probs.sum(axis=drop) if drop else self.probs
        return JointDistribution(kept, np.ascontiguousarray(probs), _trusted=True)

    def condition(self, on: Mapping[str, int]) -> "JointDistribution":
        """Bayes-normalized slice over the remaining variables."""
        index = [slice(None)] * len(self.variables)
        for name, symbol in on.items():
            ax = self.axis(name)
            if not 0 <= symbol < self.variables[ax].size:
                raise DomainError(f"symbol {symbol} outside alphabet {name!r}")
            index[ax] = symbol
        sliced = self.probs[tuple(index)]
        mass = sliced.sum()
        if mass <= 1e-15:
            raise ConditioningError(f"conditioning event {dict(on)} has zero probability")
        kept = [v for v in self.variables if v.name not in on]
        return JointDistribution(kept, np.ascontiguousarray(sliced / mass), _trusted=True)

    def tensor(self, order: Sequence[str]) -> np.ndarray:
        """The probability tensor transposed into the given variable order."""
        order = list(order)
        if set(order) != set(self.names) or len(order) != len(self.names):
            raise NameError(f"order {order} must be a permutation of {self.names}")
        return self.probs.transpose([self.axis(n) for n in order])

    def split_variable(self, name: str, parts: Sequence[Alphabet]) -> "JointDistribution":
        """Expand a row-major composite variable into its components."""
        ax = self.axis(name)
        sizes = tuple(p.size for p in parts)
        if int(np.prod(sizes)) != self.variables[ax].size:
            raise ValueError(f"parts {sizes} do not factor {self.variables[ax].size}")
        shape = self.probs.shape[:ax] + sizes + self.probs.shape[ax + 1:]
        variables = self.variables[:ax] + tuple(parts) + self.variables[ax + 1:]
        return JointDistribution(variables, self.probs.reshape(shape), _trusted=True)


class ConditionalKernel:
    """A stochastic map: for each tuple over ``given``, a pmf over ``output``."""

    __slots__ = ("given", "output", "probs")

    def __init__(self, given: Sequence[Alphabet], output: Sequence[Alphabet], probs,
                 *, _trusted=False):
        given = tuple(given)
        output = tuple(output)
        probs = np.asarray(probs, dtype=np.float64)
        shape = tuple(v.size for v in given) + tuple(v.size for v in output)
        if probs.shape != shape:
            raise ValueError(f"kernel shape {probs.shape} != {shape}")
        if not _trusted:
            if (probs < -1e-12).any():
                raise ValueError("negative kernel entry")
            probs = np.clip(probs, 0.0, None)
            out_axes = tuple(range(len(given), len(given) + len(output)))
            row_sums = probs.sum(axis=out_axes, keepdims=True)
            if np.abs(row_sums - 1.0).max() > NORM_TOL:
                raise ValueError("kernel rows do not sum to 1")
            probs = probs / row_sums
        probs.flags.writeable = False
        object.__setattr__(self, "given", given)
        object.__setattr__(self, "output", output)
        object.__setattr__(self, "probs", probs)

    def __setattr__(self, name, value):
        raise AttributeError("ConditionalKernel is immutable")


Factor = Union[JointDistribution, ConditionalKernel]


def compose(factors: Sequence[Factor]) -> JointDistribution:
    """Multiply a chain of factors into the full joint.

    Every kernel's conditioning variables must be produced by an earlier
    factor, and no variable may be produced twice.
    """
    variables: list[Alphabet] = []
    seen: dict[str, Alphabet] = {}
    plans = []
    for f in factors:
        if isinstance(f, JointDistribution):
            given, out = (), f.variables
        else:
            given, out = f.given, f.output
        for v in given:
            have = seen.get(v.name)
            if have is None:
                raise FactorizationError(f"dangling conditioning variable {v.name!r}")
            if have.size != v.size:
                raise FactorizationError(f"alphabet mismatch for {v.name!r}")
        for v in out:
            if v.name in seen:
                raise FactorizationError(f"variable {v.name!r} produced twice")
            seen[v.name] = v
            variables.append(v)
        plans.append((f, given + tuple(out)))

    index = {v.name: i for i, v in enumerate(variables)}
    shape = tuple(v.size for v in variables)
    result = np.ones(shape, dtype=np.float64)
    for f, axes_vars in plans:
        axes = [index[v.name] for v in axes_vars]
        order = np.argsort(axes)
        arr = f.probs.transpose(order)
        view_shape = [1] * len(shape)
        for ax in sorted(axes):
            view_shape[ax] = shape[ax]
        result = result * arr.reshape(view_shape)

    total = result.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise FactorizationError(f"composed product sums to {total}, not 1")
    return JointDistribution(variables, result / total, _trusted=True)


# ---------------------------------------------------------------------------
# information measures
# ---------------------------------------------------------------------------

def _validate_groups(j: JointDistribution, *groups: tuple[str, ...]):
    flat: list[str] = []
    for g in groups:
        for name in g:
            j.axis(name)  # NameError on unknown
            flat.append(name)
    if len(set(flat)) != len(flat):
        raise NameError(f"variable groups overlap: {groups}")


def _grouped_tensor(j: JointDistribution, *groups: tuple[str, ...]) -> np.ndarray:
    """Marginalize to the union and reshape to one axis per group."""
    union = [n for g in groups for n in g]
    sub = j.marginalize(union)
    t = sub.tensor(union)
    sizes = []
    start = 0
    for g in groups:
        n = 1
        for name in g:
            n *= sub.alphabet(name).size
        sizes.append(n)
        start += len(g)
    return np.ascontiguousarray(t.reshape(sizes))


def entropy(j: JointDistribution, a: VarNames, given: VarNames = ()) -> float:
    """H(A | C) in bits."""
    a = _as_names(a)
    given = _as_names(given)
    if not a:
        raise NameError("entropy requires a nonempty variable set")
    _validate_groups(j, a, given)
    if not given:
        return entropy_bits(_grouped_tensor(j, a))
    t = _grouped_tensor(j, given, a)
    return entropy_bits(t) - entropy_bits(t.sum(axis=1))


def mutual_information(j: JointDistribution, a: VarNames, b: VarNames,
                       given: VarNames = ()) -> float:
    """I(A ; B | C) in bits."""
    a = _as_names(a)
    b = _as_names(b)
    given = _as_names(given)
    _validate_groups(j, a, b, given)
    if not a or not b:
        return 0.0
    t = _grouped_tensor(j, given, a, b)
    return cond_mi_bits(t)
