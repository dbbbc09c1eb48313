"""Capacity-distortion bounds, exact class solutions and closed forms.

Each bound is an objective/constraint bundle over a factored input family,
handed to :mod:`isacrelay.optimizer`.  All rates are in bits.  Reported
achievable values are certified: the optimizer re-evaluates objective and
constraints at the returned point from scratch.

The general upper bound optimizes P(X,X1) and a compression auxiliary T of the
relay observation; the general lower bound realizes the
hybrid-partial-decode-and-compress-forward family with auxiliaries U, A
(decoded part) and V (compressed part).  The alternative
joint-decoding (Chong-Motani-Garg style) lower bound shares the same family
but uses a stricter decodability constraint; its region is provably included
in the main lower bound's, which `region_inclusion_check` verifies
numerically per sampled input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .channels import RelayChannelSpec, assemble_joint
from .errors import DomainError
from .estimator import optimal_expected_distortion
from .optimizer import (
    FactoredInput,
    FactorTemplate,
    OptimizerConfig,
    OptResult,
    SimplexProduct,
    UnitBox,
    encode_factors,
    maximize,
    space_for,
)
from .probability import (
    Alphabet,
    ConditionalKernel,
    JointDistribution,
    conv,
    h2,
    h3,
    mutual_information,
)

KINDS = ("upper_thm", "lower_hybrid", "lower_cmg", "dmin", "dmin_c1", "dmin_c2",
         "c3", "c4", "c5")


def default_cardinalities(spec: RelayChannelSpec) -> tuple[int, int, int]:
    """Heuristic auxiliary sizes (|U|, |A|, |V|); also |T| = |V|.

    No cardinality bounds are proven for these auxiliaries, so computed
    upper bounds are estimates at fixed cardinality.
    """
    nu = min(spec.x.size * spec.x1.size + 1, 4)
    nv = min(spec.x.size * spec.x1.size * spec.y1.size + 1, 8)
    return nu, nu, nv


# ---------------------------------------------------------------------------
# shared evaluation machinery
# ---------------------------------------------------------------------------

class _Eval:
    """theta -> factors -> joint -> named quantities, with a one-slot cache."""

    def __init__(self, spec: RelayChannelSpec, space,
                 build_factors: Callable[[np.ndarray], list],
                 quantities: Callable[[JointDistribution], dict]):
        self.spec = spec
        self.space = space
        self.build_factors = build_factors
        self.quantities_of = quantities
        self._key = None
        self._val = None

    def __call__(self, theta: np.ndarray) -> dict:
        key = theta.tobytes()
        if key != self._key:
            joint = assemble_joint(self.spec, self.build_factors(theta))
            self._val = self.quantities_of(joint)
            self._key = key
        return self._val


def _set_partitions(n: int, max_blocks: int):
    """All partitions of range(n) into at most max_blocks labeled-by-order blocks."""
    def rec(i, blocks):
        if i == n:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        if len(blocks) < max_blocks:
            blocks.append([i])
            yield from rec(i + 1, blocks)
            blocks.pop()
    yield from rec(0, [])


def _partition_kernel_tables(domain: int, out_size: int) -> list[np.ndarray]:
    """Deterministic maps domain -> symbols, one per set partition of the domain.

    Covers `const`, `identity` and every coarser quantization; used as
    canonical candidates for compression auxiliaries.
    """
    tables = []
    if domain <= 4:
        for part in _set_partitions(domain, out_size):
            t = np.zeros((domain, out_size))
            for sym, block in enumerate(part):
                for cell in block:
                    t[cell, sym] = 1.0
            tables.append(t)
    else:
        const = np.zeros((domain, out_size))
        const[:, 0] = 1.0
        capped = np.zeros((domain, out_size))
        for cell in range(domain):
            capped[cell, min(cell, out_size - 1)] = 1.0
        tables.extend([const, capped])
    return tables


def _point_masses(n: int) -> list[np.ndarray]:
    return [np.eye(n)[i] for i in range(n)]


def _uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def _rows(row: np.ndarray, nrows: int) -> np.ndarray:
    return np.tile(row, (nrows, 1))


# ---------------------------------------------------------------------------
# general lower bounds (hybrid scheme and the joint-decoding variant)
# ---------------------------------------------------------------------------

def _hybrid_templates(spec: RelayChannelSpec, nu: int, na: int, nv: int):
    u = Alphabet("u", nu)
    a = Alphabet("a", na)
    v = Alphabet("v", nv)
    return (
        FactorTemplate((), (u,)),
        FactorTemplate((u,), (a,)),
        FactorTemplate((u, a), (spec.x,)),
        FactorTemplate((u,), (spec.x1,)),
        FactorTemplate((u, a, spec.x1, spec.y1), (v,)),
    )


def _hybrid_quantities(spec: RelayChannelSpec):
    def q(joint: JointDistribution) -> dict:
        mi = lambda a, b, g=(): mutual_information(joint, a, b, g)
        i_common = mi("a", "y1", ("u", "x1"))
        i_vy1_full = mi("v", "y1", ("u", "a", "x", "x1", "y"))
        r1 = i_common + mi("x", ("v", "y"), ("u", "a", "x1"))
        r2 = i_common + mi(("x", "x1"), "y", ("u", "a")) - i_vy1_full
        r3 = mi(("x", "x1"), "y") - i_vy1_full
        slack = mi("x1", "y", ("u", "a", "x")) - i_vy1_full
        cmg_slack = mi("x1", "y", ("u", "a")) - mi("v", "y1", ("u", "a", "x1", "y"))
        dist = optimal_expected_distortion(joint, ("x", "x1", "y", "v"), "sd",
                                           spec.distortion)
        return {
            "rate": max(0.0, min(r1, r2, r3)),
            "slack": slack,
            "cmg_rate": max(0.0, min(r1, r3)),
            "cmg_slack": cmg_slack,
            "distortion": dist,
        }
    return q


def _hybrid_eval(spec: RelayChannelSpec, nu: int, na: int, nv: int):
    templates = _hybrid_templates(spec, nu, na, nv)
    space = space_for(templates)
    build = lambda theta: FactoredInput(templates, theta).factors()
    return templates, _Eval(spec, space, build, _hybrid_quantities(spec))


def _hybrid_candidates(spec: RelayChannelSpec, templates, space) -> list[np.ndarray]:
    """Canonical corner inputs: collapsed/uniform auxiliaries and inputs,
    with every small-domain quantization of (x1, y1) as the compression V."""
    nu, na = templates[1].given[0].size, templates[1].output[0].size
    nx, nx1 = spec.x.size, spec.x1.size
    nv = templates[4].output[0].size

    u_opts = [np.eye(nu)[0], _uniform(nu)]
    a_opts = [_rows(np.eye(na)[0], nu), _rows(_uniform(na), nu)]
    x_opts = [_rows(pm, nu * na) for pm in _point_masses(nx)]
    x_opts.append(_rows(_uniform(nx), nu * na))
    x1_opts = [_rows(pm, nu) for pm in _point_masses(nx1)]
    x1_opts.append(_rows(_uniform(nx1), nu))
    v_base = _partition_kernel_tables(nx1 * spec.y1.size, nv)
    v_opts = [np.tile(t, (nu * na, 1)) for t in v_base]

    out = []
    for pu in u_opts:
        for pa in a_opts:
            for px in x_opts:
                for px1 in x1_opts:
                    for pv in v_opts:
                        out.append(encode_factors(templates, space,
                                                  [pu, pa, px, px1, pv]))
    return out


@dataclass(frozen=True)
class RestrictedFamily:
    """A low-dimensional sub-family of the hybrid input distributions.

    `decode` maps a parameter vector in [0,1]^dim to one row-stochastic table
    per hybrid factor (U; A|U; X|U,A; X1|U; V|U,A,X1,Y1).
    """

    dim: int
    cardinalities: tuple        # (|U|, |A|, |V|)
    decode: Callable[[np.ndarray], list]


def example1_family() -> RestrictedFamily:
    """Flip-probability parametrization (pu, psigma, ptheta, pdelta, pnu):
    X1 = U xor D, A = U xor S, X = A xor T, and V = N * Y1 with independent
    Bernoulli flips; all auxiliaries binary."""

    def decode(theta: np.ndarray) -> list:
        pu, psigma, ptheta, pdelta, pnu = (float(t) for t in theta)
        flip = lambda p: np.array([[1.0 - p, p], [p, 1.0 - p]])
        p_u = np.array([1.0 - pu, pu])
        p_a_u = flip(psigma)
        # X depends on A only; rows ordered (u, a) row-major
        p_x_ua = np.array([flip(ptheta)[a] for _ in range(2) for a in range(2)])
        p_x1_u = flip(pdelta)
        # V = N * Y1: rows ordered (u, a, x1, y1) row-major, depend on y1 only
        v_given_y1 = np.array([[1.0, 0.0], [1.0 - pnu, pnu]])
        p_v = np.array([v_given_y1[y1]
                        for _ in range(2) for _ in range(2) for _ in range(2)
                        for y1 in range(2)])
        return [p_u, p_a_u, p_x_ua, p_x1_u, p_v]

    return RestrictedFamily(dim=5, cardinalities=(2, 2, 2), decode=decode)


def _direct_transmission_candidates(spec: RelayChannelSpec, D: float,
                                    templates, space,
                                    cfg: OptimizerConfig) -> list[np.ndarray]:
    """Point-to-point probe: relay sends a constant x1, source optimizes P_X.

    Handles the degenerate case I(X1;Y|X) = 0 where the compression
    constraint forces V to be useless; each probe optimum is encoded back
    into the full hybrid family for uniform certification.
    """
    nu = templates[0].output[0].size
    na = templates[1].output[0].size
    nv = templates[4].output[0].size
    out = []
    for x1v in range(spec.x1.size):
        px1 = JointDistribution([spec.x1], np.eye(spec.x1.size)[x1v])
        p_space = SimplexProduct([spec.x.size])

        def build(theta):
            return [JointDistribution([spec.x], theta), px1]

        def quantities(joint):
            return {
                "rate": mutual_information(joint, "x", "y", "x1"),
                "distortion": optimal_expected_distortion(
                    joint, ("x", "x1", "y"), "sd", spec.distortion),
            }

        ev = _Eval(spec, p_space, build, quantities)
        res = maximize(lambda th: ev(th)["rate"],
                       [lambda th: D - ev(th)["distortion"]],
                       p_space, cfg)
        if res.best_theta is None:
            continue
        v_const = np.zeros((nu * na * spec.x1.size * spec.y1.size, nv))
        v_const[:, 0] = 1.0
        out.append(encode_factors(templates, space, [
            np.eye(nu)[0], _rows(np.eye(na)[0], nu),
            _rows(res.best_theta, nu * na),
            _rows(np.eye(spec.x1.size)[x1v], nu), v_const]))
    return out


def _attach_input(res: OptResult, templates) -> OptResult:
    if res.best_theta is None:
        return res
    return OptResult(res.best_value, res.best_theta, res.feasible,
                     res.evaluations, FactoredInput(templates, res.best_theta))


def lower_bound_cd(spec: RelayChannelSpec, D: float, cfg: OptimizerConfig,
                   cardinalities: Optional[tuple] = None,
                   family: Optional[RestrictedFamily] = None) -> OptResult:
    """Achievable rate at distortion D under the hybrid scheme.

    With `family` given, the search runs over that restricted sub-family's
    parameter box instead of the full factored input space.
    """
    if D < 0:
        raise DomainError("D must be nonnegative")
    if family is not None:
        nu, na, nv = family.cardinalities
    else:
        nu, na, nv = cardinalities or default_cardinalities(spec)
    templates, ev = _hybrid_eval(spec, nu, na, nv)
    objective = lambda th: ev(th)["rate"]
    constraints = [lambda th: ev(th)["slack"],
                   lambda th: D - ev(th)["distortion"]]
    if family is not None:
        box = UnitBox(family.dim)
        fam_ev = _FamilyEval(ev, family, templates)
        return maximize(lambda th: fam_ev(th)["rate"],
                        [lambda th: fam_ev(th)["slack"],
                         lambda th: D - fam_ev(th)["distortion"]],
                        box, cfg)
    candidates = _hybrid_candidates(spec, templates, ev.space)
    candidates += _direct_transmission_candidates(spec, D, templates, ev.space, cfg)
    res = maximize(objective, constraints, ev.space, cfg, candidates=candidates)
    return _attach_input(res, templates)


class _FamilyEval:
    """Evaluate hybrid quantities at a restricted-family parameter point."""

    def __init__(self, ev: _Eval, family: RestrictedFamily, templates):
        self.ev = ev
        self.family = family
        self.templates = templates

    def __call__(self, theta: np.ndarray) -> dict:
        tables = self.family.decode(theta)
        flat = self.ev.space.project(encode_factors(self.templates, self.ev.space,
                                                    tables))
        return self.ev(flat)


def lower_bound_cmg(spec: RelayChannelSpec, D: float, cfg: OptimizerConfig,
                    cardinalities: Optional[tuple] = None) -> OptResult:
    """Achievable rate at distortion D under the joint-decoding variant."""
    if D < 0:
        raise DomainError("D must be nonnegative")
    nu, na, nv = cardinalities or default_cardinalities(spec)
    templates, ev = _hybrid_eval(spec, nu, na, nv)
    candidates = _hybrid_candidates(spec, templates, ev.space)
    res = maximize(lambda th: ev(th)["cmg_rate"],
                   [lambda th: ev(th)["cmg_slack"],
                    lambda th: D - ev(th)["distortion"]],
                   ev.space, cfg, candidates=candidates)
    return _attach_input(res, templates)


# ---------------------------------------------------------------------------
# general upper bound
# ---------------------------------------------------------------------------

def upper_bound_cd(spec: RelayChannelSpec, D: float, cfg: OptimizerConfig,
                   card_t: Optional[int] = None) -> OptResult:
    """Cut-set style upper-bound estimate at fixed |T|.

    Without a proven cardinality bound for T this is an estimate of the true
    upper bound: under-maximization can only lower it.
    """
    if D < 0:
        raise DomainError("D must be nonnegative")
    nt = card_t or default_cardinalities(spec)[2]
    t = Alphabet("t", nt)
    templates = (
        FactorTemplate((), (spec.x, spec.x1)),
        FactorTemplate((spec.x, spec.x1, spec.y1), (t,)),
    )
    space = space_for(templates)

    def quantities(joint):
        mi = lambda a, b, g=(): mutual_information(joint, a, b, g)
        i_t = mi("t", "y1", ("x", "x1", "y"))
        return {
            "rate": max(0.0, min(mi("x", ("y", "y1"), "x1"),
                                 mi(("x", "x1"), "y") - i_t)),
            "slack": mi("x1", "y", "x") - i_t,
            "distortion": optimal_expected_distortion(
                joint, ("x", "x1", "y", "t"), "sd", spec.distortion),
        }

    build = lambda theta: FactoredInput(templates, theta).factors()
    ev = _Eval(spec, space, build, quantities)

    nxx1 = spec.x.size * spec.x1.size
    in_opts = _point_masses(nxx1) + [_uniform(nxx1)]
    t_opts = _partition_kernel_tables(spec.y1.size, nt)
    candidates = []
    for pin in in_opts:
        for tt in t_opts:
            candidates.append(encode_factors(
                templates, space, [pin, np.tile(tt, (nxx1, 1))]))
    res = maximize(lambda th: ev(th)["rate"],
                   [lambda th: ev(th)["slack"],
                    lambda th: D - ev(th)["distortion"]],
                   space, cfg, candidates=candidates)
    return _attach_input(res, templates)


# ---------------------------------------------------------------------------
# minimum distortion
# ---------------------------------------------------------------------------

def min_distortion(spec: RelayChannelSpec, cfg: OptimizerConfig,
                   card_v: Optional[int] = None) -> float:
    """Smallest achievable expected distortion (communication ignored)."""
    nv = card_v or default_cardinalities(spec)[2]
    v = Alphabet("v", nv)
    templates = (
        FactorTemplate((), (spec.x, spec.x1)),
        FactorTemplate((spec.x, spec.x1, spec.y1), (v,)),
    )
    space = space_for(templates)

    def quantities(joint):
        mi = lambda a, b, g=(): mutual_information(joint, a, b, g)
        return {
            "slack": mi("x1", "y", "x") - mi("v", "y1", ("x", "x1", "y")),
            "distortion": optimal_expected_distortion(
                joint, ("x", "x1", "y", "v"), "sd", spec.distortion),
        }

    build = lambda theta: FactoredInput(templates, theta).factors()
    ev = _Eval(spec, space, build, quantities)

    nxx1 = spec.x.size * spec.x1.size
    in_opts = _point_masses(nxx1) + [_uniform(nxx1)]
    # quantizations of y1 alone plus of the packed (x1, y1) cell
    v_opts = [np.tile(t, (spec.x.size * spec.x1.size, 1))
              for t in _partition_kernel_tables(spec.y1.size, nv)]
    v_opts += [np.tile(t, (spec.x.size, 1))
               for t in _partition_kernel_tables(spec.x1.size * spec.y1.size, nv)]
    candidates = []
    for pin in in_opts:
        for pv in v_opts:
            candidates.append(encode_factors(templates, space, [pin, pv]))
    # mixed inputs: each deterministic x paired with uniform x1 and vice versa
    for xv in range(spec.x.size):
        pin = np.kron(np.eye(spec.x.size)[xv], _uniform(spec.x1.size))
        for pv in v_opts:
            candidates.append(encode_factors(templates, space, [pin, pv]))
    res = maximize(lambda th: -ev(th)["distortion"],
                   [lambda th: ev(th)["slack"]],
                   space, cfg, candidates=candidates)
    if not res.feasible:
        raise RuntimeError("minimum-distortion search found no feasible point")
    return -res.best_value


def dmin_class_c1(spec: RelayChannelSpec) -> tuple[float, int, int]:
    """Exact minimum distortion for channels whose relay observation carries
    no information about the sensed state: best deterministic input pair."""
    if "c1" not in spec.tags.classes:
        raise DomainError("channel is not tagged as class c1")
    best = (np.inf, 0, 0)
    for xv in range(spec.x.size):
        for x1v in range(spec.x1.size):
            joint = assemble_joint(spec, [
                JointDistribution([spec.x], np.eye(spec.x.size)[xv]),
                JointDistribution([spec.x1], np.eye(spec.x1.size)[x1v]),
            ])
            val = optimal_expected_distortion(joint, ("x", "x1", "y"), "sd",
                                              spec.distortion)
            if val < best[0]:
                best = (val, xv, x1v)
    return best


def dmin_class_c2(spec: RelayChannelSpec, cfg: OptimizerConfig) -> float:
    """Minimum distortion when the destination learns the state only through
    the relay's forwarded estimate."""
    if "c2" not in spec.tags.classes:
        raise DomainError("channel is not tagged as class c2")
    templates = (
        FactorTemplate((), (spec.x, spec.x1)),
        FactorTemplate((spec.x, spec.x1, spec.y1), (spec.reconstruction,)),
    )
    space = space_for(templates)

    def quantities(joint):
        mi = lambda a, b, g=(): mutual_information(joint, a, b, g)
        pair = joint.marginalize(("sd", "sdh")).tensor(("sd", "sdh"))
        return {
            "slack": mi("x1", "y", "x") - mi("sdh", "y1", ("x", "x1")),
            "distortion": float((pair * spec.distortion).sum()),
        }

    build = lambda theta: FactoredInput(templates, theta).factors()
    ev = _Eval(spec, space, build, quantities)

    nxx1 = spec.x.size * spec.x1.size
    in_opts = _point_masses(nxx1) + [_uniform(nxx1)]
    for xv in range(spec.x.size):
        in_opts.append(np.kron(np.eye(spec.x.size)[xv], _uniform(spec.x1.size)))
    est_opts = [np.tile(t, (nxx1, 1))
                for t in _partition_kernel_tables(spec.y1.size,
                                                  spec.reconstruction.size)]
    candidates = [encode_factors(templates, space, [pin, pe])
                  for pin in in_opts for pe in est_opts]
    res = maximize(lambda th: -ev(th)["distortion"],
                   [lambda th: ev(th)["slack"]],
                   space, cfg, candidates=candidates)
    if not res.feasible:
        raise RuntimeError("minimum-distortion search found no feasible point")
    return -res.best_value


# ---------------------------------------------------------------------------
# exact solved classes
# ---------------------------------------------------------------------------

def _split_alphabets(spec: RelayChannelSpec, which: str):
    if which == "x":
        nr, nd = spec.tags.x_split
        return Alphabet("xr", nr), Alphabet("xd", nd)
    nr, nd = spec.tags.y_split
    return Alphabet("yr", nr), Alphabet("yd", nd)


def cd_class_c3(spec: RelayChannelSpec, D: float, cfg: OptimizerConfig) -> OptResult:
    """Exact C(D) for orthogonal-sender channels: partial decoding only."""
    if "c3" not in spec.tags.classes:
        raise DomainError("channel is not tagged as class c3")
    if D < 0:
        raise DomainError("D must be nonnegative")
    xr, xd = _split_alphabets(spec, "x")
    nx1 = spec.x1.size
    space = SimplexProduct([nx1] + [xr.size] * nx1 + [xd.size] * nx1)

    def build(theta):
        p_x1 = theta[:nx1]
        p_xr = theta[nx1:nx1 + nx1 * xr.size].reshape(nx1, xr.size)
        p_xd = theta[nx1 + nx1 * xr.size:].reshape(nx1, xd.size)
        # combined P(x | x1) with x packed row-major as (xr, xd)
        p_x = np.einsum("ir,id->ird", p_xr, p_xd).reshape(nx1, spec.x.size)
        return [JointDistribution([spec.x1], p_x1),
                ConditionalKernel([spec.x1], [spec.x], p_x)]

    def quantities(joint):
        j = joint.split_variable("x", [xr, xd])
        mi = lambda a, b, g=(): mutual_information(j, a, b, g)
        return {
            "rate": max(0.0, min(mi(("xd", "x1"), "y"),
                                 mi("xr", "y1", "x1") + mi("xd", "y", "x1"))),
            "distortion": optimal_expected_distortion(
                j, ("xd", "x1", "y"), "sd", spec.distortion),
        }

    ev = _Eval(spec, space, build, quantities)
    return maximize(lambda th: ev(th)["rate"],
                    [lambda th: D - ev(th)["distortion"]],
                    space, cfg)


def cd_class_c4(spec: RelayChannelSpec, D: float, cfg: OptimizerConfig) -> OptResult:
    """Exact C(D) when the relay observation is a function of (X, Yd)."""
    if "c4" not in spec.tags.classes:
        raise DomainError("channel is not tagged as class c4")
    if D < 0:
        raise DomainError("D must be nonnegative")
    yr, yd = _split_alphabets(spec, "y")
    space = SimplexProduct([spec.x.size, spec.x1.size])

    def build(theta):
        return [JointDistribution([spec.x], theta[:spec.x.size]),
                JointDistribution([spec.x1], theta[spec.x.size:])]

    def quantities(joint):
        j = joint.split_variable("y", [yr, yd])
        mi = lambda a, b, g=(): mutual_information(j, a, b, g)
        return {
            "rate": max(0.0, min(mi("x", ("y1", "yd")),
                                 mi("x1", "yr") + mi("x", "yd"))),
            "distortion": optimal_expected_distortion(
                j, ("x", "yd"), "sd", spec.distortion),
        }

    ev = _Eval(spec, space, build, quantities)
    return maximize(lambda th: ev(th)["rate"],
                    [lambda th: D - ev(th)["distortion"]],
                    space, cfg)


def cd_class_c5(spec: RelayChannelSpec, D: float, cfg: OptimizerConfig) -> OptResult:
    """Exact C(D) for the three-orthogonal-link class: the relay decodes part
    of the message and forwards its own state estimate."""
    if "c5" not in spec.tags.classes:
        raise DomainError("channel is not tagged as class c5")
    if D < 0:
        raise DomainError("D must be nonnegative")
    xr, xd = _split_alphabets(spec, "x")
    yr, yd = _split_alphabets(spec, "y")
    est_rows = xr.size * spec.y1.size
    nrec = spec.reconstruction.size
    space = SimplexProduct([xr.size, xd.size, spec.x1.size] + [nrec] * est_rows)

    def build(theta):
        pos = xr.size + xd.size + spec.x1.size
        p_x = np.einsum("r,d->rd", theta[:xr.size],
                        theta[xr.size:xr.size + xd.size]).reshape(spec.x.size)
        p_x1 = theta[xr.size + xd.size:pos]
        est = theta[pos:].reshape(xr.size, spec.y1.size, nrec)
        # estimator conditions on (xr, y1); expand to rows over packed x
        full = np.zeros((spec.x.size, spec.y1.size, nrec))
        for xv in range(spec.x.size):
            full[xv] = est[xv // xd.size]
        return [JointDistribution([spec.x], p_x),
                JointDistribution([spec.x1], p_x1),
                ConditionalKernel([spec.x, spec.y1], [spec.reconstruction], full)]

    def quantities(joint):
        j = joint.split_variable("x", [xr, xd]).split_variable("y", [yr, yd])
        mi = lambda a, b, g=(): mutual_information(j, a, b, g)
        relay_slack = mi("x1", "yr") - mi("sdh", "y1", "xr")
        pair = j.marginalize(("sd", "sdh")).tensor(("sd", "sdh"))
        return {
            "rate": max(0.0, mi("xd", "yd") + min(mi("xr", "y1"), relay_slack)),
            "slack": relay_slack,
            "distortion": float((pair * spec.distortion).sum()),
        }

    ev = _Eval(spec, space, build, quantities)
    return maximize(lambda th: ev(th)["rate"],
                    [lambda th: ev(th)["slack"],
                     lambda th: D - ev(th)["distortion"]],
                    space, cfg)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def example4_closed_form(a: float, b: float, c: float, d: float, e: float,
                         ps1: float, ps2: float, ps3: float):
    """(alpha, beta, distortion) of the orthogonal-sender example.

    a = P(x1=1); b, c = P(xr=1 | x1=1/0); d, e = P(xd=1 | x1=1/0).
    """
    alpha = (h3(a * d * ps2 * ps3,
                a * d * conv(ps2, ps3) + (1 - a) * e * ps2 + a * (1 - d) * ps3)
             - a * d * h3(ps2 * ps3, conv(ps2, ps3))
             - (1 - a) * e * h2(ps2) - a * (1 - d) * h2(ps3))
    beta = ((1 - a) * h2(c * ps1) + a * h2(b * ps1)
            - (a * b + (1 - a) * c) * h2(ps1)
            + a * h3(d * ps2 * ps3, (1 - ps3) * (1 - d * ps2))
            + (1 - a) * h2(e * ps2)
            - a * d * h3(ps2 * ps3, conv(ps2, ps3))
            - (1 - a) * e * h2(ps2) - a * (1 - d) * h2(ps3))
    dist = (((1 - a) * (1 - e) + a * (1 - d)) * min(ps2, 1 - ps2)
            + a * d * min((1 - ps2) * ps3, ps2 * (1 - ps3)))
    return alpha, beta, dist


def example5_closed_form(a: float, b: float, ps: float, pn: float):
    """(rate1, rate2, distortion) of the deterministic-relay-observation
    example; a = P(x=1), b = P(x1=1)."""
    rate1 = h2(a)
    rate2 = h2(conv(b, pn)) - h2(pn) + h2(a * ps) - a * h2(ps)
    dist = (1 - a) * min(ps, 1 - ps)
    return rate1, rate2, dist


def example6_closed_form(a: float, b: float, c: float, d: float, e: float,
                         f: float, ps1: float, ps2: float, ps3: float):
    """(alpha, beta, gamma, eta, distortion) of the three-link example.

    a, b, c = P(xr=1), P(xd=1), P(x1=1); d, e, f = P(ŝd=1 | xr, y1) at
    (0,0), (1,0), (1,1).
    """
    alpha = h2(b * ps3) - b * h2(ps3)
    beta = h2(a * ps1) - a * h2(ps1)
    gamma = h2(c * ps2) - c * h2(ps2)
    eta = a * (h2(e * (1 - ps1) + f * ps1)
               - (1 - ps1) * h2(e) - ps1 * h2(f))
    dist = ((1 - a) * ((1 - d) * ps1 + d * (1 - ps1))
            + a * e * (1 - ps1) + a * (1 - f) * ps1)
    return alpha, beta, gamma, eta, dist


def gaussian_dmin_example2(p1: float, s1sq: float, s2sq: float) -> float:
    """Minimum distortion of the Gaussian relay instance where both hops see
    the state: s1² s2² / (P1 + s1² + s2²)."""
    for name, v in (("p1", p1), ("s1sq", s1sq), ("s2sq", s2sq)):
        if v <= 0:
            raise DomainError(f"{name} must be positive")
    return s1sq * s2sq / (p1 + s1sq + s2sq)


def gaussian_dmin_example3(p1: float, s1sq: float, s2sq: float) -> float:
    """Minimum distortion of the Gaussian variant with the relay-side state
    out of the estimation path: s1² s2² / (P1 + s2²)."""
    for name, v in (("p1", p1), ("s1sq", s1sq), ("s2sq", s2sq)):
        if v <= 0:
            raise DomainError(f"{name} must be positive")
    return s1sq * s2sq / (p1 + s2sq)


# ---------------------------------------------------------------------------
# curves and region inclusion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvePoint:
    D: float
    rate: float
    kind: str
    feasible: bool
    result: OptResult


@dataclass(frozen=True)
class TradeoffCurve:
    kind: str
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        ds = [p.D for p in self.points]
        if ds != sorted(ds):
            raise ValueError("curve distortions must be ascending")

    def rates(self) -> list[float]:
        return [p.rate for p in self.points]


_CURVE_FUNS = {
    "upper_thm": upper_bound_cd,
    "lower_hybrid": lower_bound_cd,
    "lower_cmg": lower_bound_cmg,
    "c3": cd_class_c3,
    "c4": cd_class_c4,
    "c5": cd_class_c5,
}


def tradeoff_curve(spec: RelayChannelSpec, kind: str, d_grid: Sequence[float],
                   cfg: OptimizerConfig, **kwargs) -> TradeoffCurve:
    """One bound evaluation per distortion level, warm-started upward in D.

    Feasible rates are nondecreasing by construction: each level re-certifies
    the previous optimum, which remains feasible as D grows.
    """
    if kind not in _CURVE_FUNS:
        raise DomainError(f"unknown curve kind {kind!r}; have {sorted(_CURVE_FUNS)}")
    fun = _CURVE_FUNS[kind]
    if list(d_grid) != sorted(d_grid):
        raise ValueError("d_grid must be ascending")
    points = []
    prev: Optional[OptResult] = None
    for d in d_grid:
        res = fun(spec, float(d), cfg, **kwargs)
        if (prev is not None and prev.feasible
                and (not res.feasible or res.best_value < prev.best_value)):
            res = prev  # previous certified point stays feasible at larger D
        points.append(CurvePoint(float(d), res.best_value if res.feasible else 0.0,
                                 kind, res.feasible, res))
        if res.feasible:
            prev = res
    return TradeoffCurve(kind, tuple(points))


@dataclass(frozen=True)
class InclusionReport:
    samples: int
    applicable: int          # inputs satisfying the stricter decodability constraint
    violations: tuple        # (theta, detail) pairs

    @property
    def ok(self) -> bool:
        return not self.violations


def region_inclusion_check(spec: RelayChannelSpec, samples: int,
                           cfg: OptimizerConfig,
                           cardinalities: Optional[tuple] = None) -> InclusionReport:
    """Numeric check that the joint-decoding region is inside the hybrid one.

    For each sampled input satisfying the stricter constraint, the main
    scheme's constraint must hold and its rate must dominate, within 1e-10.
    """
    nu, na, nv = cardinalities or default_cardinalities(spec)
    templates, ev = _hybrid_eval(spec, nu, na, nv)
    rng = np.random.default_rng(cfg.rng_seed)
    violations = []
    applicable = 0
    thetas = [ev.space.sample(rng) for _ in range(samples)]
    thetas += _hybrid_candidates(spec, templates, ev.space)[:max(0, samples // 4)]
    for theta in thetas:
        q = ev(ev.space.project(theta))
        if q["cmg_slack"] < 0.0:
            continue
        applicable += 1
        if q["slack"] < -1e-10:
            violations.append((theta, f"hybrid constraint violated: {q['slack']}"))
        if q["rate"] < q["cmg_rate"] - 1e-10:
            violations.append((theta, "hybrid rate below joint-decoding rate"))
    return InclusionReport(len(thetas), applicable, tuple(violations))
