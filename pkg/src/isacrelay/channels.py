"""Relay-channel problem instances: alphabets, kernel, state law, distortion.

A :class:`RelayChannelSpec` bundles the channel tuple P(Y, Y1 | X, X1, S),
the state law P(S, Sd) and the distortion table d(sd, ŝd).  Factories build
the concrete binary/ternary channels used throughout; structural class tags
(C1..C5) are machine-audited at construction time, never trusted.

Canonical variable names: ``x``, ``x1``, ``s``, ``sd``, ``y``, ``y1`` for the
channel, ``sdh`` for the reconstruction, and ``u``, ``a``, ``v``, ``t`` for
auxiliaries.  Composite symbols are packed row-major:
``x = xr*|Xd| + xd``, ``y = yr*|Yd| + yd``, and ``s`` over its components.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import prod
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, FactorizationError
from .probability import (
    Alphabet,
    ConditionalKernel,
    Factor,
    JointDistribution,
    compose,
    h2_inverse,
)

AUDIT_TOL = 1e-9


def hamming(n: int) -> np.ndarray:
    """The n-by-n Hamming distortion table: 0 on the diagonal, 1 off it."""
    return 1.0 - np.eye(n)


@dataclass(frozen=True)
class StructureTags:
    """Structural class membership plus the splits the audits need.

    ``x_split``/``y_split`` are (relay-part size, direct-part size) with the
    relay part as the high-order digit.  ``s_split`` lists the state-component
    sizes, row-major, with the relay-observed component first.  ``c4_map`` is
    the deterministic table f with y1 = f[x, yd].
    """

    classes: frozenset = frozenset()
    x_split: Optional[tuple] = None
    y_split: Optional[tuple] = None
    s_split: Optional[tuple] = None
    c4_map: Optional[tuple] = None

    def __post_init__(self):
        known = {"c1", "c2", "c3", "c4", "c5"}
        if not set(self.classes) <= known:
            raise DomainError(f"unknown class tags {set(self.classes) - known}")
        if "c4" in self.classes and self.c4_map is None:
            raise DomainError("a c4 tag requires the deterministic map y1 = f(x, yd)")


@dataclass(frozen=True)
class RelayChannelSpec:
    """One bistatic-sensing relay-channel problem instance."""

    x: Alphabet
    x1: Alphabet
    s: Alphabet
    sd: Alphabet
    y: Alphabet
    y1: Alphabet
    kernel: ConditionalKernel          # P(Y, Y1 | X, X1, S)
    state_law: JointDistribution       # over (S, Sd)
    distortion: np.ndarray             # d[sd, sdh]
    reconstruction: Alphabet = None    # defaults to sd's size, named "sdh"
    tags: StructureTags = field(default_factory=StructureTags)

    def __post_init__(self):
        if self.reconstruction is None:
            object.__setattr__(self, "reconstruction", Alphabet("sdh", self.sd.size))
        d = np.asarray(self.distortion, dtype=np.float64)
        d.flags.writeable = False
        object.__setattr__(self, "distortion", d)
        expect_given = (self.x, self.x1, self.s)
        expect_out = (self.y, self.y1)
        if self.kernel.given != expect_given or self.kernel.output != expect_out:
            raise FactorizationError(
                f"kernel signature {self.kernel.given}->{self.kernel.output} does not "
                f"match the channel alphabets {expect_given}->{expect_out}")
        if self.state_law.variables != (self.s, self.sd):
            raise FactorizationError("state law must be a joint over (s, sd)")
        if d.shape != (self.sd.size, self.reconstruction.size):
            raise ValueError(f"distortion shape {d.shape} != "
                             f"({self.sd.size}, {self.reconstruction.size})")
        if not np.isfinite(d).all() or (d < 0).any():
            raise ValueError("distortion entries must be finite and nonnegative")
        audit_tags(self)

    @property
    def d_max(self) -> float:
        """Worst-case distortion of the best constant reconstruction."""
        prior = self.state_law.marginalize("sd").probs
        return float((prior @ self.distortion).min())


def assemble_joint(spec: RelayChannelSpec, factors: Sequence[Factor]) -> JointDistribution:
    """Compose input/auxiliary factors with the fixed state law and channel.

    Factors are ordered automatically so that e.g. a kernel conditioned on
    ``y1`` lands after the channel kernel.
    """
    pending = list(factors) + [spec.state_law, spec.kernel]
    produced: set[str] = set()
    chain: list[Factor] = []
    while pending:
        for i, f in enumerate(pending):
            given = () if isinstance(f, JointDistribution) else f.given
            if all(v.name in produced for v in given):
                chain.append(f)
                out = f.variables if isinstance(f, JointDistribution) else f.output
                produced.update(v.name for v in out)
                del pending[i]
                break
        else:
            names = [[v.name for v in (f.given if isinstance(f, ConditionalKernel)
                                       else ())] for f in pending]
            raise FactorizationError(f"unsatisfiable conditioning chain: {names}")
    return compose(chain)


# ---------------------------------------------------------------------------
# class audits
# ---------------------------------------------------------------------------

def _require(ok: bool, spec_cls: str, what: str):
    if not ok:
        raise FactorizationError(f"{spec_cls} audit failed: {what}")


def _close(a, b) -> bool:
    return float(np.abs(np.asarray(a) - np.asarray(b)).max()) <= AUDIT_TOL


def _const_along(t: np.ndarray, axis: int) -> bool:
    """True if the tensor does not vary along the given axis."""
    ref = np.take(t, [0], axis=axis)
    return _close(t, np.broadcast_to(ref, t.shape))


def _two_part_state(spec: RelayChannelSpec) -> tuple[int, int]:
    split = spec.tags.s_split
    if not split or len(split) < 2:
        raise FactorizationError("class audit requires an s_split with >= 2 parts")
    return split[0], prod(split[1:])


def _split_kernel_two_state(spec: RelayChannelSpec, cls: str):
    """Factor P(y,y1|x,x1,s1,s2) as P(y1|x,x1,s1) * P(y|x,x1,s2)."""
    n1, n2 = _two_part_state(spec)
    nx, nx1, ny, ny1 = spec.x.size, spec.x1.size, spec.y.size, spec.y1.size
    k = spec.kernel.probs.reshape(nx, nx1, n1, n2, ny, ny1)
    py1 = k.sum(axis=4)                     # (x, x1, s1, s2, y1)
    _require(_const_along(py1, 3), cls, "P(y1|x,x1,s) depends on the y-side state part")
    py = k.sum(axis=5)                      # (x, x1, s1, s2, y)
    _require(_const_along(py, 2), cls, "P(y|x,x1,s) depends on the relay-side state part")
    a = py1[:, :, :, 0, :]                  # (x, x1, s1, y1)
    b = py[:, :, 0, :, :]                   # (x, x1, s2, y)
    recon = a[:, :, :, None, None, :] * b[:, :, None, :, :, None]
    _require(_close(k, recon), cls, "Y and Y1 are not conditionally independent given (x,x1,s)")
    return a, b


def audit_class(spec: RelayChannelSpec, cls: str) -> None:
    """Verify that the channel actually has the declared class structure."""
    law = spec.state_law.probs
    if cls in ("c1", "c2", "c3"):
        n1, n2 = _two_part_state(spec)
        p = law.reshape(n1, n2, spec.sd.size)
        if cls == "c2":
            # (s1, sd) independent of s2
            target = p.sum(axis=1)[:, None, :] * p.sum(axis=(0, 2))[None, :, None]
        else:
            # s1 independent of (s2, sd)
            target = p.sum(axis=(1, 2))[:, None, None] * p.sum(axis=0)[None, :, :]
        _require(_close(p, target), cls, "state law does not factor as required")
        a, b = _split_kernel_two_state(spec, cls)
        if cls == "c3":
            if not spec.tags.x_split:
                raise FactorizationError("c3 audit requires an x_split")
            nxr, nxd = spec.tags.x_split
            a4 = a.reshape(nxr, nxd, spec.x1.size, n1, spec.y1.size)
            _require(_const_along(a4, 1), cls, "P(y1|xr,x1,s1) depends on xd")
            b4 = b.reshape(nxr, nxd, spec.x1.size, n2, spec.y.size)
            _require(_const_along(b4, 0), cls, "P(y|xd,x1,s2) depends on xr")
    elif cls == "c4":
        if not spec.tags.y_split or spec.tags.c4_map is None:
            raise FactorizationError("c4 audit requires y_split and c4_map")
        nyr, nyd = spec.tags.y_split
        nx, nx1, ns, ny1 = spec.x.size, spec.x1.size, spec.s.size, spec.y1.size
        k = spec.kernel.probs.reshape(nx, nx1, ns, nyr, nyd, ny1)
        pdd = k.sum(axis=3)                 # (x, x1, s, yd, y1)
        _require(_const_along(pdd, 1), cls, "P(yd,y1|x,s) depends on x1")
        pr = k.sum(axis=(4, 5))             # (x, x1, s, yr)
        _require(_const_along(pr, 0) and _const_along(pr, 2), cls,
                 "P(yr|x1) depends on x or s")
        recon = pdd[:, :1, :, None, :, :] * pr[:1, :, :1, :, None, None]
        _require(_close(k, np.broadcast_to(recon, k.shape)), cls,
                 "(yr) and (yd,y1) are not conditionally independent")
        f = np.asarray(spec.tags.c4_map)
        _require(f.shape == (nx, nyd), cls, "c4_map shape mismatch")
        mass = pdd[:, 0]                    # (x, s, yd, y1)
        for xv in range(nx):
            for ydv in range(nyd):
                support = np.nonzero(mass[xv, :, ydv, :].sum(axis=0) > AUDIT_TOL)[0]
                _require(all(int(y1v) == int(f[xv, ydv]) for y1v in support), cls,
                         f"y1 is not f(x={xv}, yd={ydv}) on the kernel support")
    elif cls == "c5":
        split = spec.tags.s_split
        if (not spec.tags.x_split or not spec.tags.y_split
                or not split or len(split) != 3):
            raise FactorizationError("c5 audit requires x_split, y_split and a 3-part s_split")
        n1, n2, n3 = split
        nxr, nxd = spec.tags.x_split
        nyr, nyd = spec.tags.y_split
        nx1, ny1 = spec.x1.size, spec.y1.size
        p = law.reshape(n1, n2, n3, spec.sd.size)
        target = (p.sum(axis=(1, 2))[:, None, None, :]
                  * p.sum(axis=(0, 2, 3))[None, :, None, None]
                  * p.sum(axis=(0, 1, 3))[None, None, :, None])
        _require(_close(p, target), cls, "state law does not factor as P(s1,sd)P(s2)P(s3)")
        k = spec.kernel.probs.reshape(nxr, nxd, nx1, n1, n2, n3, nyr, nyd, ny1)
        py1 = k.sum(axis=(6, 7))            # (xr, xd, x1, s1, s2, s3, y1)
        for ax, what in ((1, "xd"), (2, "x1"), (4, "s2"), (5, "s3")):
            _require(_const_along(py1, ax), cls, f"P(y1|xr,s1) depends on {what}")
        pyr = k.sum(axis=(7, 8))            # (..., yr)
        for ax, what in ((0, "xr"), (1, "xd"), (3, "s1"), (5, "s3")):
            _require(_const_along(pyr, ax), cls, f"P(yr|x1,s2) depends on {what}")
        pyd = k.sum(axis=(6, 8))            # (..., yd)
        for ax, what in ((0, "xr"), (2, "x1"), (3, "s1"), (4, "s2")):
            _require(_const_along(pyd, ax), cls, f"P(yd|xd,s3) depends on {what}")
        a = py1[:, 0, 0, :, 0, 0, :]        # (xr, s1, y1)
        b = pyr[0, 0, :, 0, :, 0, :]        # (x1, s2, yr)
        c = pyd[0, :, 0, 0, 0, :, :]        # (xd, s3, yd)
        recon = (a[:, None, None, :, None, None, None, None, :]
                 * b[None, None, :, None, :, None, :, None, None]
                 * c[None, :, None, None, None, :, None, :, None])
        _require(_close(k, recon), cls, "kernel does not factor into the three links")
    else:
        raise DomainError(f"unknown class {cls!r}")


def audit_tags(spec: RelayChannelSpec) -> None:
    """Run every declared class audit; raises FactorizationError on failure."""
    for cls in sorted(spec.tags.classes):
        audit_class(spec, cls)
    if spec.tags.x_split and prod(spec.tags.x_split) != spec.x.size:
        raise FactorizationError("x_split does not factor |X|")
    if spec.tags.y_split and prod(spec.tags.y_split) != spec.y.size:
        raise FactorizationError("y_split does not factor |Y|")
    if spec.tags.s_split and prod(spec.tags.s_split) != spec.s.size:
        raise FactorizationError("s_split does not factor |S|")


# ---------------------------------------------------------------------------
# factories
# ---------------------------------------------------------------------------

def _check_prob(**params: float):
    for name, v in params.items():
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"parameter {name}={v} outside [0, 1]")


def _bernoulli_product(*ps: float) -> np.ndarray:
    """Row-major joint of independent Bernoulli components."""
    out = np.ones(1)
    for p in ps:
        out = np.kron(out, np.array([1.0 - p, p]))
    return out.reshape(tuple(2 for _ in ps))


def _deterministic_sd(state_probs: np.ndarray, sd_of_s, nsd: int,
                      s: Alphabet, sd: Alphabet) -> JointDistribution:
    """State law with Sd a deterministic function of the packed state index."""
    flat = state_probs.ravel()
    law = np.zeros((flat.size, nsd))
    for sv, p in enumerate(flat):
        law[sv, sd_of_s(sv)] = p
    return JointDistribution([s, sd], law)


def _deterministic_kernel(given: Sequence[Alphabet], output: Sequence[Alphabet],
                          fn) -> ConditionalKernel:
    """Kernel with output a deterministic tuple-valued function of the inputs."""
    gshape = tuple(v.size for v in given)
    oshape = tuple(v.size for v in output)
    probs = np.zeros(gshape + oshape)
    for idx in np.ndindex(gshape):
        probs[idx + tuple(fn(*idx))] = 1.0
    return ConditionalKernel(given, output, probs)


def make_example1(ps1: float, ps2: float, ps3: float) -> RelayChannelSpec:
    """Binary source/relay inputs, relay sees Y1 = S1·X, destination sees the
    ternary sum Y = S2·X + S3·X1; the sensed state is S1 (Hamming)."""
    _check_prob(ps1=ps1, ps2=ps2, ps3=ps3)
    x, x1 = Alphabet("x", 2), Alphabet("x1", 2)
    s, sd = Alphabet("s", 8), Alphabet("sd", 2)
    y, y1 = Alphabet("y", 3), Alphabet("y1", 2)

    def channel(xv, x1v, sv):
        s1, s2, s3 = sv >> 2, (sv >> 1) & 1, sv & 1
        return (s2 * xv + s3 * x1v, s1 * xv)

    kernel = _deterministic_kernel([x, x1, s], [y, y1], channel)
    law = _deterministic_sd(_bernoulli_product(ps1, ps2, ps3), lambda sv: sv >> 2,
                            2, s, sd)
    tags = StructureTags(classes=frozenset({"c2"}), s_split=(2, 2, 2))
    return RelayChannelSpec(x, x1, s, sd, y, y1, kernel, law, hamming(2), tags=tags)


def make_example4(ps1: float, ps2: float, ps3: float) -> RelayChannelSpec:
    """Orthogonal source components: Y1 = S1·Xr at the relay and the ternary
    Y = S2·Xd + S3·X1 at the destination; the sensed state is S2."""
    _check_prob(ps1=ps1, ps2=ps2, ps3=ps3)
    x, x1 = Alphabet("x", 4), Alphabet("x1", 2)
    s, sd = Alphabet("s", 8), Alphabet("sd", 2)
    y, y1 = Alphabet("y", 3), Alphabet("y1", 2)

    def channel(xv, x1v, sv):
        xr, xd = xv >> 1, xv & 1
        s1, s2, s3 = sv >> 2, (sv >> 1) & 1, sv & 1
        return (s2 * xd + s3 * x1v, s1 * xr)

    kernel = _deterministic_kernel([x, x1, s], [y, y1], channel)
    law = _deterministic_sd(_bernoulli_product(ps1, ps2, ps3),
                            lambda sv: (sv >> 1) & 1, 2, s, sd)
    tags = StructureTags(classes=frozenset({"c1", "c3"}), x_split=(2, 2),
                         s_split=(2, 2, 2))
    return RelayChannelSpec(x, x1, s, sd, y, y1, kernel, law, hamming(2), tags=tags)


def make_example5(ps: float, pn: float) -> RelayChannelSpec:
    """Relay observation is determined by the source input and the direct
    output: Yd = S·X, Yr = X1 xor N, Y1 = S·X + X = Yd + X; sensed state S."""
    _check_prob(ps=ps, pn=pn)
    x, x1 = Alphabet("x", 2), Alphabet("x1", 2)
    s, sd = Alphabet("s", 2), Alphabet("sd", 2)
    y, y1 = Alphabet("y", 4), Alphabet("y1", 3)

    probs = np.zeros((2, 2, 2, 4, 3))
    for xv in range(2):
        for x1v in range(2):
            for sv in range(2):
                yd = sv * xv
                y1v = yd + xv
                for nv, pnv in ((0, 1.0 - pn), (1, pn)):
                    yr = x1v ^ nv
                    probs[xv, x1v, sv, yr * 2 + yd, y1v] += pnv
    kernel = ConditionalKernel([x, x1, s], [y, y1], probs)
    law = _deterministic_sd(np.array([1.0 - ps, ps]), lambda sv: sv, 2, s, sd)
    c4_map = tuple(tuple(xv + yd for yd in range(2)) for xv in range(2))
    tags = StructureTags(classes=frozenset({"c4"}), y_split=(2, 2), c4_map=c4_map)
    return RelayChannelSpec(x, x1, s, sd, y, y1, kernel, law, hamming(2), tags=tags)


def make_example6(ps1: float, ps2: float, ps3: float) -> RelayChannelSpec:
    """Three orthogonal links: Y1 = S1·Xr, Yr = S2·X1, Yd = S3·Xd; the sensed
    state is S1, observed only through the relay link."""
    _check_prob(ps1=ps1, ps2=ps2, ps3=ps3)
    x, x1 = Alphabet("x", 4), Alphabet("x1", 2)
    s, sd = Alphabet("s", 8), Alphabet("sd", 2)
    y, y1 = Alphabet("y", 4), Alphabet("y1", 2)

    def channel(xv, x1v, sv):
        xr, xd = xv >> 1, xv & 1
        s1, s2, s3 = sv >> 2, (sv >> 1) & 1, sv & 1
        yr, yd = s2 * x1v, s3 * xd
        return (yr * 2 + yd, s1 * xr)

    kernel = _deterministic_kernel([x, x1, s], [y, y1], channel)
    law = _deterministic_sd(_bernoulli_product(ps1, ps2, ps3), lambda sv: sv >> 2,
                            2, s, sd)
    tags = StructureTags(classes=frozenset({"c2", "c5"}), x_split=(2, 2),
                         y_split=(2, 2), s_split=(2, 2, 2))
    return RelayChannelSpec(x, x1, s, sd, y, y1, kernel, law, hamming(2), tags=tags)


def make_appendixC_counterexample() -> RelayChannelSpec:
    """Separation example: Y1 = X1 xor S with uniform S, and the destination
    sees the pair Y = (X xor X1, X xor N) with H(N) = 1/2 bit; sensed state S."""
    pn = h2_inverse(0.5)
    x, x1 = Alphabet("x", 2), Alphabet("x1", 2)
    s, sd = Alphabet("s", 2), Alphabet("sd", 2)
    y, y1 = Alphabet("y", 4), Alphabet("y1", 2)

    probs = np.zeros((2, 2, 2, 4, 2))
    for xv in range(2):
        for x1v in range(2):
            for sv in range(2):
                y1v = x1v ^ sv
                ya = xv ^ x1v
                for nv, pnv in ((0, 1.0 - pn), (1, pn)):
                    yb = xv ^ nv
                    probs[xv, x1v, sv, ya * 2 + yb, y1v] += pnv
    kernel = ConditionalKernel([x, x1, s], [y, y1], probs)
    law = _deterministic_sd(np.array([0.5, 0.5]), lambda sv: sv, 2, s, sd)
    return RelayChannelSpec(x, x1, s, sd, y, y1, kernel, law, hamming(2),
                            tags=StructureTags(y_split=(2, 2)))


FACTORIES = {
    "example1": make_example1,
    "example4": make_example4,
    "example5": make_example5,
    "example6": make_example6,
    "appendixC": make_appendixC_counterexample,
}


# ---------------------------------------------------------------------------
# JSON (de)serialization
# ---------------------------------------------------------------------------

def spec_to_json(spec: RelayChannelSpec) -> str:
    doc = {
        "variables": [{"name": v.name, "size": v.size}
                      for v in (spec.x, spec.x1, spec.s, spec.sd, spec.y, spec.y1,
                                spec.reconstruction)],
        "kernel": spec.kernel.probs.ravel().tolist(),
        "state_law": spec.state_law.probs.ravel().tolist(),
        "distortion": spec.distortion.tolist(),
        "tags": {
            "classes": sorted(spec.tags.classes),
            "x_split": list(spec.tags.x_split) if spec.tags.x_split else None,
            "y_split": list(spec.tags.y_split) if spec.tags.y_split else None,
            "s_split": list(spec.tags.s_split) if spec.tags.s_split else None,
            "c4_map": [list(r) for r in spec.tags.c4_map] if spec.tags.c4_map else None,
        },
    }
    return json.dumps(doc, indent=2)


def spec_from_json(text: str) -> RelayChannelSpec:
    doc = json.loads(text)
    vars_by_name = {v["name"]: Alphabet(v["name"], int(v["size"]))
                    for v in doc["variables"]}
    try:
        x, x1, s, sd, y, y1 = (vars_by_name[n] for n in
                               ("x", "x1", "s", "sd", "y", "y1"))
    except KeyError as exc:
        raise FactorizationError(f"channel JSON missing variable {exc}") from exc
    sdh = vars_by_name.get("sdh", Alphabet("sdh", sd.size))
    kshape = (x.size, x1.size, s.size, y.size, y1.size)
    kernel = ConditionalKernel([x, x1, s], [y, y1],
                               np.asarray(doc["kernel"], dtype=np.float64).reshape(kshape))
    law = JointDistribution([s, sd],
                            np.asarray(doc["state_law"], dtype=np.float64)
                            .reshape(s.size, sd.size))
    t = doc.get("tags") or {}

    def _tup(key):
        v = t.get(key)
        return tuple(v) if v else None

    c4 = t.get("c4_map")
    tags = StructureTags(classes=frozenset(t.get("classes") or ()),
                         x_split=_tup("x_split"), y_split=_tup("y_split"),
                         s_split=_tup("s_split"),
                         c4_map=tuple(tuple(r) for r in c4) if c4 else None)
    return RelayChannelSpec(x, x1, s, sd, y, y1, kernel, law,
                            np.asarray(doc["distortion"], dtype=np.float64),
                            reconstruction=sdh, tags=tags)
