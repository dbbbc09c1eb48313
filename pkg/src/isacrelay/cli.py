"""Command-line front end: channels in, bounds/curves/reports out.

Outputs are deterministic given the flags: the emitted manifest fully
reconstructs a run, and re-running it reproduces byte-identical CSV.
Exit codes: 0 success, 1 infeasible computation or failed verification,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    dmin_class_c1,
    dmin_class_c2,
    example1_family,
    gaussian_dmin_example2,
    gaussian_dmin_example3,
    min_distortion,
    region_inclusion_check,
    tradeoff_curve,
)
from .channels import FACTORIES, RelayChannelSpec, assemble_joint, spec_from_json
from .errors import DomainError
from .estimator import optimal_estimator
from .montecarlo import SimConfig, simulate_distortion
from .optimizer import OptimizerConfig
from .probability import JointDistribution

_FACTORY_PARAMS = {
    "example1": ("ps1", "ps2", "ps3"),
    "example4": ("ps1", "ps2", "ps3"),
    "example5": ("ps", "pn"),
    "example6": ("ps1", "ps2", "ps3"),
    "appendixC": (),
}


@dataclass(frozen=True)
class RunManifest:
    command: str
    channel: dict
    kinds: list
    d_grid: list
    optimizer: dict
    outputs: list
    version: str
    rng_seed: int


class UsageError(Exception):
    pass


def _load_config(path: str) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    text = Path(path).read_bytes()
    if path.endswith(".toml"):
        return tomllib.loads(text.decode())
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return tomllib.loads(text.decode())


def _optimizer_config(args) -> OptimizerConfig:
    cfg = OptimizerConfig()
    if getattr(args, "config", None):
        doc = _load_config(args.config)
        fields = {k: v for k, v in doc.get("optimizer", doc).items()
                  if k in OptimizerConfig.__dataclass_fields__}
        cfg = replace(cfg, **fields)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, rng_seed=args.seed)
    return cfg


def _channel(args) -> tuple[RelayChannelSpec, dict]:
    if getattr(args, "channel_json", None):
        spec = spec_from_json(Path(args.channel_json).read_text())
        return spec, {"source": "json", "path": args.channel_json}
    name = getattr(args, "factory", None)
    if not name:
        raise UsageError("need --factory or --channel-json")
    if name not in FACTORIES:
        raise UsageError(f"unknown factory {name!r}; have {sorted(FACTORIES)}")
    params = {}
    for p in _FACTORY_PARAMS[name]:
        v = getattr(args, p, None)
        if v is None:
            raise UsageError(f"factory {name} requires --{p}")
        params[p] = v
    return FACTORIES[name](**params), {"source": "factory", "name": name,
                                       "params": params}


def _parse_dgrid(text: str) -> list[float]:
    if not text.strip():
        raise UsageError("empty distortion grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError("grid must be start:stop:step or a comma list")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise UsageError("grid must be ascending with positive step")
        n = int(round((stop - start) / step))
        grid = [start + i * step for i in range(n + 1)]
        if grid[-1] > stop + 1e-12:
            grid.pop()
        return grid
    return [float(p) for p in text.split(",")]


def _write_outputs(out: str, csv_rows: list[str], manifest: RunManifest) -> None:
    csv_path = Path(out)
    manifest_path = csv_path.with_suffix(csv_path.suffix + ".manifest.json")
    body = "\n".join(csv_rows) + "\n"
    header = "# manifest: " + json.dumps(asdict(manifest), sort_keys=True) + "\n"
    csv_path.write_text(header + body)
    manifest_path.write_text(json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n")
    print(f"wrote {csv_path} and {manifest_path}")


def cmd_tradeoff(args) -> int:
    spec, channel_doc = _channel(args)
    cfg = _optimizer_config(args)
    grid = _parse_dgrid(args.dgrid)
    kinds = [k.strip() for k in args.kind.split(",") if k.strip()]
    if not kinds:
        raise UsageError("need at least one --kind")
    rows = ["D,rate,kind,feasible"]
    any_feasible = False
    for kind in kinds:
        kwargs = {}
        if kind == "lower_hybrid" and args.family == "example1":
            kwargs["family"] = example1_family()
        curve = tradeoff_curve(spec, kind, grid, cfg, **kwargs)
        for p in curve.points:
            any_feasible |= p.feasible
            rows.append(f"{p.D:.10g},{p.rate:.10g},{p.kind},{str(p.feasible).lower()}")
    manifest = RunManifest("tradeoff", channel_doc, kinds, grid,
                           asdict(cfg), [args.out], __version__, cfg.rng_seed)
    _write_outputs(args.out, rows, manifest)
    return 0 if any_feasible else 1


def cmd_dmin(args) -> int:
    if getattr(args, "gaussian", None):
        fn = {"example2": gaussian_dmin_example2,
              "example3": gaussian_dmin_example3}.get(args.gaussian)
        if fn is None:
            raise UsageError("--gaussian must be example2 or example3")
        for flag in ("p1", "s1", "s2"):
            if getattr(args, flag) is None:
                raise UsageError(f"--gaussian requires --{flag}")
        print(f"dmin {fn(args.p1, args.s1, args.s2):.12g}")
        return 0
    spec, _ = _channel(args)
    cfg = _optimizer_config(args)
    method = args.method
    if method == "auto":
        method = ("c1" if "c1" in spec.tags.classes
                  else "c2" if "c2" in spec.tags.classes else "general")
    if method == "c1":
        val, xv, x1v = dmin_class_c1(spec)
        print(f"dmin {val:.12g} (deterministic inputs x={xv}, x1={x1v})")
    elif method == "c2":
        print(f"dmin {dmin_class_c2(spec, cfg):.12g}")
    else:
        print(f"dmin {min_distortion(spec, cfg):.12g}")
    return 0


def _uniform_input(spec: RelayChannelSpec):
    return [JointDistribution([spec.x], np.full(spec.x.size, 1 / spec.x.size)),
            JointDistribution([spec.x1], np.full(spec.x1.size, 1 / spec.x1.size))]


def cmd_verify(args) -> int:
    cfg = _optimizer_config(args)
    if args.suite == "inclusion":
        spec, _ = _channel(args)
        report = region_inclusion_check(spec, args.fuzz, cfg)
        status = "PASS" if report.ok else "FAIL"
        print(f"{status} inclusion: {report.applicable}/{report.samples} applicable "
              f"inputs, {len(report.violations)} violations")
        return 0 if report.ok else 1
    if args.suite == "estimator":
        from .verify import verify_estimator_optimality
        ok, detail = verify_estimator_optimality(args.fuzz, cfg.rng_seed)
        print(f"{'PASS' if ok else 'FAIL'} estimator: {detail}")
        return 0 if ok else 1
    if args.suite == "identities":
        from .verify import verify_identities
        ok, detail = verify_identities(args.fuzz, cfg.rng_seed)
        print(f"{'PASS' if ok else 'FAIL'} identities: {detail}")
        return 0 if ok else 1
    raise UsageError(f"unknown suite {args.suite!r}")


def cmd_estimator_dump(args) -> int:
    spec, _ = _channel(args)
    joint = assemble_joint(spec, _uniform_input(spec))
    conditioning = tuple(c.strip() for c in args.conditioning.split(",") if c.strip())
    est = optimal_estimator(joint, conditioning, "sd", spec.distortion)
    text = est.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def cmd_simulate(args) -> int:
    spec, _ = _channel(args)
    factors = _uniform_input(spec)
    joint = assemble_joint(spec, factors)
    conditioning = tuple(c.strip() for c in args.conditioning.split(",") if c.strip())
    est = optimal_estimator(joint, conditioning, "sd", spec.distortion)
    sim = SimConfig(samples=args.samples, rng_seed=args.seed or 20260825,
                    batches=args.batches)
    mean, ci = simulate_distortion(spec, factors, est, sim, joint=joint)
    from .estimator import expected_distortion
    exact = expected_distortion(joint, est, "sd", spec.distortion)
    print(f"empirical {mean:.8f} ± {ci:.8f} (exact {exact:.8f})")
    return 0 if abs(mean - exact) <= max(ci, 1e-6) else 1


def _add_channel_flags(p: argparse.ArgumentParser):
    p.add_argument("--factory", choices=sorted(FACTORIES))
    p.add_argument("--channel-json")
    for flag in ("ps1", "ps2", "ps3", "ps", "pn"):
        p.add_argument(f"--{flag}", type=float)


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="optimizer config file (TOML or JSON)")
    p.add_argument("--seed", type=int, help="override the optimizer RNG seed")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isacrelay",
                                 description="capacity-distortion tradeoffs of "
                                             "sensing relay channels")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tradeoff", help="compute a C(D) curve as CSV")
    _add_channel_flags(t)
    _add_common_flags(t)
    t.add_argument("--kind", required=True,
                   help="comma list: upper_thm,lower_hybrid,lower_cmg,c3,c4,c5")
    t.add_argument("--dgrid", required=True, help="start:stop:step or comma list")
    t.add_argument("--family", choices=["example1"],
                   help="restricted input family for lower_hybrid")
    t.add_argument("--out", default="tradeoff.csv")
    t.set_defaults(fn=cmd_tradeoff)

    d = sub.add_parser("dmin", help="minimum achievable distortion")
    _add_channel_flags(d)
    _add_common_flags(d)
    d.add_argument("--method", choices=["auto", "general", "c1", "c2"],
                   default="auto")
    d.add_argument("--gaussian", help="closed form: example2 or example3")
    d.add_argument("--p1", type=float)
    d.add_argument("--s1", type=float)
    d.add_argument("--s2", type=float)
    d.set_defaults(fn=cmd_dmin)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=["inclusion", "estimator", "identities"])
    _add_channel_flags(v)
    _add_common_flags(v)
    v.add_argument("--fuzz", type=int, default=1000)
    v.set_defaults(fn=cmd_verify)

    e = sub.add_parser("estimator-dump", help="optimal estimator table as JSON")
    _add_channel_flags(e)
    _add_common_flags(e)
    e.add_argument("--conditioning", default="x,x1,y")
    e.add_argument("--out")
    e.set_defaults(fn=cmd_estimator_dump)

    s = sub.add_parser("simulate", help="Monte Carlo distortion check")
    _add_channel_flags(s)
    _add_common_flags(s)
    s.add_argument("--conditioning", default="x,x1,y")
    s.add_argument("--samples", type=int, default=1_000_000)
    s.add_argument("--batches", type=int, default=20)
    s.set_defaults(fn=cmd_simulate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
