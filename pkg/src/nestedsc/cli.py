"""Command-line front end: construct, count, optimize, lift, simulate and a config-driven pipeline.

Exit codes: 0 success, 1 runtime failure (including a failed ``--check``),
2 usage error (bad flags, invalid configuration, missing input files).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .abmatrix import ABMatrixSpec, is_prime
from .alc import alc_total
from .census import CONVENTIONS, VN_INCIDENCE, sc_report
from .channel import ChannelConfig, DecoderConfig, ber_sweep, flood_decoder, results_csv, sliding_decoder
from .coupling import SCCodeSpec, SpreadingMatrix
from .gf2 import rank_gf2
from .lifting import lift_nested_family
from .optimizer import NestedPlan, PipelineResult, run_plan


class UsageError(Exception):
    """Invalid flags, configuration or input files (exit code 2)."""


@dataclass(frozen=True)
class PipelineConfig:
    gamma: int
    p: int
    m: int
    L: int
    subcodes: tuple[tuple[int, ...], ...] = ()
    method: int = 1
    order: tuple[int, ...] = ()
    J: int = 0
    lmax: int = 10_000
    lift_budget: int = 100_000
    seed: int = 0
    snr: tuple[float, ...] = ()
    min_errors: int = 100
    max_frames: int = 10_000
    out: str = "out"

    def __post_init__(self):
        object.__setattr__(self, "subcodes", tuple(tuple(int(q) for q in s) for s in self.subcodes))
        object.__setattr__(self, "order", tuple(int(t) for t in self.order))
        object.__setattr__(self, "snr", tuple(float(x) for x in self.snr))
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if not 3 <= self.gamma <= self.p:
            raise ValueError(f"gamma must lie in 3..p, got {self.gamma}")
        if self.m < 1:
            raise ValueError("memory m must be >= 1")
        if self.L <= self.m + 1:
            raise ValueError(f"coupling length L={self.L} must exceed m+1={self.m + 1}")
        for s in self.subcodes:
            if any(not 0 <= q < self.gamma for q in s):
                raise ValueError(f"row groups of {s} must lie in 0..{self.gamma - 1}")
        if self.J < 0:
            raise ValueError("J must be >= 0 (0 disables the lift)")

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        obj = json.loads(text)
        if not isinstance(obj, dict) or not obj:
            raise ValueError("empty configuration")
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown configuration keys {sorted(unknown)}")
        return cls(**obj)

    def plan(self) -> NestedPlan:
        return NestedPlan(self.gamma, self.p, self.m, self.subcodes, self.order, self.method, self.lmax, self.seed, L=self.L)


# ----------------------------------------------------------------------------
# file helpers


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def write_spec(spec: SCCodeSpec, path: Path) -> str:
    text = _dump(spec.to_json_obj())
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return _sha(text)


def read_spec(path: str | Path) -> SCCodeSpec:
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"missing input file {path}")
    try:
        return SCCodeSpec.from_json(path.read_text())
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"invalid spec file {path}: {e}") from e


def code_name(i: int) -> str:
    return "global" if i == 0 else f"sub{i}"


def write_family(specs: Sequence[SCCodeSpec], out: Path) -> Path:
    """One spec file per code plus ``manifest.json`` with per-file and per-row checksums."""
    out.mkdir(parents=True, exist_ok=True)
    entries, rows = [], {}
    for i, s in enumerate(specs):
        name = code_name(i)
        digest = write_spec(s, out / f"{name}.json")
        entries.append({"name": name, "file": f"{name}.json", "row_groups": list(s.base.row_groups), "sha256": digest})
        for k, q in enumerate(s.base.row_groups):
            row = {"B": s.spreading.entries[k].tolist()}
            if s.lift is not None:
                row["shifts"] = np.asarray(s.lift.shifts[q]).tolist()
            digest = _sha(_dump(row))
            if str(q) in rows and rows[str(q)] != digest:
                raise RuntimeError(f"row group {q} differs between nested codes")
            rows[str(q)] = digest
    path = out / "manifest.json"
    path.write_text(_dump({"codes": entries, "rows": rows}))
    return path


def read_family(manifest: str | Path) -> list[SCCodeSpec]:
    manifest = Path(manifest)
    if not manifest.is_file():
        raise UsageError(f"missing manifest {manifest}")
    obj = json.loads(manifest.read_text())
    specs = []
    for e in obj["codes"]:
        f = manifest.parent / e["file"]
        spec = read_spec(f)
        if _sha(f.read_text()) != e["sha256"]:
            raise UsageError(f"checksum mismatch for {f}")
        specs.append(spec)
    return specs


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as e:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from e


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as e:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from e


def _subcodes(text: Optional[str]) -> tuple[tuple[int, ...], ...]:
    return tuple(_ints(s) for s in text.split(";")) if text else ()


def _matrix(text: str) -> np.ndarray:
    return np.array([_ints(r) for r in text.split(";")], np.int64)


# ----------------------------------------------------------------------------
# subcommands


def cmd_construct(args) -> int:
    rows = _ints(args.rows) if args.rows else tuple(range(args.gamma))
    base = ABMatrixSpec(args.gamma, args.p, rows)
    if args.spreading:
        b = SpreadingMatrix(_matrix(args.spreading), args.m)
    elif args.m == 0:
        b = SpreadingMatrix(np.zeros((base.omega, base.p), np.int64), 0)
    else:
        b = SpreadingMatrix.random(base.omega, base.p, args.m, np.random.default_rng(args.seed))
    L = args.L if args.L else args.m + 1
    spec = SCCodeSpec(base, b, L)
    write_spec(spec, Path(args.out))
    r, c = spec.grid().shape
    print(f"wrote {args.out}: rows {rows}, m={args.m}, L={L}, matrix {r}x{c}")
    return 0


def cmd_count(args) -> int:
    if args.check and args.method != "both":
        raise UsageError("--check needs --method both")
    spec = read_spec(args.spec)
    if args.L:
        spec = spec.with_L(args.L)
    out = {}
    if args.method in ("alc", "both"):
        out["alc"] = alc_total(spec, convention=args.convention).as_dict()
    if args.method in ("oracle", "both"):
        out["oracle"] = sc_report(spec, args.convention).as_dict()
    agree = None
    if args.method == "both":
        agree = out["alc"]["total_cycles"] == out["oracle"]["total_cycles"] and out["alc"]["per_block_span"] == out["oracle"]["per_block_span"]
        out["agree"] = agree
    print(_dump(out), end="")
    if args.check and not agree:
        print("ALC and oracle disagree", file=sys.stderr)
        return 1
    return 0


def _write_trace(result: PipelineResult, path: Path) -> None:
    with path.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["step", "rows", "iteration", "rho"])
        for n, (rows, res) in enumerate(result.steps):
            label = "-".join(str(q) for q in rows)
            for i, rho in enumerate(res.trace):
                w.writerow([n, label, i, rho])


def _summary(specs: Sequence[SCCodeSpec]) -> list[dict]:
    out = []
    for i, s in enumerate(specs):
        rep = alc_total(s)
        out.append({"name": code_name(i), "row_groups": list(s.base.row_groups), "mu": list(rep.per_block_span),
                    "A_cycles": str(rep.average("cycles")), "A_vn_incidence": str(rep.average(VN_INCIDENCE))})
    return out


def cmd_optimize(args) -> int:
    plan = NestedPlan(args.gamma, args.p, args.m, _subcodes(args.subcodes), _ints(args.order) if args.order else (),
                      args.method, args.lmax, args.seed, args.objective, args.L or 0)
    result = run_plan(plan)
    out = Path(args.out)
    write_family(result.codes, out)
    _write_trace(result, out / "rho_trace.csv")
    print(_dump({"codes": _summary(result.codes), "steps": [
        {"rows": list(r), "rho": res.rho, "iterations": res.iterations, "reason": res.reason} for r, res in result.steps]}), end="")
    return 0


def cmd_lift(args) -> int:
    if args.manifest:
        specs = read_family(args.manifest)
    elif args.spec:
        specs = [read_spec(args.spec)]
    else:
        raise UsageError("lift needs --spec or --manifest")
    results = lift_nested_family(specs, args.J, args.budget, args.seed)
    lifted = [s.with_lift(r.assignment) for s, r in zip(specs, results)]
    out = Path(args.out)
    if args.manifest:
        write_family(lifted, out)
    else:
        write_spec(lifted[0], out)
    print(_dump([{"row_groups": list(s.base.row_groups), "residual": r.residual, "evaluations": r.evaluations,
                  "reason": r.reason} for s, r in zip(specs, results)]), end="")
    return 0


def cmd_simulate(args) -> int:
    spec = read_spec(args.spec)
    if args.L:
        spec = spec.with_L(args.L)
    h = spec.matrix()
    rate = 1 - rank_gf2(h) / h.cols
    cfg = DecoderConfig(max_iterations=args.iters, window_symbols=args.window, syndrome_stop=True, window_stop=args.early_stop)
    if spec.m == 0:
        decode = flood_decoder(h, cfg)
    else:
        decode = sliding_decoder(spec, cfg).decode
    channel = ChannelConfig(_floats(args.snr), rate, args.seed, args.max_frames, 0, args.min_errors)
    text = results_csv(ber_sweep(decode, h.cols, channel))
    if args.out:
        Path(args.out).write_text(text)
    print(f"# n={h.cols} rate={rate:.6f}")
    print(text, end="")
    return 0


def cmd_pipeline(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        raise UsageError(f"missing config file {path}")
    try:
        cfg = PipelineConfig.from_json(path.read_text())
    except (ValueError, TypeError) as e:
        raise UsageError(f"invalid config: {e}") from e
    out = Path(cfg.out)
    result = run_plan(cfg.plan())
    specs = list(result.codes)
    out.mkdir(parents=True, exist_ok=True)
    _write_trace(result, out / "rho_trace.csv")
    report = {"config": asdict(cfg), "codes": _summary(specs)}
    if cfg.J:
        lifts = lift_nested_family(specs, cfg.J, cfg.lift_budget, cfg.seed)
        specs = [s.with_lift(r.assignment) for s, r in zip(specs, lifts)]
        report["lift_residuals"] = [r.residual for r in lifts]
    write_family(specs, out)
    if cfg.snr:
        for i, s in enumerate(specs):
            h = s.matrix()
            rate = 1 - rank_gf2(h) / h.cols
            channel = ChannelConfig(cfg.snr, rate, cfg.seed, cfg.max_frames, 0, cfg.min_errors)
            pts = ber_sweep(sliding_decoder(s, DecoderConfig(window_stop=True)).decode, h.cols, channel)
            (out / f"{code_name(i)}_ber.csv").write_text(results_csv(pts))
    (out / "report.json").write_text(_dump(report))
    print(_dump(report), end="")
    return 0


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nestedsc", description="Nested array-based spatially coupled LDPC codes.")
    sub = ap.add_subparsers(dest="command")

    c = sub.add_parser("construct", help="write a spec file")
    c.add_argument("--gamma", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--rows", help="row groups, e.g. 0,1,2,3 (default: all)")
    c.add_argument("--m", type=int, default=0, help="memory (0: uncoupled block code)")
    c.add_argument("--L", type=int, default=0, help="coupling length (default m+1)")
    c.add_argument("--spreading", help="spreading matrix rows separated by ';' (default: random)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("count", help="6-cycle census of a spec")
    c.add_argument("--spec", required=True)
    c.add_argument("--method", choices=("alc", "oracle", "both"), default="alc")
    c.add_argument("--check", action="store_true", help="exit 1 unless ALC and oracle agree")
    c.add_argument("--convention", choices=CONVENTIONS, default=VN_INCIDENCE)
    c.add_argument("--L", type=int, default=0, help="override the coupling length")
    c.set_defaults(func=cmd_count)

    c = sub.add_parser("optimize", help="optimise spreading matrices of a nested family")
    c.add_argument("--gamma", type=int, default=3)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--m", type=int, default=2)
    c.add_argument("--subcodes", help="row-group sets separated by ';', e.g. 0,1,2,3;0,1,2,3,4")
    c.add_argument("--method", type=int, choices=(1, 2), default=1)
    c.add_argument("--order", help="sub-code order, e.g. 2,1")
    c.add_argument("--lmax", type=int, default=10_000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--objective", choices=("full", "cover"), default="full")
    c.add_argument("--L", type=int, default=0)
    c.add_argument("--out", required=True, help="output directory")
    c.set_defaults(func=cmd_optimize)

    c = sub.add_parser("lift", help="search terminal-lift shifts")
    c.add_argument("--spec")
    c.add_argument("--manifest")
    c.add_argument("--J", type=int, required=True)
    c.add_argument("--budget", type=int, default=100_000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True, help="output file (--spec) or directory (--manifest)")
    c.set_defaults(func=cmd_lift)

    c = sub.add_parser("simulate", help="BPSK/AWGN BER sweep")
    c.add_argument("--spec", required=True)
    c.add_argument("--snr", required=True, help="Eb/N0 points in dB, e.g. 1.5,2,2.5")
    c.add_argument("--min-errors", type=int, default=100, help="frame errors per point")
    c.add_argument("--max-frames", type=int, default=10_000)
    c.add_argument("--window", type=int, help="window length in symbols (default 4 nu')")
    c.add_argument("--iters", type=int, default=50)
    c.add_argument("--early-stop", action="store_true", help="stop a window once its target checks hold")
    c.add_argument("--L", type=int, default=0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", help="CSV output path")
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("pipeline", help="optimise, lift and simulate from a JSON config")
    c.add_argument("--config", required=True)
    c.set_defaults(func=cmd_pipeline)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        ap.print_usage(sys.stderr)
        print("nestedsc: error: a subcommand is required", file=sys.stderr)
        return 2
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command is None:
        ap.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as e:
        print(f"nestedsc: error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"nestedsc: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - reported as a runtime failure
        print(f"nestedsc: failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
