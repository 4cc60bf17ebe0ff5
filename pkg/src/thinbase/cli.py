"""Command-line entry point: generate, verify, analyze, embed, selftest.

Exit codes: 0 success, 1 coverage failure, 2 invalid configuration,
3 construction hypotheses violated.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .analysis import ratio_report, thin1_check
from .constructions import CoverageError, EmbedSpec, HypothesisError, embed_polynomial
from .core import Interval, MonotoneSequence, SequenceFormatError, format_sequence, read_sequence
from .report import ConstructionSpec, VerificationReport, build, emit_report, jsonable
from .sumset import (
    DEFAULT_WINDOW_LIMIT,
    WindowLimitError,
    coverage_report,
    hfold_window,
    naive_hfold,
    save_bitmap,
)

EXIT_OK, EXIT_UNCOVERED, EXIT_CONFIG, EXIT_HYPOTHESIS = 0, 1, 2, 3
COMMANDS = ("generate", "verify", "analyze", "embed", "selftest")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    construction: Optional[ConstructionSpec] = None
    seq: Optional[str] = None
    order: Optional[int] = None
    window: Optional[int] = None
    target: Optional[Interval] = None
    out: Optional[str] = None
    fmt: str = "json"
    seed: int = 0
    burn_in: int = 1
    precision: int = 20
    gamma: Optional[Fraction] = None
    cases: int = 100
    bitmap_out: Optional[str] = None
    window_limit: int = DEFAULT_WINDOW_LIMIT
    timing: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["construction"] = self.construction.to_dict() if self.construction else None
        d["target"] = [self.target.lo, self.target.top] if self.target else None
        d["gamma"] = str(self.gamma) if self.gamma is not None else None
        d["format"] = d.pop("fmt")
        for key in ("timing", "window_limit"):
            d.pop(key)
        return d


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thinbase", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--construction", help="construction name, e.g. raikov_stohr")
    parser.add_argument("--params", help="construction parameters as a JSON object")
    parser.add_argument("--spec", help='JSON file {"construction": name, "params": {...}}')
    parser.add_argument("--order", type=int, help="sumset order h")
    parser.add_argument("--window", type=int, help="window top N of the sumset computation")
    parser.add_argument("--target", help="target interval lo:hi (inclusive)")
    parser.add_argument("--seq", help="read the sequence from this file instead of a construction")
    parser.add_argument("--out", help="output file (stdout when omitted)")
    parser.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--burn-in", type=int, default=1)
    parser.add_argument("--precision", type=int, default=20, help="decimal places for root ratios")
    parser.add_argument("--gamma", help="embedding constant as a rational, e.g. 1/8")
    parser.add_argument("--cases", type=int, default=100, help="selftest case count")
    parser.add_argument("--bitmap-out", help="cache the sumset bitmap here (verify)")
    parser.add_argument("--window-limit", type=int, default=DEFAULT_WINDOW_LIMIT)
    parser.add_argument("--timing", action="store_true", help="add wall-clock timings to the report")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    spec = None
    try:
        if args.spec:
            if args.construction or args.params:
                raise ConfigError("--spec excludes --construction/--params")
            spec = ConstructionSpec.from_json(Path(args.spec).read_text())
        elif args.construction:
            params = json.loads(args.params) if args.params else {}
            spec = ConstructionSpec(args.construction, params)
        elif args.params:
            raise ConfigError("--params needs --construction")
        target = Interval.parse(args.target) if args.target else None
        gamma = Fraction(args.gamma) if args.gamma else None
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    fmt = args.fmt or ("csv" if args.command == "analyze" else "json")
    cfg = RunConfig(
        command=args.command,
        construction=spec,
        seq=args.seq,
        order=args.order,
        window=args.window,
        target=target,
        out=args.out,
        fmt=fmt,
        seed=args.seed,
        burn_in=args.burn_in,
        precision=args.precision,
        gamma=gamma,
        cases=args.cases,
        bitmap_out=args.bitmap_out,
        window_limit=args.window_limit,
        timing=args.timing,
    )
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.command != "selftest" and (cfg.construction is None) == (cfg.seq is None):
        raise ConfigError("give exactly one of --construction/--spec or --seq")
    if cfg.order is None and cfg.construction is not None:
        cfg.order = cfg.construction.order
    if cfg.command in ("verify", "analyze", "embed") and cfg.order is None:
        raise ConfigError("--order is required for this input")
    if cfg.order is not None and cfg.order < 1:
        raise ConfigError("--order must be positive")
    if cfg.command == "verify":
        if cfg.window is None and cfg.target is None:
            raise ConfigError("verify needs --window or --target")
        if cfg.window is None:
            cfg.window = cfg.target.top
        if cfg.target is None:
            cfg.target = Interval(0, cfg.window)
        if cfg.window < 0 or cfg.window + 1 > cfg.window_limit:
            raise ConfigError(f"window {cfg.window} outside kernel limit {cfg.window_limit}")
        if cfg.target.top > cfg.window:
            raise ConfigError(f"target {cfg.target} exceeds window [0,{cfg.window}]")
    if cfg.command == "embed":
        if cfg.gamma is None or cfg.gamma <= 0:
            raise ConfigError("embed needs a positive --gamma")
        if cfg.order < 2:
            raise ConfigError("embed needs --order >= 2")
    if cfg.cases < 0:
        raise ConfigError("--cases must be nonnegative")


def load_sequence(cfg: RunConfig) -> tuple[MonotoneSequence, dict]:
    if cfg.seq is not None:
        return read_sequence(cfg.seq), {}
    built = build(cfg.construction)
    return built.sequence, built.meta


def _write(cfg: RunConfig, data: bytes) -> None:
    if cfg.out:
        Path(cfg.out).write_bytes(data)
    else:
        try:
            sys.stdout.write(data.decode("ascii"))
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); drop the rest quietly
            devnull = os.open(os.devnull, os.O_WRONLY)
            os.dup2(devnull, sys.stdout.fileno())


def cmd_generate(cfg: RunConfig) -> int:
    seq, _ = load_sequence(cfg)
    _write(cfg, format_sequence(seq).encode("ascii"))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    seq, meta = load_sequence(cfg)
    t1 = time.perf_counter()
    bm = hfold_window(seq, cfg.order, cfg.window, limit=cfg.window_limit)
    t2 = time.perf_counter()
    cov = coverage_report(bm, cfg.target)
    if cfg.bitmap_out:
        save_bitmap(bm, cfg.bitmap_out)
    report = VerificationReport(
        config=cfg.to_dict(),
        construction=cfg.construction.to_dict() if cfg.construction else None,
        construction_meta=meta,
        coverage=cov.to_dict(),
    )
    if cfg.order >= 2 and any(a > 0 for a in seq):
        report.metrics = ratio_report(seq, cfg.order, precision=cfg.precision).summary(cfg.burn_in)
        report.metrics["label"] = "finite-prefix estimates"
    if cov.covered and cfg.order >= 2:
        ok, witness = thin1_check(seq, cfg.order, cfg.target.lo, cfg.target.top)
        report.checks["thin1"] = {"n0": cfg.target.lo, "N": cfg.target.top, "holds": ok, "first_violation": witness}
    if cfg.timing:
        report.timing = {
            "construction_s": round(t1 - t0, 6),
            "sumset_s": round(t2 - t1, 6),
            "total_s": round(time.perf_counter() - t0, 6),
        }
    _write(cfg, emit_report(report, cfg.fmt))
    if not cov.covered:
        listing = ", ".join(f"[{lo},{hi}]" for lo, hi in cov.gaps[:20])
        more = f" (+{cov.gap_count - 20} more)" if cov.gap_count > 20 else ""
        print(f"not covered: {cov.gap_count} gap(s): {listing}{more}", file=sys.stderr)
        return EXIT_UNCOVERED
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    seq, meta = load_sequence(cfg)
    metrics = ratio_report(seq, max(cfg.order, 2), precision=cfg.precision)
    summary = metrics.summary(cfg.burn_in)
    summary["label"] = "finite-prefix estimates"
    report = VerificationReport(
        config=cfg.to_dict(),
        construction=cfg.construction.to_dict() if cfg.construction else None,
        construction_meta=meta,
        metrics=summary,
        growth=metrics,
    )
    _write(cfg, emit_report(report, cfg.fmt))
    return EXIT_OK


def cmd_embed(cfg: RunConfig) -> int:
    seq, _ = load_sequence(cfg)
    res = embed_polynomial(EmbedSpec(cfg.order, cfg.gamma, seq, cfg.burn_in))
    _write(cfg, format_sequence(res.C).encode("ascii"))
    sidecar = {
        "schema": "thinbase_embed_v1",
        "h": cfg.order,
        "gamma": cfg.gamma,
        "K": res.K,
        "L": res.L,
        "b_K": res.grid[res.K - 1],
        "burn_in": cfg.burn_in,
        "source": cfg.construction.to_dict() if cfg.construction else {"file": cfg.seq},
        "source_length": len(seq),
        "output_length": len(res.C),
        "K_note": "prefix-scan estimate; valid only for the supplied prefix",
    }
    text = json.dumps(jsonable(sidecar), sort_keys=True, indent=2) + "\n"
    if cfg.out:
        Path(cfg.out + ".json").write_text(text)
    else:
        sys.stderr.write(text)
    return EXIT_OK


def selftest(seed: int = 0, cases: int = 100) -> list[tuple[list[int], int, int]]:
    """Random oracle-equivalence cases; returns the ones that disagree."""
    rng = random.Random(seed)
    failures = []
    for _ in range(cases):
        A = sorted(rng.sample(range(201), rng.randint(0, 12)))
        h = rng.randint(1, 4)
        N = rng.randint(0, 200)
        if hfold_window(A, h, N) != naive_hfold(A, h, N):
            failures.append((A, h, N))
    return failures


def cmd_selftest(cfg: RunConfig) -> int:
    failures = selftest(cfg.seed, cfg.cases)
    for A, h, N in failures:
        print(f"MISMATCH A={A} h={h} N={N}")
    print(f"selftest seed={cfg.seed}: {cfg.cases - len(failures)}/{cfg.cases} cases agree")
    return EXIT_OK if not failures else EXIT_UNCOVERED


HANDLERS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "analyze": cmd_analyze,
    "embed": cmd_embed,
    "selftest": cmd_selftest,
}


def run(cfg: RunConfig) -> int:
    try:
        return HANDLERS[cfg.command](cfg)
    except (HypothesisError, CoverageError) as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ConfigError, WindowLimitError, SequenceFormatError, OSError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg)
    except ValueError as exc:
        # bad construction parameters surface here
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
