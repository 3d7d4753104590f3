"""Command-line front end.

    rndiff differentiate NU.json MU.json --out DIR
    rndiff decompose NU.json MU.json --out DIR
    rndiff diagnose DIR/trace.json

Exit codes: 0 success, 2 invalid input, 3 engine failure, 4 monotonicity
violation found by ``diagnose``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .decomposition import DEFAULT_SINGULAR_THRESHOLD, classify_cells, decompose_partition
from .engine import EngineConfig, EngineOutput, RefinementTrace, run, verify_trace
from .exceptions import (
    ConfigError,
    DomainError,
    InvalidMeasure,
    MonotonicityViolation,
    RNDiffError,
    TraceError,
)
from .intervals import format_rational
from .measures import Measure, mass
from .partitions import Partition
from .simple_functions import conditional_expectation, f_pi, l1_distance, level_set, tail_integral
from .spec_io import load_measure, measure_to_json, parse_measure

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_ENGINE, EXIT_MONOTONE = 0, 2, 3, 4


class _Invalid(Exception):
    """Bad command-line input that is not a library validation error."""


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _add_engine_flags(p: argparse.ArgumentParser):
    p.add_argument("nu", help="measure spec (JSON) of the measure to differentiate")
    p.add_argument("mu", help="measure spec (JSON) of the reference measure")
    p.add_argument("--max-rounds", type=_positive_int, default=30)
    p.add_argument("--gain-tol", type=float, default=1e-12)
    p.add_argument("--split-mode", choices=("best", "all"), default="best")
    p.add_argument("--singular-threshold", type=_rational, default=DEFAULT_SINGULAR_THRESHOLD,
                   help="cells with nu/(mu+nu) >= 1 - threshold count as singular (rational, e.g. 1/1000000)")
    p.add_argument("--checkpoint-stride", type=_positive_int, default=1, help="store partitions every k rounds in trace.json")
    p.add_argument("--local-levels", type=_positive_int, default=3)
    p.add_argument("--max-cells", type=_positive_int, default=4096)
    p.add_argument("--out", type=Path, default=Path("."), help="output directory (created if missing)")
    p.add_argument("--timing", action="store_true", help="fill the seconds column of trace.csv")
    p.add_argument("--oracle", help="spec of the absolutely continuous part of nu, for error reporting")
    p.add_argument("--emit-plot-data", action="store_true", help="write plot.csv with round, a_n, l1_error_vs_oracle")
    p.add_argument("--seed", type=int, default=0, help="recorded in the manifest for randomized suites")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rndiff", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_engine_flags(sub.add_parser("differentiate", help="approximate dnu^a/dmu; writes density.json and traces"))
    _add_engine_flags(sub.add_parser("decompose", help="Lebesgue decomposition; writes decomposition.json and traces"))
    d = sub.add_parser("diagnose", help="re-check a trace file (trace.json or trace.csv)")
    d.add_argument("trace", type=Path)
    d.add_argument("--slack", type=float, default=1e-12)
    return parser


def _config(args) -> EngineConfig:
    if not (0 <= args.singular_threshold < 1):
        raise ConfigError(f"--singular-threshold must lie in [0, 1), got {args.singular_threshold}")
    return EngineConfig(
        max_rounds=args.max_rounds,
        gain_tolerance=args.gain_tol,
        split_mode=args.split_mode,
        local_levels=args.local_levels,
        max_cells=args.max_cells,
        checkpoint_stride=args.checkpoint_stride,
    )


def _config_json(cfg: EngineConfig, args) -> dict:
    return {
        "max_rounds": cfg.max_rounds,
        "gain_tolerance": cfg.gain_tolerance,
        "split_mode": cfg.split_mode,
        "local_levels": cfg.local_levels,
        "max_cells": cfg.max_cells,
        "checkpoint_stride": cfg.checkpoint_stride,
        "cantor_tolerance": format_rational(cfg.cantor_tolerance),
        "singular_threshold": format_rational(args.singular_threshold),
    }


def _load(path: str, name: str) -> Measure:
    p = Path(path)
    if not p.is_file():
        raise _Invalid(f"{name}: no such file {path}")
    return load_measure(p)


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _trace_json(out: EngineOutput, specs: dict, config: dict) -> dict:
    doc = out.trace.to_json()
    for r in doc["rounds"]:
        r.pop("seconds", None)
    doc.update(specs)
    doc["config"] = config
    doc["terminated_by"] = out.terminated_by
    doc["checkpoints"] = [
        {"round": r, "partition": pi.to_json(), "f_gamma": f_pi(out.nu, out.gamma, pi).to_json()} for r, pi in out.history
    ]
    return doc


def _oracle_errors(out: EngineOutput, oracle: Measure, tau) -> list[tuple[int, float, float]]:
    """(round, a_n, ‖density_n - E[oracle density | π_n]‖_{L¹(μ)}) per checkpoint."""
    a_by_round = {r.round: r.a for r in out.trace.rounds}
    rows = []
    for r, pi in out.history:
        density, _, _ = classify_cells(out.nu, out.mu, pi, tau)
        projected = f_pi(oracle, out.mu, pi)
        rows.append((r, a_by_round[r], float(l1_distance(density, projected, out.mu))))
    return rows


def _run_engine(args, kind: str) -> int:
    cfg = _config(args)
    nu, mu = _load(args.nu, "nu"), _load(args.mu, "mu")
    oracle = _load(args.oracle, "oracle") if args.oracle else None
    if args.emit_plot_data and oracle is None:
        raise _Invalid("--emit-plot-data needs --oracle")
    args.out.mkdir(parents=True, exist_ok=True)
    log.info("running %s for %d rounds (%s mode)", kind, cfg.max_rounds, cfg.split_mode)
    out = run(nu, mu, cfg)
    dec = decompose_partition(nu, mu, out, args.singular_threshold)
    specs = {"nu": measure_to_json(nu), "mu": measure_to_json(mu)}
    config = _config_json(cfg, args)

    written = []
    if kind == "differentiate":
        _write_json(args.out / "density.json", {"density": dec.density.to_json(), "terminated_by": out.terminated_by})
        written.append("density.json")
    else:
        _write_json(args.out / "decomposition.json", dec.to_json() | {"trace": "trace.json"})
        written.append("decomposition.json")
    (args.out / "trace.csv").write_text(out.trace.to_csv(timing=args.timing))
    _write_json(args.out / "trace.json", _trace_json(out, specs, config))
    written += ["trace.csv", "trace.json"]

    summary = {"terminated_by": out.terminated_by, "rounds": out.trace.rounds[-1].round, "cells": len(out.final_partition), "a_n": out.a}
    if oracle is not None:
        rows = _oracle_errors(out, oracle, args.singular_threshold)
        summary["l1_error_vs_oracle"] = rows[-1][2]
        if args.emit_plot_data:
            with open(args.out / "plot.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["round", "a_n", "l1_error_vs_oracle"])
                w.writerows(rows)
            written.append("plot.csv")
    _write_json(
        args.out / "manifest.json",
        {
            "command": kind,
            "inputs": {"nu": str(Path(args.nu).resolve()), "mu": str(Path(args.mu).resolve()),
                       "oracle": str(Path(args.oracle).resolve()) if args.oracle else None},
            "config": config,
            "out": str(args.out.resolve()),
            "seed": args.seed,
            "outputs": written,
            "summary": summary,
        },
    )
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _load_trace(path: Path):
    if not path.is_file():
        raise _Invalid(f"no such trace file {path}")
    text = path.read_text()
    if path.suffix == ".csv":
        return RefinementTrace.from_csv(text), None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise TraceError("trace JSON must be an object")
    return RefinementTrace.from_json(doc), doc


def _checkpoint_checks(doc: dict) -> dict:
    """Exact re-checks on stored checkpoints: martingale chain and tail identity."""
    nu, mu = parse_measure(doc["nu"]), parse_measure(doc["mu"])
    gamma = parse_measure({"sum": [doc["mu"], doc["nu"]]})
    parts = [(c["round"], Partition.from_json(c["partition"])) for c in doc.get("checkpoints", [])]
    chain_ok = ui_ok = True
    final_pi = parts[-1][1] if parts else None
    if final_pi is not None:
        f_final = f_pi(nu, gamma, final_pi)
        for _, pi in parts:
            if conditional_expectation(f_final, pi, gamma) != f_pi(nu, gamma, pi):
                chain_ok = False
        for _, pi in parts:
            f_mu = f_pi(nu, mu, pi)
            for k in sorted({v for v in f_mu.values if v > 0}):
                if tail_integral(f_mu, mu, k) != mass(nu, level_set(f_mu, k)).value:
                    ui_ok = False
    return {"checkpoints": len(parts), "martingale_chain": chain_ok, "tail_identity": ui_ok}


def _diagnose(args) -> int:
    trace, doc = _load_trace(args.trace)
    report = verify_trace(trace, slack=args.slack)
    summary = {
        "rounds": report.rounds,
        "monotone": report.monotone,
        "min_increment": report.min_increment,
        "jensen_bound_checked": report.jensen_checked,
        "zero_gain_rounds": report.zero_gain_rounds,
    }
    if doc is not None and "nu" in doc and "mu" in doc:
        summary.update(_checkpoint_checks(doc))
    print(json.dumps(summary, sort_keys=True))
    if summary.get("martingale_chain") is False or summary.get("tail_identity") is False:
        return EXIT_ENGINE
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "diagnose":
            return _diagnose(args)
        return _run_engine(args, args.command)
    except MonotonicityViolation as exc:
        print(f"monotonicity violation: {exc}", file=sys.stderr)
        return EXIT_MONOTONE
    except (InvalidMeasure, ConfigError, DomainError, TraceError, _Invalid) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RNDiffError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
